#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scem/engine.hpp"
#include "scem/outputs.hpp"
#include "scem/stochastic_analysis.hpp"

namespace scem {

struct MonteCarloOptions {
    int realizations = 500;
    std::uint64_t master_seed = 1;
    int workers = 1;
    bool identical_seeds = false;  ///< every realization reuses the master seed and nominal parameters
    bool keep_particles = false;   ///< retain particle lists at the analysis times
    std::function<void(int done, int total)> progress;
};

struct RealizationOutcome {
    std::uint64_t seed = 0;
    SampledParameters parameters;
    bool ok = false;
    std::string error;
    std::vector<CellVolumes> volumes;                  ///< per analysis time
    std::vector<std::vector<OilParticle>> particles;  ///< per analysis time, when kept
};

struct MonteCarloAggregate {
    std::vector<PresenceField> presence;  ///< per analysis time
    std::vector<double> varmax;           ///< Var_max after 1..S realizations
    std::vector<DriftPmf> pmf;            ///< mean over realizations with oil, per analysis time
    std::vector<int> pmf_realizations;
    std::vector<MeanCentre> centre;       ///< per analysis time
    int realizations = 0;
};

struct MonteCarloResult {
    std::vector<double> analysis_times;  ///< s since scenario start
    std::vector<RealizationOutcome> outcomes;
    int succeeded = 0;
    MonteCarloAggregate aggregate;
};

/// Analysis times of the scenario in seconds since start (end of run when none are set).
std::vector<double> analysis_offsets(const Scenario& scenario);

/// Engine parameters for one sampled realization.
RunParameters realization_parameters(const Scenario& scenario, const SampledParameters& sample, std::uint64_t seed);

/// Runs one realization up to the last analysis time.
RealizationOutcome run_realization(const std::shared_ptr<const Scenario>& scenario, std::uint64_t seed,
                                   const std::optional<SampledParameters>& sample,
                                   const std::vector<double>& analysis_times, bool keep_particles);

/// Realizations run on a worker pool; results are reduced in index order, so
/// the aggregate does not depend on the worker count.
MonteCarloResult run_monte_carlo(const std::shared_ptr<const Scenario>& scenario, const MonteCarloOptions& options);

/// volumes[n][k]: realization n at analysis time k.
MonteCarloAggregate aggregate_realizations(const std::vector<const std::vector<CellVolumes>*>& volumes,
                                           const Domain& domain, double zeta_p);

/// Presence, variance and PMF rasters per analysis time, the Var_max trace
/// and the mean centres.
void write_aggregate(OutputWriter& out, const Domain& domain, const std::vector<double>& epoch_times,
                     const MonteCarloAggregate& agg);

}  // namespace scem
