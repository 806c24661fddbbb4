#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scem/config.hpp"
#include "scem/domain.hpp"
#include "scem/oil_transport.hpp"

namespace scem {

/// Oil volume per cell for one realization at one analysis time.
struct CellVolumes {
    Grid2<double> all;      ///< every non-escaped particle (surface, entrained, beached), m^3
    Grid2<double> surface;  ///< surface particles only, m^3
    double escaped = 0.0;   ///< m^3 that left the domain
};

/// Particles are binned by position; sums run in particle order.
CellVolumes cell_volumes(const std::vector<OilParticle>& particles, const Domain& domain);

/// Spatio-temporal cell: analysis-time index plus surface cell.
struct RegionCell {
    std::size_t time = 0;
    CellIndex cell;
};
using Region = std::vector<RegionCell>;

/// Every cell of the grid at every one of `times` analysis times.
Region full_region(int nx, int ny, std::size_t times);

/// 1 when any cell-time of the region holds more than zeta_p.
bool presence(const std::vector<Grid2<double>>& volumes_by_time, double zeta_p, const Region& region);

/// Mean presence over realizations; realizations[n][k] is the volume grid at time k.
double presence_probability(const std::vector<std::vector<Grid2<double>>>& realizations, double zeta_p,
                            const Region& region);

/// Per-cell presence probability and sample variance of the indicators.
struct PresenceField {
    Grid2<double> probability;
    Grid2<double> variance;
    int realizations = 0;
};

PresenceField presence_field(const std::vector<const Grid2<double>*>& volumes, double zeta_p);

/// Var_max after the first n realizations for n = 1..S (entry n-1; n = 1 gives 0).
/// volumes[n][k] is realization n at analysis time k; the max runs over all cells and times.
std::vector<double> varmax_trace(const std::vector<std::vector<const Grid2<double>*>>& volumes, double zeta_p);

/// Drops the first `skip` entries, smooths with a centred moving average
/// (window clipped at the ends) and checks for non-increase with slack `tolerance`.
bool decays_after_smoothing(const std::vector<double>& trace, int window, double tolerance, std::size_t skip = 1);
std::vector<double> moving_average(const std::vector<double>& trace, int window);

struct DriftPmf {
    Grid2<double> mass;  ///< fraction of the total volume per cell
    double escaped = 0.0;
};

/// Volume fraction per cell; throws ModelError on zero total volume.
DriftPmf drift_pmf(const CellVolumes& volumes);
DriftPmf mean_pmf(const std::vector<const DriftPmf*>& pmfs);

/// Centre of the largest surface-volume cell; ties go to the lowest (i, j).
std::optional<Vec2> spill_centre(const Grid2<double>& surface_volume, const Domain& domain);

struct MeanCentre {
    Vec2 position;  ///< local metres
    int used = 0;
    int excluded = 0;  ///< realizations without surface oil
};
MeanCentre mean_spill_centre(const std::vector<std::optional<Vec2>>& centres);

/// One draw of the realization parameters.
struct SampledParameters {
    double alpha_w_o = 0.0;
    double alpha_c_o = 0.0;
    double c_smag = 0.0;
    double t0 = 0.0;  ///< UTC s
    double tf = 0.0;  ///< UTC s
    double mass_tonnes = 0.0;
    int redraws = 0;  ///< leak windows discarded because t0 >= tf
};

/// Independent uniform draws; the leak window is redrawn until t0 < tf.
SampledParameters sample_parameters(const MonteCarloSpec& spec, std::uint64_t seed);

}  // namespace scem
