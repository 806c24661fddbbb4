#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scem/depth_profiles.hpp"
#include "scem/domain.hpp"
#include "scem/flow_solver.hpp"
#include "scem/oil_transport.hpp"
#include "scem/wave_model.hpp"

namespace scem {

using Json = nlohmann::ordered_json;

struct ForcingSpec {
    std::optional<Vec2> constant;   ///< uniform value, m/s
    std::filesystem::path file;     ///< gridded series (CSV stack or ESRI manifest)
    bool present() const { return constant.has_value() || !file.empty(); }
};

struct SensorSpec {
    double lon = 0.0;
    double lat = 0.0;
    Vec2 velocity;
    double half_width = 0.0;
};

struct SamplingBounds {
    double lo = 0.0;
    double hi = 0.0;
};

struct MonteCarloSpec {
    int realizations = 500;
    SamplingBounds alpha_w_o{0.005, 0.03};
    SamplingBounds alpha_c_o{0.9, 1.1};
    SamplingBounds c_smag{0.01, 0.3};
    SamplingBounds t0;            ///< UTC seconds
    SamplingBounds tf;            ///< UTC seconds
    SamplingBounds mass_tonnes{10.0, 2200.0};
    std::vector<double> analysis_times;  ///< UTC seconds; empty = end of run
    double zeta_p = 0.0;          ///< m^3
    double min_success = 0.9;
};

/// Fully validated scenario. Times are UTC seconds.
struct ScenarioConfig {
    std::string name;
    DomainSpec domain;
    bool n_crit_auto = true;  ///< fine layer count derived from the largest expected wave height
    std::optional<std::filesystem::path> bathymetry_file;
    double uniform_depth = 0.0;
    double output_interval = 3600.0;

    SolverParams solver;
    double nu_water = 1.0e-6;
    double nu_wind = 1.5e-5;
    BoundarySpec water_boundary;
    BoundarySpec wind_boundary;

    ForcingSpec wind;
    ForcingSpec current;
    SwellSpec swell;

    double max_wind = 40.0;
    double canopy_coefficient = 0.0;
    std::optional<std::filesystem::path> canopy_file;
    double ekman_period = 12.0 * 3600.0;

    ProfileParams profiles;
    double rho_water = 1025.0;
    double rho_air = 1.225;
    double temperature = 288.15;

    AdvectionCoefficients advection;
    double c_smag = 0.1;
    bool literal_smagorinsky = false;
    EntrainmentParams entrainment;

    OilProperties oil;
    std::int64_t particles = 3000;
    bool allow_low_particle_count = false;
    double beach_capacity = std::numeric_limits<double>::infinity();

    double source_lon = 0.0;
    double source_lat = 0.0;
    double source_start = 0.0;
    double source_end = 0.0;
    double source_volume = 0.0;  ///< m^3

    WaveGridParams waves;
    bool waves_everywhere = false;

    std::vector<SensorSpec> sensors;
    MonteCarloSpec monte_carlo;

    std::uint64_t seed = 1;
    int workers = 1;
    std::filesystem::path output_directory = "scem_output";
    bool dump_flow = false;
    bool write_snapshots = true;

    Json effective;  ///< the merged configuration tree, echoed to the run log
};

/// Default configuration tree; documents every key.
const Json& default_config();

/// Merges, validates and converts. base_dir resolves relative file paths.
ScenarioConfig parse_config(const Json& user, const std::filesystem::path& base_dir);
ScenarioConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Applies "dotted.key=value" overrides; the value is parsed as JSON when
/// possible and as a string otherwise. Unknown keys are rejected.
void apply_override(Json& tree, const std::string& assignment);

/// Config tree that reproduces the run when loaded again (run-only keys dropped).
Json echo_config(const ScenarioConfig& config);

/// One line per leaf key with its default, for --help.
std::string describe_config_keys();

}  // namespace scem
