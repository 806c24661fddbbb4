#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scem/config.hpp"
#include "scem/domain.hpp"
#include "scem/flow_solver.hpp"
#include "scem/gridded_series.hpp"
#include "scem/oil_transport.hpp"
#include "scem/wind_model.hpp"

namespace scem {

/// Per-cell environment record.
struct CellState {
    double rho_water = 1025.0;
    double rho_air = 1.225;
    double temperature = 288.15;  ///< K, informational
    Vec2 wind_now;
    Vec2 ekman_wind;
    WaveSummary waves;
    double latitude = 0.0;
};

/// Immutable inputs shared by every realization of a scenario.
struct Scenario {
    ScenarioConfig config;
    Domain domain;
    Grid2<double> canopy;  ///< lambda_p per cell, empty when no canopy limits apply
    std::shared_ptr<const GriddedSeries> wind_series;
    std::shared_ptr<const GriddedSeries> current_series;
    std::vector<MeasurementConstraint> sensors;
    Vec2 source_xy;
    double duration = 0.0;  ///< s from start to end

    /// Reads bathymetry, canopy and forcing files named by the config.
    static std::shared_ptr<const Scenario> load(const ScenarioConfig& config);
};

/// Values that may differ between realizations of one scenario.
struct RunParameters {
    AdvectionCoefficients advection;
    double c_smag = 0.1;
    SpillSource source;  ///< local metres, seconds since scenario start
    std::uint64_t seed = 1;

    static RunParameters from(const Scenario& scenario);
};

enum class Phase : int {
    correct_states,
    ekman_update,
    save,
    correct_oil,
    timestep,
    profiles_waves,
    diffusion_coefficients,
    oil_velocity,
    correction_velocity,
    release,
    entrain,
    advect,
    thickness,
    spread,
    thickness_recompute,
    age,
    flow_step,
    advance_time,
    count_
};

inline constexpr int kPhaseCount = static_cast<int>(Phase::count_);
const char* to_string(Phase p);

struct SimulationState {
    double time = 0.0;  ///< s since scenario start
    std::int64_t step = 0;
    double last_dt = 0.0;
    VelocityField water;
    VelocityField wind;
    Grid2<double> water_correction_potential;  ///< first guesses for the forcing-correction projections
    Grid2<double> wind_correction_potential;
    EkmanWindState ekman;
    Grid2<CellState> cells;
    std::vector<OilParticle> particles;  ///< kept in id order
    std::uint64_t next_id = 0;
    BeachLedger beach;
    ThicknessMap thickness;
    double released_volume = 0.0;  ///< m^3, summed in id order
    std::uint64_t realization = 0;
};

/// Sum of every particle volume in id order; equals released_volume exactly.
double total_particle_volume(const SimulationState& s);

using TraceSink = std::function<void(std::int64_t step, double time, Phase phase)>;
using SnapshotSink = std::function<void(const SimulationState&)>;

class Engine {
public:
    Engine(std::shared_ptr<const Scenario> scenario, RunParameters params);

    const SimulationState& state() const { return state_; }
    const Scenario& scenario() const { return *scenario_; }
    const RunParameters& parameters() const { return params_; }

    void set_trace(TraceSink sink) { trace_ = std::move(sink); }
    /// Called with the committed state after every step.
    void set_step_hook(SnapshotSink hook) { step_hook_ = std::move(hook); }

    /// One full step; dt is clipped so the step ends no later than
    /// `limit` (s since start). On error the state is left untouched.
    void step_once(double limit);

    /// Steps until `until`, calling `snapshot` at t = 0, at every output
    /// time and at the end.
    void run(double until, const SnapshotSink& snapshot);

    /// Accumulated wall time per phase, seconds.
    const std::array<double, kPhaseCount>& phase_seconds() const { return phase_seconds_; }

private:
    void correct_states(SimulationState& s, double t) const;
    void mark(SimulationState& s, Phase p);

    std::shared_ptr<const Scenario> scenario_;
    RunParameters params_;
    SimulationState state_;
    SpeedLimits wind_limits_;
    BoundarySpec water_boundary_;
    BoundarySpec wind_boundary_;
    TraceSink trace_;
    SnapshotSink step_hook_;
    std::array<double, kPhaseCount> phase_seconds_{};
    std::chrono::steady_clock::time_point phase_start_;
    Phase current_phase_ = Phase::correct_states;
};

}  // namespace scem
