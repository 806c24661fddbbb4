#include "scem/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "scem/ascii_grid.hpp"
#include "scem/counter_rng.hpp"
#include "scem/depth_profiles.hpp"
#include "scem/wave_model.hpp"

namespace scem {

namespace {

// Counter slots of the per-particle random draws within one step.
constexpr std::uint64_t kSlotXi = 0;
constexpr std::uint64_t kSlotPhi = 1;
constexpr std::uint64_t kSlotZeta = 2;
constexpr std::uint64_t kSlotEntrain = 3;
constexpr std::uint64_t kSlotIntrusion = 4;
constexpr std::uint64_t kSlotSpreadQ = 5;
constexpr std::uint64_t kSlotSpreadR = 6;

Grid2<double> read_cell_raster(const std::filesystem::path& path, const DomainSpec& spec, const char* what) {
    AsciiGrid g = read_ascii_grid(path);
    if (g.ncols() != spec.nx || g.nrows() != spec.ny)
        throw ConfigError(std::string(what) + " raster '" + path.string() + "' is " + std::to_string(g.ncols()) +
                          "x" + std::to_string(g.nrows()) + ", domain is " + std::to_string(spec.nx) + "x" +
                          std::to_string(spec.ny));
    for (double& v : g.data.data())
        if (v == g.nodata) v = 0.0;
    return g.data;
}

std::shared_ptr<const GriddedSeries> forcing_series(const ForcingSpec& f, const char* variable) {
    if (f.constant) return std::make_shared<GriddedSeries>(GriddedSeries::constant(variable, "m/s", *f.constant));
    if (!f.file.empty()) return std::make_shared<GriddedSeries>(load_gridded_series(f.file));
    return nullptr;
}

// Faces take the mean of the neighbouring centre values; edge faces copy the one neighbour.
void centres_to_faces(VelocityField& f, const Grid2<Vec2>& c) {
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i <= f.nx; ++i) {
            const int a = std::max(i - 1, 0);
            const int b = std::min(i, f.nx - 1);
            f.u(i, j) = 0.5 * (c(a, j).x + c(b, j).x);
        }
    for (int j = 0; j <= f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
            const int a = std::max(j - 1, 0);
            const int b = std::min(j, f.ny - 1);
            f.v(i, j) = 0.5 * (c(i, a).y + c(i, b).y);
        }
}

Grid2<Vec2> centre_field(const VelocityField& f) {
    Grid2<Vec2> out(f.nx, f.ny);
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) out(i, j) = f.centre_velocity(i, j);
    return out;
}

}  // namespace

const char* to_string(Phase p) {
    switch (p) {
        case Phase::correct_states: return "correct_states";
        case Phase::ekman_update: return "ekman_update";
        case Phase::save: return "save";
        case Phase::correct_oil: return "correct_oil";
        case Phase::timestep: return "timestep";
        case Phase::profiles_waves: return "profiles_waves";
        case Phase::diffusion_coefficients: return "diffusion_coefficients";
        case Phase::oil_velocity: return "oil_velocity";
        case Phase::correction_velocity: return "correction_velocity";
        case Phase::release: return "release";
        case Phase::entrain: return "entrain";
        case Phase::advect: return "advect";
        case Phase::thickness: return "thickness";
        case Phase::spread: return "spread";
        case Phase::thickness_recompute: return "thickness_recompute";
        case Phase::age: return "age";
        case Phase::flow_step: return "flow_step";
        case Phase::advance_time: return "advance_time";
        case Phase::count_: break;
    }
    return "unknown";
}

std::shared_ptr<const Scenario> Scenario::load(const ScenarioConfig& config) {
    auto sc = std::make_shared<Scenario>();
    sc->config = config;
    DomainSpec spec = config.domain;

    Grid2<double> bathy = config.bathymetry_file ? read_cell_raster(*config.bathymetry_file, spec, "bathymetry")
                                                 : Grid2<double>(spec.nx, spec.ny, config.uniform_depth);

    sc->wind_series = forcing_series(config.wind, "wind");
    sc->current_series = forcing_series(config.current, "current");

    if (config.n_crit_auto) {
        // Fine layers reach the deepest wave intrusion, 1.7 Hs, for the strongest expected sea.
        double wind_max = sc->wind_series ? std::min(sc->wind_series->max_magnitude(), config.max_wind) : 0.0;
        const double hs_max = std::max(config.swell.height, 0.2093 * wind_max * wind_max / kGravity);
        spec.n_crit = static_cast<int>(std::ceil(1.7 * hs_max / spec.fine_step - 1e-9));
        double shallowest = std::numeric_limits<double>::infinity();
        for (double z : bathy.data())
            if (z > 0.0) shallowest = std::min(shallowest, z);
        if (std::isfinite(shallowest) && spec.n_crit * spec.fine_step > shallowest) {
            const int clamped = static_cast<int>(std::floor(shallowest / spec.fine_step - 1e-9));
            spdlog::warn("fine depth mesh for Hs_max = {:.2f} m needs {} layers; clamped to {} by the {:.2f} m "
                         "shallowest cell",
                         hs_max, spec.n_crit, clamped, shallowest);
            spec.n_crit = std::max(clamped, 0);
        }
    }
    sc->domain = Domain::build(spec, bathy);
    const Domain& dom = sc->domain;

    if (config.canopy_file) {
        sc->canopy = read_cell_raster(*config.canopy_file, spec, "canopy");
        for (double v : sc->canopy.data())
            if (v < 0.0 || v > 1.0) throw ConfigError("canopy raster values must lie in [0, 1]");
    } else if (config.canopy_coefficient > 0.0) {
        sc->canopy = Grid2<double>(spec.nx, spec.ny, 0.0);
        for (int j = 0; j < spec.ny; ++j)
            for (int i = 0; i < spec.nx; ++i)
                if (!dom.is_water(i, j)) sc->canopy(i, j) = config.canopy_coefficient;
    }

    for (const SensorSpec& s : config.sensors) {
        const Vec2 xy = dom.to_local(s.lon, s.lat);
        auto cell = dom.cell_of(xy.x, xy.y);
        if (!cell) throw ConfigError("sensor at (" + std::to_string(s.lon) + ", " + std::to_string(s.lat) +
                                     ") lies outside the domain");
        if (!dom.is_water(*cell)) throw ConfigError("sensor at (" + std::to_string(s.lon) + ", " +
                                                    std::to_string(s.lat) + ") lies on land");
        sc->sensors.push_back({*cell, s.velocity, s.half_width});
    }

    sc->source_xy = dom.to_local(config.source_lon, config.source_lat);
    auto src = dom.cell_of(sc->source_xy.x, sc->source_xy.y);
    if (!src) throw ConfigError("source location lies outside the domain");
    if (!dom.is_water(*src)) throw ConfigError("source location lies on land");
    sc->duration = spec.end_time - spec.start_time;
    return sc;
}

RunParameters RunParameters::from(const Scenario& sc) {
    const ScenarioConfig& c = sc.config;
    RunParameters p;
    p.advection = c.advection;
    p.c_smag = c.c_smag;
    p.source.x = sc.source_xy.x;
    p.source.y = sc.source_xy.y;
    p.source.t0 = c.source_start - c.domain.start_time;
    p.source.tf = c.source_end - c.domain.start_time;
    p.source.volume = c.source_volume;
    p.seed = c.seed;
    return p;
}

double total_particle_volume(const SimulationState& s) {
    double v = 0.0;
    for (const OilParticle& p : s.particles) v += p.volume;
    return v;
}

Engine::Engine(std::shared_ptr<const Scenario> scenario, RunParameters params)
    : scenario_(std::move(scenario)), params_(params) {
    const ScenarioConfig& c = scenario_->config;
    const Domain& dom = scenario_->domain;
    if (!(params_.source.tf > params_.source.t0)) throw ConfigError("spill source: leak end must follow leak start");
    if (!(params_.source.volume > 0.0)) throw ConfigError("spill source: volume must be > 0");
    water_boundary_ = c.water_boundary;
    wind_boundary_ = c.wind_boundary;
    if (scenario_->canopy.size() != 0) wind_limits_ = canopy_limits(scenario_->canopy, c.max_wind);

    SimulationState& s = state_;
    s.water = VelocityField(FlowKind::water, dom.nx(), dom.ny(), dom.dx(), dom.dy(), c.nu_water);
    s.wind = VelocityField(FlowKind::wind, dom.nx(), dom.ny(), dom.dx(), dom.dy(), c.nu_wind);
    s.cells = Grid2<CellState>(dom.nx(), dom.ny());
    for (int j = 0; j < dom.ny(); ++j)
        for (int i = 0; i < dom.nx(); ++i) {
            CellState& cs = s.cells(i, j);
            cs.rho_water = c.rho_water;
            cs.rho_air = c.rho_air;
            cs.temperature = c.temperature;
            cs.latitude = dom.latitude_of_row(j);
        }
    s.beach.volume = Grid2<double>(dom.nx(), dom.ny(), 0.0);
    s.beach.capacity = c.beach_capacity;
    s.realization = params_.seed;

    correct_states(s, 0.0);
    s.ekman = EkmanWindState(centre_field(s.wind), c.ekman_period);
    for (int j = 0; j < dom.ny(); ++j)
        for (int i = 0; i < dom.nx(); ++i) s.cells(i, j).ekman_wind = s.ekman.at(i, j);
    s.thickness = thickness_map(s.particles, dom, centre_field(s.wind), c.oil, c.rho_water);
}

void Engine::correct_states(SimulationState& s, double t) const {
    const Scenario& sc = *scenario_;
    const ScenarioConfig& c = sc.config;
    const Domain& dom = sc.domain;
    const double abs_t = c.domain.start_time + t;
    auto sample = [&](const GriddedSeries& series, bool water_only) {
        Grid2<Vec2> centres(dom.nx(), dom.ny());
        for (int j = 0; j < dom.ny(); ++j)
            for (int i = 0; i < dom.nx(); ++i) {
                if (water_only && !dom.is_water(i, j)) continue;
                const Vec2 c0 = dom.centre_of(i, j);
                const Vec2 geo = dom.to_geographic(c0.x, c0.y);
                centres(i, j) = series.sample(geo.x, geo.y, abs_t);
            }
        return centres;
    };
    const double dt = s.last_dt > 0.0 ? s.last_dt : 1.0;
    if (sc.wind_series) {
        centres_to_faces(s.wind, sample(*sc.wind_series, false));
        apply_boundary(s.wind, wind_boundary_);
        apply_speed_limits(s.wind, wind_limits_);
        std::swap(s.wind.potential, s.wind_correction_potential);
        project(s.wind, wind_boundary_, {}, {}, c.solver, dt);
        std::swap(s.wind.potential, s.wind_correction_potential);
    }
    if (sc.current_series || !sc.sensors.empty() || s.step == 0) {
        if (sc.current_series) centres_to_faces(s.water, sample(*sc.current_series, true));
        apply_boundary(s.water, water_boundary_);
        apply_obstacles(s.water, dom.land_mask());
        apply_constraints(s.water, sc.sensors, water_boundary_, dom.land_mask());
        std::swap(s.water.potential, s.water_correction_potential);
        project(s.water, water_boundary_, dom.land_mask(), sc.sensors, c.solver, dt);
        std::swap(s.water.potential, s.water_correction_potential);
    }
    if (!sc.wind_series && s.step == 0) {
        apply_boundary(s.wind, wind_boundary_);
        apply_speed_limits(s.wind, wind_limits_);
        project(s.wind, wind_boundary_, {}, {}, c.solver, dt);
    }
    for (int j = 0; j < dom.ny(); ++j)
        for (int i = 0; i < dom.nx(); ++i) s.cells(i, j).wind_now = s.wind.centre_velocity(i, j);
}

void Engine::mark(SimulationState& s, Phase p) {
    const auto now = std::chrono::steady_clock::now();
    if (p != Phase::correct_states)
        phase_seconds_[static_cast<int>(current_phase_)] +=
            std::chrono::duration<double>(now - phase_start_).count();
    current_phase_ = p;
    phase_start_ = now;
    if (trace_) trace_(s.step, s.time, p);
}

void Engine::step_once(double limit) {
    const Scenario& sc = *scenario_;
    const ScenarioConfig& c = sc.config;
    const Domain& dom = sc.domain;
    const CounterRng rng(params_.seed);
    const double rho_w = c.rho_water;

    SimulationState s = state_;  // work on a copy so a failing phase leaves state_ intact
    const auto step_id = static_cast<std::uint64_t>(s.step);

    mark(s, Phase::correct_states);
    correct_states(s, s.time);

    mark(s, Phase::ekman_update);
    if (s.step > 0) {
        s.ekman.update(centre_field(s.wind), s.last_dt);
        for (int j = 0; j < dom.ny(); ++j)
            for (int i = 0; i < dom.nx(); ++i) s.cells(i, j).ekman_wind = s.ekman.at(i, j);
    }

    mark(s, Phase::save);  // state_ still holds the pre-step state

    mark(s, Phase::correct_oil);  // no oil observations are assimilated

    mark(s, Phase::timestep);
    double dt = std::min(compute_timestep(s.water, c.solver), compute_timestep(s.wind, c.solver));
    const bool clipped = dt >= limit - s.time;
    if (clipped) dt = limit - s.time;
    if (!(dt > 0.0)) throw ModelError("step_once: no time left before the step limit");

    mark(s, Phase::profiles_waves);
    const bool leaking = params_.source.t0 < s.time + dt && params_.source.tf > s.time;
    Grid2<std::uint8_t> active(dom.nx(), dom.ny(), c.waves_everywhere ? 1 : 0);
    if (!c.waves_everywhere) {
        for (const OilParticle& p : s.particles)
            if (!p.frozen())
                if (auto cell = dom.cell_of(p.x, p.y)) active(*cell) = 1;
        if (leaking) active(*dom.cell_of(params_.source.x, params_.source.y)) = 1;
    }
    Grid2<ProfileInputs> inputs(dom.nx(), dom.ny());
    for (int j = 0; j < dom.ny(); ++j)
        for (int i = 0; i < dom.nx(); ++i) {
            if (!active(i, j) || !dom.is_water(i, j)) continue;
            CellState& cs = s.cells(i, j);
            const Vec2 current = s.water.centre_velocity(i, j);
            cs.waves = spectrum_summary(build_spectrum(cs.wind_now, current, c.swell, dom.depth(i, j), c.waves));
            inputs(i, j) = {current, cs.wind_now, cs.ekman_wind, cs.waves, dom.depth(i, j), cs.latitude,
                            cs.rho_water, cs.rho_air};
        }

    mark(s, Phase::diffusion_coefficients);
    const Grid2<double> d_h = horizontal_diffusivity(s.water, params_.c_smag, c.literal_smagorinsky);

    mark(s, Phase::oil_velocity);
    auto oil_velocity = [&](const OilParticle& p) {
        const CellIndex cell = *dom.cell_of(p.x, p.y);
        return environment_velocity(inputs(cell), p.z, params_.advection, c.profiles).xy();
    };
    std::vector<Vec2> velocity(s.particles.size());
    for (std::size_t k = 0; k < s.particles.size(); ++k)
        if (!s.particles[k].frozen()) velocity[k] = oil_velocity(s.particles[k]);

    mark(s, Phase::correction_velocity);
    const Grid2<Vec2> correction = diffusion_correction(d_h, dom.land_mask(), dom.dx(), dom.dy());

    mark(s, Phase::release);
    for (OilParticle& p : release_particles(params_.source, s.time, dt, c.particles, s.next_id, c.oil)) {
        s.released_volume += p.volume;
        s.next_id = p.id + 1;
        velocity.push_back(oil_velocity(p));
        s.particles.push_back(p);
    }

    mark(s, Phase::entrain);
    for (OilParticle& p : s.particles) {
        if (p.status != ParticleStatus::surface) continue;
        const CellState& cs = s.cells(*dom.cell_of(p.x, p.y));
        const double rate = entrainment_rate(cs.waves, cs.rho_water, cs.wind_now.norm(), c.entrainment);
        entrain(p, rate, cs.waves, dt, rng.uniform(p.id, step_id, kSlotEntrain),
                rng.uniform(p.id, step_id, kSlotIntrusion));
    }

    mark(s, Phase::advect);
    for (std::size_t k = 0; k < s.particles.size(); ++k) {
        OilParticle& p = s.particles[k];
        if (p.frozen()) continue;
        const CellIndex cell = *dom.cell_of(p.x, p.y);
        const bool entrained = p.status == ParticleStatus::entrained;
        const double d_v = entrained ? vertical_diffusivity(s.cells(cell).waves, p.z) : 0.0;
        const Vec3 turb = turbulent_displacement(d_h(cell), d_v, dt, rng.uniform(p.id, step_id, kSlotXi),
                                                 rng.uniform(p.id, step_id, kSlotPhi),
                                                 rng.uniform(p.id, step_id, kSlotZeta));
        const Vec2 horizontal = velocity[k] + correction(cell) + turb.xy() * (1.0 / dt);
        const double w_b = p.buoyancy_suppressed ? 0.0 : buoyancy_velocity(c.oil, rho_w, p.diameter);
        p.buoyancy_suppressed = false;
        advect_particle(p, horizontal, turb.z / dt, w_b, dt, dom, s.beach);
    }

    mark(s, Phase::thickness);
    const Grid2<Vec2> wind_centres = centre_field(s.wind);
    s.thickness = thickness_map(s.particles, dom, wind_centres, c.oil, rho_w);

    mark(s, Phase::spread);
    {
        Grid2<SpreadStep> offsets(dom.nx(), dom.ny());
        for (int j = 0; j < dom.ny(); ++j)
            for (int i = 0; i < dom.nx(); ++i)
                if (s.thickness.count(i, j) > 0 && s.thickness.thickness(i, j) > c.oil.terminal_thickness)
                    offsets(i, j) = spreading_offsets(s.thickness.volume(i, j), std::min(s.thickness.age(i, j), kAgeCap),
                                                      dt, wind_centres(i, j).norm(), c.oil.rho_oil, rho_w);
        for (OilParticle& p : s.particles) {
            if (p.status != ParticleStatus::surface) continue;
            const CellIndex cell = *dom.cell_of(p.x, p.y);
            const SpreadStep& st = offsets(cell);
            if (st.dq == 0.0 && st.dr == 0.0) continue;
            const double sq = rng.uniform(p.id, step_id, kSlotSpreadQ) < 0.5 ? -1.0 : 1.0;
            const double sr = rng.uniform(p.id, step_id, kSlotSpreadR) < 0.5 ? -1.0 : 1.0;
            move_particle(p, spread_displacement(st, wind_centres(cell).bearing(), sq, sr), dom, s.beach);
        }
    }

    mark(s, Phase::thickness_recompute);
    s.thickness = thickness_map(s.particles, dom, wind_centres, c.oil, rho_w);

    mark(s, Phase::age);
    for (OilParticle& p : s.particles) p.age += dt;

    mark(s, Phase::flow_step);
    step(s.water, water_boundary_, dom.land_mask(), sc.sensors, dt, c.solver);
    step(s.wind, wind_boundary_, {}, {}, dt, c.solver, wind_limits_);

    mark(s, Phase::advance_time);
    s.time = clipped ? limit : s.time + dt;
    s.last_dt = dt;
    ++s.step;
    phase_seconds_[static_cast<int>(Phase::advance_time)] +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - phase_start_).count();

    state_ = std::move(s);
    if (step_hook_) step_hook_(state_);
}

void Engine::run(double until, const SnapshotSink& snapshot) {
    const double interval = scenario_->config.output_interval;
    const double eps = 1e-9 * std::max(1.0, until);
    if (snapshot) snapshot(state_);
    double last_snapshot = state_.time;
    double next_output = (std::floor(state_.time / interval + 1e-9) + 1.0) * interval;
    while (state_.time < until - eps) {
        step_once(std::min(until, next_output));
        if (state_.time >= next_output - eps) {
            if (snapshot) snapshot(state_);
            last_snapshot = state_.time;
            next_output += interval;
        }
    }
    if (last_snapshot != state_.time && snapshot) snapshot(state_);
}

}  // namespace scem
