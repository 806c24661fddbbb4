#include "scem/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "scem/time_utils.hpp"

namespace scem {

namespace {

Json build_defaults() {
    return Json::parse(R"({
  "name": "scenario",
  "domain": {
    "origin_lon": 0.0, "origin_lat": 0.0,
    "nx": 0, "ny": 0,
    "dx": null, "dy": null, "extent_km": null,
    "fine_step": 0.5, "coarse_step": 25.0,
    "n_crit": null, "z_crit": null,
    "bathymetry": null, "uniform_depth": null
  },
  "time": { "start": null, "end": null, "output_interval_s": 3600.0 },
  "solver": {
    "sor_omega": 1.7, "sor_tol": 1e-6, "div_tol": 1e-8, "max_iters": 2000, "projection_passes": 8,
    "courant_target": 0.8, "dt_max": 1800.0, "velocity_floor": 1e-6,
    "nu_water": 1.0e-6, "nu_wind": 1.5e-5
  },
  "boundaries": {
    "water": { "west": "open", "east": "open", "south": "open", "north": "open" },
    "wind": { "west": "open", "east": "open", "south": "open", "north": "open" }
  },
  "forcing": {
    "wind": null, "current": null,
    "swell": { "height": 0.0, "period": 0.0, "direction_deg": 0.0 }
  },
  "wind": { "max_speed": 40.0, "canopy_coefficient": 0.0, "canopy_file": null, "ekman_period_h": 12.0 },
  "profiles": { "tidal_exponent_den": 6.0, "alpha_w": 0.02, "alpha_z": 2.0, "sigma_water": 0.0728 },
  "environment": { "rho_water": 1025.0, "rho_air": 1.225, "temperature_k": 288.15 },
  "advection": { "alpha_w_o": 0.02, "alpha_c_o": 1.0 },
  "diffusion": { "c_smag": 0.1, "literal_paper_form": false },
  "entrainment": { "k_e": 0.4, "alpha": 1.5, "l_ow": 15.0, "gamma_coefficient": 1e-5, "whitecap_wind": 6.0 },
  "oil": {
    "particles": 3000, "allow_low_particle_count": false,
    "rho_oil": 950.0, "terminal_thickness": 1e-4, "droplet_diameter": 300e-6, "mu_water": 1.2e-3,
    "beach_capacity_m3": null
  },
  "source": { "lon": null, "lat": null, "start": null, "end": null, "volume_m3": null, "mass_tonnes": null },
  "waves": { "nodes": 33, "span": 4.0, "spreading_s": 10.0, "swell_width": 0.1, "update_everywhere": false },
  "sensors": [],
  "monte_carlo": {
    "realizations": 500,
    "sampling": {
      "alpha_w_o": [0.005, 0.03], "alpha_c_o": [0.9, 1.1], "c_smag": [0.01, 0.3],
      "t0": null, "tf": null, "mass_tonnes": [10.0, 2200.0]
    },
    "analysis_times": [], "zeta_p": 0.0, "min_success": 0.9
  },
  "run": { "seed": 1, "workers": 1 },
  "output": { "directory": "scem_output", "dump_flow": false, "snapshots": true }
})");
}

// Keys whose value may be any JSON type (no nested key checking).
bool free_form(const std::string& path) {
    return path == "sensors" || path.rfind("boundaries.", 0) == 0;
}

void check_keys(const Json& user, const Json& defaults, const std::string& prefix) {
    if (!user.is_object()) throw ConfigError("config: '" + (prefix.empty() ? "<root>" : prefix) + "' must be an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!defaults.contains(it.key())) throw ConfigError("config: unknown key '" + path + "'");
        const Json& d = defaults.at(it.key());
        const Json& v = it.value();
        if (free_form(path) || d.is_null() || v.is_null()) continue;
        if (d.is_object()) {
            check_keys(v, d, path);
        } else if (d.is_number() && !v.is_number()) {
            throw ConfigError("config: '" + path + "' must be a number");
        } else if (d.is_boolean() && !v.is_boolean()) {
            throw ConfigError("config: '" + path + "' must be true or false");
        } else if (d.is_string() && !v.is_string()) {
            throw ConfigError("config: '" + path + "' must be a string");
        } else if (d.is_array() && !v.is_array()) {
            throw ConfigError("config: '" + path + "' must be an array");
        }
    }
}

void merge(Json& base, const Json& user) {
    for (auto it = user.begin(); it != user.end(); ++it) {
        if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object() &&
            !free_form(it.key())) {
            merge(base[it.key()], it.value());
        } else {
            base[it.key()] = it.value();
        }
    }
}

const Json& at(const Json& root, const std::string& dotted) {
    const Json* node = &root;
    std::stringstream ss(dotted);
    for (std::string part; std::getline(ss, part, '.');) node = &node->at(part);
    return *node;
}

double num(const Json& root, const std::string& key) {
    const Json& v = at(root, key);
    if (!v.is_number()) throw ConfigError("config: '" + key + "' is required and must be a number");
    return v.get<double>();
}

double positive(const Json& root, const std::string& key) {
    const double v = num(root, key);
    if (!(v > 0.0)) throw ConfigError("config: '" + key + "' must be > 0 (got " + std::to_string(v) + ")");
    return v;
}

double in_range(const Json& root, const std::string& key, double lo, double hi) {
    const double v = num(root, key);
    if (!(v >= lo && v <= hi))
        throw ConfigError("config: '" + key + "' = " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    return v;
}

double time_of(const Json& root, const std::string& key) {
    const Json& v = at(root, key);
    if (!v.is_string()) throw ConfigError("config: '" + key + "' is required (ISO-8601 UTC time)");
    try {
        return parse_iso8601(v.get<std::string>());
    } catch (const ConfigError& e) {
        throw ConfigError("config: '" + key + "': " + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative()) path = base / path;
    return path.lexically_normal();
}

EdgeCondition edge(const Json& v, const std::string& key) {
    if (v.is_string() && v.get<std::string>() == "open") return EdgeCondition::open();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return EdgeCondition::dirichlet({v[0].get<double>(), v[1].get<double>()});
    throw ConfigError("config: '" + key + "' must be \"open\" or [u, v]");
}

BoundarySpec boundary(const Json& root, const std::string& key) {
    const Json& b = at(root, key);
    for (auto it = b.begin(); it != b.end(); ++it)
        if (it.key() != "west" && it.key() != "east" && it.key() != "south" && it.key() != "north")
            throw ConfigError("config: unknown key '" + key + "." + it.key() + "'");
    return {edge(b.at("west"), key + ".west"), edge(b.at("east"), key + ".east"), edge(b.at("south"), key + ".south"),
            edge(b.at("north"), key + ".north")};
}

ForcingSpec forcing(Json& root, const std::string& key, const std::filesystem::path& base) {
    Json& v = root["forcing"][key];
    ForcingSpec f;
    if (v.is_null()) return f;
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        f.constant = Vec2{v[0].get<double>(), v[1].get<double>()};
    } else if (v.is_string()) {
        f.file = resolve(base, v.get<std::string>());
        if (!std::filesystem::exists(f.file))
            throw ConfigError("config: 'forcing." + key + "' file not found: " + f.file.string());
        v = f.file.string();
    } else {
        throw ConfigError("config: 'forcing." + key + "' must be [u, v] or a file path");
    }
    return f;
}

SamplingBounds bounds(const Json& root, const std::string& key) {
    const Json& v = at(root, key);
    if (!v.is_array() || v.size() != 2) throw ConfigError("config: '" + key + "' must be [lo, hi]");
    SamplingBounds b;
    if (v[0].is_string()) {
        b = {parse_iso8601(v[0].get<std::string>()), parse_iso8601(v[1].get<std::string>())};
    } else {
        b = {v[0].get<double>(), v[1].get<double>()};
    }
    if (!(b.hi >= b.lo)) throw ConfigError("config: '" + key + "' has hi < lo");
    return b;
}

}  // namespace

const Json& default_config() {
    static const Json defaults = build_defaults();
    return defaults;
}

ScenarioConfig parse_config(const Json& user, const std::filesystem::path& base_dir) {
    check_keys(user, default_config(), "");
    Json j = default_config();
    merge(j, user);

    ScenarioConfig c;
    c.name = j["name"].get<std::string>();

    // Domain.
    DomainSpec& d = c.domain;
    d.origin_lon = in_range(j, "domain.origin_lon", -180.0, 360.0);
    d.origin_lat = in_range(j, "domain.origin_lat", -89.0, 89.0);
    d.nx = static_cast<int>(num(j, "domain.nx"));
    d.ny = static_cast<int>(num(j, "domain.ny"));
    if (d.nx < 3 || d.ny < 3) throw ConfigError("config: 'domain.nx' and 'domain.ny' must be >= 3");
    const Json& extent = j["domain"]["extent_km"];
    if (!extent.is_null()) {
        if (!extent.is_array() || extent.size() != 2) throw ConfigError("config: 'domain.extent_km' must be [w, h]");
        d.dx = extent[0].get<double>() * 1e3 / d.nx;
        d.dy = extent[1].get<double>() * 1e3 / d.ny;
        if (!j["domain"]["dx"].is_null() || !j["domain"]["dy"].is_null())
            throw ConfigError("config: give either 'domain.extent_km' or 'domain.dx'/'domain.dy', not both");
    } else {
        d.dx = positive(j, "domain.dx");
        d.dy = positive(j, "domain.dy");
    }
    if (!(d.dx > 0.0) || !(d.dy > 0.0)) throw ConfigError("config: 'domain.extent_km' must be positive");
    d.fine_step = positive(j, "domain.fine_step");
    d.coarse_step = positive(j, "domain.coarse_step");
    const Json& bathy = j["domain"]["bathymetry"];
    if (bathy.is_string()) {
        c.bathymetry_file = resolve(base_dir, bathy.get<std::string>());
        if (!std::filesystem::exists(*c.bathymetry_file))
            throw ConfigError("config: 'domain.bathymetry' file not found: " + c.bathymetry_file->string());
        j["domain"]["bathymetry"] = c.bathymetry_file->string();
    } else if (j["domain"]["uniform_depth"].is_number()) {
        c.uniform_depth = positive(j, "domain.uniform_depth");
    } else {
        throw ConfigError("config: one of 'domain.bathymetry' or 'domain.uniform_depth' is required");
    }

    // Time.
    // Without explicit run times the run covers the leak window.
    if (j["time"]["start"].is_null()) j["time"]["start"] = j["source"]["start"];
    if (j["time"]["end"].is_null()) j["time"]["end"] = j["source"]["end"];
    d.start_time = time_of(j, "time.start");
    d.end_time = time_of(j, "time.end");
    if (d.end_time < d.start_time) throw ConfigError("config: 'time.end' precedes 'time.start'");
    c.output_interval = positive(j, "time.output_interval_s");

    // Solver.
    c.solver.sor_omega = in_range(j, "solver.sor_omega", 1.0, 1.99);
    c.solver.sor_tol = positive(j, "solver.sor_tol");
    c.solver.div_tol = positive(j, "solver.div_tol");
    c.solver.max_iters = static_cast<int>(in_range(j, "solver.max_iters", 1, 1e7));
    c.solver.projection_passes = static_cast<int>(in_range(j, "solver.projection_passes", 1, 1000));
    c.solver.courant_target = in_range(j, "solver.courant_target", 1e-6, 1.0);
    c.solver.dt_max = positive(j, "solver.dt_max");
    c.solver.velocity_floor = positive(j, "solver.velocity_floor");
    c.nu_water = in_range(j, "solver.nu_water", 0.0, 1e6);
    c.nu_wind = in_range(j, "solver.nu_wind", 0.0, 1e6);
    c.water_boundary = boundary(j, "boundaries.water");
    c.wind_boundary = boundary(j, "boundaries.wind");

    // Forcing.
    c.wind = forcing(j, "wind", base_dir);
    c.current = forcing(j, "current", base_dir);
    c.swell.height = in_range(j, "forcing.swell.height", 0.0, 30.0);
    c.swell.period = in_range(j, "forcing.swell.period", 0.0, 30.0);
    c.swell.direction_deg = in_range(j, "forcing.swell.direction_deg", -360.0, 360.0);
    if (c.swell.height > 0.0 && c.swell.period <= 0.0)
        throw ConfigError("config: 'forcing.swell.period' must be > 0 when a swell height is given");

    c.max_wind = in_range(j, "wind.max_speed", 0.0, 200.0);
    c.canopy_coefficient = in_range(j, "wind.canopy_coefficient", 0.0, 1.0);
    if (j["wind"]["canopy_file"].is_string()) {
        c.canopy_file = resolve(base_dir, j["wind"]["canopy_file"].get<std::string>());
        if (!std::filesystem::exists(*c.canopy_file))
            throw ConfigError("config: 'wind.canopy_file' not found: " + c.canopy_file->string());
        j["wind"]["canopy_file"] = c.canopy_file->string();
    }
    c.ekman_period = positive(j, "wind.ekman_period_h") * 3600.0;
    if (c.solver.dt_max >= c.ekman_period) throw ConfigError("config: 'solver.dt_max' must be below the Ekman period");

    // Physics.
    c.profiles.tidal_exponent_den = positive(j, "profiles.tidal_exponent_den");
    c.profiles.alpha_w = in_range(j, "profiles.alpha_w", 0.0, 1.0);
    if (c.profiles.alpha_w < 0.005 || c.profiles.alpha_w > 0.03)
        spdlog::warn("profiles.alpha_w = {} is outside the published range [0.005, 0.03]", c.profiles.alpha_w);
    c.profiles.alpha_z = positive(j, "profiles.alpha_z");
    c.profiles.sigma_water = in_range(j, "profiles.sigma_water", 0.0, 1.0);
    c.rho_water = positive(j, "environment.rho_water");
    c.rho_air = positive(j, "environment.rho_air");
    if (!(c.rho_water > c.rho_air)) throw ConfigError("config: 'environment.rho_water' must exceed 'environment.rho_air'");
    c.temperature = positive(j, "environment.temperature_k");

    c.advection.alpha_w_o = in_range(j, "advection.alpha_w_o", 0.0, 0.05);
    if (c.advection.alpha_w_o < 0.005 || c.advection.alpha_w_o > 0.03)
        spdlog::warn("advection.alpha_w_o = {} is outside the typical range [0.005, 0.03]", c.advection.alpha_w_o);
    c.advection.alpha_c_o = in_range(j, "advection.alpha_c_o", 0.0, 2.0);
    if (c.advection.alpha_c_o < 0.9 || c.advection.alpha_c_o > 1.1)
        spdlog::warn("advection.alpha_c_o = {} is outside the typical range [0.9, 1.1]", c.advection.alpha_c_o);
    c.c_smag = in_range(j, "diffusion.c_smag", 0.0, 1.0);
    c.literal_smagorinsky = j["diffusion"]["literal_paper_form"].get<bool>();

    c.entrainment.k_e = in_range(j, "entrainment.k_e", 0.3, 0.5);
    c.entrainment.alpha = in_range(j, "entrainment.alpha", 1.15, 1.85);
    c.entrainment.l_ow = in_range(j, "entrainment.l_ow", 10.0, 20.0);
    c.entrainment.gamma_coefficient = in_range(j, "entrainment.gamma_coefficient", 0.0, 1e6);
    c.entrainment.whitecap_wind = in_range(j, "entrainment.whitecap_wind", 0.0, 100.0);

    // Oil.
    c.particles = static_cast<std::int64_t>(in_range(j, "oil.particles", 1, 1e8));
    c.allow_low_particle_count = j["oil"]["allow_low_particle_count"].get<bool>();
    check_particle_budget(c.particles, c.allow_low_particle_count);
    c.oil.rho_oil = positive(j, "oil.rho_oil");
    if (!(c.oil.rho_oil < c.rho_water)) throw ConfigError("config: 'oil.rho_oil' must be below 'environment.rho_water'");
    c.oil.terminal_thickness = positive(j, "oil.terminal_thickness");
    c.oil.droplet_diameter = positive(j, "oil.droplet_diameter");
    c.oil.mu_water = positive(j, "oil.mu_water");
    if (j["oil"]["beach_capacity_m3"].is_number()) c.beach_capacity = positive(j, "oil.beach_capacity_m3");

    // Source.
    c.source_lon = num(j, "source.lon");
    c.source_lat = num(j, "source.lat");
    c.source_start = time_of(j, "source.start");
    c.source_end = time_of(j, "source.end");
    if (!(c.source_end > c.source_start)) throw ConfigError("config: 'source.end' must follow 'source.start'");
    const bool has_volume = j["source"]["volume_m3"].is_number();
    const bool has_mass = j["source"]["mass_tonnes"].is_number();
    if (has_volume == has_mass) throw ConfigError("config: give exactly one of 'source.volume_m3' or 'source.mass_tonnes'");
    c.source_volume = has_volume ? positive(j, "source.volume_m3")
                                 : positive(j, "source.mass_tonnes") * 1000.0 / c.oil.rho_oil;

    // Waves.
    c.waves.nodes = static_cast<int>(in_range(j, "waves.nodes", 3, 1001));
    if (c.waves.nodes % 2 == 0) throw ConfigError("config: 'waves.nodes' must be odd");
    c.waves.span = positive(j, "waves.span");
    c.waves.spreading_s = positive(j, "waves.spreading_s");
    c.waves.swell_width = positive(j, "waves.swell_width");
    c.waves_everywhere = j["waves"]["update_everywhere"].get<bool>();

    // Without n_crit the fine layers are sized from the forcing when the scenario is assembled.
    c.n_crit_auto = !j["domain"]["n_crit"].is_number();
    if (!c.n_crit_auto) d.n_crit = static_cast<int>(in_range(j, "domain.n_crit", 0, 1e6));
    if (j["domain"]["z_crit"].is_number()) d.z_crit = positive(j, "domain.z_crit");

    // Sensors.
    for (const Json& s : j["sensors"]) {
        for (auto it = s.begin(); it != s.end(); ++it)
            if (it.key() != "lon" && it.key() != "lat" && it.key() != "u" && it.key() != "v" && it.key() != "half_width")
                throw ConfigError("config: unknown key 'sensors[]." + it.key() + "'");
        SensorSpec spec;
        spec.lon = s.at("lon").get<double>();
        spec.lat = s.at("lat").get<double>();
        spec.velocity = {s.at("u").get<double>(), s.at("v").get<double>()};
        spec.half_width = s.value("half_width", 0.0);
        if (spec.half_width < 0.0) throw ConfigError("config: sensor 'half_width' must be >= 0");
        c.sensors.push_back(spec);
    }

    // Monte Carlo.
    MonteCarloSpec& mc = c.monte_carlo;
    mc.realizations = static_cast<int>(in_range(j, "monte_carlo.realizations", 2, 1e7));
    mc.alpha_w_o = bounds(j, "monte_carlo.sampling.alpha_w_o");
    if (mc.alpha_w_o.lo < 0.0 || mc.alpha_w_o.hi > 0.05)
        throw ConfigError("config: 'monte_carlo.sampling.alpha_w_o' must lie within [0, 0.05]");
    mc.alpha_c_o = bounds(j, "monte_carlo.sampling.alpha_c_o");
    mc.c_smag = bounds(j, "monte_carlo.sampling.c_smag");
    mc.t0 = j["monte_carlo"]["sampling"]["t0"].is_null() ? SamplingBounds{c.source_start, c.source_start}
                                                          : bounds(j, "monte_carlo.sampling.t0");
    mc.tf = j["monte_carlo"]["sampling"]["tf"].is_null() ? SamplingBounds{c.source_end, c.source_end}
                                                          : bounds(j, "monte_carlo.sampling.tf");
    if (!(mc.t0.lo < mc.tf.hi)) throw ConfigError("config: sampled leak window can never be ordered (t0 >= tf)");
    mc.mass_tonnes = bounds(j, "monte_carlo.sampling.mass_tonnes");
    if (!(mc.mass_tonnes.lo > 0.0)) throw ConfigError("config: 'monte_carlo.sampling.mass_tonnes' must be > 0");
    for (const Json& t : j["monte_carlo"]["analysis_times"]) {
        if (!t.is_string()) throw ConfigError("config: 'monte_carlo.analysis_times' entries must be ISO-8601 strings");
        const double ts = parse_iso8601(t.get<std::string>());
        if (ts < d.start_time || ts > d.end_time)
            throw ConfigError("config: analysis time " + t.get<std::string>() + " outside the run");
        mc.analysis_times.push_back(ts);
    }
    mc.zeta_p = in_range(j, "monte_carlo.zeta_p", 0.0, 1e12);
    mc.min_success = in_range(j, "monte_carlo.min_success", 0.0, 1.0);

    // Run and output.
    const Json& seed = j["run"]["seed"];
    if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0)
        throw ConfigError("config: 'run.seed' must be a non-negative integer");
    c.seed = seed.get<std::uint64_t>();
    c.workers = static_cast<int>(in_range(j, "run.workers", 1, 1024));
    c.output_directory = j["output"]["directory"].get<std::string>();
    c.dump_flow = j["output"]["dump_flow"].get<bool>();
    c.write_snapshots = j["output"]["snapshots"].get<bool>();

    c.effective = j;
    return c;
}

void apply_override(Json& tree, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must look like key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(text);
    } catch (const std::exception&) {
        value = text;
    }
    // Validate the path against the defaults before writing.
    const Json* d = &default_config();
    Json* node = &tree;
    std::stringstream ss(key);
    std::vector<std::string> parts;
    for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (!d->is_object() || !d->contains(parts[k])) throw ConfigError("config: unknown key '" + key + "'");
        d = &d->at(parts[k]);
        if (k + 1 == parts.size()) {
            (*node)[parts[k]] = value;
        } else {
            if (!node->contains(parts[k]) || !(*node)[parts[k]].is_object()) (*node)[parts[k]] = Json::object();
            node = &(*node)[parts[k]];
        }
    }
}

ScenarioConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    Json user;
    try {
        user = Json::parse(in, nullptr, true, true);
    } catch (const std::exception& e) {
        throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
    for (const auto& o : overrides) apply_override(user, o);
    auto base = path.parent_path();
    if (base.empty()) base = ".";
    return parse_config(user, std::filesystem::absolute(base));
}

Json echo_config(const ScenarioConfig& config) {
    Json e = config.effective;
    e["output"].erase("directory");
    e["run"].erase("workers");
    return e;
}

std::string describe_config_keys() {
    std::string out;
    std::function<void(const Json&, const std::string&)> walk = [&](const Json& node, const std::string& prefix) {
        for (auto it = node.begin(); it != node.end(); ++it) {
            const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
            if (it.value().is_object() && !free_form(path) ) {
                walk(it.value(), path);
            } else if (it.value().is_object()) {
                walk(it.value(), path);
            } else {
                out += "  " + path + " = " + it.value().dump() + "\n";
            }
        }
    };
    walk(default_config(), "");
    return out;
}

}  // namespace scem
