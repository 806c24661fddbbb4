#include "scem/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "scem/config.hpp"
#include "scem/engine.hpp"
#include "scem/monte_carlo.hpp"
#include "scem/outputs.hpp"
#include "scem/time_utils.hpp"

namespace scem {

namespace {

struct Options {
    std::string config;
    std::vector<std::string> overrides;
    std::string output;
    std::int64_t seed = -1;
    int realizations = 0;
    int workers = 0;
    bool dump_flow = false;
    bool verbose = false;
    bool quiet = false;
    bool keep_snapshots = false;
    bool identical_seeds = false;
    // analyze
    std::vector<std::string> runs;
    double zeta = -1.0;
    std::string region;
    std::vector<std::string> times;
};

std::filesystem::path output_dir(const Options& o, const ScenarioConfig& c) {
    if (!o.output.empty()) return o.output;
    if (const char* env = std::getenv("SCEM_OUTPUT_DIR"); env && *env) return env;
    return c.output_directory;
}

ScenarioConfig load(const Options& o) {
    std::vector<std::string> overrides = o.overrides;
    if (o.seed >= 0) overrides.push_back("run.seed=" + std::to_string(o.seed));
    if (o.realizations > 0) overrides.push_back("monte_carlo.realizations=" + std::to_string(o.realizations));
    if (o.workers > 0) overrides.push_back("run.workers=" + std::to_string(o.workers));
    if (o.dump_flow) overrides.push_back("output.dump_flow=true");
    return load_config(o.config, overrides);
}

std::string echo_text(const ScenarioConfig& c) { return echo_config(c).dump(2) + "\n"; }

AsciiGrid face_raster(const Domain& d, const Grid2<double>& values, double shift_x, double shift_y) {
    AsciiGrid g = domain_raster(d, values);
    g.xllcorner -= shift_x * g.cellsize;
    g.yllcorner -= shift_y * g.dy();
    return g;
}

void dump_flow(OutputWriter& out, const Domain& d, const SimulationState& s) {
    char prefix[64];
    std::snprintf(prefix, sizeof prefix, "flow/step_%06lld_", static_cast<long long>(s.step));
    const std::string p = prefix;
    const VelocityField& f = s.water;
    Grid2<double> div(f.nx, f.ny, 0.0);
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) div(i, j) = f.divergence(i, j);
    out.write_text(p + "u.asc", format_ascii_grid(face_raster(d, f.u, 0.5, 0.0)));
    out.write_text(p + "v.asc", format_ascii_grid(face_raster(d, f.v, 0.0, 0.5)));
    out.write_raster(p + "p.asc", d, f.p);
    out.write_raster(p + "divergence.asc", d, div);
}

nlohmann::ordered_json volume_audit(const SimulationState& s) {
    double by_status[4] = {0.0, 0.0, 0.0, 0.0};
    std::int64_t counts[4] = {0, 0, 0, 0};
    for (const OilParticle& p : s.particles) {
        by_status[static_cast<int>(p.status)] += p.volume;
        counts[static_cast<int>(p.status)] += 1;
    }
    const double total = total_particle_volume(s);
    nlohmann::ordered_json a;
    a["released_m3"] = s.released_volume;
    a["total_m3"] = total;
    a["exact"] = total == s.released_volume;
    for (auto st : {ParticleStatus::surface, ParticleStatus::entrained, ParticleStatus::beached,
                    ParticleStatus::escaped}) {
        a[std::string(to_string(st)) + "_m3"] = by_status[static_cast<int>(st)];
        a[std::string(to_string(st)) + "_particles"] = counts[static_cast<int>(st)];
    }
    return a;
}

int simulate(const Options& o, std::ostream& out) {
    const ScenarioConfig config = load(o);
    const auto scenario = Scenario::load(config);
    OutputWriter writer(output_dir(o, config));
    writer.write_text("config.json", echo_text(config));
    spdlog::info("effective configuration:\n{}", echo_text(config));

    Engine engine(scenario, RunParameters::from(*scenario));
    std::string trace;
    char line[128];
    engine.set_trace([&](std::int64_t step, double t, Phase p) {
        std::snprintf(line, sizeof line, "step=%lld t=%.17g phase=%s\n", static_cast<long long>(step), t,
                      to_string(p));
        trace += line;
    });
    if (config.dump_flow) engine.set_step_hook([&](const SimulationState& s) { dump_flow(writer, scenario->domain, s); });

    const double start = config.domain.start_time;
    bool audit_exact = true;
    int snapshots = 0;
    nlohmann::ordered_json snapshot_list = nlohmann::ordered_json::array();
    auto on_snapshot = [&](const SimulationState& s) {
        const double epoch = start + s.time;
        const std::string stamp = file_stamp(epoch);
        if (config.write_snapshots) {
            writer.write_text("snap_" + stamp + ".csv", format_snapshot_csv(s.particles, scenario->domain, epoch));
            writer.write_raster("thickness_" + stamp + ".asc", scenario->domain, s.thickness.thickness);
        }
        audit_exact = audit_exact && total_particle_volume(s) == s.released_volume;
        snapshot_list.push_back(format_iso8601(epoch));
        ++snapshots;
    };

    const auto wall0 = std::chrono::steady_clock::now();
    std::string failure;
    try {
        engine.run(scenario->duration, on_snapshot);
    } catch (const std::exception& e) {
        failure = e.what();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

    const SimulationState& s = engine.state();
    nlohmann::ordered_json summary;
    summary["scenario"] = config.name;
    summary["seed"] = config.seed;
    summary["start"] = format_iso8601(start);
    summary["end"] = format_iso8601(start + s.time);
    summary["steps"] = s.step;
    summary["completed"] = failure.empty();
    if (!failure.empty()) summary["error"] = failure;
    summary["volume_audit"] = volume_audit(s);
    summary["volume_audit"]["exact_at_every_snapshot"] = audit_exact;
    summary["snapshots"] = snapshot_list;
    summary["config"] = echo_config(config);
    writer.write_text("summary.json", summary.dump(2) + "\n");
    writer.write_text("trace.log", trace);

    nlohmann::ordered_json timing;
    timing["wall_seconds"] = wall;
    for (int p = 0; p < kPhaseCount; ++p) timing["phases"][to_string(static_cast<Phase>(p))] = engine.phase_seconds()[p];
    writer.write_text("timing.json", timing.dump(2) + "\n", false);
    writer.write_manifest(failure.empty(), failure);

    if (!failure.empty()) throw ModelError(failure);
    out << "simulated " << s.step << " steps, " << s.particles.size() << " particles, " << snapshots
        << " snapshots in " << wall << " s -> " << writer.directory().string() << "\n";
    return kExitOk;
}

int monte_carlo(const Options& o, std::ostream& out) {
    const ScenarioConfig config = load(o);
    const auto scenario = Scenario::load(config);
    OutputWriter writer(output_dir(o, config));
    writer.write_text("config.json", echo_text(config));

    MonteCarloOptions mo;
    mo.realizations = config.monte_carlo.realizations;
    mo.master_seed = config.seed;
    mo.workers = config.workers;
    mo.identical_seeds = o.identical_seeds;
    mo.keep_particles = o.keep_snapshots;
    mo.progress = [](int done, int total) {
        if (done % 50 == 0 || done == total) spdlog::info("realizations finished: {}/{}", done, total);
    };
    const auto wall0 = std::chrono::steady_clock::now();
    const MonteCarloResult res = run_monte_carlo(scenario, mo);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

    const double start = config.domain.start_time;
    std::vector<double> epochs;
    for (double t : res.analysis_times) epochs.push_back(start + t);
    write_aggregate(writer, scenario->domain, epochs, res.aggregate);

    std::string table = "index,seed,ok,alpha_w_o,alpha_c_o,c_smag,t0,tf,mass_tonnes,error\n";
    char buf[512];
    for (std::size_t n = 0; n < res.outcomes.size(); ++n) {
        const RealizationOutcome& r = res.outcomes[n];
        std::snprintf(buf, sizeof buf, "%zu,%llu,%d,%.17g,%.17g,%.17g,%s,%s,%.17g,\"%s\"\n", n,
                      static_cast<unsigned long long>(r.seed), r.ok ? 1 : 0, r.parameters.alpha_w_o,
                      r.parameters.alpha_c_o, r.parameters.c_smag, format_iso8601(r.parameters.t0).c_str(),
                      format_iso8601(r.parameters.tf).c_str(), r.parameters.mass_tonnes, r.error.c_str());
        table += buf;
        if (o.keep_snapshots && r.ok) {
            char dir[32];
            std::snprintf(dir, sizeof dir, "realizations/r%05zu/", n);
            writer.write_text(std::string(dir) + "config.json", echo_text(config));
            for (std::size_t k = 0; k < epochs.size(); ++k)
                writer.write_text(std::string(dir) + "snap_" + file_stamp(epochs[k]) + ".csv",
                                  format_snapshot_csv(r.particles[k], scenario->domain, epochs[k]));
        }
    }
    writer.write_text("realizations.csv", table);

    nlohmann::ordered_json summary;
    summary["scenario"] = config.name;
    summary["master_seed"] = config.seed;
    summary["realizations"] = mo.realizations;
    summary["succeeded"] = res.succeeded;
    summary["zeta_p"] = config.monte_carlo.zeta_p;
    summary["analysis_times"] = nlohmann::ordered_json::array();
    for (double e : epochs) summary["analysis_times"].push_back(format_iso8601(e));
    const auto& vm = res.aggregate.varmax;
    summary["var_max_final"] = vm.empty() ? 0.0 : vm.back();
    summary["config"] = echo_config(config);
    writer.write_text("mc_summary.json", summary.dump(2) + "\n");
    nlohmann::ordered_json timing;
    timing["wall_seconds"] = wall;
    timing["workers"] = config.workers;
    writer.write_text("timing.json", timing.dump(2) + "\n", false);
    writer.write_manifest(true);
    out << "monte carlo: " << res.succeeded << "/" << mo.realizations << " realizations in " << wall << " s -> "
        << writer.directory().string() << "\n";
    return kExitOk;
}

Region parse_region(const std::string& text, const Domain& d, std::size_t times) {
    if (text.empty()) return full_region(d.nx(), d.ny(), times);
    int i0, i1, j0, j1;
    if (std::sscanf(text.c_str(), "%d:%d,%d:%d", &i0, &i1, &j0, &j1) != 4)
        throw ConfigError("--region must look like i0:i1,j0:j1");
    if (i0 > i1 || j0 > j1 || i0 < 0 || j0 < 0 || i1 >= d.nx() || j1 >= d.ny())
        throw ConfigError("--region " + text + " lies outside the " + std::to_string(d.nx()) + "x" +
                          std::to_string(d.ny()) + " domain");
    Region r;
    for (std::size_t k = 0; k < times; ++k)
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) r.push_back({k, {i, j}});
    return r;
}

std::set<std::string> snapshot_stamps(const std::filesystem::path& dir) {
    std::set<std::string> out;
    if (!std::filesystem::is_directory(dir)) throw ConfigError("run directory '" + dir.string() + "' not found");
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("snap_", 0) == 0 && e.path().extension() == ".csv") out.insert(name.substr(5, name.size() - 9));
    }
    return out;
}

int analyze(const Options& o, std::ostream& out) {
    if (o.runs.empty()) throw ConfigError("analyze: --runs needs at least one run directory");
    const std::filesystem::path first = o.runs.front();
    const ScenarioConfig config = load_config(first / "config.json");
    const auto scenario = Scenario::load(config);
    const Domain& dom = scenario->domain;

    std::vector<std::string> stamps;
    if (!o.times.empty()) {
        for (const auto& t : o.times) stamps.push_back(file_stamp(parse_iso8601(t)));
    } else {
        std::set<std::string> common = snapshot_stamps(first);
        for (std::size_t r = 1; r < o.runs.size(); ++r) {
            const auto s = snapshot_stamps(o.runs[r]);
            std::set<std::string> keep;
            for (const auto& x : common)
                if (s.count(x)) keep.insert(x);
            common = keep;
        }
        stamps.assign(common.begin(), common.end());
    }
    if (stamps.empty()) throw ConfigError("analyze: no snapshot times to analyze");

    const double zeta = o.zeta >= 0.0 ? o.zeta : config.monte_carlo.zeta_p;
    std::vector<std::vector<CellVolumes>> volumes(o.runs.size());
    std::vector<double> epochs;
    for (std::size_t r = 0; r < o.runs.size(); ++r) {
        for (const auto& st : stamps) {
            const auto path = std::filesystem::path(o.runs[r]) / ("snap_" + st + ".csv");
            if (!std::filesystem::exists(path)) throw ConfigError("analyze: missing snapshot " + path.string());
            SnapshotFile f = read_snapshot_csv(path);
            if (r == 0) epochs.push_back(f.epoch_seconds);
            volumes[r].push_back(cell_volumes(f.particles, dom));
        }
    }
    const Region region = parse_region(o.region, dom, stamps.size());
    std::vector<const std::vector<CellVolumes>*> ptrs;
    std::vector<std::vector<Grid2<double>>> grids;
    for (const auto& v : volumes) {
        ptrs.push_back(&v);
        std::vector<Grid2<double>> g;
        for (const auto& cv : v) g.push_back(cv.all);
        grids.push_back(std::move(g));
    }
    const MonteCarloAggregate agg = aggregate_realizations(ptrs, dom, zeta);

    OutputWriter writer(o.output.empty() ? std::filesystem::path("scem_analysis") : std::filesystem::path(o.output));
    write_aggregate(writer, dom, epochs, agg);
    std::size_t hits = 0;
    for (const auto& g : grids) hits += presence(g, zeta, region) ? 1 : 0;
    nlohmann::ordered_json report;
    report["runs"] = o.runs;
    report["zeta_p"] = zeta;
    report["region_cells"] = region.size();
    report["region_presence_probability"] = static_cast<double>(hits) / static_cast<double>(grids.size());
    report["analysis_times"] = nlohmann::ordered_json::array();
    for (double e : epochs) report["analysis_times"].push_back(format_iso8601(e));
    writer.write_text("report.json", report.dump(2) + "\n");
    writer.write_manifest(true);
    out << "analyzed " << o.runs.size() << " run(s) at " << epochs.size() << " time(s): region presence probability "
        << report["region_presence_probability"].get<double>() << "\n";
    return kExitOk;
}

int validate(const Options& o, std::ostream& out) {
    const ScenarioConfig config = load(o);
    Scenario::load(config);
    out << echo_text(config);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"scem: oil-spill drift simulator", "scem"};
    app.footer("Configuration keys (JSON; override with --set key=value):\n" + describe_config_keys() +
               "\nEnvironment: SCEM_OUTPUT_DIR overrides output.directory.\n"
               "Exit codes: 0 success, 2 configuration error, 3 runtime error.");
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", o.config, "scenario JSON file");
        if (needs_config) c->required()->check(CLI::ExistingFile);
        sub->add_option("--set", o.overrides, "override a config key, key=value (repeatable)");
        sub->add_option("--output", o.output, "output directory");
        sub->add_flag("--verbose,-v", o.verbose, "debug logging");
        sub->add_flag("--quiet,-q", o.quiet, "warnings and errors only");
    };
    auto* sim = app.add_subcommand("simulate", "run one realization");
    common(sim, true);
    sim->add_option("--seed", o.seed, "random seed")->check(CLI::NonNegativeNumber);
    sim->add_flag("--dump-flow", o.dump_flow, "write u, v, p and divergence rasters every step");

    auto* mc = app.add_subcommand("monte-carlo", "run sampled realizations and aggregate them");
    common(mc, true);
    mc->add_option("--seed", o.seed, "master seed")->check(CLI::NonNegativeNumber);
    mc->add_option("--realizations", o.realizations, "number of realizations")->check(CLI::PositiveNumber);
    mc->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    mc->add_flag("--keep-snapshots", o.keep_snapshots, "store particle snapshots of each realization");
    mc->add_flag("--identical-seeds", o.identical_seeds, "reuse the master seed and nominal parameters");

    auto* an = app.add_subcommand("analyze", "recompute statistics from stored snapshots");
    an->add_option("--runs", o.runs, "run directories")->required();
    an->add_option("--zeta", o.zeta, "presence threshold, m^3");
    an->add_option("--region", o.region, "cell box i0:i1,j0:j1 (default: whole grid)");
    an->add_option("--times", o.times, "ISO-8601 snapshot times (default: all common)");
    an->add_option("--output", o.output, "output directory");
    an->add_flag("--verbose,-v", o.verbose, "debug logging");
    an->add_flag("--quiet,-q", o.quiet, "warnings and errors only");

    auto* va = app.add_subcommand("validate", "check a scenario and print its effective configuration");
    common(va, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    spdlog::set_level(o.verbose ? spdlog::level::debug : o.quiet ? spdlog::level::warn : spdlog::level::info);
    try {
        if (sim->parsed()) return simulate(o, out);
        if (mc->parsed()) return monte_carlo(o, out);
        if (an->parsed()) return analyze(o, out);
        return validate(o, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace scem
