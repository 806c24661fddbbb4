// Acceptance checks. One line per criterion; tolerances are fixed here.
// Usage: scem_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <spdlog/spdlog.h>

#include "scem/cli.hpp"
#include "scem/config.hpp"
#include "scem/counter_rng.hpp"
#include "scem/depth_profiles.hpp"
#include "scem/engine.hpp"
#include "scem/flow_solver.hpp"
#include "scem/monte_carlo.hpp"
#include "scem/oil_transport.hpp"
#include "scem/outputs.hpp"
#include "scem/time_utils.hpp"
#include "scem/wind_model.hpp"

using namespace scem;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path scenario_path(const char* name) { return fs::path(SCEM_SOURCE_DIR) / "scenarios" / name; }

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("scem_acceptance_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double gaussian(const CounterRng& rng, std::uint64_t step) {
    const double u1 = 1.0 - rng.uniform(0, step, 0);
    const double u2 = rng.uniform(0, step, 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// ---------------------------------------------------------------------------

Outcome capillary() {
    const double l = capillary_wavelength(0.0728, 1000.0, 1.225);
    return {std::abs(l - 0.0171) <= 0.0005, fmt("L = %.6f m (target 0.0171 +- 0.0005)", l)};
}

Outcome ekman_one_percent() {
    const EkmanLayer e = ekman_layer({0.0, 10.0}, 45.0, 1025.0, 1.225);
    const double ratio = e.v0 / 10.0;
    return {ratio >= 0.005 && ratio <= 0.02, fmt("V0 / U = %.4f%% (band 0.5%% .. 2.0%%)", 100.0 * ratio)};
}

Outcome ekman_spiral() {
    const Vec2 w{7.0, 5.0};
    double worst_decay = 0.0, worst_turn = 0.0, worst_mirror = 0.0;
    for (double lat : {45.0, 30.0, 60.0}) {
        const EkmanLayer e = ekman_layer(w, lat, 1025.0, 1.225);
        const Vec2 top = ekman_profile(w, 0.0, lat, 1025.0, 1.225);
        for (int k = 1; k <= 20; ++k) {
            const double z = e.depth * k / 10.0;
            const Vec2 v = ekman_profile(w, z, lat, 1025.0, 1.225);
            const double expect = std::exp(-kPi * z / e.depth);
            worst_decay = std::max(worst_decay, std::abs(v.norm() / top.norm() - expect) / expect);
        }
        const Vec2 bottom = ekman_profile(w, e.depth, lat, 1025.0, 1.225);
        const double turn = std::atan2(top.x * bottom.y - top.y * bottom.x, top.x * bottom.x + top.y * bottom.y);
        worst_turn = std::max(worst_turn, std::abs(std::abs(turn) - kPi));
        for (double frac : {0.1, 0.3, 0.7}) {
            auto rotation = [&](double la) {
                const Vec2 a = ekman_profile(w, 0.0, la, 1025.0, 1.225);
                const Vec2 b = ekman_profile(w, frac * e.depth, la, 1025.0, 1.225);
                return std::atan2(a.x * b.y - a.y * b.x, a.x * b.x + a.y * b.y);
            };
            const double north = rotation(lat);
            const double south = rotation(-lat);
            worst_mirror = std::max(worst_mirror, std::abs(north + south));
            if (north * south >= 0.0) worst_mirror = 1.0;
        }
    }
    const bool ok = worst_decay <= 1e-9 && worst_turn <= 1e-9 && worst_mirror <= 1e-9;
    return {ok, fmt("decay err %.2e, half-turn err %.2e, mirror err %.2e (limit 1e-9)", worst_decay, worst_turn,
                    worst_mirror)};
}

Outcome projection() {
    SolverParams p;
    const BoundarySpec open{EdgeCondition::open(), EdgeCondition::open(), EdgeCondition::open(),
                            EdgeCondition::open()};
    double worst = 0.0;
    bool pinned_ok = true;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const CounterRng rng(seed);
        VelocityField f(FlowKind::water, 64, 42, 10380.0, 10548.0, 0.0);
        std::uint64_t k = 0;
        for (double& a : f.u.data()) a = 2.0 * rng.uniform(1, k++, 0) - 1.0;
        for (double& a : f.v.data()) a = 2.0 * rng.uniform(2, k++, 0) - 1.0;
        ObstacleMask obs(64, 42, 0);
        for (int n = 0; n < 60; ++n) {
            const int i = 1 + static_cast<int>(rng.uniform(3, n, 0) * 62);
            const int j = 1 + static_cast<int>(rng.uniform(3, n, 1) * 40);
            obs(i, j) = 1;
        }
        CellIndex sensor{static_cast<int>(rng.uniform(4, 0, 0) * 64), static_cast<int>(rng.uniform(4, 0, 1) * 42)};
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj)
                if (obs.contains(sensor.i + di, sensor.j + dj)) obs(sensor.i + di, sensor.j + dj) = 0;
        const std::vector<MeasurementConstraint> cons{{sensor, {0.4, -0.3}, 0.0}};
        apply_boundary(f, open);
        apply_obstacles(f, obs);
        apply_constraints(f, cons, open, obs);
        const double w = f.u(sensor.i, sensor.j), e = f.u(sensor.i + 1, sensor.j);
        const double s = f.v(sensor.i, sensor.j), n = f.v(sensor.i, sensor.j + 1);
        project(f, open, obs, cons, p);
        for (int j = 0; j < 42; ++j)
            for (int i = 0; i < 64; ++i)
                if (!obs(i, j)) worst = std::max(worst, std::abs(f.divergence(i, j)));
        pinned_ok = pinned_ok && f.u(sensor.i, sensor.j) == w && f.u(sensor.i + 1, sensor.j) == e &&
                    f.v(sensor.i, sensor.j) == s && f.v(sensor.i, sensor.j + 1) == n;
    }
    return {worst <= 1e-8 && pinned_ok,
            fmt("max |div| = %.3e 1/s over 100 fields (limit 1e-8); pinned faces %s", worst,
                pinned_ok ? "unchanged" : "CHANGED")};
}

// Noisy forcing: 8 m/s plus AR(1) gusts (1 h correlation, sigma 3 m/s),
// half-hour samples over 30 days. Peak of the cross-correlation between the
// forcing and each estimator, over lags 0..99 samples.
Outcome ekman_lag() {
    const double dt = 1800.0;
    const int n = 30 * 48;
    const double phi = std::exp(-dt / 3600.0);
    const CounterRng rng(20190312);
    std::vector<double> wind(n);
    double g = 0.0;
    for (int k = 0; k < n; ++k) {
        g = phi * g + 3.0 * std::sqrt(1.0 - phi * phi) * gaussian(rng, k);
        wind[k] = 8.0 + g;
    }
    std::vector<double> weighted(n), moving(n);
    Vec2 e{wind[0], 0.0};
    std::deque<double> window;
    const int len = static_cast<int>(kEkmanFormationPeriod / dt);
    for (int k = 0; k < n; ++k) {
        if (k > 0) e = update_ekman_wind(e, {wind[k], 0.0}, dt);
        weighted[k] = e.x;
        window.push_back(wind[k]);
        if (static_cast<int>(window.size()) > len) window.pop_front();
        double s = 0.0;
        for (double v : window) s += v;
        moving[k] = s / static_cast<double>(window.size());
    }
    const int skip = 2 * len;  // both estimators past their start-up
    auto peak_lag = [&](const std::vector<double>& y) {
        int best = 0;
        double best_c = -2.0;
        for (int lag = 0; lag < 100; ++lag) {
            double mx = 0.0, my = 0.0;
            int m = 0;
            for (int k = skip; k + lag < n; ++k, ++m) {
                mx += wind[k];
                my += y[k + lag];
            }
            mx /= m;
            my /= m;
            double sxy = 0.0, sxx = 0.0, syy = 0.0;
            for (int k = skip; k + lag < n; ++k) {
                sxy += (wind[k] - mx) * (y[k + lag] - my);
                sxx += (wind[k] - mx) * (wind[k] - mx);
                syy += (y[k + lag] - my) * (y[k + lag] - my);
            }
            const double c = sxy / std::sqrt(sxx * syy);
            if (c > best_c) {
                best_c = c;
                best = lag;
            }
        }
        return best;
    };
    const int lw = peak_lag(weighted);
    const int lm = peak_lag(moving);
    return {lw < lm, fmt("peak lag weighted mean %.1f h vs 12 h moving average %.1f h", lw * 0.5, lm * 0.5)};
}

Outcome random_walk() {
    const int particles = 100000;
    const int steps = 100;
    const double dt = 100.0, d_h = 1.0, d_v = 0.01;
    const CounterRng rng(6);
    double sx = 0.0, sy = 0.0, sz = 0.0, sxx = 0.0, syy = 0.0, szz = 0.0;
    for (int p = 0; p < particles; ++p) {
        Vec3 pos{};
        for (int s = 0; s < steps; ++s) {
            const Vec3 d = turbulent_displacement(d_h, d_v, dt, rng.uniform(p, s, 0), rng.uniform(p, s, 1),
                                                  rng.uniform(p, s, 2));
            pos.x += d.x;
            pos.y += d.y;
            pos.z += d.z;
        }
        sx += pos.x;
        sy += pos.y;
        sz += pos.z;
        sxx += pos.x * pos.x;
        syy += pos.y * pos.y;
        szz += pos.z * pos.z;
    }
    const double n = particles;
    const double t = steps * dt;
    const double vx = (sxx - sx * sx / n) / (n - 1) / (2.0 * d_h * t);
    const double vy = (syy - sy * sy / n) / (n - 1) / (2.0 * d_h * t);
    const double vz = (szz - sz * sz / n) / (n - 1) / (2.0 * d_v * t);
    const bool ok = std::abs(vx - 1.0) <= 0.05 && std::abs(vy - 1.0) <= 0.05 && std::abs(vz - 1.0) <= 0.05;
    return {ok, fmt("variance / 2Dt: x %.4f, y %.4f, z %.4f (limit 1 +- 0.05)", vx, vy, vz)};
}

Outcome entrainment_statistics() {
    const int trials = 100000;
    const double dt = 600.0;
    const double rate = 0.01 / dt;
    WaveSummary w;
    w.calm = false;
    w.hs = 2.0;
    w.t_peak = 7.0;
    const CounterRng rng(7);
    int hits = 0;
    double lo = 1e9, hi = -1e9;
    for (int k = 0; k < trials; ++k) {
        OilParticle p;
        if (entrain(p, rate, w, dt, rng.uniform(k, 0, 0), rng.uniform(k, 0, 1))) {
            ++hits;
            lo = std::min(lo, p.z / w.hs);
            hi = std::max(hi, p.z / w.hs);
        }
    }
    const double expect = -std::expm1(-0.01);
    const double sigma = std::sqrt(expect * (1.0 - expect) / trials);
    const double frac = static_cast<double>(hits) / trials;
    const bool ok = std::abs(frac - expect) <= 3.0 * sigma && lo >= 1.0 && hi <= 1.7;
    return {ok, fmt("fraction %.6f vs %.6f (%.2f sigma); depths %.3f..%.3f Hs", frac, expect,
                    (frac - expect) / sigma, lo, hi)};
}

Outcome sample_size() {
    bool same = true;
    std::int64_t first = required_particles(0.05, 1.0, 60.0);
    for (double d : {0.0, 0.01, 1.0, 50.0})
        for (double dt : {1.0, 60.0, 1800.0}) same = same && required_particles(0.05, d, dt) == first;
    const bool floor_applied = required_particles(0.05, 1.0, 60.0, true) == kRecommendedParticles;
    const bool warned = !check_particle_budget(1000, false) && check_particle_budget(3000, false);
    return {first == 1055 && same && floor_applied && warned,
            fmt("required(0.05) = %lld for every D_h, dt: %s; floor 3000 %s", static_cast<long long>(first),
                same ? "yes" : "no", floor_applied && warned ? "enforced" : "NOT enforced")};
}

Outcome volume_conservation() {
    const auto sc = Scenario::load(load_config(scenario_path("reference.json")));
    Engine engine(sc, RunParameters::from(*sc));
    int snapshots = 0, exact = 0;
    engine.run(48.0 * 3600.0, [&](const SimulationState& s) {
        ++snapshots;
        double total = 0.0;  // surface + entrained + beached + escaped, id order
        for (const OilParticle& p : s.particles) total += p.volume;
        exact += total == s.released_volume ? 1 : 0;
    });
    const double released = engine.state().released_volume;
    const double source = sc->config.source_volume;
    const bool all_released = std::abs(released - source) <= 1e-9 * source;
    return {exact == snapshots && all_released && snapshots == 49,
            fmt("%d/%d snapshots exact; released %.6f of %.6f m^3", exact, snapshots, released, source)};
}

// Smoothing: centred 25-sample moving average; a rise of more than 1e-3
// between neighbours counts as non-monotone.
Outcome monte_carlo_convergence() {
    const auto sc = Scenario::load(load_config(scenario_path("reference.json")));
    MonteCarloOptions o;
    o.realizations = 500;
    o.master_seed = sc->config.seed;
    o.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const auto t0 = std::chrono::steady_clock::now();
    const MonteCarloResult r = run_monte_carlo(sc, o);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto& tr = r.aggregate.varmax;
    if (tr.size() < 500) return {false, fmt("only %zu realizations aggregated", tr.size())};
    const bool decays = decays_after_smoothing(tr, 25, 1e-3, 1);
    const double rel = std::abs(tr[299] - tr[499]) / tr[499];
    return {decays && rel <= 0.2, fmt("smoothed trace %s; Var_max(300) %.5f, Var_max(500) %.5f, rel diff %.4f "
                                      "(limit 0.2); %d ok; %.0f s",
                                      decays ? "non-increasing" : "RISES", tr[299], tr[499], rel, r.succeeded, wall)};
}

Outcome performance() {
    const auto sc = Scenario::load(load_config(scenario_path("grande_america.json")));
    const fs::path dir = scratch("perf");
    OutputWriter out(dir);
    Engine engine(sc, RunParameters::from(*sc));
    const double start = sc->config.domain.start_time;
    int snaps = 0;
    const auto t0 = std::chrono::steady_clock::now();
    engine.run(288.0 * 3600.0, [&](const SimulationState& s) {
        out.write_text("snap_" + file_stamp(start + s.time) + ".csv",
                       format_snapshot_csv(s.particles, sc->domain, start + s.time));
        ++snaps;
    });
    out.write_manifest(true);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = wall <= 900.0 && snaps == 289 && sc->domain.nx() == 64 && sc->domain.ny() == 42 &&
                    engine.state().particles.size() == 3000;
    return {ok, fmt("288 h, 64x42, %zu particles, %d snapshots, %lld steps in %.1f s (limit 900 s)",
                    engine.state().particles.size(), snaps, static_cast<long long>(engine.state().step), wall)};
}

Outcome determinism() {
    const fs::path dir = scratch("determinism");
    const std::string cfg = scenario_path("reference.json").string();
    auto run = [&](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        return run_cli(args, out, err);
    };
    bool ok = true;
    ok &= run({"simulate", "--config", cfg, "--output", (dir / "s1").string(), "-q"}) == kExitOk;
    ok &= run({"simulate", "--config", cfg, "--output", (dir / "s2").string(), "-q"}) == kExitOk;
    const bool sim_same = ok && slurp(dir / "s1" / "manifest.json") == slurp(dir / "s2" / "manifest.json");
    bool mc_same = true;
    for (const char* w : {"1", "2", "5"}) {
        ok &= run({"monte-carlo", "--config", cfg, "--output", (dir / (std::string("m") + w)).string(),
                   "--realizations", "10", "--workers", w, "-q"}) == kExitOk;
        mc_same = mc_same && slurp(dir / "m1" / "manifest.json") == slurp(dir / (std::string("m") + w) / "manifest.json");
    }
    return {ok && sim_same && mc_same, fmt("simulate re-run manifests %s; monte-carlo with 1/2/5 workers %s",
                                           sim_same ? "identical" : "DIFFER", mc_same ? "identical" : "DIFFER")};
}

Outcome arithmetic_table() {
    const double b0 = wind_drift_angle({0.0, 0.0});
    const double b16 = wind_drift_angle({16.0, 0.0});
    const double b25 = wind_drift_angle({0.0, 25.0});
    const double tidal = tidal_profile({1.0, 0.0}, 20.0, 40.0).x;
    const Vec2 shear = wind_shear_profile({10.0, -4.0}, 0.0, 0.02, 0.034);
    double err = std::abs(b0 - 40.0);
    err = std::max(err, std::abs(b16 - 8.0));
    err = std::max(err, std::abs(b25 - 0.0));
    err = std::max(err, std::abs(tidal - std::pow(0.5, 1.0 / 6.0)));
    err = std::max(err, std::abs(shear.x - 0.2));
    err = std::max(err, std::abs(shear.y + 0.08));
    return {err <= 1e-12 && std::abs(tidal - 0.8909) < 5e-5,
            fmt("beta(0,16,25) = %g, %g, %g deg; tidal factor %.10f; shear (%.3f, %.3f); max err %.1e", b0, b16, b25,
                tidal, shear.x, shear.y, err)};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_level(spdlog::level::err);
    const std::vector<Criterion> all = {
        {1, "capillary wavelength", capillary},
        {2, "Ekman surface speed near 1% of wind", ekman_one_percent},
        {3, "Ekman spiral geometry", ekman_spiral},
        {4, "pressure projection and pinned faces", projection},
        {5, "weighted-mean vs moving-average lag", ekman_lag},
        {6, "random-walk diffusion variance", random_walk},
        {7, "entrainment statistics", entrainment_statistics},
        {8, "sample-size formula and floor", sample_size},
        {9, "volume conservation", volume_conservation},
        {10, "Monte-Carlo convergence", monte_carlo_convergence},
        {11, "performance envelope", performance},
        {12, "determinism across re-runs and workers", determinism},
        {13, "drift angle and profile arithmetic", arithmetic_table},
    };
    std::vector<int> wanted;
    for (int a = 1; a < argc; ++a) wanted.push_back(std::atoi(argv[a]));
    int failures = 0;
    for (const Criterion& c : all) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s  %2d  %-40s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
