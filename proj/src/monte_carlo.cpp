#include "scem/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "scem/counter_rng.hpp"
#include "scem/time_utils.hpp"

namespace scem {

std::vector<double> analysis_offsets(const Scenario& sc) {
    std::vector<double> out;
    const double start = sc.config.domain.start_time;
    for (double t : sc.config.monte_carlo.analysis_times) out.push_back(t - start);
    if (out.empty()) out.push_back(sc.duration);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RunParameters realization_parameters(const Scenario& sc, const SampledParameters& s, std::uint64_t seed) {
    RunParameters p = RunParameters::from(sc);
    p.advection.alpha_w_o = s.alpha_w_o;
    p.advection.alpha_c_o = s.alpha_c_o;
    p.c_smag = s.c_smag;
    p.source.t0 = s.t0 - sc.config.domain.start_time;
    p.source.tf = s.tf - sc.config.domain.start_time;
    p.source.volume = s.mass_tonnes * 1000.0 / sc.config.oil.rho_oil;
    p.seed = seed;
    return p;
}

RealizationOutcome run_realization(const std::shared_ptr<const Scenario>& scenario, std::uint64_t seed,
                                   const std::optional<SampledParameters>& sample,
                                   const std::vector<double>& times, bool keep_particles) {
    RealizationOutcome r;
    r.seed = seed;
    try {
        RunParameters params = RunParameters::from(*scenario);
        params.seed = seed;
        if (sample) {
            r.parameters = *sample;
            params = realization_parameters(*scenario, *sample, seed);
        }
        Engine engine(scenario, params);
        for (double t : times) {
            while (engine.state().time < t - 1e-9 * std::max(1.0, t)) engine.step_once(t);
            r.volumes.push_back(cell_volumes(engine.state().particles, scenario->domain));
            if (keep_particles) r.particles.push_back(engine.state().particles);
        }
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
        r.volumes.clear();
        r.particles.clear();
    }
    return r;
}

MonteCarloAggregate aggregate_realizations(const std::vector<const std::vector<CellVolumes>*>& volumes,
                                           const Domain& domain, double zeta_p) {
    MonteCarloAggregate agg;
    agg.realizations = static_cast<int>(volumes.size());
    if (volumes.empty()) throw ModelError("aggregation needs at least one realization");
    const std::size_t times = volumes.front()->size();
    std::vector<std::vector<const Grid2<double>*>> by_realization;
    for (const auto* v : volumes) {
        if (v->size() != times) throw ModelError("aggregation: analysis-time count differs between realizations");
        std::vector<const Grid2<double>*> row;
        for (const CellVolumes& cv : *v) row.push_back(&cv.all);
        by_realization.push_back(std::move(row));
    }
    agg.varmax = varmax_trace(by_realization, zeta_p);
    for (std::size_t k = 0; k < times; ++k) {
        std::vector<const Grid2<double>*> at_k;
        std::vector<DriftPmf> pmfs;
        std::vector<std::optional<Vec2>> centres;
        for (const auto* v : volumes) {
            const CellVolumes& cv = (*v)[k];
            at_k.push_back(&cv.all);
            double total = cv.escaped;
            for (double x : cv.all.data()) total += x;
            if (total > 0.0) pmfs.push_back(drift_pmf(cv));
            centres.push_back(spill_centre(cv.surface, domain));
        }
        agg.presence.push_back(presence_field(at_k, zeta_p));
        std::vector<const DriftPmf*> ptrs;
        for (const DriftPmf& p : pmfs) ptrs.push_back(&p);
        agg.pmf.push_back(ptrs.empty() ? DriftPmf{Grid2<double>(domain.nx(), domain.ny(), 0.0), 0.0} : mean_pmf(ptrs));
        agg.pmf_realizations.push_back(static_cast<int>(ptrs.size()));
        agg.centre.push_back(mean_spill_centre(centres));
    }
    return agg;
}

MonteCarloResult run_monte_carlo(const std::shared_ptr<const Scenario>& scenario, const MonteCarloOptions& opt) {
    if (opt.realizations < 2) throw ConfigError("monte carlo: at least 2 realizations required");
    MonteCarloResult res;
    res.analysis_times = analysis_offsets(*scenario);
    res.outcomes.resize(static_cast<std::size_t>(opt.realizations));

    std::atomic<int> next{0};
    std::atomic<int> done{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (int n = next.fetch_add(1); n < opt.realizations; n = next.fetch_add(1)) {
            const std::uint64_t seed =
                opt.identical_seeds ? opt.master_seed : CounterRng::derive_seed(opt.master_seed, n);
            std::optional<SampledParameters> sample;
            if (!opt.identical_seeds) sample = sample_parameters(scenario->config.monte_carlo, seed);
            res.outcomes[static_cast<std::size_t>(n)] =
                run_realization(scenario, seed, sample, res.analysis_times, opt.keep_particles);
            const int d = done.fetch_add(1) + 1;
            if (opt.progress) {
                std::lock_guard lock(progress_mutex);
                opt.progress(d, opt.realizations);
            }
        }
    };
    const int workers = std::clamp(opt.workers, 1, opt.realizations);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    std::vector<const std::vector<CellVolumes>*> ok;
    for (std::size_t n = 0; n < res.outcomes.size(); ++n) {
        const auto& o = res.outcomes[n];
        if (o.ok) {
            ok.push_back(&o.volumes);
        } else {
            spdlog::warn("realization {} (seed {}) failed: {}", n, o.seed, o.error);
        }
    }
    res.succeeded = static_cast<int>(ok.size());
    const double share = static_cast<double>(res.succeeded) / opt.realizations;
    if (share < scenario->config.monte_carlo.min_success)
        throw ModelError("monte carlo: only " + std::to_string(res.succeeded) + " of " +
                         std::to_string(opt.realizations) + " realizations succeeded");
    res.aggregate = aggregate_realizations(ok, scenario->domain, scenario->config.monte_carlo.zeta_p);
    return res;
}

void write_aggregate(OutputWriter& out, const Domain& domain, const std::vector<double>& epoch_times,
                     const MonteCarloAggregate& agg) {
    std::string centres = "time,used,excluded,x_m,y_m,lon,lat,pmf_realizations,pmf_escaped\n";
    char buf[256];
    for (std::size_t k = 0; k < epoch_times.size(); ++k) {
        const std::string stamp = file_stamp(epoch_times[k]);
        out.write_raster("presence_" + stamp + ".asc", domain, agg.presence[k].probability);
        out.write_raster("variance_" + stamp + ".asc", domain, agg.presence[k].variance);
        out.write_raster("pmf_" + stamp + ".asc", domain, agg.pmf[k].mass);
        const MeanCentre& c = agg.centre[k];
        const Vec2 geo = domain.to_geographic(c.position.x, c.position.y);
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g,%.17g,%.17g,%.17g,%d,%.17g\n",
                      format_iso8601(epoch_times[k]).c_str(), c.used, c.excluded, c.position.x, c.position.y, geo.x,
                      geo.y, agg.pmf_realizations[k], agg.pmf[k].escaped);
        centres += buf;
    }
    out.write_text("centres.csv", centres);
    std::string trace = "realizations,var_max\n";
    for (std::size_t n = 0; n < agg.varmax.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", n + 1, agg.varmax[n]);
        trace += buf;
    }
    out.write_text("varmax_trace.csv", trace);
}

}  // namespace scem
