#include "scem/stochastic_analysis.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "scem/counter_rng.hpp"

namespace scem {

CellVolumes cell_volumes(const std::vector<OilParticle>& particles, const Domain& domain) {
    CellVolumes v{Grid2<double>(domain.nx(), domain.ny(), 0.0), Grid2<double>(domain.nx(), domain.ny(), 0.0), 0.0};
    for (const OilParticle& p : particles) {
        if (p.status == ParticleStatus::escaped) {
            v.escaped += p.volume;
            continue;
        }
        auto cell = domain.cell_of(p.x, p.y);
        if (!cell) {
            v.escaped += p.volume;
            continue;
        }
        v.all(*cell) += p.volume;
        if (p.status == ParticleStatus::surface) v.surface(*cell) += p.volume;
    }
    return v;
}

Region full_region(int nx, int ny, std::size_t times) {
    Region r;
    r.reserve(static_cast<std::size_t>(nx) * ny * times);
    for (std::size_t k = 0; k < times; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) r.push_back({k, {i, j}});
    return r;
}

bool presence(const std::vector<Grid2<double>>& volumes, double zeta_p, const Region& region) {
    if (region.empty()) throw ModelError("presence: empty region");
    for (const RegionCell& rc : region) {
        if (rc.time >= volumes.size() || !volumes[rc.time].contains(rc.cell.i, rc.cell.j))
            throw ModelError("presence: region cell outside the run");
        if (volumes[rc.time](rc.cell) > zeta_p) return true;
    }
    return false;
}

double presence_probability(const std::vector<std::vector<Grid2<double>>>& realizations, double zeta_p,
                            const Region& region) {
    if (realizations.size() < 2) throw ModelError("presence_probability: at least 2 realizations required");
    std::size_t hits = 0;
    for (const auto& r : realizations) hits += presence(r, zeta_p, region) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(realizations.size());
}

namespace {

double indicator_variance(std::int64_t hits, std::int64_t n) {
    if (n < 2) return 0.0;
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return p * (1.0 - p) * static_cast<double>(n) / static_cast<double>(n - 1);
}

}  // namespace

PresenceField presence_field(const std::vector<const Grid2<double>*>& volumes, double zeta_p) {
    if (volumes.empty()) throw ModelError("presence_field: no realizations");
    const int nx = volumes.front()->nx();
    const int ny = volumes.front()->ny();
    Grid2<std::int64_t> hits(nx, ny, 0);
    for (const Grid2<double>* g : volumes) {
        if (g->nx() != nx || g->ny() != ny) throw ModelError("presence_field: grid mismatch");
        for (std::size_t c = 0; c < g->size(); ++c) hits.data()[c] += g->data()[c] > zeta_p ? 1 : 0;
    }
    const auto n = static_cast<std::int64_t>(volumes.size());
    PresenceField f{Grid2<double>(nx, ny, 0.0), Grid2<double>(nx, ny, 0.0), static_cast<int>(n)};
    for (std::size_t c = 0; c < hits.size(); ++c) {
        f.probability.data()[c] = static_cast<double>(hits.data()[c]) / static_cast<double>(n);
        f.variance.data()[c] = indicator_variance(hits.data()[c], n);
    }
    return f;
}

std::vector<double> varmax_trace(const std::vector<std::vector<const Grid2<double>*>>& volumes, double zeta_p) {
    std::vector<double> trace;
    if (volumes.empty()) return trace;
    const std::size_t times = volumes.front().size();
    std::size_t cells = 0;
    for (const auto* g : volumes.front()) cells += g->size();
    std::vector<std::int64_t> hits(cells, 0);
    trace.reserve(volumes.size());
    for (std::size_t n = 0; n < volumes.size(); ++n) {
        if (volumes[n].size() != times) throw ModelError("varmax_trace: analysis-time count differs");
        std::size_t c = 0;
        for (const auto* g : volumes[n])
            for (double v : g->data()) hits[c++] += v > zeta_p ? 1 : 0;
        const auto count = static_cast<std::int64_t>(n + 1);
        double vmax = 0.0;
        for (std::int64_t h : hits) vmax = std::max(vmax, indicator_variance(h, count));
        trace.push_back(vmax);
    }
    return trace;
}

std::vector<double> moving_average(const std::vector<double>& trace, int window) {
    const int n = static_cast<int>(trace.size());
    const int half = std::max(window, 1) / 2;
    std::vector<double> out(trace.size(), 0.0);
    for (int k = 0; k < n; ++k) {
        const int lo = std::max(0, k - half);
        const int hi = std::min(n - 1, k + half);
        double sum = 0.0;
        for (int m = lo; m <= hi; ++m) sum += trace[m];
        out[k] = sum / (hi - lo + 1);
    }
    return out;
}

bool decays_after_smoothing(const std::vector<double>& trace, int window, double tolerance, std::size_t skip) {
    // Skipped entries are dropped before smoothing so they cannot leak into the window.
    if (skip >= trace.size()) return true;
    const std::vector<double> s =
        moving_average(std::vector<double>(trace.begin() + static_cast<std::ptrdiff_t>(skip), trace.end()), window);
    for (std::size_t k = 1; k < s.size(); ++k)
        if (s[k] > s[k - 1] + tolerance) return false;
    return true;
}

DriftPmf drift_pmf(const CellVolumes& v) {
    double total = v.escaped;
    for (double x : v.all.data()) total += x;
    if (!(total > 0.0)) throw ModelError("drift_pmf: no oil volume");
    DriftPmf pmf{Grid2<double>(v.all.nx(), v.all.ny(), 0.0), v.escaped / total};
    for (std::size_t c = 0; c < v.all.size(); ++c) pmf.mass.data()[c] = v.all.data()[c] / total;
    return pmf;
}

DriftPmf mean_pmf(const std::vector<const DriftPmf*>& pmfs) {
    if (pmfs.empty()) throw ModelError("mean_pmf: no realizations");
    DriftPmf out{Grid2<double>(pmfs.front()->mass.nx(), pmfs.front()->mass.ny(), 0.0), 0.0};
    for (const DriftPmf* p : pmfs) {
        for (std::size_t c = 0; c < out.mass.size(); ++c) out.mass.data()[c] += p->mass.data()[c];
        out.escaped += p->escaped;
    }
    const double n = static_cast<double>(pmfs.size());
    for (double& m : out.mass.data()) m /= n;
    out.escaped /= n;
    return out;
}

std::optional<Vec2> spill_centre(const Grid2<double>& surface, const Domain& domain) {
    std::optional<CellIndex> best;
    double best_v = 0.0;
    for (int i = 0; i < surface.nx(); ++i)
        for (int j = 0; j < surface.ny(); ++j)
            if (surface(i, j) > best_v) {
                best_v = surface(i, j);
                best = CellIndex{i, j};
            }
    if (!best) return std::nullopt;
    return domain.centre_of(*best);
}

MeanCentre mean_spill_centre(const std::vector<std::optional<Vec2>>& centres) {
    MeanCentre m;
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& c : centres) {
        if (!c) {
            ++m.excluded;
            continue;
        }
        sx += c->x;
        sy += c->y;
        ++m.used;
    }
    if (m.excluded > 0) spdlog::warn("mean spill centre: {} realization(s) without surface oil excluded", m.excluded);
    if (m.used > 0) m.position = {sx / m.used, sy / m.used};
    return m;
}

SampledParameters sample_parameters(const MonteCarloSpec& spec, std::uint64_t seed) {
    const CounterRng rng(seed);
    // stream 0 holds the scalar draws, stream 1 the leak-window attempts
    auto draw = [&](const SamplingBounds& b, std::uint64_t stream, std::uint64_t step, std::uint64_t slot) {
        if (b.hi == b.lo) return b.lo;
        return b.lo + (b.hi - b.lo) * rng.uniform(stream, step, slot);
    };
    SampledParameters p;
    p.alpha_w_o = draw(spec.alpha_w_o, 0, 0, 0);
    p.alpha_c_o = draw(spec.alpha_c_o, 0, 0, 1);
    p.c_smag = draw(spec.c_smag, 0, 0, 2);
    p.mass_tonnes = draw(spec.mass_tonnes, 0, 0, 3);
    for (std::uint64_t attempt = 0;; ++attempt) {
        p.t0 = draw(spec.t0, 1, attempt, 0);
        p.tf = draw(spec.tf, 1, attempt, 1);
        if (p.t0 < p.tf) break;
        if (attempt > 100000) throw ConfigError("sample_parameters: leak window bounds never give t0 < tf");
        ++p.redraws;
    }
    return p;
}

}  // namespace scem
