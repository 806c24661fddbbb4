#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "scem/stochastic_analysis.hpp"
#include "scem/time_utils.hpp"

using namespace scem;

namespace {

Domain small_domain(int nx = 4, int ny = 3) {
    DomainSpec s;
    s.origin_lon = -5.0;
    s.origin_lat = 45.0;
    s.nx = nx;
    s.ny = ny;
    s.dx = 100.0;
    s.dy = 100.0;
    s.n_crit = 4;
    return Domain::build(s, Grid2<double>(nx, ny, 20.0));
}

OilParticle particle(std::uint64_t id, double x, double y, double v, ParticleStatus st = ParticleStatus::surface) {
    OilParticle p;
    p.id = id;
    p.x = x;
    p.y = y;
    p.volume = v;
    p.status = st;
    return p;
}

std::vector<std::vector<Grid2<double>>> random_realizations(std::mt19937_64& gen, int n, int times, int nx,
                                                            int ny) {
    std::bernoulli_distribution oil(0.3);
    std::uniform_real_distribution<double> v(0.0, 2.0);
    std::vector<std::vector<Grid2<double>>> r(n);
    for (auto& real : r) {
        for (int k = 0; k < times; ++k) {
            Grid2<double> g(nx, ny, 0.0);
            for (double& x : g.data()) x = oil(gen) ? v(gen) : 0.0;
            real.push_back(g);
        }
    }
    return r;
}

}  // namespace

TEST(Stochastic, CellVolumesSplitByStatus) {
    const Domain d = small_domain();
    const std::vector<OilParticle> ps = {
        particle(0, 50.0, 50.0, 1.0),
        particle(1, 60.0, 40.0, 2.0, ParticleStatus::entrained),
        particle(2, 350.0, 250.0, 4.0, ParticleStatus::beached),
        particle(3, 1e6, 0.0, 8.0, ParticleStatus::escaped),
        particle(4, -1.0, 50.0, 16.0),  // outside but not yet flagged
    };
    const CellVolumes v = cell_volumes(ps, d);
    EXPECT_EQ(v.all(0, 0), 3.0);
    EXPECT_EQ(v.surface(0, 0), 1.0);
    EXPECT_EQ(v.all(3, 2), 4.0);
    EXPECT_EQ(v.surface(3, 2), 0.0);
    EXPECT_EQ(v.escaped, 24.0);
    const double total = std::accumulate(v.all.data().begin(), v.all.data().end(), 0.0) + v.escaped;
    EXPECT_EQ(total, 31.0);
}

TEST(Stochastic, PresenceIsAnyCellAboveThreshold) {
    std::vector<Grid2<double>> vols(2, Grid2<double>(3, 3, 0.0));
    vols[1](2, 1) = 0.5;
    const Region all = full_region(3, 3, 2);
    EXPECT_EQ(all.size(), 18u);
    EXPECT_TRUE(presence(vols, 0.0, all));
    EXPECT_FALSE(presence(vols, 0.5, all));  // strictly greater
    EXPECT_FALSE(presence(vols, 0.0, {{0, {2, 1}}}));
    EXPECT_TRUE(presence(vols, 0.0, {{1, {2, 1}}}));
    EXPECT_THROW(presence(vols, 0.0, {}), ModelError);
    EXPECT_THROW(presence(vols, 0.0, {{2, {0, 0}}}), ModelError);
    EXPECT_THROW(presence(vols, 0.0, {{0, {3, 0}}}), ModelError);
}

// Brute-force oracle: count realizations with any region cell above zeta.
TEST(Stochastic, ProbabilityMatchesBruteForce) {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 50; ++trial) {
        const auto r = random_realizations(gen, 20, 2, 3, 3);
        std::uniform_int_distribution<int> c(0, 2), t(0, 1);
        Region region;
        for (int m = 0; m < 3; ++m) region.push_back({static_cast<std::size_t>(t(gen)), {c(gen), c(gen)}});
        const double zeta = 1.0;
        int hits = 0;
        for (const auto& real : r) {
            bool any = false;
            for (const RegionCell& rc : region) any = any || real[rc.time](rc.cell.i, rc.cell.j) > zeta;
            hits += any;
        }
        EXPECT_DOUBLE_EQ(presence_probability(r, zeta, region), hits / 20.0);
    }
    EXPECT_THROW(presence_probability({{Grid2<double>(1, 1, 0.0)}}, 0.0, full_region(1, 1, 1)), ModelError);
}

TEST(Stochastic, ProbabilityBoundsAndMonotoneRegion) {
    std::mt19937_64 gen(8);
    const auto r = random_realizations(gen, 30, 1, 4, 4);
    Region grow;
    double last = 0.0;
    for (const RegionCell& rc : full_region(4, 4, 1)) {
        grow.push_back(rc);
        const double p = presence_probability(r, 0.5, grow);
        EXPECT_GE(p, last);
        EXPECT_LE(p, 1.0);
        last = p;
    }
    // Raising the threshold never raises the probability.
    double prev = 1.0;
    for (double z = 0.0; z < 2.5; z += 0.25) {
        const double p = presence_probability(r, z, full_region(4, 4, 1));
        EXPECT_LE(p, prev);
        prev = p;
    }
    EXPECT_EQ(prev, 0.0);
}

// Sample variance of 0/1 indicators with Bessel correction.
TEST(Stochastic, PresenceFieldVariance) {
    std::vector<Grid2<double>> g(4, Grid2<double>(2, 1, 0.0));
    g[0](0, 0) = 1.0;
    g[1](0, 0) = 1.0;
    g[2](0, 0) = 1.0;
    std::vector<const Grid2<double>*> ptr;
    for (const auto& x : g) ptr.push_back(&x);
    const PresenceField f = presence_field(ptr, 0.0);
    EXPECT_DOUBLE_EQ(f.probability(0, 0), 0.75);
    // indicators 1,1,1,0: mean 0.75, sum sq dev 0.75, / 3 = 0.25
    EXPECT_DOUBLE_EQ(f.variance(0, 0), 0.25);
    EXPECT_EQ(f.probability(1, 0), 0.0);
    EXPECT_EQ(f.variance(1, 0), 0.0);
    EXPECT_EQ(f.realizations, 4);

    std::mt19937_64 gen(4);
    std::bernoulli_distribution b(0.4);
    for (int n = 2; n < 40; n += 3) {
        std::vector<Grid2<double>> h(n, Grid2<double>(1, 1, 0.0));
        std::vector<const Grid2<double>*> hp;
        std::vector<double> ind;
        for (auto& x : h) {
            x(0, 0) = b(gen) ? 1.0 : 0.0;
            ind.push_back(x(0, 0));
            hp.push_back(&x);
        }
        const double mean = std::accumulate(ind.begin(), ind.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : ind) ss += (v - mean) * (v - mean);
        EXPECT_NEAR(presence_field(hp, 0.0).variance(0, 0), ss / (n - 1), 1e-14);
        EXPECT_LE(presence_field(hp, 0.0).variance(0, 0), 0.25 * n / (n - 1) + 1e-15);
    }
}

TEST(Stochastic, VarmaxTraceMatchesRecomputation) {
    std::mt19937_64 gen(99);
    const auto r = random_realizations(gen, 25, 2, 3, 2);
    std::vector<std::vector<const Grid2<double>*>> ptrs;
    for (const auto& real : r) {
        std::vector<const Grid2<double>*> p;
        for (const auto& g : real) p.push_back(&g);
        ptrs.push_back(p);
    }
    const std::vector<double> trace = varmax_trace(ptrs, 0.3);
    ASSERT_EQ(trace.size(), 25u);
    EXPECT_EQ(trace[0], 0.0);
    for (std::size_t n = 2; n <= 25; ++n) {
        double vmax = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
            std::vector<const Grid2<double>*> col;
            for (std::size_t m = 0; m < n; ++m) col.push_back(ptrs[m][k]);
            const PresenceField f = presence_field(col, 0.3);
            for (double v : f.variance.data()) vmax = std::max(vmax, v);
        }
        EXPECT_DOUBLE_EQ(trace[n - 1], vmax) << n;
    }
}

TEST(Stochastic, MovingAverageAndDecayCheck) {
    const std::vector<double> t = {0.0, 4.0, 2.0, 6.0, 3.0};
    const std::vector<double> m = moving_average(t, 3);
    EXPECT_DOUBLE_EQ(m[0], 2.0);
    EXPECT_DOUBLE_EQ(m[1], 2.0);
    EXPECT_DOUBLE_EQ(m[2], 4.0);
    EXPECT_DOUBLE_EQ(m[4], 4.5);
    EXPECT_EQ(moving_average(t, 1), t);
    EXPECT_FALSE(decays_after_smoothing(t, 3, 0.0, 0));
    EXPECT_TRUE(decays_after_smoothing({0.0, 0.3, 0.25, 0.2, 0.21, 0.15}, 1, 0.02, 1));
    EXPECT_FALSE(decays_after_smoothing({0.0, 0.3, 0.25, 0.2, 0.3, 0.15}, 1, 0.02, 1));
    // A skipped leading zero must not drag the first smoothed values down.
    std::vector<double> trace = {0.0};
    for (int n = 2; n <= 60; ++n) trace.push_back(0.25 * n / (n - 1.0));
    EXPECT_TRUE(decays_after_smoothing(trace, 25, 0.0, 1));
    EXPECT_FALSE(decays_after_smoothing(trace, 25, 0.0, 0));
}

TEST(Stochastic, PmfIsAProbabilityMass) {
    CellVolumes v{Grid2<double>(3, 2, 0.0), Grid2<double>(3, 2, 0.0), 1.0};
    v.all(0, 0) = 2.0;
    v.all(2, 1) = 1.0;
    const DriftPmf p = drift_pmf(v);
    EXPECT_DOUBLE_EQ(p.mass(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(p.mass(2, 1), 0.25);
    EXPECT_DOUBLE_EQ(p.escaped, 0.25);
    EXPECT_THROW(drift_pmf({Grid2<double>(2, 2, 0.0), Grid2<double>(2, 2, 0.0), 0.0}), ModelError);

    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<DriftPmf> many;
    for (int n = 0; n < 10; ++n) {
        CellVolumes c{Grid2<double>(5, 4, 0.0), Grid2<double>(5, 4, 0.0), u(gen)};
        for (double& x : c.all.data()) x = u(gen) < 0.5 ? u(gen) * 100.0 : 0.0;
        many.push_back(drift_pmf(c));
    }
    std::vector<const DriftPmf*> ptr;
    for (const auto& m : many) ptr.push_back(&m);
    const DriftPmf mean = mean_pmf(ptr);
    double sum = mean.escaped;
    for (double x : mean.mass.data()) {
        EXPECT_GE(x, 0.0);
        sum += x;
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
}

TEST(Stochastic, SpillCentreLargestCellAndTies) {
    const Domain d = small_domain();
    Grid2<double> s(4, 3, 0.0);
    EXPECT_FALSE(spill_centre(s, d).has_value());
    s(2, 1) = 3.0;
    s(1, 2) = 3.0;
    s(3, 0) = 1.0;
    const auto c = spill_centre(s, d);
    ASSERT_TRUE(c.has_value());
    EXPECT_EQ(*c, (Vec2{150.0, 250.0}));  // tie goes to the lower i

    const MeanCentre m = mean_spill_centre({Vec2{0.0, 0.0}, std::nullopt, Vec2{300.0, 100.0}});
    EXPECT_EQ(m.used, 2);
    EXPECT_EQ(m.excluded, 1);
    EXPECT_EQ(m.position, (Vec2{150.0, 50.0}));
}

// Uniform draws: moments inside bounds, leak window always ordered.
// Rejection rate for the reference bounds, t0 ~ U[0, 19] h, tf ~ U[14, 20] h:
// P(t0 >= tf) = (5^2 / 2) / (19 * 6) = 0.10965.
TEST(Stochastic, SamplingStatistics) {
    MonteCarloSpec spec;
    spec.t0 = {parse_iso8601("2019-03-11T22:00:00Z"), parse_iso8601("2019-03-12T17:00:00Z")};
    spec.tf = {parse_iso8601("2019-03-12T12:00:00Z"), parse_iso8601("2019-03-12T18:00:00Z")};
    const int n = 20000;
    double mean_a = 0.0, mean_m = 0.0, var_c = 0.0;
    long redraws = 0;
    for (int k = 0; k < n; ++k) {
        const SampledParameters p = sample_parameters(spec, CounterRng::derive_seed(7, k));
        ASSERT_GE(p.alpha_w_o, 0.005);
        ASSERT_LT(p.alpha_w_o, 0.03);
        ASSERT_GE(p.alpha_c_o, 0.9);
        ASSERT_LT(p.alpha_c_o, 1.1);
        ASSERT_GE(p.c_smag, 0.01);
        ASSERT_LT(p.c_smag, 0.3);
        ASSERT_GE(p.mass_tonnes, 10.0);
        ASSERT_LT(p.mass_tonnes, 2200.0);
        ASSERT_LT(p.t0, p.tf);
        ASSERT_GE(p.t0, spec.t0.lo);
        ASSERT_LE(p.tf, spec.tf.hi);
        mean_a += p.alpha_w_o / n;
        mean_m += p.mass_tonnes / n;
        var_c += std::pow(p.c_smag - 0.155, 2.0) / n;
        redraws += p.redraws;
    }
    EXPECT_NEAR(mean_a, 0.0175, 3.0 * 0.025 / std::sqrt(12.0 * n));
    EXPECT_NEAR(mean_m, 1105.0, 3.0 * 2190.0 / std::sqrt(12.0 * n));
    EXPECT_NEAR(var_c, 0.29 * 0.29 / 12.0, 0.05 * 0.29 * 0.29 / 12.0);
    const double q = 12.5 / 114.0;
    EXPECT_NEAR(static_cast<double>(redraws) / n, q / (1.0 - q), 0.01);

    const SampledParameters a = sample_parameters(spec, 5);
    const SampledParameters b = sample_parameters(spec, 5);
    EXPECT_EQ(a.alpha_w_o, b.alpha_w_o);
    EXPECT_EQ(a.t0, b.t0);

    MonteCarloSpec fixed = spec;
    fixed.alpha_w_o = {0.02, 0.02};
    EXPECT_EQ(sample_parameters(fixed, 1).alpha_w_o, 0.02);
    MonteCarloSpec impossible = spec;
    impossible.t0 = {10.0, 20.0};
    impossible.tf = {0.0, 5.0};
    EXPECT_THROW(sample_parameters(impossible, 1), ConfigError);
}
