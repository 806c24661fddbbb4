#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scem/wave_model.hpp"

using namespace scem;

namespace {

WaveSpectrum empty_spectrum(int nodes, double dk, double depth = 1e4) {
    WaveSpectrum s;
    s.nodes = nodes;
    s.dk = dk;
    s.depth = depth;
    s.energy = Grid2<double>(nodes, nodes, 0.0);
    return s;
}

// Rotates the node grid a quarter turn clockwise: (kx, ky) -> (ky, -kx).
WaveSpectrum rotate_quarter(const WaveSpectrum& s) {
    WaveSpectrum r = s;
    const int c = s.centre();
    for (int b = 0; b < s.nodes; ++b)
        for (int a = 0; a < s.nodes; ++a) r.energy(c + (b - c), c - (a - c)) = s.energy(a, b);
    return r;
}

}  // namespace

TEST(WaveModel, CalmSea) {
    const WaveSpectrum s = build_spectrum({0.0, 0.0}, {0.0, 0.0}, {}, 50.0);
    EXPECT_EQ(s.total(), 0.0);
    const WaveSummary w = spectrum_summary(s);
    EXPECT_TRUE(w.calm);
    EXPECT_EQ(w.hs, 0.0);
    EXPECT_EQ(w.psi_fr, 1.0);
    EXPECT_FALSE(energy_direction(s).defined);
    EXPECT_THROW(build_spectrum({1.0, 0.0}, {}, {}, 0.0), ModelError);
}

// Fully developed sea: Hs = 0.21 U^2 / g, f_p = 0.877 g / (2 pi U).
TEST(WaveModel, PiersonMoskowitzTenMetres) {
    const WaveSummary w = spectrum_summary(build_spectrum({10.0, 0.0}, {}, {}, 5000.0));
    EXPECT_GE(w.hs, 1.8);
    EXPECT_LE(w.hs, 2.8);
    EXPECT_NEAR(w.hs, 0.21 * 100.0 / 9.81, 0.05);
    const double fp = 0.877 * 9.81 / (2.0 * kPi * 10.0);  // 0.1369 Hz
    EXPECT_NEAR(w.f_p, fp, 0.05 * fp);
    // Wind blows toward the east, so the sea travels east.
    EXPECT_NEAR(w.theta_sum, 0.5 * kPi, 1e-9);
    EXPECT_FALSE(w.calm);
}

TEST(WaveModel, SwellFromNorthWest) {
    SwellSpec sw{3.0, 10.0, 315.0};
    const WaveSummary w = spectrum_summary(build_spectrum({}, {}, sw, 4000.0));
    EXPECT_NEAR(w.hs, 3.0, 0.03);
    EXPECT_NEAR(w.theta_sum, 0.75 * kPi, 1e-6);  // travelling toward the south-east
    EXPECT_GT(w.psi_fr, 0.9);
}

TEST(WaveModel, SingleCellSummary) {
    WaveSpectrum s = empty_spectrum(33, 0.01);
    s.energy(20, 16) = 0.5;  // kx = 0.04, ky = 0
    const WaveSummary w = spectrum_summary(s);
    EXPECT_DOUBLE_EQ(w.a_p, 1.0);
    EXPECT_NEAR(w.f_p, std::sqrt(9.81 * 0.04) / (2.0 * kPi), 1e-12);
    EXPECT_NEAR(w.l_peak, 2.0 * kPi / 0.04, 1e-9);
    EXPECT_DOUBLE_EQ(w.psi_fr, 1.0);
    EXPECT_NEAR(w.hs, 4.0 * std::sqrt(0.5), 1e-12);
}

TEST(WaveModel, OppositeAndOrthogonalCells) {
    WaveSpectrum s = empty_spectrum(33, 0.01);
    s.energy(20, 16) = 1.0;
    s.energy(12, 16) = 1.0;
    EXPECT_NEAR(energy_direction(s).psi_fr, 0.0, 1e-15);

    WaveSpectrum q = empty_spectrum(33, 0.01);
    q.energy(20, 16) = 1.0;  // east
    q.energy(16, 20) = 1.0;  // north
    const EnergyDirection d = energy_direction(q);
    EXPECT_NEAR(d.theta_sum, 0.25 * kPi, 1e-12);
    EXPECT_NEAR(d.psi_fr, std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(d.r_sum, std::sqrt(2.0), 1e-12);
}

// Brute force over node grids of growing size; the odd node-centred grid
// balances every direction against its opposite.
TEST(WaveModel, IsotropicFractionVanishes) {
    for (int nodes : {9, 33, 129, 257}) {
        WaveSpectrum s = empty_spectrum(nodes, 0.2 / nodes);
        for (int b = 0; b < nodes; ++b) {
            for (int a = 0; a < nodes; ++a) {
                const double k = std::hypot(s.kx(a), s.ky(b));
                s.energy(a, b) = std::exp(-std::pow((k - 0.05) / 0.01, 2.0));
            }
        }
        EXPECT_LT(energy_direction(s).psi_fr, 1e-12) << nodes;
    }
}

TEST(WaveModel, DoublingEnergyScalesHs) {
    const WaveSpectrum s = build_spectrum({8.0, 3.0}, {0.2, 0.0}, {2.0, 9.0, 200.0}, 300.0);
    WaveSpectrum d = s;
    for (double& e : d.energy.data()) e *= 2.0;
    const WaveSummary a = spectrum_summary(s);
    const WaveSummary b = spectrum_summary(d);
    EXPECT_NEAR(b.hs / a.hs, std::sqrt(2.0), 1e-9 * std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(a.f_p, b.f_p);
    EXPECT_NEAR(a.psi_fr, b.psi_fr, 1e-12);
}

TEST(WaveModel, QuarterTurnRotatesDirectionOnly) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-12.0, 12.0);
    for (int n = 0; n < 20; ++n) {
        const WaveSpectrum s =
            build_spectrum({u(gen), u(gen)}, {0.0, 0.0}, {std::abs(u(gen)) / 4.0, 8.0, 36.0 * n}, 2000.0);
        const WaveSpectrum r = rotate_quarter(s);
        const WaveSummary a = spectrum_summary(s);
        const WaveSummary b = spectrum_summary(r);
        EXPECT_NEAR(b.hs, a.hs, 1e-12 * a.hs);
        EXPECT_NEAR(b.f_p, a.f_p, 1e-12);
        EXPECT_NEAR(b.a_p, a.a_p, 1e-12);
        EXPECT_NEAR(b.psi_fr, a.psi_fr, 1e-12);
        const double turn = std::remainder(b.theta_sum - a.theta_sum, 2.0 * kPi);
        EXPECT_NEAR(turn, 0.5 * kPi, 1e-9);
    }
}

TEST(WaveModel, DeepWaterDispersionConsistency) {
    for (double wind : {4.0, 8.0, 14.0, 20.0}) {
        const WaveSummary w = spectrum_summary(build_spectrum({0.0, wind}, {}, {}, 4600.0));
        const double deep = 9.81 * w.t_peak * w.t_peak / (2.0 * kPi);
        EXPECT_LE(std::abs(w.l_peak - deep) / w.l_peak, 0.05) << wind;
        EXPECT_GE(w.psi_fr, 0.0);
        EXPECT_LE(w.psi_fr, 1.0);
    }
}

TEST(WaveModel, DispersionRoots) {
    const double omega = 2.0 * kPi / 8.0;
    EXPECT_NEAR(dispersion_wavenumber(omega, 1e5), omega * omega / 9.81, 1e-15);
    const double k = dispersion_wavenumber(omega, 10.0);
    EXPECT_NEAR(9.81 * k * std::tanh(10.0 * k), omega * omega, 1e-12);
    EXPECT_NEAR(dispersion_omega(k, 10.0), omega, 1e-12);
}

TEST(WaveModel, ShallowWaterAttenuatesWindSea) {
    const double deep = spectrum_summary(build_spectrum({15.0, 0.0}, {}, {}, 3000.0)).hs;
    const double shallow = spectrum_summary(build_spectrum({15.0, 0.0}, {}, {}, 5.0)).hs;
    EXPECT_LT(shallow, deep);
    EXPECT_GT(shallow, 0.0);
}

TEST(WaveModel, CurrentActsThroughRelativeWind) {
    const WaveSummary a = spectrum_summary(build_spectrum({10.0, 0.0}, {1.0, 0.0}, {}, 3000.0));
    const WaveSummary b = spectrum_summary(build_spectrum({9.0, 0.0}, {}, {}, 3000.0));
    EXPECT_DOUBLE_EQ(a.hs, b.hs);
}
