#include "scem/wave_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scem {

namespace {

constexpr double kPmAlpha = 0.0081;
constexpr double kPmPeak = 0.877;  // w_p = 0.877 g / U

// Energy fraction surviving in finite depth, relative to deep water.
double depth_factor(double k, double depth) {
    const double kd = k * depth;
    if (kd > 20.0) return 1.0;
    if (kd <= 0.0) return 0.0;
    const double t = std::tanh(kd);
    return t * t / (1.0 + 2.0 * kd / std::sinh(2.0 * kd));
}

// Normalisation of cos^2s(x/2) to unit integral over (-pi, pi].
double spreading_norm(double s) { return std::tgamma(s + 1.0) / (2.0 * std::sqrt(kPi) * std::tgamma(s + 0.5)); }

double wrap_pi(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

}  // namespace

double WaveSpectrum::total() const {
    return std::accumulate(energy.data().begin(), energy.data().end(), 0.0);
}

double dispersion_wavenumber(double omega, double depth) {
    if (omega <= 0.0) return 0.0;
    const double k_deep = omega * omega / kGravity;
    if (!(depth > 0.0) || !std::isfinite(depth) || k_deep * depth > 20.0) return k_deep;
    double k = std::max(k_deep, omega / std::sqrt(kGravity * depth));
    for (int it = 0; it < 50; ++it) {
        const double t = std::tanh(k * depth);
        const double fval = kGravity * k * t - omega * omega;
        const double dfdk = kGravity * (t + k * depth * (1.0 - t * t));
        const double step = fval / dfdk;
        k -= step;
        if (std::abs(step) < 1e-14 * k) break;
    }
    return k;
}

double dispersion_omega(double k, double depth) {
    if (k <= 0.0) return 0.0;
    const double kd = k * depth;
    const double t = (depth > 0.0 && kd < 20.0) ? std::tanh(kd) : 1.0;
    return std::sqrt(kGravity * k * t);
}

WaveSpectrum build_spectrum(Vec2 wind, Vec2 current, const SwellSpec& swell, double depth,
                            const WaveGridParams& params) {
    if (!(depth > 0.0)) throw ModelError("build_spectrum: depth must be > 0");
    if (params.nodes < 3 || params.nodes % 2 == 0) throw ModelError("build_spectrum: node count must be odd and >= 3");

    const Vec2 rel = wind - current;
    const double u = rel.norm();
    const bool sea = u > 0.0;
    const bool has_swell = swell.present();

    WaveSpectrum spec;
    spec.nodes = params.nodes;
    spec.depth = depth;
    spec.energy = Grid2<double>(params.nodes, params.nodes, 0.0);

    const double omega_p = sea ? kPmPeak * kGravity / u : 0.0;
    const double k_sea = omega_p * omega_p / kGravity;
    const double k_swell = has_swell ? dispersion_wavenumber(2.0 * kPi / swell.period, depth) : 0.0;
    const double k_ref = std::max(k_sea, k_swell);
    if (k_ref <= 0.0) {
        spec.dk = 1.0;
        return spec;
    }
    spec.dk = params.span * k_ref / spec.centre();
    const double cell = spec.dk * spec.dk;

    if (sea) {
        // Deep-water PM in frequency, mapped to (kx, ky); discrete sum is
        // rescaled to the closed-form m0 before the depth factor.
        const double wind_dir = rel.bearing();
        const double norm = spreading_norm(params.spreading_s);
        Grid2<double> sea_e(spec.nodes, spec.nodes, 0.0);
        double sum = 0.0;
        for (int b = 0; b < spec.nodes; ++b) {
            for (int a = 0; a < spec.nodes; ++a) {
                const double kx = spec.kx(a);
                const double ky = spec.ky(b);
                const double k = std::hypot(kx, ky);
                if (k == 0.0) continue;
                const double omega = std::sqrt(kGravity * k);
                const double r = omega_p / omega;
                const double s_omega = kPmAlpha * kGravity * kGravity * std::pow(omega, -5.0) *
                                       std::exp(-1.25 * r * r * r * r);
                const double s_k = s_omega * 0.5 * kGravity / omega;
                const double theta = std::atan2(kx, ky);
                const double spread =
                    norm * std::pow(std::abs(std::cos(0.5 * wrap_pi(theta - wind_dir))), 2.0 * params.spreading_s);
                const double density = s_k * spread / k;
                sea_e(a, b) = density * cell;
                sum += sea_e(a, b);
            }
        }
        const double m0 = kPmAlpha * kGravity * kGravity / (5.0 * std::pow(omega_p, 4.0));
        const double scale = sum > 0.0 ? m0 / sum : 0.0;
        for (int b = 0; b < spec.nodes; ++b)
            for (int a = 0; a < spec.nodes; ++a)
                spec.energy(a, b) += sea_e(a, b) * scale * depth_factor(std::hypot(spec.kx(a), spec.ky(b)), depth);
    }

    if (has_swell) {
        const double toward = swell.direction_deg * kDegToRad + kPi;
        const Vec2 centre = Vec2::from_bearing(toward, k_swell);
        const double sigma = std::max(params.swell_width * k_swell, 0.5 * spec.dk);
        Grid2<double> sw(spec.nodes, spec.nodes, 0.0);
        double sum = 0.0;
        for (int b = 0; b < spec.nodes; ++b) {
            for (int a = 0; a < spec.nodes; ++a) {
                const double dx = spec.kx(a) - centre.x;
                const double dy = spec.ky(b) - centre.y;
                sw(a, b) = std::exp(-0.5 * (dx * dx + dy * dy) / (sigma * sigma));
                sum += sw(a, b);
            }
        }
        // Swell height is the observed (local) value, so no depth factor.
        const double m0 = swell.height * swell.height / 16.0;
        for (int b = 0; b < spec.nodes; ++b)
            for (int a = 0; a < spec.nodes; ++a) spec.energy(a, b) += m0 * sw(a, b) / sum;
    }
    return spec;
}

EnergyDirection energy_direction(const WaveSpectrum& spec) {
    EnergyDirection out;
    double total = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    for (int b = 0; b < spec.nodes; ++b) {
        for (int a = 0; a < spec.nodes; ++a) {
            const double e = spec.energy(a, b);
            const double kx = spec.kx(a);
            const double ky = spec.ky(b);
            const double k = std::hypot(kx, ky);
            total += e;
            if (k == 0.0) continue;
            sx += e * kx / k;
            sy += e * ky / k;
        }
    }
    if (!(total > 0.0)) return out;
    out.defined = true;
    out.r_sum = std::hypot(sx, sy);
    out.theta_sum = std::atan2(sx, sy);
    out.psi_fr = std::clamp(out.r_sum / total, 0.0, 1.0);
    return out;
}

WaveSummary spectrum_summary(const WaveSpectrum& spec) {
    WaveSummary s;
    const double total = spec.total();
    if (!(total > 0.0)) return s;

    // Peak of the frequency-direction density: dkx dky = (k / c_g) dw dtheta.
    double best = -1.0;
    int pa = spec.centre();
    int pb = spec.centre();
    for (int b = 0; b < spec.nodes; ++b) {
        for (int a = 0; a < spec.nodes; ++a) {
            const double e = spec.energy(a, b);
            if (e <= 0.0) continue;
            const double k = std::hypot(spec.kx(a), spec.ky(b));
            if (k == 0.0) continue;
            const double kd = k * spec.depth;
            const double n = kd > 20.0 || spec.depth <= 0.0 ? 0.5 : 0.5 * (1.0 + 2.0 * kd / std::sinh(2.0 * kd));
            const double cg = n * dispersion_omega(k, spec.depth) / k;
            const double weight = e * k / cg;
            if (weight > best) {
                best = weight;
                pa = a;
                pb = b;
            }
        }
    }
    if (best < 0.0) return s;  // energy only at k = 0

    const double kp = std::hypot(spec.kx(pa), spec.ky(pb));
    const EnergyDirection dir = energy_direction(spec);
    s.calm = false;
    s.hs = 4.0 * std::sqrt(total);
    s.f_p = dispersion_omega(kp, spec.depth) / (2.0 * kPi);
    s.t_peak = 1.0 / s.f_p;
    s.l_peak = 2.0 * kPi / kp;
    s.a_p = std::sqrt(2.0 * spec.energy(pa, pb));
    s.theta_sum = dir.theta_sum;
    s.psi_fr = dir.psi_fr;
    return s;
}

}  // namespace scem
