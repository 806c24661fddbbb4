#include "scem/depth_profiles.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

namespace scem {

Vec2 tidal_profile(Vec2 surface_current, double z, double depth, double exponent_den) {
    if (z < 0.0 || z > depth) throw ModelError("tidal_profile: depth " + std::to_string(z) + " outside water column");
    return surface_current * std::pow(1.0 - z / depth, 1.0 / exponent_den);
}

double capillary_wavelength(double sigma_water, double rho_water, double rho_air) {
    if (!(rho_water > rho_air)) throw ModelError("capillary_wavelength: water must be denser than air");
    return 2.0 * kPi * std::sqrt(sigma_water / ((rho_water - rho_air) * kGravity));
}

double shear_depth(const ProfileParams& params, double rho_water, double rho_air) {
    return params.alpha_z * capillary_wavelength(params.sigma_water, rho_water, rho_air);
}

Vec2 wind_shear_profile(Vec2 wind, double z, double alpha_w, double z_c) {
    if (z < 0.0) throw ModelError("wind_shear_profile: negative depth");
    return wind * (alpha_w * std::exp(-2.0 * kPi * z / z_c));
}

double wind_drift_angle(Vec2 wind) {
    const double speed = wind.norm();
    if (speed > 25.0) return 0.0;
    return 40.0 - 8.0 * std::sqrt(speed);
}

double drag_coefficient(double speed) { return (0.8 + 0.065 * speed) * 1e-3; }

double wind_stress(Vec2 wind, double rho_air) {
    const double u = wind.norm();
    return drag_coefficient(u) * rho_air * u * u;
}

EkmanLayer ekman_layer(Vec2 ekman_wind, double latitude, double rho_water, double rho_air) {
    if (std::abs(latitude) < kEquatorialGuardDeg) throw ModelError("equatorial Ekman undefined");
    EkmanLayer e;
    e.hemisphere = latitude >= 0.0 ? 1 : -1;
    e.coriolis = 2.0 * kEarthRotation * std::sin(latitude * kDegToRad);
    const double u = ekman_wind.norm();
    if (u == 0.0) return e;
    const double f = std::abs(e.coriolis);
    e.a_z = 4.3e-4 * u * u;
    e.depth = kPi * std::sqrt(2.0 * e.a_z / f);
    e.v0 = std::sqrt(2.0) * kPi * wind_stress(ekman_wind, rho_air) / (e.depth * rho_water * f);
    e.drift_angle = wind_drift_angle(ekman_wind);
    e.surface_bearing = ekman_wind.bearing() + e.hemisphere * e.drift_angle * kDegToRad;
    return e;
}

Vec2 ekman_profile(Vec2 ekman_wind, double z, double latitude, double rho_water, double rho_air) {
    const EkmanLayer e = ekman_layer(ekman_wind, latitude, rho_water, rho_air);
    if (e.v0 == 0.0) return {};
    const double phase = kPi * z / e.depth;
    return Vec2::from_bearing(e.surface_bearing + e.hemisphere * phase, e.v0 * std::exp(-phase));
}

Vec2 stokes_profile(const WaveSummary& waves, double z) {
    if (waves.calm || waves.t_peak <= 0.0 || waves.l_peak <= 0.0) return {};
    const double omega = 2.0 * kPi / waves.t_peak;
    const double k = 2.0 * kPi / waves.l_peak;
    const double speed = omega * k * waves.a_p * waves.a_p * std::exp(-2.0 * k * z) * waves.psi_fr;
    return Vec2::from_bearing(waves.theta_sum, speed);
}

Vec3 environment_velocity(const ProfileInputs& in, double z, const AdvectionCoefficients& coeffs,
                          const ProfileParams& params) {
    if (!(in.depth > 0.0)) throw ModelError("environment_velocity: no water column");
    if (z < 0.0 || z > in.depth) throw ModelError("environment_velocity: depth outside water column");
    const double z_c = shear_depth(params, in.rho_water, in.rho_air);
    Vec2 v = tidal_profile(in.surface_current, z, in.depth, params.tidal_exponent_den) * coeffs.alpha_c_o;
    if (z < z_c) v += in.wind * coeffs.alpha_w_o;
    v += wind_shear_profile(in.wind, z, params.alpha_w, z_c);
    try {
        v += ekman_profile(in.ekman_wind, z, in.latitude, in.rho_water, in.rho_air);
    } catch (const ModelError&) {
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true))
            spdlog::warn("Ekman term set to zero within {} deg of the equator (lat {:.2f})", kEquatorialGuardDeg,
                         in.latitude);
    }
    v += stokes_profile(in.waves, z);
    return {v.x, v.y, 0.0};
}

}  // namespace scem
