#pragma once

#include "scem/types.hpp"
#include "scem/wave_model.hpp"

namespace scem {

struct ProfileParams {
    double tidal_exponent_den = 6.0;
    double alpha_w = 0.02;        ///< wind shear coefficient
    double alpha_z = 2.0;         ///< shear depth multiplier on the capillary wavelength
    double sigma_water = 0.0728;  ///< surface tension, N/m
};

/// Extra advection coefficients of the total oil velocity.
struct AdvectionCoefficients {
    double alpha_w_o = 0.02;  ///< direct wind carriage of surface oil
    double alpha_c_o = 1.0;   ///< current scaling
};

struct ProfileInputs {
    Vec2 surface_current;
    Vec2 wind;
    Vec2 ekman_wind;
    WaveSummary waves;
    double depth = 0.0;     ///< total water depth, m
    double latitude = 0.0;  ///< degrees
    double rho_water = 1025.0;
    double rho_air = 1.225;
};

/// Ekman layer quantities for one wind and latitude.
struct EkmanLayer {
    double a_z = 0.0;           ///< vertical eddy viscosity, m^2/s
    double coriolis = 0.0;      ///< f, 1/s (signed)
    double depth = 0.0;         ///< z_E, m
    double v0 = 0.0;            ///< surface speed, m/s
    double drift_angle = 0.0;   ///< beta, degrees
    double surface_bearing = 0.0;  ///< rad clockwise from north
    int hemisphere = 1;         ///< +1 north (turns right), -1 south
};

inline constexpr double kEquatorialGuardDeg = 2.0;

Vec2 tidal_profile(Vec2 surface_current, double z, double depth, double exponent_den = 6.0);
double capillary_wavelength(double sigma_water, double rho_water, double rho_air);
/// z_c = alpha_z * capillary wavelength.
double shear_depth(const ProfileParams& params, double rho_water, double rho_air);
Vec2 wind_shear_profile(Vec2 wind, double z, double alpha_w, double z_c);
/// Surface drift angle from the wind, degrees.
double wind_drift_angle(Vec2 wind);
double drag_coefficient(double speed);
double wind_stress(Vec2 wind, double rho_air);
/// Throws ModelError within kEquatorialGuardDeg of the equator.
EkmanLayer ekman_layer(Vec2 ekman_wind, double latitude, double rho_water, double rho_air);
Vec2 ekman_profile(Vec2 ekman_wind, double z, double latitude, double rho_water, double rho_air);
Vec2 stokes_profile(const WaveSummary& waves, double z);

/// Horizontal environmental velocity at depth z (vertical component is 0).
Vec3 environment_velocity(const ProfileInputs& in, double z, const AdvectionCoefficients& coeffs,
                          const ProfileParams& params = {});

}  // namespace scem
