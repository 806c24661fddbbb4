#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "scem/counter_rng.hpp"
#include "scem/domain.hpp"
#include "scem/flow_solver.hpp"
#include "scem/wave_model.hpp"

namespace scem {

enum class ParticleStatus : std::uint8_t { surface, entrained, beached, escaped };

const char* to_string(ParticleStatus s);

struct OilParticle {
    std::uint64_t id = 0;
    double x = 0.0;  ///< m, local east
    double y = 0.0;  ///< m, local north
    double z = 0.0;  ///< m below the surface
    double volume = 0.0;  ///< m^3
    double age = 0.0;     ///< s since release
    ParticleStatus status = ParticleStatus::surface;
    double diameter = 0.0;  ///< droplet diameter, m
    bool buoyancy_suppressed = false;

    bool frozen() const { return status == ParticleStatus::beached || status == ParticleStatus::escaped; }
};

struct OilProperties {
    double rho_oil = 950.0;              ///< kg/m^3
    double terminal_thickness = 1e-4;    ///< m
    double droplet_diameter = 300e-6;    ///< m
    double mu_water = 1.2e-3;            ///< Pa s
};

struct SpillSource {
    double x = 0.0;  ///< m, local
    double y = 0.0;
    double t0 = 0.0;  ///< s since scenario start
    double tf = 0.0;
    double volume = 0.0;  ///< m^3
};

inline constexpr int kRecommendedParticles = 3000;

/// Particles released in [t0, t] out of the budget (rounded cumulative share).
std::int64_t released_by(const SpillSource& source, std::int64_t budget, double t);

/// Warns (once per call) when the budget is below the recommended floor.
bool check_particle_budget(std::int64_t budget, bool override_floor);

/// New particles for the step [t, t + dt]; ids continue from next_id.
std::vector<OilParticle> release_particles(const SpillSource& source, double t, double dt, std::int64_t budget,
                                           std::uint64_t next_id, const OilProperties& props);

/// Smagorinsky horizontal diffusivity from velocity gradients.
double smagorinsky_diffusivity(double dudx, double dudy, double dvdx, double dvdy, double dx, double dy,
                               double c_smag, bool literal_form = false);

/// Cell-centred D_h over the grid from a staggered current field.
Grid2<double> horizontal_diffusivity(const VelocityField& current, double c_smag, bool literal_form = false);

/// 0.028 Hs^2 / T exp(-2 z / L); zero for a calm sea.
double vertical_diffusivity(const WaveSummary& waves, double z);

/// Random-walk displacement from three uniforms.
Vec3 turbulent_displacement(double d_h, double d_v, double dt, double xi, double phi, double zeta);

/// Gradient of D_h by central differences, one-sided next to land and domain edges.
Grid2<Vec2> diffusion_correction(const Grid2<double>& d_h, const Grid2<std::uint8_t>& land, double dx, double dy);

struct EntrainmentParams {
    double k_e = 0.4;
    double alpha = 1.5;
    double l_ow = 15.0;                  ///< m
    double gamma_coefficient = 1e-5;     ///< white-capping damping prefactor
    double whitecap_wind = 6.0;          ///< m/s
};

double entrainment_damping(const WaveSummary& waves, double rho_water, double wind_speed,
                           const EntrainmentParams& params);
double entrainment_rate(const WaveSummary& waves, double rho_water, double wind_speed,
                        const EntrainmentParams& params);
double entrainment_probability(double rate, double dt);

/// Applies the entrainment draw to a surface particle. u_event decides the
/// event, u_depth the intrusion depth. Returns true when entrained.
bool entrain(OilParticle& p, double rate, const WaveSummary& waves, double dt, double u_event, double u_depth);

/// Droplet size where the Stokes and form-drag laws meet.
double critical_diameter(const OilProperties& props, double rho_water);
double buoyancy_velocity(const OilProperties& props, double rho_water, double diameter);

/// Beached volume per cell and its capacity (infinite by default).
struct BeachLedger {
    Grid2<double> volume;
    double capacity = std::numeric_limits<double>::infinity();
};

enum class MoveResult { moved, beached, blocked, escaped };

/// Moves a particle horizontally to (x + dx, y + dy), handling coast and
/// domain-edge crossings. Depth is clamped to the destination column.
MoveResult move_particle(OilParticle& p, Vec2 displacement, const Domain& domain, BeachLedger& beach);

/// Full advection update of one particle (vertical first, then horizontal).
MoveResult advect_particle(OilParticle& p, Vec2 horizontal_velocity, double w_turbulent, double w_buoyancy,
                           double dt, const Domain& domain, BeachLedger& beach);

struct ThicknessMap {
    Grid2<double> volume;     ///< m^3
    Grid2<double> age;        ///< mean particle age, s
    Grid2<double> area;       ///< m^2
    Grid2<double> thickness;  ///< m
    Grid2<int> count;
};

/// Lehr spreading area (m^2) from barrels, minutes and knots.
double lehr_area(double volume_bbl, double age_min, double wind_knots, double rho_oil, double rho_water);

inline constexpr double kAgeCap = 48.0 * 3600.0;

ThicknessMap thickness_map(const std::vector<OilParticle>& particles, const Domain& domain,
                           const Grid2<Vec2>& wind, const OilProperties& props, double rho_water);

struct SpreadStep {
    double dq = 0.0;
    double dr = 0.0;
};

SpreadStep spreading_offsets(double volume_m3, double age_s, double dt, double wind_speed, double rho_oil,
                             double rho_water);

/// Displacement for one particle given the signs applied to dq and dr.
Vec2 spread_displacement(const SpreadStep& s, double wind_bearing, double sign_q, double sign_r);

/// Required particle count for the horizontal random walk at confidence alpha.
std::int64_t required_particles(double alpha_conf, double d_h, double dt, bool apply_floor = false);

}  // namespace scem
