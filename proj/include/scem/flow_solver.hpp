#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scem/types.hpp"

namespace scem {

enum class FlowKind { water, wind };

/// Staggered (MAC) velocity field. u lives on west/east faces, v on
/// south/north faces, pressure at cell centres.
struct VelocityField {
    VelocityField() = default;
    VelocityField(FlowKind kind, int nx, int ny, double dx, double dy, double viscosity);

    FlowKind kind = FlowKind::water;
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double dy = 0.0;
    double viscosity = 0.0;  ///< kinematic, m^2/s
    Grid2<double> u;         ///< (nx+1) x ny
    Grid2<double> v;         ///< nx x (ny+1)
    Grid2<double> p;         ///< nx x ny, kinematic pressure (m^2/s^2)
    Grid2<double> potential;  ///< last projection potential (m^2/s), reused as the next first guess
    Grid2<double> force_u;   ///< optional surface forcing on u faces (m/s^2), empty = none
    Grid2<double> force_v;

    /// Face-averaged velocity at a cell centre.
    Vec2 centre_velocity(int i, int j) const {
        return {0.5 * (u(i, j) + u(i + 1, j)), 0.5 * (v(i, j) + v(i, j + 1))};
    }
    double divergence(int i, int j) const {
        return (u(i + 1, j) - u(i, j)) / dx + (v(i, j + 1) - v(i, j)) / dy;
    }
    double max_speed() const;
    bool finite() const;
    void fill(Vec2 velocity);
};

struct EdgeCondition {
    enum class Type { dirichlet, open };
    Type type = Type::open;
    Vec2 velocity;  ///< used for dirichlet

    static EdgeCondition dirichlet(Vec2 v) { return {Type::dirichlet, v}; }
    static EdgeCondition open() { return {Type::open, {}}; }
    bool is_dirichlet() const { return type == Type::dirichlet; }
};

struct BoundarySpec {
    EdgeCondition west;
    EdgeCondition east;
    EdgeCondition south;
    EdgeCondition north;
};

/// Measured velocity in one cell. half_width == 0 pins the value exactly;
/// otherwise projection may move it within [measured - w, measured + w].
struct MeasurementConstraint {
    CellIndex cell;
    Vec2 velocity;
    double half_width = 0.0;
};

struct SolverParams {
    double sor_omega = 1.7;
    double sor_tol = 1e-6;      ///< diffusion residual, max-norm (m/s)
    double div_tol = 1e-8;      ///< projection divergence, max-norm (1/s)
    int max_iters = 2000;       ///< per SOR solve
    int projection_passes = 8;  ///< repeated solves until divergence is below div_tol
    double courant_target = 0.8;
    double dt_max = 1800.0;     ///< s
    double velocity_floor = 1e-6;  ///< m/s, guards the Courant division
};

/// Per-cell speed caps applied to wind (urban canopy); empty = no limits.
struct SpeedLimits {
    Grid2<double> limit;          ///< m/s per cell
    Grid2<std::uint8_t> active;   ///< 1 where a limit applies
    bool empty() const { return active.size() == 0; }
};

/// Summary of the last projection, for reporting.
struct ProjectionReport {
    int iterations = 0;
    double max_divergence = 0.0;
    int pinned_faces = 0;
};

/// Obstacle cells: 1 = solid. Empty mask = no obstacles.
using ObstacleMask = Grid2<std::uint8_t>;

double compute_timestep(const VelocityField& field, const SolverParams& params);

void apply_boundary(VelocityField& field, const BoundarySpec& boundary);

/// Forward-Euler step of -(U.grad)U with first-order upwind differences.
void advect(VelocityField& field, const BoundarySpec& boundary, const ObstacleMask& obstacles, double dt);

/// Backward-Euler viscous step solved by SOR. Returns the final residual.
double diffuse(VelocityField& field, const BoundarySpec& boundary, const ObstacleMask& obstacles,
               double dt, const SolverParams& params);

/// Zeroes every face touching a solid cell (water kind only).
void apply_obstacles(VelocityField& field, const ObstacleMask& obstacles);

/// Rescales cell-centre wind speed down to the per-cell limit.
void apply_speed_limits(VelocityField& field, const SpeedLimits& limits);

/// Writes measured values onto the faces of each constrained cell.
void apply_constraints(VelocityField& field, const std::vector<MeasurementConstraint>& constraints,
                       const BoundarySpec& boundary, const ObstacleMask& obstacles);

/// Pressure projection onto a divergence-free field. Dirichlet edges,
/// obstacle faces and pinned measurements stay fixed; bounded measurements
/// move only inside their interval. Throws ConvergenceError when the
/// constraints cannot be satisfied.
ProjectionReport project(VelocityField& field, const BoundarySpec& boundary, const ObstacleMask& obstacles,
                         const std::vector<MeasurementConstraint>& constraints, const SolverParams& params,
                         double dt = 1.0);

/// Largest |divergence| over unobstructed cells whose faces are not all fixed.
double max_free_divergence(const VelocityField& field, const BoundarySpec& boundary,
                           const ObstacleMask& obstacles,
                           const std::vector<MeasurementConstraint>& constraints = {});

/// One full solver step: boundary, advect, diffuse, obstacles (or speed
/// limits for wind), constraints, projection.
ProjectionReport step(VelocityField& field, const BoundarySpec& boundary, const ObstacleMask& obstacles,
                      const std::vector<MeasurementConstraint>& constraints, double dt,
                      const SolverParams& params, const SpeedLimits& limits = {});

}  // namespace scem
