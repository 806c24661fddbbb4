#include "scem/flow_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

namespace scem {

VelocityField::VelocityField(FlowKind kind_, int nx_, int ny_, double dx_, double dy_, double viscosity_)
    : kind(kind_), nx(nx_), ny(ny_), dx(dx_), dy(dy_), viscosity(viscosity_),
      u(nx_ + 1, ny_, 0.0), v(nx_, ny_ + 1, 0.0), p(nx_, ny_, 0.0) {}

double VelocityField::max_speed() const {
    double m = 0.0;
    for (double a : u.data()) m = std::max(m, std::abs(a));
    for (double a : v.data()) m = std::max(m, std::abs(a));
    return m;
}

bool VelocityField::finite() const {
    auto all_finite = [](const Grid2<double>& g) {
        return std::all_of(g.data().begin(), g.data().end(), [](double a) { return std::isfinite(a); });
    };
    return all_finite(u) && all_finite(v);
}

void VelocityField::fill(Vec2 velocity) {
    u.fill(velocity.x);
    v.fill(velocity.y);
}

namespace {

bool solid(const ObstacleMask& mask, int i, int j) {
    return mask.size() != 0 && mask.contains(i, j) && mask(i, j) != 0;
}

bool u_face_blocked(const ObstacleMask& mask, int i, int j) {
    return solid(mask, i - 1, j) || solid(mask, i, j);
}

bool v_face_blocked(const ObstacleMask& mask, int i, int j) {
    return solid(mask, i, j - 1) || solid(mask, i, j);
}

// Tangential ghost values beyond an edge: the edge velocity for Dirichlet
// edges, the adjacent interior value (zero gradient) for open edges.
double ghost_u(const VelocityField& f, const EdgeCondition& edge, int i, int j_inside) {
    return edge.is_dirichlet() ? edge.velocity.x : f.u(i, j_inside);
}

double ghost_v(const VelocityField& f, const EdgeCondition& edge, int i_inside, int j) {
    return edge.is_dirichlet() ? edge.velocity.y : f.v(i_inside, j);
}

void require_finite(const VelocityField& field, const char* stage) {
    if (!field.finite()) throw ModelError(std::string(stage) + ": non-finite velocity in field");
}

}  // namespace

double compute_timestep(const VelocityField& field, const SolverParams& params) {
    const double speed = std::max(field.max_speed(), params.velocity_floor);
    const double dt = params.courant_target * std::min(field.dx, field.dy) / speed;
    return std::min(dt, params.dt_max);
}

void apply_boundary(VelocityField& f, const BoundarySpec& b) {
    for (int j = 0; j < f.ny; ++j) {
        f.u(0, j) = b.west.is_dirichlet() ? b.west.velocity.x : f.u(1, j);
        f.u(f.nx, j) = b.east.is_dirichlet() ? b.east.velocity.x : f.u(f.nx - 1, j);
    }
    for (int i = 0; i < f.nx; ++i) {
        f.v(i, 0) = b.south.is_dirichlet() ? b.south.velocity.y : f.v(i, 1);
        f.v(i, f.ny) = b.north.is_dirichlet() ? b.north.velocity.y : f.v(i, f.ny - 1);
    }
}

void advect(VelocityField& f, const BoundarySpec& b, const ObstacleMask& obstacles, double dt) {
    require_finite(f, "advect");
    if (dt == 0.0) return;
    const bool forced_u = f.force_u.size() != 0;
    const bool forced_v = f.force_v.size() != 0;

    Grid2<double> u_new = f.u;
    for (int j = 0; j < f.ny; ++j) {
        for (int i = 1; i < f.nx; ++i) {
            if (u_face_blocked(obstacles, i, j)) continue;
            const double uc = f.u(i, j);
            const double vbar = 0.25 * (f.v(i - 1, j) + f.v(i, j) + f.v(i - 1, j + 1) + f.v(i, j + 1));
            const double dudx = uc > 0.0 ? (uc - f.u(i - 1, j)) / f.dx : (f.u(i + 1, j) - uc) / f.dx;
            const double u_south = j > 0 ? f.u(i, j - 1) : ghost_u(f, b.south, i, j);
            const double u_north = j + 1 < f.ny ? f.u(i, j + 1) : ghost_u(f, b.north, i, j);
            const double dudy = vbar > 0.0 ? (uc - u_south) / f.dy : (u_north - uc) / f.dy;
            u_new(i, j) = uc - dt * (uc * dudx + vbar * dudy) + (forced_u ? dt * f.force_u(i, j) : 0.0);
        }
    }

    Grid2<double> v_new = f.v;
    for (int j = 1; j < f.ny; ++j) {
        for (int i = 0; i < f.nx; ++i) {
            if (v_face_blocked(obstacles, i, j)) continue;
            const double vc = f.v(i, j);
            const double ubar = 0.25 * (f.u(i, j - 1) + f.u(i + 1, j - 1) + f.u(i, j) + f.u(i + 1, j));
            const double dvdy = vc > 0.0 ? (vc - f.v(i, j - 1)) / f.dy : (f.v(i, j + 1) - vc) / f.dy;
            const double v_west = i > 0 ? f.v(i - 1, j) : ghost_v(f, b.west, i, j);
            const double v_east = i + 1 < f.nx ? f.v(i + 1, j) : ghost_v(f, b.east, i, j);
            const double dvdx = ubar > 0.0 ? (vc - v_west) / f.dx : (v_east - vc) / f.dx;
            v_new(i, j) = vc - dt * (ubar * dvdx + vc * dvdy) + (forced_v ? dt * f.force_v(i, j) : 0.0);
        }
    }
    f.u = std::move(u_new);
    f.v = std::move(v_new);
}

double diffuse(VelocityField& f, const BoundarySpec& b, const ObstacleMask& obstacles, double dt,
               const SolverParams& params) {
    if (f.viscosity < 0.0) throw ModelError("diffuse: negative viscosity");
    require_finite(f, "diffuse");
    if (f.viscosity == 0.0 || dt == 0.0) return 0.0;

    const double ax = f.viscosity * dt / (f.dx * f.dx);
    const double ay = f.viscosity * dt / (f.dy * f.dy);
    const Grid2<double> u0 = f.u;
    const Grid2<double> v0 = f.v;
    const double omega = params.sor_omega;

    // A neighbour contributes (coef, value); a zero-gradient ghost is the
    // unknown itself and drops out of both sides.
    auto relax_u = [&](int i, int j, bool update, double& residual) {
        double diag = 1.0;
        double sum = 0.0;
        auto add = [&](double coef, double value) { diag += coef; sum += coef * value; };
        const double uc = f.u(i, j);
        if (!(i - 1 == 0 && !b.west.is_dirichlet())) add(ax, f.u(i - 1, j));
        if (!(i + 1 == f.nx && !b.east.is_dirichlet())) add(ax, f.u(i + 1, j));
        if (j > 0) add(ay, f.u(i, j - 1));
        else if (b.south.is_dirichlet()) add(ay, b.south.velocity.x);
        if (j + 1 < f.ny) add(ay, f.u(i, j + 1));
        else if (b.north.is_dirichlet()) add(ay, b.north.velocity.x);
        residual = std::max(residual, std::abs(diag * uc - sum - u0(i, j)));
        if (update) f.u(i, j) = uc + omega * ((u0(i, j) + sum) / diag - uc);
    };
    auto relax_v = [&](int i, int j, bool update, double& residual) {
        double diag = 1.0;
        double sum = 0.0;
        auto add = [&](double coef, double value) { diag += coef; sum += coef * value; };
        const double vc = f.v(i, j);
        if (!(j - 1 == 0 && !b.south.is_dirichlet())) add(ay, f.v(i, j - 1));
        if (!(j + 1 == f.ny && !b.north.is_dirichlet())) add(ay, f.v(i, j + 1));
        if (i > 0) add(ax, f.v(i - 1, j));
        else if (b.west.is_dirichlet()) add(ax, b.west.velocity.y);
        if (i + 1 < f.nx) add(ax, f.v(i + 1, j));
        else if (b.east.is_dirichlet()) add(ax, b.east.velocity.y);
        residual = std::max(residual, std::abs(diag * vc - sum - v0(i, j)));
        if (update) f.v(i, j) = vc + omega * ((v0(i, j) + sum) / diag - vc);
    };
    auto sweep = [&](bool update) {
        double residual = 0.0;
        for (int j = 0; j < f.ny; ++j)
            for (int i = 1; i < f.nx; ++i)
                if (!u_face_blocked(obstacles, i, j)) relax_u(i, j, update, residual);
        for (int j = 1; j < f.ny; ++j)
            for (int i = 0; i < f.nx; ++i)
                if (!v_face_blocked(obstacles, i, j)) relax_v(i, j, update, residual);
        return residual;
    };

    double residual = 0.0;
    for (int iter = 0; iter < params.max_iters; ++iter) {
        sweep(true);
        residual = sweep(false);
        if (residual < params.sor_tol) return residual;
    }
    spdlog::warn("diffuse: SOR did not converge in {} iterations (residual {:.3e})", params.max_iters,
                 residual);
    return residual;
}

void apply_obstacles(VelocityField& f, const ObstacleMask& obstacles) {
    if (obstacles.size() == 0 || f.kind == FlowKind::wind) return;
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i <= f.nx; ++i)
            if (u_face_blocked(obstacles, i, j)) f.u(i, j) = 0.0;
    for (int j = 0; j <= f.ny; ++j)
        for (int i = 0; i < f.nx; ++i)
            if (v_face_blocked(obstacles, i, j)) f.v(i, j) = 0.0;
}

void apply_speed_limits(VelocityField& f, const SpeedLimits& limits) {
    if (limits.empty()) return;
    // Scaling a cell's four faces together scales its centre velocity
    // exactly; shared faces can disturb an already-clamped neighbour, so
    // sweep until no cell exceeds its cap. Face magnitudes only shrink.
    constexpr int kMaxSweeps = 64;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool changed = false;
        for (int j = 0; j < f.ny; ++j) {
            for (int i = 0; i < f.nx; ++i) {
                if (!limits.active(i, j)) continue;
                const double speed = f.centre_velocity(i, j).norm();
                const double cap = limits.limit(i, j);
                if (speed <= cap * (1.0 + 1e-12)) continue;
                const double s = cap / speed;
                f.u(i, j) *= s;
                f.u(i + 1, j) *= s;
                f.v(i, j) *= s;
                f.v(i, j + 1) *= s;
                changed = true;
            }
        }
        if (!changed) return;
    }
}

namespace {

struct FaceMasks {
    Grid2<std::uint8_t> u;  // 1 = fixed during projection
    Grid2<std::uint8_t> v;
};

FaceMasks structural_fixed_faces(const VelocityField& f, const BoundarySpec& b, const ObstacleMask& obstacles) {
    FaceMasks m{Grid2<std::uint8_t>(f.nx + 1, f.ny, 0), Grid2<std::uint8_t>(f.nx, f.ny + 1, 0)};
    for (int j = 0; j < f.ny; ++j) {
        for (int i = 0; i <= f.nx; ++i) {
            const bool edge_fixed = (i == 0 && b.west.is_dirichlet()) || (i == f.nx && b.east.is_dirichlet());
            if (edge_fixed || u_face_blocked(obstacles, i, j)) m.u(i, j) = 1;
        }
    }
    for (int j = 0; j <= f.ny; ++j) {
        for (int i = 0; i < f.nx; ++i) {
            const bool edge_fixed = (j == 0 && b.south.is_dirichlet()) || (j == f.ny && b.north.is_dirichlet());
            if (edge_fixed || v_face_blocked(obstacles, i, j)) m.v(i, j) = 1;
        }
    }
    return m;
}

struct BoundedFace {
    bool is_u;
    int i;
    int j;
    double lo;
    double hi;
};

template <typename Fn>
void for_each_constraint_face(const VelocityField& f, const MeasurementConstraint& c, Fn&& fn) {
    const int i = c.cell.i;
    const int j = c.cell.j;
    if (i < 0 || j < 0 || i >= f.nx || j >= f.ny)
        throw ModelError("measurement constraint outside the domain");
    fn(true, i, j, c.velocity.x);
    fn(true, i + 1, j, c.velocity.x);
    fn(false, i, j, c.velocity.y);
    fn(false, i, j + 1, c.velocity.y);
}

struct Stencil {
    int cell;
    int n;
    int nbr[4];
    double coef[4];
    double inv_diag;
};

// One pressure solve + correction with the given set of fixed faces.
// Returns iterations used; accumulates the potential into phi_total.
int projection_pass(VelocityField& f, const FaceMasks& fixed, const ObstacleMask& obstacles,
                    const SolverParams& params, Grid2<double>& phi_total, const Grid2<double>* guess) {
    const int nx = f.nx;
    const int ny = f.ny;
    const double cx = 1.0 / (f.dx * f.dx);
    const double cy = 1.0 / (f.dy * f.dy);
    const double tol = 0.5 * params.div_tol;

    std::vector<Stencil> stencils;
    stencils.reserve(static_cast<std::size_t>(nx) * ny);
    std::vector<double> div(static_cast<std::size_t>(nx) * ny, 0.0);
    std::vector<double> phi(static_cast<std::size_t>(nx) * ny, 0.0);
    if (guess != nullptr) phi = guess->data();
    auto id = [nx](int i, int j) { return j * nx + i; };

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (solid(obstacles, i, j)) {
                phi[id(i, j)] = 0.0;
                continue;
            }
            const int c = id(i, j);
            div[c] = f.divergence(i, j);
            Stencil s{c, 0, {}, {}, 0.0};
            double diag = 0.0;
            auto link = [&](bool face_fixed, bool inside, int nbr, double coef) {
                if (face_fixed) return;
                s.nbr[s.n] = inside ? nbr : -1;
                s.coef[s.n] = coef;
                ++s.n;
                diag += coef;
            };
            link(fixed.u(i, j) != 0, i > 0, i > 0 ? id(i - 1, j) : -1, cx);
            link(fixed.u(i + 1, j) != 0, i + 1 < nx, i + 1 < nx ? id(i + 1, j) : -1, cx);
            link(fixed.v(i, j) != 0, j > 0, j > 0 ? id(i, j - 1) : -1, cy);
            link(fixed.v(i, j + 1) != 0, j + 1 < ny, j + 1 < ny ? id(i, j + 1) : -1, cy);
            if (s.n == 0) {
                phi[c] = 0.0;
                if (std::abs(div[c]) > params.div_tol) {
                    throw ConvergenceError("project: over-constrained cell (" + std::to_string(i) + "," +
                                               std::to_string(j) + ") has every face fixed and divergence " +
                                               std::to_string(div[c]),
                                           std::abs(div[c]));
                }
                continue;
            }
            s.inv_diag = 1.0 / diag;
            stencils.push_back(s);
        }
    }

    auto residual = [&]() {
        double r = 0.0;
        for (const Stencil& s : stencils) {
            double sum = 0.0;
            double diag = 0.0;
            for (int k = 0; k < s.n; ++k) {
                diag += s.coef[k];
                if (s.nbr[k] >= 0) sum += s.coef[k] * phi[s.nbr[k]];
            }
            r = std::max(r, std::abs(div[s.cell] - sum + diag * phi[s.cell]));
        }
        return r;
    };

    const double omega = params.sor_omega;
    int iterations = 0;
    if (residual() > tol) {
        for (iterations = 1; iterations <= params.max_iters; ++iterations) {
            for (const Stencil& s : stencils) {
                double sum = 0.0;
                for (int k = 0; k < s.n; ++k)
                    if (s.nbr[k] >= 0) sum += s.coef[k] * phi[s.nbr[k]];
                const double gs = (sum - div[s.cell]) * s.inv_diag;
                phi[s.cell] += omega * (gs - phi[s.cell]);
            }
            if (iterations % 4 == 0 && residual() <= tol) break;
        }
        iterations = std::min(iterations, params.max_iters);
    }

    auto phi_at = [&](int i, int j) { return (i >= 0 && j >= 0 && i < nx && j < ny) ? phi[id(i, j)] : 0.0; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i)
            if (!fixed.u(i, j)) f.u(i, j) -= (phi_at(i, j) - phi_at(i - 1, j)) / f.dx;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (!fixed.v(i, j)) f.v(i, j) -= (phi_at(i, j) - phi_at(i, j - 1)) / f.dy;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) phi_total(i, j) += phi[id(i, j)];
    return iterations;
}

double max_divergence_with(const VelocityField& f, const FaceMasks& fixed, const ObstacleMask& obstacles) {
    double m = 0.0;
    for (int j = 0; j < f.ny; ++j) {
        for (int i = 0; i < f.nx; ++i) {
            if (solid(obstacles, i, j)) continue;
            const bool all_fixed = fixed.u(i, j) && fixed.u(i + 1, j) && fixed.v(i, j) && fixed.v(i, j + 1);
            if (all_fixed) continue;
            m = std::max(m, std::abs(f.divergence(i, j)));
        }
    }
    return m;
}

}  // namespace

void apply_constraints(VelocityField& f, const std::vector<MeasurementConstraint>& constraints,
                       const BoundarySpec& boundary, const ObstacleMask& obstacles) {
    const FaceMasks structural = structural_fixed_faces(f, boundary, obstacles);
    for (const MeasurementConstraint& c : constraints) {
        if (c.half_width < 0.0) throw ModelError("measurement bound half-width must be >= 0");
        for_each_constraint_face(f, c, [&](bool is_u, int i, int j, double value) {
            if (is_u ? structural.u(i, j) : structural.v(i, j)) return;
            (is_u ? f.u(i, j) : f.v(i, j)) = value;
        });
    }
}

double max_free_divergence(const VelocityField& f, const BoundarySpec& boundary, const ObstacleMask& obstacles,
                           const std::vector<MeasurementConstraint>& constraints) {
    FaceMasks fixed = structural_fixed_faces(f, boundary, obstacles);
    for (const MeasurementConstraint& c : constraints) {
        if (c.half_width != 0.0) continue;
        for_each_constraint_face(f, c, [&](bool is_u, int i, int j, double) {
            (is_u ? fixed.u(i, j) : fixed.v(i, j)) = 1;
        });
    }
    return max_divergence_with(f, fixed, obstacles);
}

ProjectionReport project(VelocityField& f, const BoundarySpec& boundary, const ObstacleMask& obstacles,
                         const std::vector<MeasurementConstraint>& constraints, const SolverParams& params,
                         double dt) {
    require_finite(f, "project");
    FaceMasks fixed = structural_fixed_faces(f, boundary, obstacles);
    std::vector<BoundedFace> bounded;
    ProjectionReport report;

    for (const MeasurementConstraint& c : constraints) {
        if (c.half_width < 0.0) throw ModelError("measurement bound half-width must be >= 0");
        for_each_constraint_face(f, c, [&](bool is_u, int i, int j, double value) {
            std::uint8_t& flag = is_u ? fixed.u(i, j) : fixed.v(i, j);
            if (flag) return;
            if (c.half_width == 0.0) {
                flag = 1;
                ++report.pinned_faces;
            } else {
                bounded.push_back({is_u, i, j, value - c.half_width, value + c.half_width});
            }
        });
    }

    Grid2<double> phi_total(f.nx, f.ny, 0.0);
    // The previous pressure is a good first guess when the forcing changes slowly.
    const Grid2<double>& guess = f.potential;
    bool first_pass = true;
    // Active set: project with bounded faces free, clamp any that left
    // their interval, pin those at the bound and project again.
    const int max_rounds = static_cast<int>(bounded.size()) + 1;
    for (int round = 0; round < max_rounds; ++round) {
        double div = max_divergence_with(f, fixed, obstacles);
        for (int pass = 0; pass < params.projection_passes && div > params.div_tol; ++pass) {
            report.iterations +=
                projection_pass(f, fixed, obstacles, params, phi_total, first_pass && guess.nx() == f.nx && guess.ny() == f.ny ? &guess : nullptr);
            first_pass = false;
            div = max_divergence_with(f, fixed, obstacles);
        }
        if (div > params.div_tol) {
            throw ConvergenceError("project: divergence " + std::to_string(div) + " above tolerance after " +
                                       std::to_string(report.iterations) +
                                       " SOR iterations (over-constrained or incompatible boundaries)",
                                   div);
        }
        report.max_divergence = div;

        bool clamped = false;
        for (BoundedFace& bf : bounded) {
            std::uint8_t& flag = bf.is_u ? fixed.u(bf.i, bf.j) : fixed.v(bf.i, bf.j);
            if (flag) continue;
            double& value = bf.is_u ? f.u(bf.i, bf.j) : f.v(bf.i, bf.j);
            if (value < bf.lo || value > bf.hi) {
                value = std::clamp(value, bf.lo, bf.hi);
                flag = 1;
                ++report.pinned_faces;
                clamped = true;
            }
        }
        if (!clamped) break;
    }

    const double inv_dt = dt > 0.0 ? 1.0 / dt : 1.0;
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) f.p(i, j) = phi_total(i, j) * inv_dt;
    if (!first_pass) f.potential = std::move(phi_total);
    return report;
}

ProjectionReport step(VelocityField& f, const BoundarySpec& boundary, const ObstacleMask& obstacles,
                      const std::vector<MeasurementConstraint>& constraints, double dt, const SolverParams& params,
                      const SpeedLimits& limits) {
    apply_boundary(f, boundary);
    advect(f, boundary, obstacles, dt);
    diffuse(f, boundary, obstacles, dt, params);
    apply_boundary(f, boundary);
    if (f.kind == FlowKind::wind) {
        apply_speed_limits(f, limits);
    } else {
        apply_obstacles(f, obstacles);
    }
    apply_constraints(f, constraints, boundary, obstacles);
    return project(f, boundary, obstacles, constraints, params, dt);
}

}  // namespace scem
