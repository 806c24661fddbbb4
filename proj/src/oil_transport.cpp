#include "scem/oil_transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

namespace scem {

const char* to_string(ParticleStatus s) {
    switch (s) {
        case ParticleStatus::surface: return "surface";
        case ParticleStatus::entrained: return "entrained";
        case ParticleStatus::beached: return "beached";
        case ParticleStatus::escaped: return "escaped";
    }
    return "unknown";
}

std::int64_t released_by(const SpillSource& source, std::int64_t budget, double t) {
    if (t < source.t0) return 0;
    if (t >= source.tf) return budget;
    const double share = (t - source.t0) / (source.tf - source.t0);
    return std::clamp<std::int64_t>(std::llround(share * static_cast<double>(budget)), 0, budget);
}

bool check_particle_budget(std::int64_t budget, bool override_floor) {
    if (budget >= kRecommendedParticles) return true;
    if (!override_floor)
        spdlog::warn("particle budget {} is below the recommended minimum of {} particles", budget,
                     kRecommendedParticles);
    return false;
}

std::vector<OilParticle> release_particles(const SpillSource& source, double t, double dt, std::int64_t budget,
                                           std::uint64_t next_id, const OilProperties& props) {
    if (!(source.tf > source.t0)) throw ModelError("spill source: leak end must follow leak start");
    if (!(source.volume > 0.0)) throw ModelError("spill source: volume must be > 0");
    const std::int64_t n = released_by(source, budget, t + dt) - released_by(source, budget, t);
    std::vector<OilParticle> out;
    out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)));
    const double per = source.volume / static_cast<double>(budget);
    for (std::int64_t k = 0; k < n; ++k) {
        OilParticle p;
        p.id = next_id + static_cast<std::uint64_t>(k);
        p.x = source.x;
        p.y = source.y;
        p.volume = per;
        p.diameter = props.droplet_diameter;
        out.push_back(p);
    }
    return out;
}

double smagorinsky_diffusivity(double dudx, double dudy, double dvdx, double dvdy, double dx, double dy,
                               double c_smag, bool literal_form) {
    const double t = dudx - dvdy;
    const double s = dudy + dvdx;
    const double radicand = literal_form ? std::max(t + s, 0.0) : t * t + s * s;
    return c_smag * (dx * dx + dy * dy) * std::sqrt(radicand);
}

Grid2<double> horizontal_diffusivity(const VelocityField& c, double c_smag, bool literal_form) {
    Grid2<double> out(c.nx, c.ny, 0.0);
    Grid2<Vec2> centre(c.nx, c.ny);
    for (int j = 0; j < c.ny; ++j)
        for (int i = 0; i < c.nx; ++i) centre(i, j) = c.centre_velocity(i, j);
    auto diff = [](double lo, double hi, double span) { return (hi - lo) / span; };
    for (int j = 0; j < c.ny; ++j) {
        for (int i = 0; i < c.nx; ++i) {
            const double dudx = (c.u(i + 1, j) - c.u(i, j)) / c.dx;
            const double dvdy = (c.v(i, j + 1) - c.v(i, j)) / c.dy;
            const int jm = std::max(j - 1, 0);
            const int jp = std::min(j + 1, c.ny - 1);
            const int im = std::max(i - 1, 0);
            const int ip = std::min(i + 1, c.nx - 1);
            const double dudy = diff(centre(i, jm).x, centre(i, jp).x, (jp - jm) * c.dy);
            const double dvdx = diff(centre(im, j).y, centre(ip, j).y, (ip - im) * c.dx);
            out(i, j) = smagorinsky_diffusivity(dudx, dudy, dvdx, dvdy, c.dx, c.dy, c_smag, literal_form);
        }
    }
    return out;
}

double vertical_diffusivity(const WaveSummary& w, double z) {
    if (w.calm || w.t_peak <= 0.0 || w.l_peak <= 0.0) return 0.0;
    return 0.028 * w.hs * w.hs / w.t_peak * std::exp(-2.0 * z / w.l_peak);
}

Vec3 turbulent_displacement(double d_h, double d_v, double dt, double xi, double phi, double zeta) {
    if (dt <= 0.0) return {};
    const double amp_h = xi * std::sqrt(12.0 * d_h / dt);
    const double w = (2.0 * zeta - 1.0) * std::sqrt(6.0 * d_v / dt);
    return {amp_h * std::sin(2.0 * kPi * phi) * dt, amp_h * std::cos(2.0 * kPi * phi) * dt, w * dt};
}

Grid2<Vec2> diffusion_correction(const Grid2<double>& d_h, const Grid2<std::uint8_t>& land, double dx, double dy) {
    const int nx = d_h.nx();
    const int ny = d_h.ny();
    Grid2<Vec2> out(nx, ny);
    auto wet = [&](int i, int j) { return d_h.contains(i, j) && (land.size() == 0 || land(i, j) == 0); };
    auto derivative = [&](int i, int j, int di, int dj, double h) {
        const bool lo = wet(i - di, j - dj);
        const bool hi = wet(i + di, j + dj);
        if (lo && hi) return (d_h(i + di, j + dj) - d_h(i - di, j - dj)) / (2.0 * h);
        if (hi) return (d_h(i + di, j + dj) - d_h(i, j)) / h;
        if (lo) return (d_h(i, j) - d_h(i - di, j - dj)) / h;
        return 0.0;
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (wet(i, j)) out(i, j) = {derivative(i, j, 1, 0, dx), derivative(i, j, 0, 1, dy)};
    return out;
}

double entrainment_damping(const WaveSummary& w, double rho_water, double wind_speed, const EntrainmentParams& p) {
    if (w.calm || w.t_peak <= 0.0) return 0.0;
    const double omega = 2.0 * kPi / w.t_peak;
    if (wind_speed >= p.whitecap_wind) {
        const double e_w = kGravity * rho_water * w.hs * w.hs / 16.0;
        return p.gamma_coefficient * omega * std::pow(e_w, 0.25);
    }
    return 1.8e-7 * omega * omega * omega;
}

double entrainment_rate(const WaveSummary& w, double rho_water, double wind_speed, const EntrainmentParams& p) {
    if (w.calm || w.hs <= 0.0 || w.t_peak <= 0.0) return 0.0;
    const double gamma = entrainment_damping(w, rho_water, wind_speed, p);
    return kPi * p.k_e * gamma * w.hs / (8.0 * p.alpha * w.t_peak * p.l_ow);
}

double entrainment_probability(double rate, double dt) { return -std::expm1(-rate * dt); }

bool entrain(OilParticle& p, double rate, const WaveSummary& waves, double dt, double u_event, double u_depth) {
    if (p.status != ParticleStatus::surface) return false;
    if (!(u_event < entrainment_probability(rate, dt))) return false;
    p.status = ParticleStatus::entrained;
    p.z = (1.35 + 0.35 * (2.0 * u_depth - 1.0)) * waves.hs;
    p.buoyancy_suppressed = true;
    return true;
}

double critical_diameter(const OilProperties& props, double rho_water) {
    const double drho = rho_water - props.rho_oil;
    if (drho <= 0.0) return 0.0;
    // g d^2 drho / (18 mu) = sqrt(8/3 g d drho / rho_w)  =>  d^3 = 864 mu^2 / (g drho rho_w)
    return std::cbrt(864.0 * props.mu_water * props.mu_water / (kGravity * drho * rho_water));
}

double buoyancy_velocity(const OilProperties& props, double rho_water, double d) {
    const double drho = rho_water - props.rho_oil;
    if (drho <= 0.0 || d <= 0.0) return 0.0;
    if (d <= critical_diameter(props, rho_water)) return kGravity * d * d * drho / (18.0 * props.mu_water);
    return std::sqrt(8.0 / 3.0 * kGravity * d * drho / rho_water);
}

namespace {

bool wet_at(const Domain& d, double x, double y, std::optional<CellIndex>& cell) {
    cell = d.cell_of(x, y);
    return cell && d.is_water(*cell);
}

void clamp_depth(OilParticle& p, const Domain& domain) {
    if (p.status != ParticleStatus::entrained) return;
    if (auto c = domain.cell_of(p.x, p.y); c && domain.is_water(*c)) p.z = std::clamp(p.z, 0.0, domain.depth(*c));
    if (p.z <= 0.0) {
        p.z = 0.0;
        p.status = ParticleStatus::surface;
    }
}

}  // namespace

MoveResult move_particle(OilParticle& p, Vec2 d, const Domain& domain, BeachLedger& beach) {
    if (p.frozen()) return p.status == ParticleStatus::beached ? MoveResult::beached : MoveResult::escaped;
    if (beach.volume.size() == 0) beach.volume = Grid2<double>(domain.nx(), domain.ny(), 0.0);
    const double len = d.norm();
    if (len == 0.0) return MoveResult::moved;

    const double h = 0.25 * std::min(domain.dx(), domain.dy());
    const int n = static_cast<int>(std::ceil(len / h));
    const Vec2 start{p.x, p.y};
    Vec2 last_wet = start;
    for (int k = 1; k <= n; ++k) {
        const Vec2 q = start + d * (static_cast<double>(k) / n);
        std::optional<CellIndex> cell;
        if (wet_at(domain, q.x, q.y, cell)) {
            last_wet = q;
            continue;
        }
        if (!cell) {
            p.x = q.x;
            p.y = q.y;
            p.status = ParticleStatus::escaped;
            return MoveResult::escaped;
        }
        // Bisect to the point where the path enters land.
        Vec2 lo = last_wet;
        Vec2 hi = q;
        for (int it = 0; it < 48; ++it) {
            const Vec2 mid = (lo + hi) * 0.5;
            std::optional<CellIndex> mc;
            if (wet_at(domain, mid.x, mid.y, mc)) {
                lo = mid;
            } else if (!mc) {
                // Path clips the domain edge before reaching land.
                p.x = mid.x;
                p.y = mid.y;
                p.status = ParticleStatus::escaped;
                return MoveResult::escaped;
            } else {
                hi = mid;
            }
        }
        const CellIndex landing = *domain.cell_of(hi.x, hi.y);
        if (beach.volume(landing) + p.volume <= beach.capacity) {
            beach.volume(landing) += p.volume;
            p.x = hi.x;
            p.y = hi.y;
            p.z = 0.0;
            p.status = ParticleStatus::beached;
            return MoveResult::beached;
        }
        return MoveResult::blocked;  // saturated beach: stays afloat where it was
    }
    p.x = start.x + d.x;
    p.y = start.y + d.y;
    clamp_depth(p, domain);
    return MoveResult::moved;
}

MoveResult advect_particle(OilParticle& p, Vec2 velocity, double w_turbulent, double w_buoyancy, double dt,
                           const Domain& domain, BeachLedger& beach) {
    if (p.frozen()) return p.status == ParticleStatus::beached ? MoveResult::beached : MoveResult::escaped;
    if (p.status == ParticleStatus::entrained) {
        p.z += (w_turbulent - w_buoyancy) * dt;
        clamp_depth(p, domain);
    }
    return move_particle(p, velocity * dt, domain, beach);
}

double lehr_area(double volume_bbl, double age_min, double wind_knots, double rho_oil, double rho_water) {
    if (volume_bbl <= 0.0) return 0.0;
    const double ratio = (rho_water - rho_oil) / rho_oil;
    if (age_min <= 0.0) return std::numeric_limits<double>::infinity();
    const double gravity_term = 2.27 * std::pow(ratio, 2.0 / 3.0) * std::pow(volume_bbl, 2.0 / 3.0) / std::sqrt(age_min);
    const double wind_term =
        0.03 * std::cbrt(ratio) * std::cbrt(volume_bbl) * std::pow(wind_knots, 4.0 / 3.0) * age_min;
    return 1e3 * (gravity_term + wind_term);
}

ThicknessMap thickness_map(const std::vector<OilParticle>& particles, const Domain& domain, const Grid2<Vec2>& wind,
                           const OilProperties& props, double rho_water) {
    const int nx = domain.nx();
    const int ny = domain.ny();
    ThicknessMap m{Grid2<double>(nx, ny, 0.0), Grid2<double>(nx, ny, 0.0), Grid2<double>(nx, ny, 0.0),
                   Grid2<double>(nx, ny, 0.0), Grid2<int>(nx, ny, 0)};
    for (const OilParticle& p : particles) {
        if (p.status != ParticleStatus::surface) continue;
        auto c = domain.cell_of(p.x, p.y);
        if (!c) continue;
        m.volume(*c) += p.volume;
        m.age(*c) += p.age;
        m.count(*c) += 1;
    }
    const double cell_area = domain.dx() * domain.dy();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (m.count(i, j) == 0) continue;
            m.age(i, j) /= m.count(i, j);
            const double age_min = std::min(m.age(i, j), kAgeCap) / 60.0;
            const double knots = wind(i, j).norm() / kKnotMs;
            const double area = lehr_area(m.volume(i, j) / kBarrelM3, age_min, knots, props.rho_oil, rho_water);
            m.area(i, j) = std::min(area, cell_area);
            m.thickness(i, j) = m.area(i, j) > 0.0 ? m.volume(i, j) / m.area(i, j) : 0.0;
        }
    }
    return m;
}

SpreadStep spreading_offsets(double volume_m3, double age_s, double dt, double wind_speed, double rho_oil,
                             double rho_water) {
    if (age_s <= 0.0 || volume_m3 <= 0.0) return {};
    const double drho = std::max(rho_water - rho_oil, 0.0) / rho_water;
    SpreadStep s;
    s.dq = 1.13 * std::cbrt(drho) * std::cbrt(volume_m3) * 0.25 * std::pow(age_s, -0.75) * dt;
    s.dr = s.dq + 0.0034 * std::pow(wind_speed, 4.0 / 3.0) * 0.75 * std::pow(age_s, -0.25) * dt;
    return s;
}

Vec2 spread_displacement(const SpreadStep& s, double bearing, double sign_q, double sign_r) {
    const double q = sign_q * s.dq;
    const double r = sign_r * s.dr;
    return {q * std::cos(bearing) + r * std::sin(bearing), q * std::sin(bearing) + r * std::cos(bearing)};
}

std::int64_t required_particles(double alpha_conf, double d_h, double dt, bool apply_floor) {
    if (!(alpha_conf > 0.0 && alpha_conf < 1.0)) throw ModelError("required_particles: alpha must be in (0, 1)");
    // sigma / E = 2 (sqrt 2 - 1) for any D_h, dt > 0.
    const double spread = std::sqrt(12.0 * std::max(d_h, 0.0) * std::max(dt, 0.0));
    double ratio = 2.0 * (std::sqrt(2.0) - 1.0);
    if (spread > 0.0) ratio = ((std::sqrt(2.0) - 1.0) * spread) / (0.5 * spread);
    const double n = std::pow(1.96 * ratio / alpha_conf, 2.0);
    auto count = static_cast<std::int64_t>(std::ceil(n - 1e-9));
    if (apply_floor && count < kRecommendedParticles) {
        spdlog::warn("required particle count {} raised to the recommended minimum of {}", count,
                     kRecommendedParticles);
        count = kRecommendedParticles;
    }
    return count;
}

}  // namespace scem
