#include "scem/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace scem {

namespace {

constexpr double kLevelEps = 1e-9;

void push_level(std::vector<double>& levels, double z) {
    if (levels.empty() || z > levels.back() + kLevelEps) levels.push_back(z);
}

}  // namespace

std::vector<double> build_depth_levels(double depth, double fine_step, int n_crit, double z_crit,
                                       double coarse_step) {
    std::vector<double> levels;
    levels.reserve(static_cast<std::size_t>(n_crit) + 8);
    levels.push_back(0.0);
    for (int k = 1; k <= n_crit; ++k) {
        const double z = k * fine_step;
        if (z >= depth) break;
        push_level(levels, z);
    }
    if (z_crit < depth) {
        push_level(levels, z_crit);
        for (long m = 1;; ++m) {
            const double z = z_crit + static_cast<double>(m) * coarse_step;
            if (z >= depth) break;
            push_level(levels, z);
        }
    }
    if (depth - levels.back() > kLevelEps) {
        levels.push_back(depth);
    } else {
        levels.back() = depth;
    }
    return levels;
}

Domain Domain::build(const DomainSpec& spec, const Grid2<double>& bathymetry) {
    if (spec.nx < 3 || spec.ny < 3) throw ConfigError("domain: nx and ny must be >= 3");
    if (!(spec.dx > 0.0) || !(spec.dy > 0.0)) throw ConfigError("domain: dx and dy must be > 0");
    if (!(spec.fine_step > 0.0) || !(spec.coarse_step > 0.0))
        throw ConfigError("domain: depth steps must be > 0");
    if (spec.n_crit < 0) throw ConfigError("domain: n_crit must be >= 0");
    if (bathymetry.nx() != spec.nx || bathymetry.ny() != spec.ny) {
        throw ConfigError("domain: bathymetry is " + std::to_string(bathymetry.nx()) + "x" +
                          std::to_string(bathymetry.ny()) + ", expected " + std::to_string(spec.nx) +
                          "x" + std::to_string(spec.ny));
    }
    if (spec.end_time < spec.start_time) throw ConfigError("domain: end_time precedes start_time");

    Domain d;
    d.spec_ = spec;
    const double fine_depth = spec.n_crit * spec.fine_step;
    d.z_crit_ = spec.z_crit.value_or(fine_depth);
    if (d.z_crit_ < fine_depth - kLevelEps)
        throw ConfigError("domain: z_crit is shallower than the fine mesh");
    d.spec_.z_crit = d.z_crit_;

    double min_positive = std::numeric_limits<double>::infinity();
    for (double z : bathymetry.data()) {
        if (!std::isfinite(z) || z < 0.0) throw ConfigError("domain: negative or non-finite depth");
        if (z > 0.0) min_positive = std::min(min_positive, z);
    }
    if (std::isfinite(min_positive) && fine_depth > min_positive) {
        throw ConfigError("domain: fine mesh depth " + std::to_string(fine_depth) +
                          " m exceeds the shallowest water cell (" + std::to_string(min_positive) + " m)");
    }

    d.bathymetry_ = bathymetry;
    d.land_ = Grid2<std::uint8_t>(spec.nx, spec.ny, 0);
    d.levels_.resize(bathymetry.size());
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            const double z = bathymetry(i, j);
            if (z > 0.0) {
                ++d.water_count_;
                d.levels_[static_cast<std::size_t>(j) * spec.nx + i] =
                    build_depth_levels(z, spec.fine_step, spec.n_crit, d.z_crit_, spec.coarse_step);
            } else {
                d.land_(i, j) = 1;
            }
        }
    }

    d.metres_per_deg_lat_ = kEarthRadius * kDegToRad;
    const double height_deg = spec.ny * spec.dy / d.metres_per_deg_lat_;
    d.mean_lat_ = spec.origin_lat + 0.5 * height_deg;
    d.metres_per_deg_lon_ = d.metres_per_deg_lat_ * std::cos(d.mean_lat_ * kDegToRad);
    return d;
}

const std::vector<double>& Domain::depth_levels(int i, int j) const {
    if (!bathymetry_.contains(i, j)) throw ModelError("depth_levels: cell outside domain");
    if (!is_water(i, j)) throw ModelError("no water column");
    return levels_[static_cast<std::size_t>(j) * spec_.nx + i];
}

bool Domain::inside(double x, double y) const {
    return x >= 0.0 && y >= 0.0 && x < width() && y < height();
}

std::optional<CellIndex> Domain::cell_of(double x, double y) const {
    if (!std::isfinite(x) || !std::isfinite(y) || !inside(x, y)) return std::nullopt;
    int i = static_cast<int>(std::floor(x / spec_.dx));
    int j = static_cast<int>(std::floor(y / spec_.dy));
    // floor(x/dx) can round up to nx for x just below the east edge.
    i = std::min(i, spec_.nx - 1);
    j = std::min(j, spec_.ny - 1);
    return CellIndex{i, j};
}

Vec2 Domain::to_local(double lon, double lat) const {
    return {(lon - spec_.origin_lon) * metres_per_deg_lon_, (lat - spec_.origin_lat) * metres_per_deg_lat_};
}

Vec2 Domain::to_geographic(double x, double y) const {
    return {spec_.origin_lon + x / metres_per_deg_lon_, spec_.origin_lat + y / metres_per_deg_lat_};
}

double Domain::latitude_of_row(int j) const {
    return spec_.origin_lat + (j + 0.5) * spec_.dy / metres_per_deg_lat_;
}

}  // namespace scem
