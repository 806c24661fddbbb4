#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scem/types.hpp"

namespace scem {

/// User-facing description of the computational domain.
struct DomainSpec {
    double origin_lon = 0.0;  ///< degrees, south-west corner
    double origin_lat = 0.0;  ///< degrees, south-west corner
    int nx = 0;               ///< cells west -> east
    int ny = 0;               ///< cells south -> north
    double dx = 0.0;          ///< m
    double dy = 0.0;          ///< m
    double fine_step = 0.5;   ///< m, near-surface layer spacing
    double coarse_step = 25.0;
    int n_crit = 10;          ///< number of fine layers
    std::optional<double> z_crit;  ///< m, defaults to n_crit * fine_step
    double start_time = 0.0;  ///< UTC seconds
    double end_time = 0.0;    ///< UTC seconds
};

/// Geo-referenced surface grid with a two-stage vertical mesh.
///
/// Cell (i, j) covers the half-open box [i*dx, (i+1)*dx) x [j*dy, (j+1)*dy)
/// in local metric coordinates whose origin is the south-west corner.
/// Longitude/latitude map to that plane by an equirectangular projection
/// scaled by the cosine of the domain's mean latitude.
class Domain {
public:
    /// Validates the spec and bathymetry (positive-down depths, 0 = land).
    static Domain build(const DomainSpec& spec, const Grid2<double>& bathymetry);

    const DomainSpec& spec() const { return spec_; }
    int nx() const { return spec_.nx; }
    int ny() const { return spec_.ny; }
    double dx() const { return spec_.dx; }
    double dy() const { return spec_.dy; }
    double width() const { return spec_.nx * spec_.dx; }
    double height() const { return spec_.ny * spec_.dy; }
    double z_crit() const { return z_crit_; }

    double depth(int i, int j) const { return bathymetry_(i, j); }
    double depth(CellIndex c) const { return bathymetry_(c); }
    const Grid2<double>& bathymetry() const { return bathymetry_; }
    bool is_water(int i, int j) const { return bathymetry_(i, j) > 0.0; }
    bool is_water(CellIndex c) const { return is_water(c.i, c.j); }
    /// 1 for land cells, 0 for water.
    const Grid2<std::uint8_t>& land_mask() const { return land_; }
    int water_cells() const { return water_count_; }
    int land_cells() const { return nx() * ny() - water_count_; }

    /// Per-cell depth levels {0, .., z_bar}; throws ModelError on land.
    const std::vector<double>& depth_levels(int i, int j) const;

    /// Cell covering (x, y), or nullopt when outside the domain.
    std::optional<CellIndex> cell_of(double x, double y) const;
    Vec2 centre_of(int i, int j) const { return {(i + 0.5) * spec_.dx, (j + 0.5) * spec_.dy}; }
    Vec2 centre_of(CellIndex c) const { return centre_of(c.i, c.j); }
    bool inside(double x, double y) const;

    Vec2 to_local(double lon, double lat) const;
    /// Returns (lon, lat) in degrees.
    Vec2 to_geographic(double x, double y) const;
    double latitude_of_row(int j) const;
    double mean_latitude() const { return mean_lat_; }

private:
    DomainSpec spec_;
    double z_crit_ = 0.0;
    double mean_lat_ = 0.0;
    double metres_per_deg_lon_ = 0.0;
    double metres_per_deg_lat_ = 0.0;
    int water_count_ = 0;
    Grid2<double> bathymetry_;
    Grid2<std::uint8_t> land_;
    std::vector<std::vector<double>> levels_;
};

/// Depth levels for a single water column; the shared construction rule.
std::vector<double> build_depth_levels(double depth, double fine_step, int n_crit, double z_crit,
                                       double coarse_step);

}  // namespace scem
