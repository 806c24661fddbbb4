#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scem/types.hpp"

namespace scem {

/// Time-stamped rasters on a regular lon/lat grid (one or two components).
class GriddedSeries {
public:
    GriddedSeries() = default;
    /// slices[t][c] is indexed (lon index, lat index).
    GriddedSeries(std::string variable, std::string units, std::vector<double> times, std::vector<double> lons,
                  std::vector<double> lats, std::vector<std::vector<Grid2<double>>> slices);

    /// A single uniform value valid for all times.
    static GriddedSeries constant(std::string variable, std::string units, Vec2 value);

    const std::string& variable() const { return variable_; }
    const std::string& units() const { return units_; }
    const std::vector<double>& times() const { return times_; }
    int components() const { return components_; }

    /// Bilinear in space (clamped at the grid edge), linear in time, clamped
    /// to the first/last slice outside the time range.
    Vec2 sample(double lon, double lat, double t) const;
    /// Largest vector magnitude over every node and slice.
    double max_magnitude() const;
    bool outside_time(double t) const { return t < times_.front() || t > times_.back(); }

private:
    Vec2 sample_slice(std::size_t k, double lon, double lat) const;

    std::string variable_;
    std::string units_;
    std::vector<double> times_;
    std::vector<double> lons_;
    std::vector<double> lats_;
    int components_ = 0;
    std::vector<std::vector<Grid2<double>>> slices_;
};

/// CSV-stack format:
///   variable,<name>
///   units,<units>
///   components,<1|2>
///   time,<ISO-8601>
///   <lon>,<lat>,<value>[,<value2>]   (one line per node)
///   time,<ISO-8601>
///   ...
/// Blank lines and lines starting with '#' are ignored.
GriddedSeries load_csv_series(const std::filesystem::path& path, const std::string& variable = {});

/// JSON manifest: {"variable": .., "units": .., "slices": [{"time": ISO, "files": [u.asc, v.asc]}]}
/// with ESRI ASCII rasters in degrees; paths relative to the manifest.
GriddedSeries load_esri_series(const std::filesystem::path& manifest, const std::string& variable = {});

/// Picks the loader by extension (.json = ESRI manifest, otherwise CSV stack).
GriddedSeries load_gridded_series(const std::filesystem::path& path, const std::string& variable = {});

}  // namespace scem
