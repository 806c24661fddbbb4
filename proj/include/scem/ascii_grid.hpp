#pragma once

#include <filesystem>
#include <string>

#include "scem/types.hpp"

namespace scem {

/// ESRI ASCII raster. data(i, j) has j = 0 at the southern row.
struct AsciiGrid {
    double xllcorner = 0.0;
    double yllcorner = 0.0;
    double cellsize = 1.0;
    double cellsize_y = 0.0;  ///< 0 = square cells; otherwise written as GDAL-style dx/dy keys
    double nodata = -9999.0;
    Grid2<double> data;

    int ncols() const { return data.nx(); }
    int nrows() const { return data.ny(); }
    /// Cell-centre coordinates in the raster's own units.
    double x_of(int i) const { return xllcorner + (i + 0.5) * cellsize; }
    double y_of(int j) const { return yllcorner + (j + 0.5) * dy(); }
    double dy() const { return cellsize_y > 0.0 ? cellsize_y : cellsize; }
};

AsciiGrid read_ascii_grid(const std::filesystem::path& path);
/// Writes with 17 significant digits so reading back is exact.
void write_ascii_grid(const std::filesystem::path& path, const AsciiGrid& grid);
std::string format_ascii_grid(const AsciiGrid& grid);

}  // namespace scem
