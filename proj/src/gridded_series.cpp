#include "scem/gridded_series.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "scem/ascii_grid.hpp"
#include "scem/time_utils.hpp"

namespace scem {

GriddedSeries::GriddedSeries(std::string variable, std::string units, std::vector<double> times,
                             std::vector<double> lons, std::vector<double> lats,
                             std::vector<std::vector<Grid2<double>>> slices)
    : variable_(std::move(variable)), units_(std::move(units)), times_(std::move(times)), lons_(std::move(lons)),
      lats_(std::move(lats)), slices_(std::move(slices)) {
    if (times_.empty() || slices_.size() != times_.size())
        throw ConfigError("gridded series '" + variable_ + "': needs one slice per time");
    for (std::size_t k = 1; k < times_.size(); ++k)
        if (!(times_[k] > times_[k - 1]))
            throw ConfigError("gridded series '" + variable_ + "': timestamps not strictly increasing");
    auto ascending = [](const std::vector<double>& a) {
        return !a.empty() && std::adjacent_find(a.begin(), a.end(), std::greater_equal<>()) == a.end();
    };
    if (!ascending(lons_) || !ascending(lats_))
        throw ConfigError("gridded series '" + variable_ + "': grid axes must be strictly increasing");
    components_ = static_cast<int>(slices_.front().size());
    if (components_ < 1 || components_ > 2)
        throw ConfigError("gridded series '" + variable_ + "': 1 or 2 components expected");
    for (const auto& s : slices_) {
        if (static_cast<int>(s.size()) != components_)
            throw ConfigError("gridded series '" + variable_ + "': component count differs between slices");
        for (const auto& g : s)
            if (g.nx() != static_cast<int>(lons_.size()) || g.ny() != static_cast<int>(lats_.size()))
                throw ConfigError("gridded series '" + variable_ + "': grid mismatch between slices");
    }
}

GriddedSeries GriddedSeries::constant(std::string variable, std::string units, Vec2 value) {
    return GriddedSeries(std::move(variable), std::move(units), {0.0}, {0.0}, {0.0},
                         {{Grid2<double>(1, 1, value.x), Grid2<double>(1, 1, value.y)}});
}

namespace {

// Index of the lower bracketing node and the blend weight, clamped.
std::pair<std::size_t, double> bracket(const std::vector<double>& axis, double x) {
    if (axis.size() == 1 || x <= axis.front()) return {0, 0.0};
    if (x >= axis.back()) return {axis.size() - 2, 1.0};
    const auto it = std::upper_bound(axis.begin(), axis.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - axis.begin()) - 1;
    return {k, (x - axis[k]) / (axis[k + 1] - axis[k])};
}

}  // namespace

Vec2 GriddedSeries::sample_slice(std::size_t k, double lon, double lat) const {
    const auto [ia, wx] = bracket(lons_, lon);
    const auto [ja, wy] = bracket(lats_, lat);
    const std::size_t ib = std::min(ia + 1, lons_.size() - 1);
    const std::size_t jb = std::min(ja + 1, lats_.size() - 1);
    auto interp = [&](const Grid2<double>& g) {
        const int i0 = static_cast<int>(ia), i1 = static_cast<int>(ib);
        const int j0 = static_cast<int>(ja), j1 = static_cast<int>(jb);
        const double south = g(i0, j0) + wx * (g(i1, j0) - g(i0, j0));
        const double north = g(i0, j1) + wx * (g(i1, j1) - g(i0, j1));
        return south + wy * (north - south);
    };
    Vec2 out{interp(slices_[k][0]), 0.0};
    if (components_ == 2) out.y = interp(slices_[k][1]);
    return out;
}

double GriddedSeries::max_magnitude() const {
    double m = 0.0;
    for (const auto& slice : slices_) {
        for (std::size_t n = 0; n < slice.front().size(); ++n) {
            const double x = slice[0].data()[n];
            const double y = components_ == 2 ? slice[1].data()[n] : 0.0;
            m = std::max(m, std::hypot(x, y));
        }
    }
    return m;
}

Vec2 GriddedSeries::sample(double lon, double lat, double t) const {
    if (times_.size() == 1) return sample_slice(0, lon, lat);
    if (outside_time(t)) {
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true))
            spdlog::warn("series '{}' queried outside its time range; using the nearest slice", variable_);
    }
    const auto [k, w] = bracket(times_, t);
    const Vec2 a = sample_slice(k, lon, lat);
    if (w == 0.0) return a;
    const Vec2 b = sample_slice(k + 1, lon, lat);
    if (w == 1.0) return b;
    return a + (b - a) * w;
}

GriddedSeries load_csv_series(const std::filesystem::path& path, const std::string& variable) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open gridded series '" + path.string() + "'");
    const std::string where = "gridded series '" + path.string() + "'";
    std::string name = variable;
    std::string units;
    int components = 0;
    std::vector<double> times;
    std::vector<std::map<std::pair<double, double>, Vec2>> raw;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        const std::string ctx = where + " line " + std::to_string(line_no);
        if (cells[0] == "variable" && cells.size() == 2) {
            if (!variable.empty() && cells[1] != variable)
                throw ConfigError(ctx + ": holds '" + cells[1] + "', expected '" + variable + "'");
            name = cells[1];
        } else if (cells[0] == "units" && cells.size() == 2) {
            units = cells[1];
        } else if (cells[0] == "components" && cells.size() == 2) {
            components = std::stoi(cells[1]);
        } else if (cells[0] == "time" && cells.size() == 2) {
            times.push_back(parse_iso8601(cells[1]));
            raw.emplace_back();
        } else {
            if (raw.empty()) throw ConfigError(ctx + ": data before the first time line");
            if (components < 1 || components > 2) throw ConfigError(ctx + ": components must be declared as 1 or 2");
            if (static_cast<int>(cells.size()) != 2 + components)
                throw ConfigError(ctx + ": expected lon,lat and " + std::to_string(components) + " value(s)");
            try {
                const double lon = std::stod(cells[0]);
                const double lat = std::stod(cells[1]);
                Vec2 v{std::stod(cells[2]), components == 2 ? std::stod(cells[3]) : 0.0};
                raw.back()[{lon, lat}] = v;
            } catch (const std::exception&) {
                throw ConfigError(ctx + ": non-numeric value");
            }
        }
    }
    if (raw.empty()) throw ConfigError(where + ": no time slices");

    std::vector<double> lons;
    std::vector<double> lats;
    for (const auto& [key, v] : raw.front()) {
        lons.push_back(key.first);
        lats.push_back(key.second);
    }
    std::sort(lons.begin(), lons.end());
    lons.erase(std::unique(lons.begin(), lons.end()), lons.end());
    std::sort(lats.begin(), lats.end());
    lats.erase(std::unique(lats.begin(), lats.end()), lats.end());
    const int nx = static_cast<int>(lons.size());
    const int ny = static_cast<int>(lats.size());

    std::vector<std::vector<Grid2<double>>> slices;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        if (raw[k].size() != static_cast<std::size_t>(nx) * ny)
            throw ConfigError(where + ": slice " + std::to_string(k) + " is not a full regular grid (grid mismatch)");
        std::vector<Grid2<double>> comps(components, Grid2<double>(nx, ny, 0.0));
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                auto it = raw[k].find({lons[i], lats[j]});
                if (it == raw[k].end())
                    throw ConfigError(where + ": slice " + std::to_string(k) + " grid mismatch");
                comps[0](i, j) = it->second.x;
                if (components == 2) comps[1](i, j) = it->second.y;
            }
        }
        slices.push_back(std::move(comps));
    }
    return GriddedSeries(name, units, times, lons, lats, std::move(slices));
}

GriddedSeries load_esri_series(const std::filesystem::path& manifest, const std::string& variable) {
    std::ifstream in(manifest);
    if (!in) throw ConfigError("cannot open series manifest '" + manifest.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("series manifest '" + manifest.string() + "': " + e.what());
    }
    const std::string name = j.value("variable", variable);
    if (!variable.empty() && name != variable)
        throw ConfigError("series manifest '" + manifest.string() + "' holds '" + name + "', expected '" + variable + "'");
    const auto base = manifest.parent_path();
    std::vector<double> times;
    std::vector<std::vector<Grid2<double>>> slices;
    std::vector<double> lons;
    std::vector<double> lats;
    AsciiGrid first;
    for (const auto& s : j.at("slices")) {
        times.push_back(parse_iso8601(s.at("time").get<std::string>()));
        std::vector<Grid2<double>> comps;
        for (const auto& f : s.at("files")) {
            AsciiGrid g = read_ascii_grid(base / f.get<std::string>());
            if (lons.empty()) {
                first = g;
                for (int i = 0; i < g.ncols(); ++i) lons.push_back(g.x_of(i));
                for (int r = 0; r < g.nrows(); ++r) lats.push_back(g.y_of(r));
            } else if (g.ncols() != first.ncols() || g.nrows() != first.nrows() || g.xllcorner != first.xllcorner ||
                       g.yllcorner != first.yllcorner || g.cellsize != first.cellsize || g.dy() != first.dy()) {
                throw ConfigError("series manifest '" + manifest.string() + "': grid mismatch");
            }
            comps.push_back(std::move(g.data));
        }
        slices.push_back(std::move(comps));
    }
    return GriddedSeries(name, j.value("units", std::string{}), times, lons, lats, std::move(slices));
}

GriddedSeries load_gridded_series(const std::filesystem::path& path, const std::string& variable) {
    if (path.extension() == ".json") return load_esri_series(path, variable);
    return load_csv_series(path, variable);
}

}  // namespace scem
