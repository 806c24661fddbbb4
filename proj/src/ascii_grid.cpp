#include "scem/ascii_grid.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <vector>

namespace scem {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

void append_number(std::string& out, double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

AsciiGrid read_ascii_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open raster '" + path.string() + "'");
    const auto where = [&] { return "raster '" + path.string() + "'"; };
    std::vector<std::string> tokens;
    for (std::string tok; in >> tok;) tokens.push_back(std::move(tok));

    std::map<std::string, double> header;
    std::size_t k = 0;
    while (k + 1 < tokens.size() && std::isalpha(static_cast<unsigned char>(tokens[k][0]))) {
        try {
            header[lower(tokens[k])] = std::stod(tokens[k + 1]);
        } catch (const std::exception&) {
            throw ConfigError(where() + ": bad header value for " + tokens[k]);
        }
        k += 2;
    }
    for (const char* req : {"ncols", "nrows", "xllcorner", "yllcorner"})
        if (!header.count(req)) throw ConfigError(where() + ": missing header key " + req);
    if (!header.count("cellsize") && !(header.count("dx") && header.count("dy")))
        throw ConfigError(where() + ": missing header key cellsize (or dx and dy)");
    const int ncols = static_cast<int>(header["ncols"]);
    const int nrows = static_cast<int>(header["nrows"]);
    if (ncols <= 0 || nrows <= 0) throw ConfigError(where() + ": non-positive dimensions");
    if (tokens.size() - k != static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows))
        throw ConfigError(where() + ": expected " + std::to_string(ncols * nrows) + " values, found " +
                          std::to_string(tokens.size() - k));
    AsciiGrid g;
    g.xllcorner = header["xllcorner"];
    g.yllcorner = header["yllcorner"];
    if (header.count("cellsize")) {
        g.cellsize = header["cellsize"];
    } else {
        g.cellsize = header["dx"];
        if (header["dy"] != header["dx"]) g.cellsize_y = header["dy"];
    }
    if (!(g.cellsize > 0.0) || g.cellsize_y < 0.0) throw ConfigError(where() + ": cell size must be > 0");
    if (header.count("nodata_value")) g.nodata = header["nodata_value"];
    g.data = Grid2<double>(ncols, nrows, 0.0);
    for (int r = 0; r < nrows; ++r) {
        for (int c = 0; c < ncols; ++c, ++k) {
            const std::string& tok = tokens[k];
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size())
                throw ConfigError(where() + ": bad value '" + tok + "'");
            g.data(c, nrows - 1 - r) = v;
        }
    }
    return g;
}

std::string format_ascii_grid(const AsciiGrid& g) {
    std::string out;
    out.reserve(static_cast<std::size_t>(g.ncols()) * g.nrows() * 12 + 200);
    out += "ncols " + std::to_string(g.ncols()) + "\n";
    out += "nrows " + std::to_string(g.nrows()) + "\n";
    out += "xllcorner ";
    append_number(out, g.xllcorner);
    out += "\nyllcorner ";
    append_number(out, g.yllcorner);
    if (g.cellsize_y > 0.0 && g.cellsize_y != g.cellsize) {
        out += "\ndx ";
        append_number(out, g.cellsize);
        out += "\ndy ";
        append_number(out, g.cellsize_y);
    } else {
        out += "\ncellsize ";
        append_number(out, g.cellsize);
    }
    out += "\nNODATA_value ";
    append_number(out, g.nodata);
    out += "\n";
    for (int r = g.nrows() - 1; r >= 0; --r) {
        for (int c = 0; c < g.ncols(); ++c) {
            if (c) out += ' ';
            append_number(out, g.data(c, r));
        }
        out += '\n';
    }
    return out;
}

void write_ascii_grid(const std::filesystem::path& path, const AsciiGrid& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write raster '" + path.string() + "'");
    out << format_ascii_grid(g);
    if (!out) throw std::runtime_error("write failed for raster '" + path.string() + "'");
}

}  // namespace scem
