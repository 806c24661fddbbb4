#include "scem/outputs.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "scem/time_utils.hpp"

namespace scem {

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[md[k] >> 4];
        out += hex[md[k] & 15];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

namespace {

void append(std::string& out, double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

double parse_double(const std::string& tok, const std::filesystem::path& path) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ConfigError("snapshot '" + path.string() + "': bad number '" + tok + "'");
    return v;
}

ParticleStatus parse_status(const std::string& s, const std::filesystem::path& path) {
    for (auto st : {ParticleStatus::surface, ParticleStatus::entrained, ParticleStatus::beached,
                    ParticleStatus::escaped})
        if (s == to_string(st)) return st;
    throw ConfigError("snapshot '" + path.string() + "': unknown status '" + s + "'");
}

}  // namespace

std::string format_snapshot_csv(const std::vector<OilParticle>& particles, const Domain& domain, double epoch) {
    std::string out = "time,id,x,y,z,lon,lat,volume_m3,age_s,status\n";
    const std::string stamp = format_iso8601(epoch);
    for (const OilParticle& p : particles) {
        const Vec2 geo = domain.to_geographic(p.x, p.y);
        out += stamp;
        out += ',';
        out += std::to_string(p.id);
        for (double v : {p.x, p.y, p.z, geo.x, geo.y, p.volume, p.age}) {
            out += ',';
            append(out, v);
        }
        out += ',';
        out += to_string(p.status);
        out += '\n';
    }
    return out;
}

SnapshotFile read_snapshot_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open snapshot '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "time,id,x,y,z,lon,lat,volume_m3,age_s,status")
        throw ConfigError("snapshot '" + path.string() + "': unexpected header");
    SnapshotFile f;
    bool have_time = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
        if (cols.size() != 10) throw ConfigError("snapshot '" + path.string() + "': expected 10 columns");
        const double t = parse_iso8601(cols[0]);
        if (have_time && t != f.epoch_seconds) throw ConfigError("snapshot '" + path.string() + "': mixed times");
        f.epoch_seconds = t;
        have_time = true;
        OilParticle p;
        p.id = std::stoull(cols[1]);
        p.x = parse_double(cols[2], path);
        p.y = parse_double(cols[3], path);
        p.z = parse_double(cols[4], path);
        p.volume = parse_double(cols[7], path);
        p.age = parse_double(cols[8], path);
        p.status = parse_status(cols[9], path);
        f.particles.push_back(p);
    }
    return f;
}

AsciiGrid domain_raster(const Domain& domain, const Grid2<double>& values) {
    const Vec2 sw = domain.to_geographic(0.0, 0.0);
    const Vec2 cell = domain.to_geographic(domain.dx(), domain.dy());
    AsciiGrid g;
    g.xllcorner = sw.x;
    g.yllcorner = sw.y;
    g.cellsize = cell.x - sw.x;
    const double dy = cell.y - sw.y;
    if (dy != g.cellsize) g.cellsize_y = dy;
    g.data = values;
    return g;
}

OutputWriter::OutputWriter(std::filesystem::path directory) : dir_(std::move(directory)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void OutputWriter::write_text(const std::string& name, const std::string& content, bool listed) {
    const auto path = dir_ / name;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    out.close();
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
    if (listed) entries_.emplace_back(name, sha256_hex(content));
}

void OutputWriter::write_raster(const std::string& name, const Domain& domain, const Grid2<double>& values) {
    write_text(name, format_ascii_grid(domain_raster(domain, values)));
}

void OutputWriter::write_manifest(bool complete, const std::string& error) {
    auto sorted = entries_;
    std::sort(sorted.begin(), sorted.end());
    nlohmann::ordered_json m;
    m["complete"] = complete;
    if (!complete) m["error"] = error;
    m["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& [name, sha] : sorted) m["artifacts"].push_back({{"path", name}, {"sha256", sha}});
    write_text("manifest.json", m.dump(2) + "\n", false);
}

}  // namespace scem
