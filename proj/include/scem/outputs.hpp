#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "scem/ascii_grid.hpp"
#include "scem/domain.hpp"
#include "scem/oil_transport.hpp"

namespace scem {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Particle snapshot CSV: time,id,x,y,z,lon,lat,volume_m3,age_s,status
/// with 17 significant digits so a re-read is exact.
std::string format_snapshot_csv(const std::vector<OilParticle>& particles, const Domain& domain,
                                double epoch_seconds);

struct SnapshotFile {
    double epoch_seconds = 0.0;
    std::vector<OilParticle> particles;
};
SnapshotFile read_snapshot_csv(const std::filesystem::path& path);

/// Raster in geographic degrees covering the domain (dx/dy header keys when the
/// cells are not square in degrees).
AsciiGrid domain_raster(const Domain& domain, const Grid2<double>& values);

/// Output directory owner. Every file written through it is listed in
/// manifest.json with its SHA-256, except files marked unlisted.
class OutputWriter {
public:
    explicit OutputWriter(std::filesystem::path directory);

    const std::filesystem::path& directory() const { return dir_; }
    void write_text(const std::string& name, const std::string& content, bool listed = true);
    void write_raster(const std::string& name, const Domain& domain, const Grid2<double>& values);
    /// Writes manifest.json. complete = false records a partial run and its error.
    void write_manifest(bool complete, const std::string& error = {});
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, std::string>> entries_;  // name, sha256
};

}  // namespace scem
