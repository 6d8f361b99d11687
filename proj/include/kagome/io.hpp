#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kagome/bloch.hpp"
#include "kagome/dynamics.hpp"
#include "kagome/spectra.hpp"

namespace kagome::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Fixed-format number for byte-stable output.
std::string num(double v);

/// Minimal CSV writer: header on construction, one row per call.
class CsvWriter {
public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header);
  CsvWriter& operator<<(const std::string& field);
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  void end_row();
  const fs::path& path() const { return path_; }

private:
  void field(const std::string& text);
  fs::path path_;
  std::ofstream out_;
  bool fresh_ = true;
};

std::string sha256_file(const fs::path& path);

void write_lattice_csv(const fs::path& path, const Lattice& lat);
/// job_key, mode_index, re_omega, gamma, ipr, class, w_A, w_B, w_C, corner_A, corner_B, corner_C, edge_family, in_gap
void write_modes_csv(CsvWriter& csv, const std::string& job_key, const ModeSet& modes);
std::vector<std::string> modes_header();
void write_bands_csv(const fs::path& path, const std::vector<BandPoint>& bands);
void write_track_csv(const fs::path& path, const CornerModeTrack& track);
void write_disorder_csv(const fs::path& path, const std::string& job_key, const DisorderResult& res);
void write_populations_csv(const fs::path& path, const DynamicsTrace& trace);
void write_sectors_csv(const fs::path& path, const DynamicsTrace& trace);

/// Binary dump of little-endian complex doubles (row-major) plus a JSON sidecar.
void write_matrix_dump(const fs::path& path, const EffectiveHamiltonian& h, const json& parameters);

/// Raster of per-atom values; each atom is drawn as a filled disc.
void write_population_png(const fs::path& path, const Lattice& lat, const Eigen::VectorXd& values,
                          int width = 512, bool log_scale = true);

json to_json(const LatticeSpec& spec);
json to_json(const Polarization& pol);
json to_json(const ConvergenceReport& rep);

/// Run manifest: resolved config, seeds, reports and hashed outputs.
class Manifest {
public:
  Manifest(fs::path dir, std::string command);
  void set(const std::string& key, json value) { doc_[key] = std::move(value); }
  json& operator[](const std::string& key) { return doc_[key]; }
  void add_file(const fs::path& file, const std::string& description);
  /// Hashes every registered file and writes manifest.json.
  void write();
  const fs::path& dir() const { return dir_; }

private:
  fs::path dir_;
  json doc_;
  std::vector<std::pair<fs::path, std::string>> files_;
};

std::string version();

} // namespace kagome::io
