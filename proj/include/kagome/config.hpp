#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kagome/bloch.hpp"
#include "kagome/dynamics.hpp"
#include "kagome/spectra.hpp"

namespace kagome {

/// Config problem with the offending field and, when known, file line.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& message, std::string field = {}, int line = 0)
      : std::runtime_error(message), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

private:
  std::string field_;
  int line_;
};

struct RunConfig {
  LatticeSpec lattice;
  std::string polarization = "pi";

  bool impurity_enabled = false;
  ImpuritySpec impurity;
  std::string impurity_polarization = "pi";
  ImpurityAnchor impurity_anchor = ImpurityAnchor::CentralHexagon;
  double impurity_height_d = 0.4;

  double theta_start_deg = 0.0;
  double theta_stop_deg = 180.0;
  int theta_count = 181;

  double delta_start = -0.9;
  double delta_stop = 0.9;
  int delta_count = 37;

  std::vector<double> kappas = {0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09,
                                0.10, 0.11, 0.12, 0.13, 0.14, 0.15, 0.17, 0.20};
  int realizations = 30;

  std::vector<std::string> bands_path = {"G", "K", "M", "G"};
  int bands_points_per_segment = 40;
  int bands_grid = 0; ///< > 0 replaces the path with an n x n grid
  BlochSettings bloch;
  bool bands_check_convergence = true;

  std::string scenario;        ///< dynamics: named scenario, or empty
  std::vector<double> times = {0.0, 0.1, 0.2, 0.3};
  std::string initial = "impurity"; ///< impurity | v_symmetric | site:<index>

  ClassifyOptions classify;

  int threads = 0;
  std::uint64_t seed = 1;
  bool png = true;
  bool dump_matrix = false;

  Polarization array_polarization() const { return Polarization::parse(polarization); }
  ImpuritySpec resolved_impurity(const Lattice& lat) const;
  std::vector<double> theta_grid() const;
  std::vector<double> delta_grid() const;

  void validate() const;
  nlohmann::json to_json() const;
};

/// Applies `section.key = value` to the config; throws ConfigError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value, int line = 0);

/// Reads an INI file (sections map to the key prefix).
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Applies KAGOME_<SECTION>__<KEY> variables, e.g. KAGOME_LATTICE__IMBALANCE.
void apply_environment(RunConfig& cfg, char** envp);

/// Every accepted key with its unit and default, for documentation.
std::vector<std::pair<std::string, std::string>> config_schema();

} // namespace kagome
