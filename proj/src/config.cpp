#include "kagome/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace kagome {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(x)) throw ConfigError("expected a number, got '" + v + "'", key);
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError("expected an integer, got '" + v + "'", key);
  return x;
}

bool to_bool(const std::string& key, std::string v) {
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean, got '" + v + "'", key);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(key, item));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

struct Entry {
  std::string doc;
  Setter set;
};

const std::map<std::string, Entry>& table() {
  static const std::map<std::string, Entry> t = {
      {"lattice.spacing_lambda0", {"intercell spacing d in wavelengths (0.1)",
                                   [](RunConfig& c, auto& k, auto& v) { c.lattice.spacing = to_double(k, v); }}},
      {"lattice.imbalance", {"spacing imbalance delta in (-1, 1) (0)",
                             [](RunConfig& c, auto& k, auto& v) { c.lattice.imbalance = to_double(k, v); }}},
      {"lattice.cells_per_side", {"cells per flake side L (10)",
                                  [](RunConfig& c, auto& k, auto& v) { c.lattice.cells_per_side = static_cast<int>(to_int(k, v)); }}},
      {"polarization.array", {"array polarization: pi | x | y | sigma+ | sigma- | theta:<rad> | theta_deg:<deg> (pi)",
                              [](RunConfig& c, auto&, auto& v) { c.polarization = v; }}},
      {"impurity.enabled", {"add an impurity atom (false)",
                            [](RunConfig& c, auto& k, auto& v) { c.impurity_enabled = to_bool(k, v); }}},
      {"impurity.kind", {"two_level | v_type (two_level)",
                         [](RunConfig& c, auto& k, auto& v) {
                           if (v == "two_level") c.impurity.kind = ImpurityKind::TwoLevel;
                           else if (v == "v_type") c.impurity.kind = ImpurityKind::VType;
                           else throw ConfigError("expected two_level or v_type, got '" + v + "'", k);
                         }}},
      {"impurity.detuning_gamma0", {"omega_A - omega0 in Gamma0 (0)",
                                    [](RunConfig& c, auto& k, auto& v) { c.impurity.detuning = to_double(k, v); }}},
      {"impurity.linewidth_gamma0", {"Gamma_A in Gamma0 (0.002)",
                                     [](RunConfig& c, auto& k, auto& v) { c.impurity.linewidth = to_double(k, v); }}},
      {"impurity.polarization", {"two-level impurity polarization, same syntax as polarization.array (pi)",
                                 [](RunConfig& c, auto&, auto& v) { c.impurity_polarization = v; }}},
      {"impurity.zeeman_gamma0", {"Zeeman energy mu B in hbar Gamma0, V-type only (0)",
                                  [](RunConfig& c, auto& k, auto& v) { c.impurity.zeeman = to_double(k, v); }}},
      {"impurity.anchor", {"central_hexagon | adjacent_cell | top_corner_site (central_hexagon)",
                           [](RunConfig& c, auto& k, auto& v) {
                             try {
                               c.impurity_anchor = parse_anchor(v);
                             } catch (const ConstraintError& e) {
                               throw ConfigError(e.what(), k);
                             }
                           }}},
      {"impurity.height_d", {"height above the plane in units of d (0.4)",
                             [](RunConfig& c, auto& k, auto& v) { c.impurity_height_d = to_double(k, v); }}},
      {"theta_sweep.start_deg", {"first polarization angle in degrees (0)",
                                 [](RunConfig& c, auto& k, auto& v) { c.theta_start_deg = to_double(k, v); }}},
      {"theta_sweep.stop_deg", {"last polarization angle in degrees (180)",
                                [](RunConfig& c, auto& k, auto& v) { c.theta_stop_deg = to_double(k, v); }}},
      {"theta_sweep.count", {"number of angles (181)",
                             [](RunConfig& c, auto& k, auto& v) { c.theta_count = static_cast<int>(to_int(k, v)); }}},
      {"delta_sweep.start", {"first imbalance (-0.9)",
                             [](RunConfig& c, auto& k, auto& v) { c.delta_start = to_double(k, v); }}},
      {"delta_sweep.stop", {"last imbalance (0.9)",
                            [](RunConfig& c, auto& k, auto& v) { c.delta_stop = to_double(k, v); }}},
      {"delta_sweep.count", {"number of imbalances (37)",
                             [](RunConfig& c, auto& k, auto& v) { c.delta_count = static_cast<int>(to_int(k, v)); }}},
      {"disorder.kappas", {"comma-separated disorder strengths, fractions of R_a",
                           [](RunConfig& c, auto& k, auto& v) { c.kappas = to_list(k, v); }}},
      {"disorder.realizations", {"realizations per strength (30)",
                                 [](RunConfig& c, auto& k, auto& v) { c.realizations = static_cast<int>(to_int(k, v)); }}},
      {"bands.path", {"comma-separated high-symmetry points from G, K, M (G,K,M,G)",
                      [](RunConfig& c, auto&, auto& v) { c.bands_path = split(v, ','); }}},
      {"bands.points_per_segment", {"k-points per path segment (40)",
                                    [](RunConfig& c, auto& k, auto& v) { c.bands_points_per_segment = static_cast<int>(to_int(k, v)); }}},
      {"bands.grid", {"n > 0 samples an n x n reciprocal-cell grid instead of the path (0)",
                      [](RunConfig& c, auto& k, auto& v) { c.bands_grid = static_cast<int>(to_int(k, v)); }}},
      {"bands.sum_radius_d", {"lattice-sum radius in units of d (400)",
                              [](RunConfig& c, auto& k, auto& v) { c.bloch.sum_radius = to_double(k, v); }}},
      {"bands.taper_fraction", {"windowed outer fraction of the sum radius (1)",
                                [](RunConfig& c, auto& k, auto& v) { c.bloch.taper_fraction = to_double(k, v); }}},
      {"bands.taper", {"smooth | raised_cosine (smooth)",
                       [](RunConfig& c, auto& k, auto& v) {
                         try {
                           c.bloch.taper = parse_taper(v);
                         } catch (const ConstraintError& e) {
                           throw ConfigError(e.what(), k);
                         }
                       }}},
      {"bands.check_convergence", {"compare against a doubled sum radius (true)",
                                   [](RunConfig& c, auto& k, auto& v) { c.bands_check_convergence = to_bool(k, v); }}},
      {"dynamics.scenario", {"named scenario fig5a..fig5f, fig3g..fig3i; empty uses the impurity section",
                             [](RunConfig& c, auto&, auto& v) { c.scenario = v; }}},
      {"dynamics.times_gamma0", {"comma-separated snapshot times in 1/Gamma0",
                                 [](RunConfig& c, auto& k, auto& v) { c.times = to_list(k, v); }}},
      {"dynamics.initial", {"impurity | v_symmetric | site:<index> (impurity)",
                            [](RunConfig& c, auto&, auto& v) { c.initial = v; }}},
      {"classify.corner_threshold", {"population near corners for the corner class (0.7)",
                                     [](RunConfig& c, auto& k, auto& v) { c.classify.corner_threshold = to_double(k, v); }}},
      {"classify.edge_threshold", {"population on edges for the edge class (0.6)",
                                   [](RunConfig& c, auto& k, auto& v) { c.classify.edge_threshold = to_double(k, v); }}},
      {"classify.corner_radius_d", {"corner neighborhood radius in units of d (1)",
                                    [](RunConfig& c, auto& k, auto& v) { c.classify.corner_radius = to_double(k, v); }}},
      {"classify.min_gap_factor", {"minimum bulk gap in mean level spacings (5)",
                                   [](RunConfig& c, auto& k, auto& v) { c.classify.min_gap_factor = to_double(k, v); }}},
      {"classify.gap_window_gamma0", {"explicit gap window lo,hi in Gamma0 (auto)",
                                      [](RunConfig& c, auto& k, auto& v) {
                                        const auto w = to_list(k, v);
                                        if (w.size() != 2 || !(w[0] < w[1]))
                                          throw ConfigError("expected lo,hi with lo < hi", k);
                                        c.classify.gap_window = Interval{w[0], w[1]};
                                      }}},
      {"run.threads", {"worker threads, 0 = all cores (0)",
                       [](RunConfig& c, auto& k, auto& v) { c.threads = static_cast<int>(to_int(k, v)); }}},
      {"run.seed", {"base RNG seed (1)",
                    [](RunConfig& c, auto& k, auto& v) {
                      const long long s = to_int(k, v);
                      if (s < 0) throw ConfigError("seed must be >= 0", k);
                      c.seed = static_cast<std::uint64_t>(s);
                    }}},
      {"run.png", {"write PNG population rasters (true)",
                   [](RunConfig& c, auto& k, auto& v) { c.png = to_bool(k, v); }}},
      {"run.dump_matrix", {"write the Hamiltonian as a binary dump (false)",
                           [](RunConfig& c, auto& k, auto& v) { c.dump_matrix = to_bool(k, v); }}},
  };
  return t;
}

int find_line(const std::filesystem::path& path, const std::string& section, const std::string& key) {
  std::ifstream in(path);
  std::string line, current;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.size() > 1 && t.front() == '[' && t.back() == ']') {
      current = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos && current == section && trim(t.substr(0, eq)) == key) return n;
  }
  return 0;
}

} // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
  const auto& t = table();
  const auto it = t.find(key);
  if (it == t.end()) throw ConfigError("unknown config key '" + key + "'", key, line);
  try {
    it->second.set(cfg, key, trim(value));
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), key, line);
  }
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.message(), {}, static_cast<int>(e.line()));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("keys must live inside a [section]", section, find_line(path, "", section));
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      apply_setting(cfg, full, node.get_value<std::string>(), find_line(path, section, key));
    }
  }
}

void apply_environment(RunConfig& cfg, char** envp) {
  if (!envp) return;
  std::vector<std::pair<std::string, std::string>> found;
  for (char** e = envp; *e; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string name = entry.substr(0, eq);
    if (!name.starts_with("KAGOME_")) continue;
    const auto sep = name.find("__");
    if (sep == std::string::npos) continue;
    std::string key = name.substr(7, sep - 7) + "." + name.substr(sep + 2);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    found.emplace_back(key, entry.substr(eq + 1));
  }
  // environment order is unspecified; apply in a fixed order
  std::sort(found.begin(), found.end());
  for (const auto& [k, v] : found) apply_setting(cfg, k, v);
}

std::vector<std::pair<std::string, std::string>> config_schema() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, e] : table()) out.emplace_back(k, e.doc);
  return out;
}

ImpuritySpec RunConfig::resolved_impurity(const Lattice& lat) const {
  ImpuritySpec imp = impurity;
  if (imp.kind == ImpurityKind::TwoLevel) imp.polarization = Polarization::parse(impurity_polarization);
  imp.placement = place_impurity(lat, impurity_anchor, impurity_height_d * lat.spec.spacing);
  return imp;
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return out;
}

} // namespace

std::vector<double> RunConfig::theta_grid() const {
  auto g = linspace(theta_start_deg, theta_stop_deg, theta_count);
  for (auto& x : g) x *= std::numbers::pi / 180.0;
  return g;
}

std::vector<double> RunConfig::delta_grid() const { return linspace(delta_start, delta_stop, delta_count); }

void RunConfig::validate() const {
  auto wrap = [](const std::string& field, auto&& fn) {
    try {
      fn();
    } catch (const ConstraintError& e) {
      throw ConfigError(e.what(), field);
    }
  };
  wrap("lattice", [&] { lattice.validate(); });
  wrap("polarization.array", [&] { array_polarization(); });
  wrap("impurity.polarization", [&] { Polarization::parse(impurity_polarization); });
  if (!(impurity.linewidth > 0.0)) throw ConfigError("Gamma_A must be > 0", "impurity.linewidth_gamma0");
  if (!(impurity_height_d > 0.0)) throw ConfigError("impurity height must be > 0", "impurity.height_d");
  if (impurity.kind == ImpurityKind::TwoLevel && impurity.zeeman != 0.0)
    throw ConfigError("a Zeeman shift requires impurity.kind = v_type", "impurity.zeeman_gamma0");
  if (theta_count < 1) throw ConfigError("count must be >= 1", "theta_sweep.count");
  if (delta_count < 1) throw ConfigError("count must be >= 1", "delta_sweep.count");
  for (double d : delta_grid())
    if (!(d > -1.0 && d < 1.0)) throw ConfigError("imbalances must lie in (-1, 1)", "delta_sweep");
  if (realizations < 1) throw ConfigError("n_realizations must be >= 1", "disorder.realizations");
  if (kappas.empty()) throw ConfigError("kappa grid must not be empty", "disorder.kappas");
  for (double k : kappas)
    if (!(k >= 0.0)) throw ConfigError("kappa must be >= 0", "disorder.kappas");
  wrap("bands", [&] { bloch.validate(); });
  if (bands_points_per_segment < 1) throw ConfigError("must be >= 1", "bands.points_per_segment");
  if (bands_grid < 0) throw ConfigError("must be >= 0", "bands.grid");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1]))
      throw ConfigError("times must be non-negative and sorted", "dynamics.times_gamma0");
  if (threads < 0) throw ConfigError("threads must be >= 0", "run.threads");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["lattice"] = {{"spacing_lambda0", lattice.spacing},
                  {"imbalance", lattice.imbalance},
                  {"cells_per_side", lattice.cells_per_side}};
  j["polarization"] = {{"array", polarization}};
  j["impurity"] = {{"enabled", impurity_enabled},
                   {"kind", impurity.kind == ImpurityKind::TwoLevel ? "two_level" : "v_type"},
                   {"detuning_gamma0", impurity.detuning},
                   {"linewidth_gamma0", impurity.linewidth},
                   {"polarization", impurity_polarization},
                   {"zeeman_gamma0", impurity.zeeman},
                   {"anchor", std::string(to_string(impurity_anchor))},
                   {"height_d", impurity_height_d}};
  j["theta_sweep"] = {{"start_deg", theta_start_deg}, {"stop_deg", theta_stop_deg}, {"count", theta_count}};
  j["delta_sweep"] = {{"start", delta_start}, {"stop", delta_stop}, {"count", delta_count}};
  j["disorder"] = {{"kappas", kappas}, {"realizations", realizations}};
  j["bands"] = {{"path", bands_path},
                {"points_per_segment", bands_points_per_segment},
                {"grid", bands_grid},
                {"sum_radius_d", bloch.sum_radius},
                {"taper_fraction", bloch.taper_fraction},
                {"taper", std::string(to_string(bloch.taper))},
                {"check_convergence", bands_check_convergence}};
  j["dynamics"] = {{"scenario", scenario}, {"times_gamma0", times}, {"initial", initial}};
  j["classify"] = {{"corner_threshold", classify.corner_threshold},
                   {"edge_threshold", classify.edge_threshold},
                   {"corner_radius_d", classify.corner_radius},
                   {"min_gap_factor", classify.min_gap_factor}};
  if (classify.gap_window) j["classify"]["gap_window_gamma0"] = {classify.gap_window->first, classify.gap_window->second};
  j["run"] = {{"threads", threads}, {"seed", seed}, {"png", png}, {"dump_matrix", dump_matrix}};
  return j;
}

} // namespace kagome
