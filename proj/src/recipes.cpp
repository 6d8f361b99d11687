#include "kagome/recipes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include "kagome/io.hpp"
#include "kagome/parallel.hpp"
#include "kagome/tightbinding.hpp"

namespace kagome {

namespace fs = std::filesystem;
using nlohmann::json;
using io::Manifest;

namespace {

constexpr double kPi = std::numbers::pi;

class Logger {
public:
  explicit Logger(std::ostream* out) : out_(out), start_(std::chrono::steady_clock::now()) {}
  void operator()(const std::string& msg) const {
    if (!out_) return;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    *out_ << "[" << io::num(std::round(s * 10.0) / 10.0) << "s] " << msg << std::endl;
  }

private:
  std::ostream* out_;
  std::chrono::steady_clock::time_point start_;
};

json interval_json(const Interval& g) { return json::array({g.first, g.second}); }

json modes_summary(const ModeSet& m) {
  json corners = json::array();
  for (auto k : m.in_gap_corner_modes())
    corners.push_back({{"mode_index", k}, {"re_omega", m.omega(k)}, {"gamma", m.gamma(k)},
                       {"corner_weight", m.corner_weight[k]}});
  std::size_t edges = 0;
  for (auto c : m.cls) edges += c == ModeClass::Edge;
  return {{"modes", m.size()}, {"gap_gamma0", interval_json(m.gap)}, {"in_gap_corner_modes", corners},
          {"edge_modes", edges}};
}

void write_modes(Manifest& man, const std::string& name, const std::string& job_key, const ModeSet& modes,
                 const std::string& description) {
  const fs::path path = man.dir() / name;
  io::CsvWriter csv(path, io::modes_header());
  io::write_modes_csv(csv, job_key, modes);
  man.add_file(path, description);
}

// ---------------------------------------------------------------- lattice

json cmd_lattice(const RunConfig& cfg, Manifest& man, const Logger& log) {
  const Lattice lat = build_flake(cfg.lattice);
  io::write_lattice_csv(man.dir() / "lattice.csv", lat);
  man.add_file(man.dir() / "lattice.csv", "atom positions in wavelengths");
  log("wrote " + std::to_string(lat.size()) + " atoms");
  json s = {{"atoms", lat.size()},
            {"R_a", cfg.lattice.intracell()},
            {"R_b", cfg.lattice.intercell()},
            {"corner_sites", lat.corner_sites},
            {"min_pair_distance", min_pair_distance(lat.positions)}};
  if (cfg.impurity_enabled) {
    const auto imp = cfg.resolved_impurity(lat);
    s["impurity_position"] = {imp.placement.position.x(), imp.placement.position.y(), imp.placement.position.z()};
  }
  return s;
}

// ---------------------------------------------------------------- bands

struct BandsRun {
  std::vector<BandPoint> bands;
  json summary;
};

BandsRun bands_into(const RunConfig& cfg, const Polarization& pol, Manifest& man, const Logger& log) {
  const LatticeSpec& spec = cfg.lattice;
  BandsRun run;
  std::vector<Vec2> ks;
  if (cfg.bands_grid > 0) {
    ks = bz_grid(spec, cfg.bands_grid);
    run.summary["sampling"] = {{"grid", cfg.bands_grid}};
  } else {
    const KPath path = high_symmetry_path(spec, cfg.bands_path, cfg.bands_points_per_segment);
    ks = path.points;
    json labels = json::array();
    for (const auto& [i, name] : path.labels) labels.push_back({{"index", i}, {"label", name}});
    run.summary["sampling"] = {{"path", cfg.bands_path}, {"points_per_segment", cfg.bands_points_per_segment},
                               {"labels", labels}};
  }
  log("band structure on " + std::to_string(ks.size()) + " k-points");
  run.bands = band_structure(spec, pol, ks, cfg.bloch, cfg.threads);
  io::write_bands_csv(man.dir() / "bands.csv", run.bands);
  man.add_file(man.dir() / "bands.csv", "Bloch bands; k in 1/wavelength");

  run.summary["sum_radius_d"] = cfg.bloch.sum_radius;
  run.summary["taper"] = {{"kind", std::string(to_string(cfg.bloch.taper))},
                          {"fraction", cfg.bloch.taper_fraction}};
  if (cfg.bands_check_convergence) {
    log("radius-doubling convergence check");
    const auto rep = check_convergence(spec, pol, ks, cfg.bloch, cfg.threads);
    run.summary["convergence"] = io::to_json(rep);
  }
  return run;
}

json cmd_bands(const RunConfig& cfg, Manifest& man, const Logger& log) {
  return bands_into(cfg, cfg.array_polarization(), man, log).summary;
}

// ---------------------------------------------------------------- spectrum

json cmd_spectrum(const RunConfig& cfg, Manifest& man, const Logger& log) {
  const Lattice lat = build_flake(cfg.lattice);
  const Polarization pol = cfg.array_polarization();
  const EffectiveHamiltonian h =
      cfg.impurity_enabled ? assemble_with_impurity(lat, pol, cfg.resolved_impurity(lat)) : assemble_array(lat, pol);
  log("diagonalizing N = " + std::to_string(h.size()));
  const ModeSet modes = analyze(h, lat, cfg.classify);
  write_modes(man, "spectrum.csv", "model=full", modes, "eigenmodes of the effective Hamiltonian");

  json s = modes_summary(modes);
  s["dimension"] = h.size();
  if (h.impurity && h.impurity->non_markovian()) s["warnings"].push_back("Gamma_A above the Markovian guard");

  const TBModel tb = fit_tb(cfg.lattice, pol);
  const ModeSet tb_modes = tb_spectrum(tb, lat, cfg.classify);
  write_modes(man, "spectrum_tb.csv", "model=tb", tb_modes, "nearest-neighbor tight-binding baseline");
  s["tight_binding"] = modes_summary(tb_modes);
  s["tight_binding"]["t_intra"] = tb.t_intra;
  s["tight_binding"]["t_inter"] = tb.t_inter;

  if (cfg.dump_matrix) {
    io::write_matrix_dump(man.dir() / "hamiltonian.bin", h, cfg.to_json());
    man.add_file(man.dir() / "hamiltonian.bin", "row-major little-endian complex128 matrix");
    man.add_file(man.dir() / "hamiltonian.bin.json", "matrix dump sidecar");
  }
  return s;
}

// ---------------------------------------------------------------- sweeps

json track_summary(const CornerModeTrack& track, const std::vector<double>& thetas) {
  json s;
  json angles = json::array();
  for (double a : track.reorganization_angles) angles.push_back(a);
  s["reorganization_angles_rad"] = angles;
  // shifts need a uniform grid over one period; the closing point duplicates the first
  const std::size_t n = thetas.size();
  const bool full_period = n > 2 && std::abs(thetas.front()) < 1e-12 && std::abs(thetas.back() - kPi) < 1e-9;
  if (full_period) {
    std::array<std::vector<double>, 3> curves;
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t c = 0; c < 3; ++c) curves[c].push_back(track.points[i].omega[c]);
    s["shifts_rad"] = {{"A_to_B", best_shift(curves[0], curves[1])},
                       {"B_to_C", best_shift(curves[1], curves[2])},
                       {"C_to_A", best_shift(curves[2], curves[0])}};
    double period = 0.0;
    for (std::size_t c = 0; c < 3; ++c)
      period = std::max(period, std::abs(track.points.front().omega[c] - track.points.back().omega[c]));
    s["periodicity_error_gamma0"] = period;
  }
  return s;
}

json sweep_theta_into(const RunConfig& cfg, const Lattice& lat, Manifest& man, const Logger& log) {
  const auto thetas = cfg.theta_grid();
  log("tracking corner modes over " + std::to_string(thetas.size()) + " angles");
  TrackOptions opts;
  opts.classify = cfg.classify;
  opts.threads = cfg.threads;
  const auto track = sweep_theta(lat, thetas, opts);
  io::write_track_csv(man.dir() / "chasing_track.csv", track);
  man.add_file(man.dir() / "chasing_track.csv", "tracked corner modes versus in-plane angle");
  return track_summary(track, thetas);
}

json cmd_sweep_theta(const RunConfig& cfg, Manifest& man, const Logger& log) {
  return sweep_theta_into(cfg, build_flake(cfg.lattice), man, log);
}

json sweep_delta_into(const RunConfig& cfg, const Polarization& pol, const std::string& name, Manifest& man,
                      const Logger& log) {
  const auto deltas = cfg.delta_grid();
  log("delta sweep " + name + " over " + std::to_string(deltas.size()) + " imbalances");
  const auto rows = sweep_delta(cfg.lattice, deltas, pol, cfg.classify, cfg.threads);
  const fs::path path = man.dir() / name;
  io::CsvWriter csv(path, io::modes_header());
  json counts = json::array();
  for (const auto& r : rows) {
    io::write_modes_csv(csv, "delta=" + io::num(r.delta), r.modes);
    counts.push_back({{"delta", r.delta}, {"in_gap_corner_modes", r.modes.in_gap_corner_modes().size()}});
  }
  man.add_file(path, "spectra versus imbalance, polarization " + pol.describe());
  return {{"polarization", io::to_json(pol)}, {"rows", counts}};
}

json cmd_sweep_delta(const RunConfig& cfg, Manifest& man, const Logger& log) {
  return sweep_delta_into(cfg, cfg.array_polarization(), "delta_sweep.csv", man, log);
}

// ---------------------------------------------------------------- disorder

json disorder_into(const RunConfig& cfg, const LatticeSpec& spec, const Polarization& pol, const std::string& name,
                   Manifest& man, const Logger& log) {
  DisorderOptions opts;
  opts.kappas = cfg.kappas;
  opts.realizations = cfg.realizations;
  opts.seed = cfg.seed;
  opts.classify = cfg.classify;
  opts.threads = cfg.threads;
  opts.validate();
  log("disorder ensemble " + name + ": " + std::to_string(opts.kappas.size()) + " strengths x " +
      std::to_string(opts.realizations) + " realizations");
  const auto res = disorder_ensemble(spec, pol, opts);
  io::write_disorder_csv(man.dir() / (name + ".csv"), "pol=" + pol.describe(), res);
  man.add_file(man.dir() / (name + ".csv"), "per-realization survival of the corner modes");
  json survival = json::array();
  for (std::size_t i = 0; i < res.survival.size(); ++i)
    survival.push_back({{"kappa", opts.kappas[i]}, {"fraction", res.survival[i]}, {"skipped", res.skipped[i]}});
  return {{"polarization", io::to_json(pol)},
          {"clean_gap_gamma0", interval_json(res.clean_gap)},
          {"clean_corner_center_gamma0", res.clean_center},
          {"clean_corner_modes", res.clean_corner_modes},
          {"survival", survival},
          {"critical_kappa", res.critical_kappa ? json(*res.critical_kappa) : json(nullptr)},
          {"survival_rule", "at least 3 corner modes inside a bulk gap around the clean corner frequency, "
                            "gap width >= 0.1 of the clean gap; critical kappa where the fraction falls below 0.5"}};
}

json cmd_disorder(const RunConfig& cfg, Manifest& man, const Logger& log) {
  return disorder_into(cfg, cfg.lattice, cfg.array_polarization(), "disorder", man, log);
}

// ---------------------------------------------------------------- dynamics

const char* kChiralityDefinition =
    "(cw - ccw) / (cw + ccw) over the coherent probability currents 2 Im(psi_j* J_jk psi_k) between array atoms, "
    "J the Hermitian part of H, signed by the z component of r_k x r_j about the anchor";

json trace_into(const DynamicsTrace& trace, const Lattice& lat, const std::string& prefix, bool png, Manifest& man) {
  const fs::path pops = man.dir() / (prefix + "populations.csv");
  const fs::path secs = man.dir() / (prefix + "sectors.csv");
  io::write_populations_csv(pops, trace);
  io::write_sectors_csv(secs, trace);
  man.add_file(pops, "basis populations per snapshot");
  man.add_file(secs, "sector weights, chirality and norm per snapshot");
  if (png) {
    for (std::size_t t = 0; t < trace.times.size(); ++t) {
      const fs::path img = man.dir() / (prefix + "snapshot_" + std::to_string(t) + ".png");
      io::write_population_png(img, lat, trace.populations[t].head(static_cast<Eigen::Index>(lat.size())));
      man.add_file(img, "array population at t = " + io::num(trace.times[t]) + " / Gamma0");
    }
  }
  json flagged = json::array();
  for (bool f : trace.sectors_flagged) flagged.push_back(f);
  return {{"times_gamma0", trace.times},
          {"sectors", trace.sectors},
          {"sectors_flagged", flagged},
          {"chirality", trace.chirality},
          {"total_norm", trace.total_norm},
          {"propagation", std::string(to_string(trace.method))},
          {"eigenbasis_condition", trace.condition}};
}

json scenario_into(const std::string& name, const RunConfig& cfg, Manifest& man, const Logger& log) {
  log("scenario " + name);
  const ScenarioResult res = emission_scenario(name);
  json s = trace_into(res.trace, res.lattice, name + "_", cfg.png, man);
  s["cells_per_side"] = res.config.lattice.cells_per_side;
  s["imbalance"] = res.config.lattice.imbalance;
  s["array_polarization"] = io::to_json(res.config.array_polarization);
  s["anchor"] = std::string(to_string(res.config.anchor));
  s["detuning_gamma0"] = res.detuning;
  s["calibration"] = res.config.notes;
  json sides = json::array();
  for (const auto& e : res.side_edges)
    sides.push_back({{"left", e[0]}, {"right", e[1]}, {"dominance", edge_dominance(e)}});
  s["side_edges"] = sides;
  return s;
}

json cmd_dynamics(const RunConfig& cfg, Manifest& man, const Logger& log) {
  json s;
  if (!cfg.scenario.empty()) {
    s = scenario_into(cfg.scenario, cfg, man, log);
  } else {
    if (!cfg.impurity_enabled && !cfg.initial.starts_with("site:"))
      throw ConfigError("dynamics without a scenario needs impurity.enabled = true or an initial site",
                        "dynamics.initial");
    const Lattice lat = build_flake(cfg.lattice);
    const Polarization pol = cfg.array_polarization();
    EffectiveHamiltonian h;
    Vec2 anchor = Vec2::Zero();
    if (cfg.impurity_enabled) {
      const auto imp = cfg.resolved_impurity(lat);
      h = assemble_with_impurity(lat, pol, imp);
      anchor = imp.placement.horizontal();
    } else {
      h = assemble_array(lat, pol);
    }
    CVec psi0;
    if (cfg.initial == "impurity") {
      psi0 = impurity_excited(h);
    } else if (cfg.initial == "v_symmetric") {
      psi0 = v_type_symmetric(h);
    } else if (cfg.initial.starts_with("site:")) {
      std::size_t idx = 0;
      try {
        idx = static_cast<std::size_t>(std::stoul(cfg.initial.substr(5)));
      } catch (const std::exception&) {
        throw ConfigError("expected site:<index>", "dynamics.initial");
      }
      psi0 = site_excited(h, idx);
      if (!cfg.impurity_enabled && idx < lat.size()) anchor = lat.positions[idx].head<2>();
    } else {
      throw ConfigError("unknown initial state '" + cfg.initial + "'", "dynamics.initial");
    }
    log("evolving N = " + std::to_string(h.size()) + " over " + std::to_string(cfg.times.size()) + " snapshots");
    DynamicsTrace trace = evolve(h, psi0, cfg.times);
    annotate(trace, lat, h, anchor);
    s = trace_into(trace, lat, "", cfg.png, man);
    s["anchor"] = {anchor.x(), anchor.y()};
  }
  s["chirality_definition"] = kChiralityDefinition;
  s["sector_definition"] = "six 60 degree sectors about the anchor, sector_1 centered on +x, counterclockwise";
  return s;
}

// ---------------------------------------------------------------- figure recipes

json reproduce_fig1c(const RunConfig& base, Manifest& man, const Logger& log) {
  RunConfig cfg = base;
  cfg.lattice.spacing = 0.1;
  cfg.bands_path = {"G", "K", "M", "G"};
  cfg.bands_grid = 0;
  const Polarization pol = Polarization::pi();
  auto run = bands_into(cfg, pol, man, log);
  json& s = run.summary;

  const double k0 = wavenumber(cfg.lattice.wavelength);
  double gamma_outside = 0.0;
  double gamma_gamma = 0.0;
  for (const auto& b : run.bands) {
    if (b.k.norm() > 1.2 * k0)
      for (double g : b.gamma) gamma_outside = std::max(gamma_outside, g);
    if (b.k.norm() < 1e-12)
      for (double g : b.gamma) gamma_gamma = std::max(gamma_gamma, g);
  }
  const BlochSummer summer(cfg.lattice, pol, cfg.bloch);
  const auto pts = high_symmetry_points(cfg.lattice);
  const auto hess = band_hessian(summer, pts.m, 2, 0.02 * pts.m.norm());
  s["gamma_at_Gamma"] = gamma_gamma;
  s["max_gamma_beyond_1p2_k0"] = gamma_outside;
  s["upper_band_hessian_at_M"] = hess;
  s["saddle_at_M"] = hess[0] * hess[1] < 0.0;
  s["polarization"] = io::to_json(pol);
  return s;
}

json reproduce_fig2(const RunConfig& base, Manifest& man, const Logger& log) {
  RunConfig cfg = base;
  cfg.lattice.imbalance = 0.3;
  const Lattice lat = build_flake(cfg.lattice);
  json s;
  s["calibration"] = {{"cells_per_side", "array size is not fixed by the target data; uses lattice.cells_per_side"}};
  const std::array<std::pair<const char*, double>, 2> cases = {{{"spectrum_theta_4pi9.csv", 4.0 * kPi / 9.0},
                                                                {"spectrum_theta_pi2.csv", kPi / 2.0}}};
  for (const auto& [file, theta] : cases) {
    log(std::string("spectrum ") + file);
    const auto modes = analyze(assemble_array(lat, Polarization::theta(theta)), lat, cfg.classify);
    write_modes(man, file, "theta=" + io::num(theta), modes, "spectrum at the quoted in-plane angle");
    s[file] = modes_summary(modes);
  }
  s["chasing"] = sweep_theta_into(cfg, lat, man, log);
  return s;
}

json reproduce_fig3(const RunConfig& base, Manifest& man, const Logger& log) {
  RunConfig cfg = base;
  json s;
  const std::array<std::pair<const char*, Polarization>, 3> pols = {
      {{"delta_sweep_z.csv", Polarization::pi()},
       {"delta_sweep_theta_pi6.csv", Polarization::theta(kPi / 6.0)},
       {"delta_sweep_theta_pi4.csv", Polarization::theta(kPi / 4.0)}}};
  for (const auto& [file, pol] : pols) s[file] = sweep_delta_into(cfg, pol, file, man, log);

  LatticeSpec spec = cfg.lattice;
  spec.imbalance = 0.6;
  const Lattice lat = build_flake(spec);
  const auto modes = analyze(assemble_array(lat, Polarization::pi()), lat, cfg.classify);
  write_modes(man, "spectrum_delta_0p6.csv", "delta=0.6", modes, "spectrum with edge families at delta = 0.6");
  s["spectrum_delta_0p6"] = modes_summary(modes);
  for (const char* name : {"fig3g", "fig3h", "fig3i"}) s[name] = scenario_into(name, cfg, man, log);
  s["chirality_definition"] = kChiralityDefinition;
  return s;
}

json reproduce_fig4(const RunConfig& base, Manifest& man, const Logger& log) {
  RunConfig cfg = base;
  LatticeSpec spec = cfg.lattice;
  spec.imbalance = 0.6;
  json s;
  const std::array<std::tuple<const char*, const char*, Polarization>, 3> cases = {
      {{"disorder_z", "C3v", Polarization::pi()},
       {"disorder_theta_pi6", "C2v", Polarization::theta(kPi / 6.0)},
       {"disorder_theta_pi4", "Cs", Polarization::theta(kPi / 4.0)}}};
  for (const auto& [name, sym, pol] : cases) {
    s[name] = disorder_into(cfg, spec, pol, name, man, log);
    s[name]["symmetry"] = sym;
  }
  s["calibration"] = {{"critical_kappa", "quoted thresholds depend on the unpublished array size; ordering is the target"}};
  return s;
}

json reproduce_fig5(const RunConfig& cfg, Manifest& man, const Logger& log) {
  json s;
  for (const char* name : {"fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig5f"})
    s[name] = scenario_into(name, cfg, man, log);
  s["chirality_definition"] = kChiralityDefinition;
  return s;
}

json dispatch(const std::string& command, const std::string& target, const RunConfig& cfg, Manifest& man,
              const Logger& log) {
  if (command == "lattice") return cmd_lattice(cfg, man, log);
  if (command == "bands") return cmd_bands(cfg, man, log);
  if (command == "spectrum") return cmd_spectrum(cfg, man, log);
  if (command == "sweep-theta") return cmd_sweep_theta(cfg, man, log);
  if (command == "sweep-delta") return cmd_sweep_delta(cfg, man, log);
  if (command == "disorder") return cmd_disorder(cfg, man, log);
  if (command == "dynamics") return cmd_dynamics(cfg, man, log);
  if (command == "reproduce") {
    if (target == "fig1c") return reproduce_fig1c(cfg, man, log);
    if (target == "fig2") return reproduce_fig2(cfg, man, log);
    if (target == "fig3") return reproduce_fig3(cfg, man, log);
    if (target == "fig4") return reproduce_fig4(cfg, man, log);
    if (target == "fig5") return reproduce_fig5(cfg, man, log);
    throw ConfigError("unknown reproduce target '" + target + "'", "target");
  }
  throw ConfigError("unknown command '" + command + "'", "command");
}

} // namespace

std::vector<std::string> command_names() {
  return {"lattice", "bands", "spectrum", "sweep-theta", "sweep-delta", "disorder", "dynamics", "reproduce"};
}

std::vector<std::string> reproduce_targets() { return {"fig1c", "fig2", "fig3", "fig4", "fig5"}; }

json run_command(const std::string& command, const std::string& target, const RunConfig& cfg, const fs::path& out,
                 std::ostream* log) {
  fs::create_directories(out);
  const fs::path marker = out / "FAILED";
  fs::remove(marker);
  const std::string label = target.empty() ? command : command + " " + target;
  try {
    cfg.validate();
    Manifest man(out, label);
    man["config"] = cfg.to_json();
    man["seed"] = cfg.seed;
    man["threads"] = resolve_threads(cfg.threads);
    const json summary = dispatch(command, target, cfg, man, Logger(log));
    man["summary"] = summary;
    man.write();
    return summary;
  } catch (const std::exception& e) {
    std::ofstream f(marker);
    f << error_json(e).dump(2) << '\n';
    throw;
  }
}

json error_json(const std::exception& e) {
  json j = {{"status", "error"}, {"message", e.what()}};
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) {
    j["kind"] = "config";
    if (!c->field().empty()) j["field"] = c->field();
    if (c->line() > 0) j["line"] = c->line();
  } else if (dynamic_cast<const ConstraintError*>(&e)) {
    j["kind"] = "constraint";
  } else if (dynamic_cast<const DomainError*>(&e)) {
    j["kind"] = "domain";
  } else if (dynamic_cast<const ConvergenceError*>(&e)) {
    j["kind"] = "convergence";
  } else if (dynamic_cast<const SolverError*>(&e)) {
    j["kind"] = "solver";
  } else {
    j["kind"] = "runtime";
  }
  return j;
}

} // namespace kagome
