// One PASS/FAIL line per acceptance criterion. Failures are reported but only
// change the exit status under --strict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "kagome/bloch.hpp"
#include "kagome/config.hpp"
#include "kagome/dynamics.hpp"
#include "kagome/parallel.hpp"
#include "kagome/tightbinding.hpp"

using namespace kagome;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

double angular_distance(double a, double b, double period) {
  const double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

// ------------------------------------------------------------------ 1

void green_identities(Verdict& v) {
  const double k0 = wavenumber(1.0);
  double self_err = 0.0;
  for (const Vec3& dir : {Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(1, 1, 1).normalized()})
    for (const Polarization& p : {Polarization::pi(), Polarization::theta(0.3), Polarization::sigma_plus()}) {
      const double val = -coupling(1e-3 * dir, Vec3::Zero(), p, p, k0).imag();
      self_err = std::max(self_err, std::abs(val - 0.5) / 0.5);
    }
  v.require(self_err < 0.01, "self-term rel err " + fmt(self_err));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double recip = 0.0, transpose = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec3 r(u(rng), u(rng), u(rng));
    const CMat3 g = green_tensor(r, k0);
    const double scale = g.cwiseAbs().maxCoeff();
    recip = std::max(recip, (g - green_tensor(-r, k0)).cwiseAbs().maxCoeff() / scale);
    transpose = std::max(transpose, (g - g.transpose()).cwiseAbs().maxCoeff() / scale);
  }
  v.require(recip < 1e-12, "reciprocity " + fmt(recip));
  v.require(transpose < 1e-12, "transpose " + fmt(transpose));

  const cplx g = coupling(Vec3(1e-3, 0, 0), Vec3::Zero(), Polarization::pi(), Polarization::pi(), k0);
  CMat h(2, 2);
  h << cplx(0, -0.5), g, g, cplx(0, -0.5);
  const auto modes = diagonalize(h, 2);
  const double a = modes.gamma(0), b = modes.gamma(1);
  const double super = std::max(a, b), sub = std::min(a, b);
  v.require(std::abs(super - 2.0) < 0.02 && sub < 0.02, "Dicke rates " + fmt(super) + ", " + fmt(sub));
}

// ------------------------------------------------------------------ 2

void decay_positivity(Verdict& v) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(2, 8);
  std::uniform_real_distribution<double> delta(-0.6, 0.6);
  std::normal_distribution<double> gauss;
  double worst = 1e300;
  for (int i = 0; i < 20; ++i) {
    LatticeSpec s;
    s.cells_per_side = size(rng);
    s.imbalance = delta(rng);
    const Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
    const auto pol = Polarization::from_vector(dir.cast<cplx>());
    const auto h = assemble_array(build_flake(s), pol);
    Eigen::SelfAdjointEigenSolver<CMat> es(decay_matrix(h.matrix), Eigen::EigenvaluesOnly);
    worst = std::min(worst, es.eigenvalues().minCoeff());
  }
  v.require(worst >= -1e-8, "min eig over 20 lattices " + fmt(worst));
}

// ------------------------------------------------------------------ 3

void band_properties(Verdict& v, int threads) {
  LatticeSpec spec;
  spec.spacing = 0.1;
  const auto pol = Polarization::pi();
  const BlochSettings settings;
  const double k0 = wavenumber(spec.wavelength);
  const auto path = high_symmetry_path(spec, {"G", "K", "M", "G"}, 40);
  const auto bands = band_structure(spec, pol, path.points, settings, threads);

  double gamma_g = 0.0, gamma_out = 0.0;
  for (const auto& b : bands) {
    if (b.k.norm() < 1e-12) gamma_g = std::max({gamma_g, b.gamma[0], b.gamma[1], b.gamma[2]});
    if (b.k.norm() > 1.2 * k0) gamma_out = std::max({gamma_out, b.gamma[0], b.gamma[1], b.gamma[2]});
  }
  v.require(gamma_g < 0.02, "gamma(G) " + fmt(gamma_g));
  v.require(gamma_out < 0.05, "max gamma |k|>1.2k0 " + fmt(gamma_out));

  const BlochSummer summer(spec, pol, settings);
  const auto m = high_symmetry_points(spec).m;
  const auto hess = band_hessian(summer, m, 2, 0.02 * m.norm());
  v.require(hess[0] * hess[1] < 0.0, "upper-band Hessian at M (" + fmt(hess[0]) + ", " + fmt(hess[1]) + ")");

  std::vector<Vec2> outside;
  for (const auto& k : path.points)
    if (k.norm() > k0) outside.push_back(k);
  const auto rep = check_convergence(spec, pol, outside, settings, threads);
  v.require(rep.max_diff_outside < 1e-3, "radius doubling outside cone max " + fmt(rep.max_diff_outside) + " (" +
                                             std::to_string(rep.failed_outside) + "/" +
                                             std::to_string(rep.n_outside) + " fail, clean beyond " +
                                             fmt(rep.clean_beyond) + " k0)");
}

// ------------------------------------------------------------------ 4

ModeSet flake_modes(int L, double delta, const Polarization& pol) {
  LatticeSpec s;
  s.cells_per_side = L;
  s.imbalance = delta;
  const Lattice lat = build_flake(s);
  return analyze(assemble_array(lat, pol), lat);
}

void corner_phenomenology(Verdict& v) {
  {
    const auto m = flake_modes(10, 0.3, Polarization::pi());
    const auto c = m.in_gap_corner_modes();
    bool pattern = false;
    if (c.size() == 3) {
      std::vector<double> w;
      for (auto k : c) w.push_back(m.omega(k));
      std::sort(w.begin(), w.end());
      const double lo = w[1] - w[0], hi = w[2] - w[1];
      pattern = std::min(lo, hi) < 1e-6 && std::max(lo, hi) > 1e-2;
    }
    v.require(c.size() == 3 && pattern, "z: " + std::to_string(c.size()) + " corner modes, 2+1 " + (pattern ? "yes" : "no"));
  }
  {
    const auto m = flake_modes(10, 0.3, Polarization::theta(4.0 * kPi / 9.0));
    const auto c = m.in_gap_corner_modes();
    std::set<std::size_t> corners;
    bool single = true;
    std::vector<double> w;
    for (auto k : c) {
      const auto& cw = m.corner_weight[k];
      const auto best = static_cast<std::size_t>(std::max_element(cw.begin(), cw.end()) - cw.begin());
      single = single && cw[best] > 0.9;
      corners.insert(best);
      w.push_back(m.omega(k));
    }
    std::sort(w.begin(), w.end());
    bool distinct = w.size() == 3 && w[1] - w[0] > 1e-3 && w[2] - w[1] > 1e-3;
    v.require(c.size() == 3 && single && corners.size() == 3 && distinct,
              "4pi/9: " + std::to_string(c.size()) + " modes on " + std::to_string(corners.size()) + " corners");
  }
  {
    const auto m = flake_modes(10, 0.3, Polarization::theta(kPi / 2.0));
    std::vector<double> pair;
    for (auto k : m.in_gap_corner_modes())
      if (m.corner_weight[k][1] > 0.3 && m.corner_weight[k][2] > 0.3) pair.push_back(m.omega(k));
    const double split = pair.size() == 2 ? std::abs(pair[1] - pair[0]) : 0.0;
    v.require(pair.size() == 2 && split >= 0.01 && split <= 0.1, "pi/2 double-corner split " + fmt(split));
  }
  {
    const auto n = flake_modes(10, -0.3, Polarization::pi()).in_gap_corner_modes().size();
    v.require(n == 0, "delta=-0.3: " + std::to_string(n) + " corner modes");
  }
}

// ------------------------------------------------------------------ 5

void chasing(Verdict& v, int threads) {
  LatticeSpec s;
  s.imbalance = 0.3;
  const Lattice lat = build_flake(s);
  std::vector<double> thetas;
  for (int i = 0; i <= 180; ++i) thetas.push_back(i * kPi / 180.0);
  TrackOptions opts;
  opts.threads = threads;
  const auto track = sweep_theta(lat, thetas, opts);

  double period = 0.0;
  for (std::size_t c = 0; c < 3; ++c)
    period = std::max(period, std::abs(track.points.front().omega[c] - track.points.back().omega[c]));
  v.require(period < 1e-6, "periodicity " + fmt(period));

  std::array<std::vector<double>, 3> curves;
  for (std::size_t i = 0; i + 1 < thetas.size(); ++i)
    for (std::size_t c = 0; c < 3; ++c) curves[c].push_back(track.points[i].omega[c]);
  double worst = 0.0;
  std::string shifts;
  for (std::size_t c = 0; c < 3; ++c) {
    const double sh = best_shift(curves[c], curves[(c + 1) % 3]);
    worst = std::max(worst, std::min(angular_distance(sh, kPi / 3.0, kPi), angular_distance(sh, -kPi / 3.0, kPi)));
    shifts += (c ? "," : "") + fmt(sh / kDeg, 5);
  }
  v.require(worst <= 2.0 * kDeg, "shifts deg " + shifts);

  const std::array<double, 3> targets = {kPi / 6.0, kPi / 2.0, 5.0 * kPi / 6.0};
  bool matched = !track.reorganization_angles.empty();
  std::string found;
  for (double a : track.reorganization_angles) {
    double best = 1e9;
    for (double t : targets) best = std::min(best, angular_distance(a, t, kPi));
    matched = matched && best <= 2.0 * kDeg;
    found += (found.empty() ? "" : ",") + fmt(a / kDeg, 5);
  }
  for (double t : targets) {
    double best = 1e9;
    for (double a : track.reorganization_angles) best = std::min(best, angular_distance(a, t, kPi));
    matched = matched && best <= 2.0 * kDeg;
  }
  v.require(matched, "reorganization deg " + found);
}

// ------------------------------------------------------------------ 6

void disorder_ordering(Verdict& v, int threads) {
  const RunConfig cfg;
  LatticeSpec spec = cfg.lattice;
  spec.imbalance = 0.6;
  DisorderOptions opts;
  opts.kappas = cfg.kappas;
  opts.realizations = 30;
  opts.seed = cfg.seed;
  opts.threads = threads;
  std::array<double, 3> kc{};
  const std::array<Polarization, 3> pols = {Polarization::pi(), Polarization::theta(kPi / 6.0),
                                            Polarization::theta(kPi / 4.0)};
  bool all = true;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto res = disorder_ensemble(spec, pols[i], opts);
    all = all && res.critical_kappa.has_value();
    kc[i] = res.critical_kappa.value_or(std::nan(""));
  }
  v.require(all && kc[0] > kc[1] && kc[1] > kc[2],
            "kappa* C3v " + fmt(kc[0]) + " > C2v " + fmt(kc[1]) + " > Cs " + fmt(kc[2]));
  v.require(kc[0] >= 0.05 && kc[0] <= 0.15, "kappa*(C3v) in [0.05, 0.15]");
}

// ------------------------------------------------------------------ 7

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

void emission(Verdict& v) {
  auto final_sectors = [](const ScenarioResult& r) { return r.trace.sectors.back(); };
  auto mirror = [](std::size_t s) { return (9 - s) % 6; };

  {
    const auto a = final_sectors(emission_scenario("fig5a"));
    double asym = 0.0;
    for (std::size_t s = 0; s < 6; ++s) asym = std::max(asym, rel(a[s], a[mirror(s)]));
    std::array<std::size_t, 6> order = {0, 1, 2, 3, 4, 5};
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x] > a[y]; });
    const bool pair = mirror(order[0]) == order[1];
    v.require(asym <= 0.05 && pair, "fig5a mirror asym " + fmt(asym) + ", top sectors " +
                                        std::to_string(order[0]) + "," + std::to_string(order[1]));
  }
  {
    const auto b = final_sectors(emission_scenario("fig5b"));
    v.require(b[0] + b[3] > 0.5, "fig5b +-x share " + fmt(b[0] + b[3]));
  }
  {
    const auto c = final_sectors(emission_scenario("fig5c"));
    const auto d = final_sectors(emission_scenario("fig5d"));
    double conj = 0.0;
    for (std::size_t s = 0; s < 6; ++s) conj = std::max(conj, rel(c[s], d[mirror(s)]));
    auto dominant = [](const SectorWeights& w) {
      const double even_min = std::min({w[0], w[2], w[4]}), even_max = std::max({w[0], w[2], w[4]});
      const double odd_min = std::min({w[1], w[3], w[5]}), odd_max = std::max({w[1], w[3], w[5]});
      if (even_min > odd_max) return 0;
      if (odd_min > even_max) return 1;
      return -1;
    };
    const int dc = dominant(c), dd = dominant(d);
    v.require(conj <= 0.05, "fig5c/d conjugacy " + fmt(conj));
    v.require(dc >= 0 && dd >= 0 && dc != dd, "threefold sets c=" + std::to_string(dc) + " d=" + std::to_string(dd));
  }
  {
    const double ce = emission_scenario("fig5e").trace.chirality.back();
    const double cf = emission_scenario("fig5f").trace.chirality.back();
    v.require(std::abs(cf) > 0.0 && std::abs(cf) >= 3.0 * std::abs(ce),
              "chirality e " + fmt(ce) + ", f " + fmt(cf));
  }
  {
    const auto g = emission_scenario("fig3g").side_edges.back();
    const double asym = std::abs(g[0] - g[1]) / (g[0] + g[1]);
    v.require(asym <= 0.05, "fig3g side asym " + fmt(asym));
    for (const char* name : {"fig3h", "fig3i"}) {
      const double dom = edge_dominance(emission_scenario(name).side_edges.back());
      v.require(dom > 0.7, std::string(name) + " dominance " + fmt(dom));
    }
  }
}

// ------------------------------------------------------------------ 8

void oracle_equivalence(Verdict& v) {
  LatticeSpec s;
  s.cells_per_side = 6;
  s.imbalance = 0.6;
  const Lattice lat = build_flake(s);
  const auto full = analyze(assemble_array(lat, Polarization::pi()), lat).in_gap_corner_modes().size();
  const auto tb = tb_spectrum(fit_tb(s, Polarization::pi()), lat).in_gap_corner_modes().size();
  v.require(full == 3 && tb == full, "corner modes full " + std::to_string(full) + ", TB " + std::to_string(tb));

  const Vec2 topo = wilson_polarization(TBModel{-0.5, -1.0, 0.0}, s);
  const Vec2 triv = wilson_polarization(TBModel{-1.0, -0.5, 0.0}, s);
  const bool ok = std::abs(topo.x() - 1.0 / 3.0) < 1e-3 && std::abs(topo.y() - 1.0 / 3.0) < 1e-3 &&
                  std::abs(triv.x()) < 1e-3 && std::abs(triv.y()) < 1e-3;
  v.require(ok, "Wilson (" + fmt(topo.x()) + ", " + fmt(topo.y()) + ") vs (" + fmt(triv.x()) + ", " +
                    fmt(triv.y()) + ")");
}

// ------------------------------------------------------------------ 9

std::map<std::string, std::string> csv_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv") {
      std::ifstream in(e.path(), std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      out[e.path().filename().string()] = ss.str();
    }
  return out;
}

void determinism(Verdict& v, const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "kagome_acceptance_fig2";
  fs::remove_all(root);
  bool ran = true;
  for (const char* run : {"a", "b"}) {
    const std::string threads = std::string(run) == "a" ? "1" : "2";
    const std::string cmd = cli + " reproduce fig2 --quiet --seed 5 --threads " + threads + " --out " +
                            (root / run).string() + " > /dev/null";
    ran = ran && std::system(cmd.c_str()) == 0;
  }
  v.require(ran, "two CLI runs");
  if (!ran) return;
  const auto a = csv_bytes(root / "a"), b = csv_bytes(root / "b");
  v.require(!a.empty() && a == b, std::to_string(a.size()) + " CSVs byte-identical");
}

} // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::string cli;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--strict") strict = true;
    else if (arg == "--cli" && i + 1 < argc) cli = argv[++i];
  }
  const int threads = resolve_threads(0);

  struct Criterion {
    int id;
    double budget_s;
    std::function<void(Verdict&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, 1.0, green_identities},
      {2, 30.0, decay_positivity},
      {3, 300.0, [&](Verdict& v) { band_properties(v, threads); }},
      {4, 600.0, corner_phenomenology},
      {5, 1800.0, [&](Verdict& v) { chasing(v, threads); }},
      {6, 7200.0, [&](Verdict& v) { disorder_ordering(v, threads); }},
      {7, 1200.0, emission},
      {8, 60.0, oracle_equivalence},
      {9, 0.0, [&](Verdict& v) {
         if (cli.empty()) v.require(false, "no --cli path given");
         else determinism(v, cli);
       }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0) v.require(secs < c.budget_s, "runtime " + fmt(secs, 3) + " s < " + fmt(c.budget_s) + " s");
    else v.detail << "; runtime " << fmt(secs, 3) << " s";
    if (!v.pass) ++failed;
    std::cout << "criterion " << c.id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria pass"
            << std::endl;
  return strict && failed > 0 ? 1 : 0;
}
