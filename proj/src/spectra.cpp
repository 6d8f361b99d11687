#include "kagome/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>


#include "kagome/parallel.hpp"
#include "linalg.hpp"

namespace kagome {

std::string_view to_string(ModeClass c) {
  switch (c) {
  case ModeClass::Corner: return "corner";
  case ModeClass::Edge: return "edge";
  case ModeClass::Bulk: return "bulk";
  case ModeClass::Impurity: return "impurity";
  }
  return "unknown";
}

std::vector<std::size_t> ModeSet::in_gap_corner_modes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cls.size(); ++i)
    if (cls[i] == ModeClass::Corner && in_gap[i]) out.push_back(i);
  return out;
}

double inverse_participation(const CVec& v) {
  const Eigen::ArrayXd p = v.cwiseAbs2().array();
  const double s = p.sum();
  if (!(s > 0.0)) return 0.0;
  return p.square().sum() / (s * s);
}

ModeSet diagonalize(const CMat& h, std::size_t array_size) {
  if (h.rows() != h.cols() || h.rows() == 0) throw ConstraintError("diagonalize: matrix must be square and nonempty");
  if (!h.allFinite()) throw SolverError("diagonalize: matrix has non-finite entries");
  CVec w;
  CMat vecs;
  if (!detail::eig(h, w, vecs)) {
    std::ostringstream os;
    os << "eigensolver failed for a " << h.rows() << "x" << h.cols() << " matrix (max |H_ij| = "
       << h.cwiseAbs().maxCoeff() << ")";
    throw SolverError(os.str());
  }
  const auto m = static_cast<std::size_t>(h.rows());
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const cplx x = w[static_cast<Eigen::Index>(a)];
    const cplx y = w[static_cast<Eigen::Index>(b)];
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });

  ModeSet out;
  out.array_size = array_size;
  out.eigenvalues.resize(h.rows());
  out.vectors.resize(h.rows(), h.cols());
  out.ipr.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto src = static_cast<Eigen::Index>(order[i]);
    const auto dst = static_cast<Eigen::Index>(i);
    out.eigenvalues[dst] = w[src];
    CVec v = vecs.col(src);
    v /= v.norm();
    out.vectors.col(dst) = v;
    out.ipr[i] = inverse_participation(v);
  }
  return out;
}

ModeSet diagonalize(const EffectiveHamiltonian& h) { return diagonalize(h.matrix, h.array_size); }

namespace {

Interval detect_gap(const ModeSet& m, const ClassifyOptions& opts) {
  std::vector<double> extended;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t count = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.cls[i] == ModeClass::Impurity) continue;
    lo = std::min(lo, m.omega(i));
    hi = std::max(hi, m.omega(i));
    ++count;
    if (m.cls[i] == ModeClass::Bulk || m.cls[i] == ModeClass::Edge) extended.push_back(m.omega(i));
  }
  if (extended.size() < 2) return {lo, hi};
  std::sort(extended.begin(), extended.end());
  std::vector<std::size_t> idx(extended.size() - 1);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return extended[a + 1] - extended[a] > extended[b + 1] - extended[b];
  });
  const double min_width = opts.min_gap_factor * (hi - lo) / static_cast<double>(count);
  for (auto j : idx) {
    const double a = extended[j];
    const double b = extended[j + 1];
    if (b - a < min_width) break;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m.cls[i] == ModeClass::Corner && m.omega(i) > a && m.omega(i) < b) return {a, b};
  }
  return {extended[idx.front()], extended[idx.front() + 1]};
}

} // namespace

void classify_modes(ModeSet& modes, const Lattice& reference, const ClassifyOptions& opts) {
  const std::size_t n = reference.size();
  if (modes.array_size != n) throw ConstraintError("classify_modes: lattice does not match the mode set");
  const std::size_t m = modes.size();
  const double radius = opts.corner_radius * reference.spec.spacing * (1.0 + 1e-9);

  std::array<std::vector<std::size_t>, 3> corner_sets;
  std::vector<bool> near_any(n, false);
  for (std::size_t c = 0; c < 3; ++c) {
    const Vec3& pc = reference.positions[reference.corner_sites[c]];
    for (std::size_t j = 0; j < n; ++j) {
      if ((reference.positions[j] - pc).norm() <= radius) {
        corner_sets[c].push_back(j);
        near_any[j] = true;
      }
    }
  }
  std::vector<bool> on_edge(n, false);
  for (const auto& e : reference.edge_sets)
    for (auto j : e) on_edge[j] = true;

  modes.cls.assign(m, ModeClass::Bulk);
  modes.sublattice_weight.assign(m, {});
  modes.corner_weight.assign(m, {});
  modes.corner_total.assign(m, 0.0);
  modes.edge_weight.assign(m, {});
  modes.edge_total.assign(m, 0.0);
  modes.impurity_weight.assign(m, 0.0);

  for (std::size_t k = 0; k < m; ++k) {
    const Eigen::VectorXd p = modes.vectors.col(static_cast<Eigen::Index>(k)).cwiseAbs2();
    for (std::size_t j = 0; j < n; ++j) {
      const double pj = p[static_cast<Eigen::Index>(j)];
      modes.sublattice_weight[k][static_cast<std::size_t>(reference.sublattice[j])] += pj;
      if (near_any[j]) modes.corner_total[k] += pj;
      if (on_edge[j]) modes.edge_total[k] += pj;
    }
    for (std::size_t c = 0; c < 3; ++c) {
      for (auto j : corner_sets[c]) modes.corner_weight[k][c] += p[static_cast<Eigen::Index>(j)];
      for (auto j : reference.edge_sets[c]) modes.edge_weight[k][c] += p[static_cast<Eigen::Index>(j)];
    }
    for (auto j = static_cast<Eigen::Index>(n); j < p.size(); ++j) modes.impurity_weight[k] += p[j];

    if (modes.impurity_weight[k] > opts.impurity_threshold) modes.cls[k] = ModeClass::Impurity;
    else if (modes.corner_total[k] > opts.corner_threshold) modes.cls[k] = ModeClass::Corner;
    else if (modes.edge_total[k] > opts.edge_threshold) modes.cls[k] = ModeClass::Edge;
  }

  modes.gap = opts.gap_window ? *opts.gap_window : detect_gap(modes, opts);
  modes.in_gap.assign(m, false);
  for (std::size_t k = 0; k < m; ++k)
    modes.in_gap[k] = modes.omega(k) > modes.gap.first && modes.omega(k) < modes.gap.second;
}

ModeSet analyze(const EffectiveHamiltonian& h, const Lattice& reference, const ClassifyOptions& opts) {
  ModeSet m = diagonalize(h);
  classify_modes(m, reference, opts);
  return m;
}

std::string edge_family(const ModeSet& modes, std::size_t i, double share) {
  if (modes.cls.at(i) != ModeClass::Edge) return {};
  const auto& e = modes.edge_weight[i];
  const double total = e[0] + e[1] + e[2];
  std::string members;
  for (std::size_t c = 0; c < 3; ++c)
    if (e[c] >= share * total) members += static_cast<char>('1' + c);
  if (members.size() == 3) return "F";
  if (members.size() == 2) return "T_" + members;
  return "E_" + members;
}

std::array<std::size_t, 3> track_corners(const ModeSet& modes) {
  const std::size_t m = modes.size();
  if (m < 3) throw ConstraintError("track_corners: need at least three modes");
  constexpr std::size_t kCandidates = 8;
  std::array<std::vector<std::size_t>, 3> cand;
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t keep = std::min(kCandidates, m);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double wa = modes.corner_weight[a][c];
                        const double wb = modes.corner_weight[b][c];
                        return wa != wb ? wa > wb : a < b;
                      });
    cand[c].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  std::array<std::size_t, 3> best{};
  double best_score = -1.0;
  for (auto a : cand[0])
    for (auto b : cand[1]) {
      if (b == a) continue;
      for (auto c : cand[2]) {
        if (c == a || c == b) continue;
        const double s = modes.corner_weight[a][0] + modes.corner_weight[b][1] + modes.corner_weight[c][2];
        if (s > best_score + 1e-14) {
          best_score = s;
          best = {a, b, c};
        }
      }
    }
  return best;
}

namespace {

ThetaPoint track_point(const Lattice& lat, double theta, const TrackOptions& opts) {
  const auto h = assemble_array(lat, Polarization::theta(theta));
  const ModeSet modes = analyze(h, lat, opts.classify);
  ThetaPoint pt;
  pt.theta = theta;
  pt.gap = modes.gap;
  pt.mode = track_corners(modes);
  std::array<std::array<std::size_t, 2>, 3> dominant{};
  for (std::size_t c = 0; c < 3; ++c) {
    const std::size_t k = pt.mode[c];
    pt.omega[c] = modes.omega(k);
    pt.gamma[c] = modes.gamma(k);
    pt.own_weight[c] = modes.corner_weight[k][c];
    pt.in_gap[c] = modes.in_gap[k];
    pt.corner_class[c] = modes.cls[k] == ModeClass::Corner;
    const auto& w = modes.corner_weight[k];
    std::array<std::size_t, 3> ord = {0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    pt.double_corner[c] = w[ord[1]] >= opts.double_ratio * w[ord[0]] && w[ord[0]] > 0.0;
    dominant[c] = {std::min(ord[0], ord[1]), std::max(ord[0], ord[1])};
  }
  for (std::size_t a = 0; a < 3 && !pt.reorganized; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) {
      if (pt.double_corner[a] && pt.double_corner[b] && pt.in_gap[a] && pt.in_gap[b] &&
          dominant[a] == dominant[b]) {
        pt.reorganized = true;
        pt.reorganized_pair = {static_cast<int>(dominant[a][0]), static_cast<int>(dominant[a][1])};
        break;
      }
    }
  std::array<std::size_t, 3> ord = {0, 1, 2};
  std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return pt.omega[a] > pt.omega[b]; });
  for (auto c : ord) pt.sector += to_char(static_cast<Sublattice>(c));
  return pt;
}

} // namespace

CornerModeTrack sweep_theta(const Lattice& lat, const std::vector<double>& thetas, const TrackOptions& opts) {
  CornerModeTrack track;
  track.points = parallel_map(thetas.size(), opts.threads,
                              [&](std::size_t i) { return track_point(lat, thetas[i], opts); });
  std::size_t i = 0;
  while (i < track.points.size()) {
    if (!track.points[i].reorganized) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double sum = 0.0;
    while (j < track.points.size() && track.points[j].reorganized) sum += track.points[j++].theta;
    double center = std::fmod(sum / static_cast<double>(j - i), std::numbers::pi);
    if (center < 0.0) center += std::numbers::pi;
    track.reorganization_angles.push_back(center);
    i = j;
  }
  return track;
}

double best_shift(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw ConstraintError("best_shift: curves must have equal nonzero length");
  const std::size_t n = a.size();
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n; ++s) {
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) cost += std::abs(b[i] - a[(i + n - s) % n]);
    if (cost < best_cost - 1e-12) {
      best_cost = cost;
      best = s;
    }
  }
  return std::numbers::pi * static_cast<double>(best) / static_cast<double>(n);
}

std::vector<DeltaRow> sweep_delta(const LatticeSpec& base, const std::vector<double>& deltas,
                                  const Polarization& pol, const ClassifyOptions& opts, int threads) {
  for (double d : deltas)
    if (!(d > -1.0 && d < 1.0)) throw ConstraintError("sweep_delta: every delta must lie in (-1, 1)");
  return parallel_map(deltas.size(), threads, [&](std::size_t i) {
    LatticeSpec spec = base;
    spec.imbalance = deltas[i];
    const Lattice lat = build_flake(spec);
    return DeltaRow{deltas[i], analyze(assemble_array(lat, pol), lat, opts)};
  });
}

void DisorderOptions::validate() const {
  if (realizations < 1) throw ConstraintError("n_realizations must be >= 1");
  if (kappas.empty()) throw ConstraintError("kappa grid must not be empty");
  for (double k : kappas)
    if (!(k >= 0.0)) throw ConstraintError("every kappa must be >= 0");
}

std::uint64_t realization_seed(std::uint64_t seed, std::size_t kappa_index, std::size_t realization) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (1 + (static_cast<std::uint64_t>(kappa_index) << 32) +
                                                    static_cast<std::uint64_t>(realization));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::optional<double> critical_value(const std::vector<double>& xs, const std::vector<double>& fraction,
                                     double level) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (fraction[i] >= level) continue;
    if (i == 0) return xs[0];
    const double f0 = fraction[i - 1];
    const double f1 = fraction[i];
    return xs[i - 1] + (f0 - level) / (f0 - f1) * (xs[i] - xs[i - 1]);
  }
  return std::nullopt;
}

DisorderResult disorder_ensemble(const LatticeSpec& spec, const Polarization& pol, const DisorderOptions& opts) {
  opts.validate();
  const Lattice clean = build_flake(spec);
  const ModeSet clean_modes = analyze(assemble_array(clean, pol), clean, opts.classify);

  DisorderResult res;
  res.clean_gap = clean_modes.gap;
  const auto corners = clean_modes.in_gap_corner_modes();
  res.clean_corner_modes = static_cast<int>(corners.size());
  if (corners.empty()) {
    res.clean_center = 0.5 * (res.clean_gap.first + res.clean_gap.second);
  } else {
    double s = 0.0;
    for (auto k : corners) s += clean_modes.omega(k);
    res.clean_center = s / static_cast<double>(corners.size());
  }
  const double clean_width = res.clean_gap.second - res.clean_gap.first;
  const double center = res.clean_center;

  const std::size_t nk = opts.kappas.size();
  const auto nr = static_cast<std::size_t>(opts.realizations);
  res.rows = parallel_map(nk * nr, opts.threads, [&](std::size_t job) {
    DisorderRow row;
    const std::size_t ki = job / nr;
    const std::size_t r = job % nr;
    row.kappa = opts.kappas[ki];
    row.realization = static_cast<int>(r);
    row.seed = realization_seed(opts.seed, ki, r);
    const Lattice lat = apply_disorder(clean, row.kappa, row.seed);
    ModeSet modes;
    try {
      modes = diagonalize(assemble_array(lat, pol));
    } catch (const DomainError&) {
      row.skipped = true;
      return row;
    }
    classify_modes(modes, clean, opts.classify);
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < modes.size(); ++k) {
      if (modes.cls[k] != ModeClass::Bulk && modes.cls[k] != ModeClass::Edge) continue;
      const double w = modes.omega(k);
      if (w <= center) lo = std::max(lo, w);
      else hi = std::min(hi, w);
    }
    row.gap = {lo, hi};
    for (std::size_t k = 0; k < modes.size(); ++k)
      if (modes.cls[k] == ModeClass::Corner && modes.omega(k) > lo && modes.omega(k) < hi) ++row.in_gap_corner;
    row.survived = row.in_gap_corner >= opts.min_corner_modes && (hi - lo) >= opts.min_gap_fraction * clean_width;
    return row;
  });

  res.survival.assign(nk, 0.0);
  res.skipped.assign(nk, 0);
  for (std::size_t ki = 0; ki < nk; ++ki) {
    int ok = 0;
    for (std::size_t r = 0; r < nr; ++r) {
      const auto& row = res.rows[ki * nr + r];
      if (row.skipped) ++res.skipped[ki];
      else if (row.survived) ++ok;
    }
    const int used = opts.realizations - res.skipped[ki];
    res.survival[ki] = used > 0 ? static_cast<double>(ok) / used : 0.0;
  }
  res.critical_kappa = critical_value(opts.kappas, res.survival);
  return res;
}

} // namespace kagome
