#include "kagome/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "kagome/parallel.hpp"

namespace kagome {

namespace {

constexpr cplx I(0.0, 1.0);

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

std::array<Vec2, 3> sublattice_offsets(const LatticeSpec& spec) {
  const double ra = spec.intracell();
  return {Vec2(0.5 * ra, 0.5 * std::sqrt(3.0) * ra), Vec2(0.0, 0.0), Vec2(ra, 0.0)};
}

} // namespace

std::string_view to_string(TaperKind kind) {
  return kind == TaperKind::Smooth ? "smooth" : "raised_cosine";
}

TaperKind parse_taper(std::string_view name) {
  if (name == "smooth") return TaperKind::Smooth;
  if (name == "raised_cosine" || name == "cosine") return TaperKind::RaisedCosine;
  throw ConstraintError("unknown taper '" + std::string(name) + "'");
}

void BlochSettings::validate() const {
  if (!(sum_radius >= 50.0))
    throw ConstraintError("sum_radius must be at least 50 d for the lattice sums to converge");
  if (!(taper_fraction > 0.0 && taper_fraction <= 1.0))
    throw ConstraintError("taper_fraction must lie in (0, 1]");
}

double taper_window(double x, double taper_fraction, TaperKind kind) {
  const double start = 1.0 - taper_fraction;
  if (x <= start) return 1.0;
  if (x >= 1.0) return 0.0;
  const double s = (x - start) / taper_fraction;
  if (kind == TaperKind::RaisedCosine) return 0.5 * (1.0 + std::cos(std::numbers::pi * s));
  const double a = bump(1.0 - s);
  return a / (a + bump(s));
}

BlochSummer::BlochSummer(const LatticeSpec& spec, const Polarization& pol, const BlochSettings& settings)
    : spec_(spec), settings_(settings) {
  spec.validate();
  settings.validate();
  const double d = spec.spacing;
  const double rc = settings.sum_radius * d;
  const double k0 = wavenumber(spec.wavelength);
  const Vec2 a1(d, 0.0);
  const Vec2 a2(0.5 * d, 0.5 * std::sqrt(3.0) * d);
  const auto off = sublattice_offsets(spec);
  // |n1 a1 + n2 a2| >= |n| d sqrt(3)/2, plus one cell of slack for the offsets
  nmax_ = static_cast<int>(std::ceil(rc / (0.5 * std::sqrt(3.0) * d))) + 2;

  const std::array<std::array<int, 2>, 4> pairs = {{{0, 0}, {0, 1}, {0, 2}, {1, 2}}};
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const Vec2 dab = off[static_cast<std::size_t>(pairs[p][0])] - off[static_cast<std::size_t>(pairs[p][1])];
    auto& terms = terms_[p];
    for (int n2 = -nmax_; n2 <= nmax_; ++n2) {
      for (int n1 = -nmax_; n1 <= nmax_; ++n1) {
        const Vec2 r = dab + n1 * a1 + n2 * a2;
        const double dist = r.norm();
        if (dist > rc || dist < 1e-12 * d) continue;
        const double w = taper_window(dist / rc, settings.taper_fraction, settings.taper);
        if (w == 0.0) continue;
        const Vec3 r3(r.x(), r.y(), 0.0);
        const cplx g = -(3.0 * std::numbers::pi / k0) * green_contract(r3, k0, pol.vector, pol.vector);
        terms.push_back({n1, n2, w * g});
      }
    }
  }
}

cplx BlochSummer::phase_sum(const std::vector<Term>& terms, const Vec2& k, int sign) const {
  const double d = spec_.spacing;
  const double p1 = sign * k.dot(Vec2(d, 0.0));
  const double p2 = sign * k.dot(Vec2(0.5 * d, 0.5 * std::sqrt(3.0) * d));
  const auto span = static_cast<std::size_t>(2 * nmax_ + 1);
  std::vector<cplx> e1(span), e2(span);
  for (int n = -nmax_; n <= nmax_; ++n) {
    e1[static_cast<std::size_t>(n + nmax_)] = std::exp(I * (p1 * n));
    e2[static_cast<std::size_t>(n + nmax_)] = std::exp(I * (p2 * n));
  }
  // terms are ordered by n2, so each row shares one e2 factor
  cplx total = 0.0;
  std::size_t i = 0;
  while (i < terms.size()) {
    const int row = terms[i].n2;
    cplx acc = 0.0;
    for (; i < terms.size() && terms[i].n2 == row; ++i)
      acc += terms[i].value * e1[static_cast<std::size_t>(terms[i].n1 + nmax_)];
    total += acc * e2[static_cast<std::size_t>(row + nmax_)];
  }
  return total;
}

Eigen::Matrix3cd BlochSummer::matrix(const Vec2& k) const {
  Eigen::Matrix3cd h;
  const cplx diag = phase_sum(terms_[0], k, +1) - 0.5 * I;
  const std::array<std::array<int, 2>, 3> off = {{{0, 1}, {0, 2}, {1, 2}}};
  for (int a = 0; a < 3; ++a) h(a, a) = diag;
  for (std::size_t p = 0; p < off.size(); ++p) {
    const int a = off[p][0];
    const int b = off[p][1];
    // entry (b,a) sums g(d_ba + R) e^{ikR} = g(d_ab - R) e^{ikR}
    h(a, b) = phase_sum(terms_[p + 1], k, +1);
    h(b, a) = phase_sum(terms_[p + 1], k, -1);
  }
  return h;
}

BlochHamiltonian bloch_matrix(const LatticeSpec& spec, const Polarization& pol, const Vec2& k,
                              const BlochSettings& settings) {
  BlochSummer summer(spec, pol, settings);
  return {k, summer.matrix(k), settings};
}

BandPoint band_point(const BlochSummer& summer, const Vec2& k) {
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(summer.matrix(k), false);
  if (es.info() != Eigen::Success) throw SolverError("Bloch eigenvalue solver failed");
  std::array<cplx, 3> w = {es.eigenvalues()[0], es.eigenvalues()[1], es.eigenvalues()[2]};
  std::sort(w.begin(), w.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  BandPoint bp;
  bp.k = k;
  for (std::size_t i = 0; i < 3; ++i) {
    bp.omega[i] = w[i].real();
    bp.gamma[i] = -2.0 * w[i].imag();
  }
  bp.in_light_cone = k.norm() < wavenumber(summer.spec().wavelength);
  return bp;
}

std::array<double, 2> band_hessian(const BlochSummer& summer, const Vec2& k, std::size_t band, double h) {
  if (band > 2) throw ConstraintError("band index must be 0, 1 or 2");
  auto f = [&](double dx, double dy) { return band_point(summer, k + Vec2(dx * h, dy * h)).omega[band]; };
  const double f0 = f(0, 0);
  const double fxx = (f(1, 0) - 2.0 * f0 + f(-1, 0)) / (h * h);
  const double fyy = (f(0, 1) - 2.0 * f0 + f(0, -1)) / (h * h);
  const double fxy = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4.0 * h * h);
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(
                                 (Eigen::Matrix2d() << fxx, fxy, fxy, fyy).finished(), Eigen::EigenvaluesOnly)
                                 .eigenvalues();
  return {ev[0], ev[1]};
}

std::vector<BandPoint> band_structure(const LatticeSpec& spec, const Polarization& pol,
                                      const std::vector<Vec2>& ks, const BlochSettings& settings,
                                      int threads) {
  const BlochSummer summer(spec, pol, settings);
  return parallel_map(ks.size(), threads, [&](std::size_t i) { return band_point(summer, ks[i]); });
}

ReciprocalPoints high_symmetry_points(const LatticeSpec& spec) {
  const double d = spec.spacing;
  const double s = 2.0 * std::numbers::pi / d;
  const Vec2 b1 = s * Vec2(1.0, -1.0 / std::sqrt(3.0));
  const Vec2 b2 = s * Vec2(0.0, 2.0 / std::sqrt(3.0));
  return {Vec2::Zero(), (2.0 * b2 + b1) / 3.0, 0.5 * b2};
}

KPath high_symmetry_path(const LatticeSpec& spec, const std::vector<std::string>& names,
                         int points_per_segment) {
  if (names.size() < 2) throw ConstraintError("a k-path needs at least two points");
  if (points_per_segment < 1) throw ConstraintError("points_per_segment must be >= 1");
  const auto hs = high_symmetry_points(spec);
  auto lookup = [&](const std::string& n) -> Vec2 {
    if (n == "G" || n == "Gamma") return hs.gamma;
    if (n == "K") return hs.k;
    if (n == "M") return hs.m;
    throw ConstraintError("unknown high-symmetry point '" + n + "'");
  };
  KPath path;
  double dist = 0.0;
  for (std::size_t s = 0; s + 1 < names.size(); ++s) {
    const Vec2 a = lookup(names[s]);
    const Vec2 b = lookup(names[s + 1]);
    path.labels.emplace_back(path.points.size(), names[s]);
    for (int i = 0; i < points_per_segment; ++i) {
      const double t = static_cast<double>(i) / points_per_segment;
      const Vec2 p = a + t * (b - a);
      if (!path.points.empty()) dist += (p - path.points.back()).norm();
      path.points.push_back(p);
      path.distance.push_back(dist);
    }
  }
  const Vec2 last = lookup(names.back());
  dist += (last - path.points.back()).norm();
  path.labels.emplace_back(path.points.size(), names.back());
  path.points.push_back(last);
  path.distance.push_back(dist);
  return path;
}

std::vector<Vec2> bz_grid(const LatticeSpec& spec, int n) {
  if (n < 1) throw ConstraintError("grid size must be >= 1");
  const double s = 2.0 * std::numbers::pi / spec.spacing;
  const Vec2 b1 = s * Vec2(1.0, -1.0 / std::sqrt(3.0));
  const Vec2 b2 = s * Vec2(0.0, 2.0 / std::sqrt(3.0));
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n * n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      out.push_back((static_cast<double>(i) / n - 0.5) * b1 + (static_cast<double>(j) / n - 0.5) * b2);
  return out;
}

ConvergenceReport check_convergence(const LatticeSpec& spec, const Polarization& pol,
                                    const std::vector<Vec2>& ks, const BlochSettings& settings,
                                    int threads) {
  BlochSettings doubled = settings;
  doubled.sum_radius *= 2.0;
  const BlochSummer base(spec, pol, settings);
  const BlochSummer wide(spec, pol, doubled);
  const double k0 = wavenumber(spec.wavelength);
  const auto diffs = parallel_map(ks.size(), threads, [&](std::size_t i) {
    const auto a = band_point(base, ks[i]);
    const auto b = band_point(wide, ks[i]);
    double diff = 0.0;
    for (std::size_t n = 0; n < 3; ++n)
      diff = std::max({diff, std::abs(a.omega[n] - b.omega[n]), std::abs(a.gamma[n] - b.gamma[n])});
    return diff;
  });
  ConvergenceReport rep;
  rep.diffs = diffs;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double ratio = ks[i].norm() / k0;
    if (ratio > 1.0) {
      rep.max_diff_outside = std::max(rep.max_diff_outside, diffs[i]);
      ++rep.n_outside;
      if (diffs[i] >= rep.tolerance) {
        ++rep.failed_outside;
        rep.clean_beyond = std::max(rep.clean_beyond, ratio);
      }
    } else {
      rep.max_diff_inside = std::max(rep.max_diff_inside, diffs[i]);
      ++rep.n_inside;
    }
  }
  if (rep.failed_outside == 0 && rep.n_outside > 0) rep.clean_beyond = 1.0;
  rep.passed = rep.max_diff_outside < rep.tolerance && rep.max_diff_inside < rep.relaxed;
  return rep;
}

} // namespace kagome
