#include "kagome/tightbinding.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace kagome {

namespace {
constexpr cplx I(0.0, 1.0);
}

Eigen::MatrixXd tb_matrix(const TBModel& model, const Lattice& lat) {
  const std::size_t n = lat.size();
  const double ra = lat.spec.intracell();
  const double rb = lat.spec.intercell();
  const double tol = 1e-9 * lat.spec.spacing;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    h(ii, ii) = model.onsite;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = (lat.positions[i] - lat.positions[j]).norm();
      const bool same = lat.cell_index[i] == lat.cell_index[j];
      double t = 0.0;
      if (same && std::abs(dist - ra) < tol) t = model.t_intra;
      else if (!same && std::abs(dist - rb) < tol) t = model.t_inter;
      else continue;
      const auto jj = static_cast<Eigen::Index>(j);
      h(ii, jj) = t;
      h(jj, ii) = t;
    }
  }
  return h;
}

ModeSet tb_spectrum(const TBModel& model, const Lattice& lat, const ClassifyOptions& opts) {
  const Eigen::MatrixXd h = tb_matrix(model, lat);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw SolverError("tight-binding eigensolver failed");
  ModeSet m;
  m.array_size = lat.size();
  m.eigenvalues = es.eigenvalues().cast<cplx>();
  m.vectors = es.eigenvectors().cast<cplx>();
  m.ipr.resize(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) m.ipr[k] = inverse_participation(m.vectors.col(static_cast<Eigen::Index>(k)));
  classify_modes(m, lat, opts);
  return m;
}

Eigen::Matrix3cd tb_bloch(const TBModel& model, const LatticeSpec& spec, const Vec2& k) {
  const double d = spec.spacing;
  const Vec2 a1(d, 0.0);
  const Vec2 a2(0.5 * d, 0.5 * std::sqrt(3.0) * d);
  Eigen::Matrix3cd h = Eigen::Matrix3cd::Identity() * model.onsite;
  // A(n)-B(n+a2), A(n)-C(n+a2-a1), B(n+a1)-C(n) close the downward triangles
  h(0, 1) = model.t_intra + model.t_inter * std::exp(I * k.dot(a2));
  h(0, 2) = model.t_intra + model.t_inter * std::exp(I * k.dot(a2 - a1));
  h(1, 2) = model.t_intra + model.t_inter * std::exp(-I * k.dot(a1));
  h(1, 0) = std::conj(h(0, 1));
  h(2, 0) = std::conj(h(0, 2));
  h(2, 1) = std::conj(h(1, 2));
  return h;
}

Vec2 wilson_polarization(const TBModel& model, const LatticeSpec& spec, int n, int band, double min_gap) {
  if (n < 3) throw ConstraintError("Wilson grid must have at least 3 points per direction");
  if (band < 0 || band > 2) throw ConstraintError("band index must be 0, 1 or 2");
  const double s = 2.0 * std::numbers::pi / spec.spacing;
  const std::array<Vec2, 2> b = {s * Vec2(1.0, -1.0 / std::sqrt(3.0)), s * Vec2(0.0, 2.0 / std::sqrt(3.0))};

  auto state = [&](const Vec2& k) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(tb_bloch(model, spec, k));
    const auto& e = es.eigenvalues();
    double gap = std::numeric_limits<double>::infinity();
    if (band > 0) gap = std::min(gap, e[band] - e[band - 1]);
    if (band < 2) gap = std::min(gap, e[band + 1] - e[band]);
    if (gap < min_gap) {
      throw ConvergenceError("band " + std::to_string(band) + " touches a neighbor at k = (" +
                             std::to_string(k.x()) + ", " + std::to_string(k.y()) + "); polarization undefined");
    }
    return Eigen::Vector3cd(es.eigenvectors().col(band));
  };

  Vec2 p;
  for (int dir = 0; dir < 2; ++dir) {
    const Vec2& along = b[static_cast<std::size_t>(dir)];
    const Vec2& across = b[static_cast<std::size_t>(1 - dir)];
    double ref = 0.0;
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const Vec2 base = (static_cast<double>(j) / n) * across;
      const Eigen::Vector3cd first = state(base);
      Eigen::Vector3cd prev = first;
      cplx prod = 1.0;
      for (int i = 1; i <= n; ++i) {
        // the Bloch matrix is periodic in this gauge, so the loop closes on `first`
        const Eigen::Vector3cd next = i == n ? first : state(base + (static_cast<double>(i) / n) * along);
        prod *= prev.dot(next);
        prev = next;
      }
      double phase = std::arg(prod);
      // keep the per-line phases on one branch before averaging
      if (j == 0) ref = phase;
      phase = ref + std::remainder(phase - ref, 2.0 * std::numbers::pi);
      sum += phase;
    }
    const double frac = sum / n / (2.0 * std::numbers::pi);
    // discretization leaves the trivial value slightly below an integer; fold it to zero
    p[dir] = frac - std::floor(frac + 1e-3);
  }
  return p;
}

TBModel fit_tb(const LatticeSpec& spec, const Polarization& pol) {
  spec.validate();
  const double k0 = wavenumber(spec.wavelength);
  const Vec3 origin = Vec3::Zero();
  TBModel m;
  m.t_intra = coupling(origin, Vec3(spec.intracell(), 0.0, 0.0), pol, pol, k0).real();
  m.t_inter = coupling(origin, Vec3(spec.intercell(), 0.0, 0.0), pol, pol, k0).real();
  return m;
}

} // namespace kagome
