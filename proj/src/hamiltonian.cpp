#include "kagome/hamiltonian.hpp"

#include <cmath>

namespace kagome {

namespace {
constexpr cplx I(0.0, 1.0);
}

std::string BasisLabel::describe() const {
  switch (kind) {
  case BasisKind::Atom: return "atom:" + std::to_string(atom);
  case BasisKind::Impurity: return "impurity";
  case BasisKind::SigmaPlus: return "impurity:sigma+";
  case BasisKind::SigmaMinus: return "impurity:sigma-";
  }
  return "unknown";
}

void ImpuritySpec::validate() const {
  if (!(linewidth > 0.0) || !std::isfinite(linewidth))
    throw ConstraintError("impurity linewidth Gamma_A must be > 0");
  if (!std::isfinite(detuning)) throw ConstraintError("impurity detuning must be finite");
  if (!std::isfinite(zeeman)) throw ConstraintError("impurity Zeeman energy must be finite");
  if (kind == ImpurityKind::TwoLevel && zeeman != 0.0)
    throw ConstraintError("a Zeeman shift requires a V-type impurity");
  if (!(placement.height > 0.0)) throw ConstraintError("impurity height must be > 0");
}

EffectiveHamiltonian assemble_array(const Lattice& lat, const Polarization& pol,
                                    double min_separation) {
  const std::size_t n = lat.size();
  const double k0 = wavenumber(lat.spec.wavelength);
  EffectiveHamiltonian h;
  h.array_size = n;
  h.array_polarization = pol;
  h.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  h.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) h.labels.push_back({BasisKind::Atom, i});

  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    h.matrix(ii, ii) = -0.5 * I;
    for (std::size_t j = i + 1; j < n; ++j) {
      // G(r) = G(-r), so a common polarization gives a symmetric matrix
      const cplx g = coupling(lat.positions[i], lat.positions[j], pol, pol, k0, min_separation);
      const auto jj = static_cast<Eigen::Index>(j);
      h.matrix(ii, jj) = g;
      h.matrix(jj, ii) = g;
    }
  }
  return h;
}

EffectiveHamiltonian assemble_with_impurity(const Lattice& lat, const Polarization& pol,
                                            const ImpuritySpec& imp, double min_separation) {
  imp.validate();
  EffectiveHamiltonian base = assemble_array(lat, pol, min_separation);
  const std::size_t n = lat.size();
  const double k0 = wavenumber(lat.spec.wavelength);

  std::vector<Polarization> levels;
  std::vector<double> shifts;
  std::vector<BasisKind> kinds;
  if (imp.kind == ImpurityKind::TwoLevel) {
    levels = {imp.polarization};
    shifts = {0.0};
    kinds = {BasisKind::Impurity};
  } else {
    levels = {Polarization::sigma_plus(), Polarization::sigma_minus()};
    shifts = {imp.zeeman, -imp.zeeman};
    kinds = {BasisKind::SigmaPlus, BasisKind::SigmaMinus};
  }

  const auto m = static_cast<Eigen::Index>(n + levels.size());
  EffectiveHamiltonian h;
  h.array_size = n;
  h.array_polarization = pol;
  h.impurity = imp;
  h.labels = std::move(base.labels);
  h.matrix = CMat::Zero(m, m);
  h.matrix.topLeftCorner(base.matrix.rows(), base.matrix.cols()) = base.matrix;

  const double scale = std::sqrt(imp.linewidth);
  const Vec3& ra = imp.placement.position;
  for (std::size_t a = 0; a < levels.size(); ++a) {
    const auto row = static_cast<Eigen::Index>(n + a);
    h.labels.push_back({kinds[a], 0});
    for (std::size_t j = 0; j < n; ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      h.matrix(row, col) = scale * coupling(ra, lat.positions[j], levels[a], pol, k0, min_separation);
      h.matrix(col, row) = scale * coupling(lat.positions[j], ra, pol, levels[a], k0, min_separation);
    }
    h.matrix(row, row) = imp.detuning + shifts[a] - 0.5 * I * imp.linewidth;
  }
  return h;
}

CMat decay_matrix(const CMat& h) { return I * (h - h.adjoint()); }

CMat coherent_matrix(const CMat& h) { return 0.5 * (h + h.adjoint()); }

} // namespace kagome
