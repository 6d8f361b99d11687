#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kagome/geometry.hpp"
#include "kagome/greens.hpp"

namespace kagome {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

enum class BasisKind { Atom, Impurity, SigmaPlus, SigmaMinus };

struct BasisLabel {
  BasisKind kind = BasisKind::Atom;
  std::size_t atom = 0; ///< array atom index, meaningful for BasisKind::Atom

  std::string describe() const;
};

enum class ImpurityKind { TwoLevel, VType };

/// Impurity parameters in units of Gamma0. The V-type levels always use the
/// sigma+ and sigma- polarizations.
struct ImpuritySpec {
  ImpurityKind kind = ImpurityKind::TwoLevel;
  double detuning = 0.0;   ///< (omega_A - omega0) / Gamma0
  double linewidth = 0.002; ///< Gamma_A / Gamma0
  Polarization polarization = Polarization::pi();
  double zeeman = 0.0; ///< mu B / (hbar Gamma0); V-type only
  ImpurityPlacement placement;

  void validate() const;
  /// True when Gamma_A exceeds the Markovian-bath guard.
  bool non_markovian(double guard = 0.1) const { return linewidth > guard; }
};

/// Single-excitation Hamiltonian in units of hbar Gamma0, detunings from omega0.
struct EffectiveHamiltonian {
  CMat matrix;
  std::vector<BasisLabel> labels;
  std::size_t array_size = 0;
  Polarization array_polarization;
  std::optional<ImpuritySpec> impurity;

  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
  /// Index of the first impurity level, or size() when there is none.
  std::size_t impurity_offset() const { return array_size; }
};

EffectiveHamiltonian assemble_array(const Lattice& lat, const Polarization& pol,
                                    double min_separation = kDefaultMinSeparation);

EffectiveHamiltonian assemble_with_impurity(const Lattice& lat, const Polarization& pol,
                                            const ImpuritySpec& imp,
                                            double min_separation = kDefaultMinSeparation);

/// Collective decay matrix Gamma = i (H - H^dagger); Hermitian.
CMat decay_matrix(const CMat& h);
/// Coherent part J = (H + H^dagger) / 2; Hermitian.
CMat coherent_matrix(const CMat& h);

} // namespace kagome
