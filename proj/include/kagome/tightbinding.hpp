#pragma once

#include <array>

#include "kagome/spectra.hpp"

namespace kagome {

/// Nearest-neighbor breathing-Kagome model with real hoppings.
struct TBModel {
  double t_intra = -0.5; ///< hopping inside an upward triangle
  double t_inter = -1.0; ///< hopping inside a downward triangle
  double onsite = 0.0;
};

/// Hermitian flake Hamiltonian; bonds are identified from the geometry.
Eigen::MatrixXd tb_matrix(const TBModel& model, const Lattice& lat);

ModeSet tb_spectrum(const TBModel& model, const Lattice& lat, const ClassifyOptions& opts = {});

/// Periodic 3x3 Bloch matrix in the sublattice basis {A, B, C}.
Eigen::Matrix3cd tb_bloch(const TBModel& model, const LatticeSpec& spec, const Vec2& k);

/// Wilson-loop polarization of band `band` (0 = lowest) on an n x n grid,
/// in units of the primitive vectors, modulo 1 within [-1e-3, 1 - 1e-3). The sign is chosen so that
/// |t_intra| < |t_inter| yields (1/3, 1/3). Throws ConvergenceError if the
/// band touches a neighbor anywhere on the grid.
Vec2 wilson_polarization(const TBModel& model, const LatticeSpec& spec, int n = 120, int band = 0,
                         double min_gap = 1e-6);

/// Hoppings from Re g at the intracell and intercell separations along a1.
TBModel fit_tb(const LatticeSpec& spec, const Polarization& pol);

} // namespace kagome
