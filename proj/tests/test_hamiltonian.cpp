#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kagome/hamiltonian.hpp"

using namespace kagome;

namespace {

const cplx I(0.0, 1.0);

Lattice flake(int L, double delta) {
  LatticeSpec s;
  s.cells_per_side = L;
  s.imbalance = delta;
  return build_flake(s);
}

} // namespace

TEST_SUITE("hamiltonian") {

TEST_CASE("two-atom pair has eigenvalues -i/2 +- g") {
  Lattice lat;
  lat.positions = {Vec3::Zero(), Vec3(0.5, 0, 0)};
  lat.sublattice = {Sublattice::A, Sublattice::B};
  lat.cell_index = {0, 0};
  lat.cell_coords = {{0, 0}, {0, 0}};
  const auto h = assemble_array(lat, Polarization::pi());
  const cplx g = coupling(lat.positions[0], lat.positions[1], Polarization::pi(), Polarization::pi(), wavenumber(1.0));
  Eigen::ComplexEigenSolver<CMat> es(h.matrix);
  std::vector<cplx> ev = {es.eigenvalues()[0], es.eigenvalues()[1]};
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  std::vector<cplx> expected = {-0.5 * I + g, -0.5 * I - g};
  std::sort(expected.begin(), expected.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  for (int i = 0; i < 2; ++i) CHECK(std::abs(ev[static_cast<std::size_t>(i)] - expected[static_cast<std::size_t>(i)]) < 1e-12);
}

TEST_CASE("array Hamiltonian is complex symmetric with -i/2 diagonal") {
  const Lattice lat = flake(6, 0.3);
  for (const auto& pol : {Polarization::pi(), Polarization::theta(0.4)}) {
    const auto h = assemble_array(lat, pol);
    CHECK((h.matrix - h.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index i = 0; i < h.matrix.rows(); ++i) CHECK(std::abs(h.matrix(i, i) + 0.5 * I) < 1e-15);
  }
}

TEST_CASE("all-to-all structure") {
  const Lattice lat = flake(10, 0.3);
  const auto h = assemble_array(lat, Polarization::pi());
  REQUIRE(h.matrix.rows() == 165);
  REQUIRE(h.matrix.cols() == 165);
  int zeros = 0;
  for (Eigen::Index i = 0; i < 165; ++i)
    for (Eigen::Index j = 0; j < 165; ++j)
      if (i != j && h.matrix(i, j) == cplx(0.0)) ++zeros;
  CHECK(zeros == 0);
}

TEST_CASE("decay matrix is positive semidefinite on random lattices") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  std::uniform_int_distribution<int> size(2, 6);
  for (int n = 0; n < 8; ++n) {
    const Lattice lat = flake(size(rng), u(rng));
    const Vec3 v(u(rng), u(rng), u(rng));
    const auto h = assemble_array(lat, Polarization::from_vector(v.cast<cplx>()));
    const CMat gamma = decay_matrix(h.matrix);
    CHECK((gamma - gamma.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<CMat> es(gamma);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
  }
}

TEST_CASE("impurity couplings scale with the square root of its linewidth") {
  const Lattice lat = flake(10, 0.0);
  ImpuritySpec imp;
  imp.linewidth = 0.002;
  imp.placement = place_impurity(lat, ImpurityAnchor::CentralHexagon, 0.04);
  const auto h = assemble_with_impurity(lat, Polarization::pi(), imp);
  REQUIRE(h.size() == lat.size() + 1);
  const auto k = static_cast<Eigen::Index>(h.impurity_offset());
  CHECK(std::abs(h.matrix(k, k) - cplx(imp.detuning, -0.001)) < 1e-15);
  for (std::size_t j = 0; j < lat.size(); j += 7) {
    const cplx g = coupling(imp.placement.position, lat.positions[j], imp.polarization, Polarization::pi(), wavenumber(1.0));
    const cplx hij = h.matrix(k, static_cast<Eigen::Index>(j));
    CHECK(std::abs(hij) / std::abs(g) == doctest::Approx(std::sqrt(0.002)).epsilon(1e-12));
  }
}

TEST_CASE("impurity above a hexagon couples equally to its six atoms") {
  const Lattice lat = flake(11, 0.0);
  ImpuritySpec imp;
  imp.placement = place_impurity(lat, ImpurityAnchor::CentralHexagon, 0.04);
  const auto h = assemble_with_impurity(lat, Polarization::pi(), imp);
  const auto k = static_cast<Eigen::Index>(h.impurity_offset());
  const Hexagon hex = central_hexagon(lat);
  const double ref = std::abs(h.matrix(k, static_cast<Eigen::Index>(hex.atoms[0])));
  for (auto j : hex.atoms) CHECK(std::abs(h.matrix(k, static_cast<Eigen::Index>(j))) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("V-type levels") {
  const Lattice lat = flake(5, 0.0);
  ImpuritySpec imp;
  imp.kind = ImpurityKind::VType;
  imp.detuning = 3.0;
  imp.placement = place_impurity(lat, ImpurityAnchor::CentralHexagon, 0.04);
  auto h = assemble_with_impurity(lat, Polarization::pi(), imp);
  REQUIRE(h.size() == lat.size() + 2);
  const auto k = static_cast<Eigen::Index>(h.impurity_offset());
  CHECK(std::abs(h.matrix(k, k) - h.matrix(k + 1, k + 1)) < 1e-15);
  CHECK(h.matrix(k, k + 1) == cplx(0.0));

  imp.zeeman = 20.0;
  h = assemble_with_impurity(lat, Polarization::pi(), imp);
  CHECK(std::abs(h.matrix(k, k) - cplx(23.0, -0.001)) < 1e-12);
  CHECK(std::abs(h.matrix(k + 1, k + 1) - cplx(-17.0, -0.001)) < 1e-12);
  CHECK(h.labels[static_cast<std::size_t>(k)].kind == BasisKind::SigmaPlus);
  CHECK(h.labels[static_cast<std::size_t>(k + 1)].kind == BasisKind::SigmaMinus);
}

TEST_CASE("impurity specs are validated") {
  ImpuritySpec imp;
  imp.linewidth = 0.0;
  CHECK_THROWS_AS(imp.validate(), ConstraintError);
  imp.linewidth = 0.5;
  CHECK(imp.non_markovian());
}

}
