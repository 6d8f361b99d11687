#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "kagome/spectra.hpp"

using namespace kagome;

namespace {

constexpr double kPi = std::numbers::pi;

Lattice flake(int L, double delta) {
  LatticeSpec s;
  s.cells_per_side = L;
  s.imbalance = delta;
  return build_flake(s);
}

ModeSet analyze_flake(int L, double delta, const Polarization& pol) {
  const Lattice lat = flake(L, delta);
  return analyze(assemble_array(lat, pol), lat);
}

// mode set holding hand-built real vectors, one per column
ModeSet synthetic(const std::vector<Eigen::VectorXd>& states, std::size_t n) {
  ModeSet m;
  m.array_size = n;
  m.eigenvalues = CVec::Zero(static_cast<Eigen::Index>(states.size()));
  m.vectors = CMat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(states.size()));
  for (std::size_t k = 0; k < states.size(); ++k) {
    m.vectors.col(static_cast<Eigen::Index>(k)) = states[k].normalized().cast<cplx>();
    m.eigenvalues[static_cast<Eigen::Index>(k)] = cplx(static_cast<double>(k), 0.0);
    m.ipr.push_back(inverse_participation(m.vectors.col(static_cast<Eigen::Index>(k))));
  }
  return m;
}

std::set<std::string> families(const ModeSet& m) {
  std::set<std::string> out;
  for (std::size_t k = 0; k < m.size(); ++k)
    if (auto f = edge_family(m, k); !f.empty()) out.insert(f);
  return out;
}

} // namespace

TEST_SUITE("spectra") {

TEST_CASE("a 1x1 matrix keeps its diagonal") {
  CMat h(1, 1);
  h(0, 0) = cplx(2.5, -0.001);
  const auto m = diagonalize(h, 0);
  REQUIRE(m.size() == 1);
  CHECK(std::abs(m.eigenvalues[0] - h(0, 0)) < 1e-15);
  CHECK(m.gamma(0) == doctest::Approx(0.002));
}

TEST_CASE("IPR bounds") {
  for (int n : {1, 7, 100}) CHECK(inverse_participation(CVec::Ones(n)) == doctest::Approx(1.0 / n));
  CVec v = CVec::Zero(9);
  v[4] = cplx(0.0, 3.0);
  CHECK(inverse_participation(v) == doctest::Approx(1.0));
}

TEST_CASE("eigenpairs are normalized and satisfy H v = lambda v") {
  const Lattice lat = flake(5, 0.3);
  const auto h = assemble_array(lat, Polarization::theta(0.7));
  const auto m = diagonalize(h);
  for (std::size_t k = 0; k < m.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    CHECK(m.vectors.col(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((h.matrix * m.vectors.col(i) - m.eigenvalues[i] * m.vectors.col(i)).norm() < 1e-9);
    if (k > 0) CHECK(m.omega(k) >= m.omega(k - 1));
  }
}

TEST_CASE("hand-built corner and edge states") {
  const Lattice lat = flake(8, 0.3);
  const std::size_t n = lat.size();
  Eigen::VectorXd corner = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  corner[static_cast<Eigen::Index>(lat.corner_sites[1])] = 1.0;
  Eigen::VectorXd edge = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (auto j : lat.edge_sets[0]) edge[static_cast<Eigen::Index>(j)] = 1.0;
  Eigen::VectorXd bulk = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  for (const auto& e : lat.edge_sets)
    for (auto j : e) bulk[static_cast<Eigen::Index>(j)] = 0.0;
  ModeSet m = synthetic({corner, edge, bulk}, n);
  classify_modes(m, lat);
  CHECK(m.cls[0] == ModeClass::Corner);
  CHECK(m.corner_weight[0][0] == 0.0);
  CHECK(m.corner_weight[0][1] == doctest::Approx(1.0));
  CHECK(m.corner_weight[0][2] == 0.0);
  CHECK(m.cls[1] == ModeClass::Edge);
  CHECK(m.cls[2] == ModeClass::Bulk);
  CHECK(m.sublattice_weight[0][1] == doctest::Approx(1.0));
}

TEST_CASE("out-of-plane corner modes come as a 2+1 set") {
  const auto m = analyze_flake(10, 0.3, Polarization::pi());
  const auto c = m.in_gap_corner_modes();
  REQUIRE(c.size() == 3);
  std::vector<double> w;
  for (auto k : c) {
    CHECK(m.corner_total[k] > 0.5);
    w.push_back(m.omega(k));
  }
  std::sort(w.begin(), w.end());
  const double low = w[1] - w[0], high = w[2] - w[1];
  CHECK(std::min(low, high) < 1e-6);
  CHECK(std::max(low, high) > 1e-2);
}

TEST_CASE("tilted polarization gives three single-corner modes") {
  const auto m = analyze_flake(10, 0.3, Polarization::theta(4.0 * kPi / 9.0));
  const auto c = m.in_gap_corner_modes();
  REQUIRE(c.size() == 3);
  std::set<std::size_t> corners;
  for (auto k : c) {
    const auto& cw = m.corner_weight[k];
    const auto best = static_cast<std::size_t>(std::max_element(cw.begin(), cw.end()) - cw.begin());
    CHECK(cw[best] > 0.9);
    corners.insert(best);
  }
  CHECK(corners.size() == 3);
  std::vector<double> w;
  for (auto k : c) w.push_back(m.omega(k));
  std::sort(w.begin(), w.end());
  CHECK(w[1] - w[0] > 0.1);
  CHECK(w[2] - w[1] > 0.1);
}

TEST_CASE("y polarization merges the B and C corners") {
  const auto m = analyze_flake(10, 0.3, Polarization::theta(kPi / 2.0));
  std::vector<double> pair;
  for (auto k : m.in_gap_corner_modes())
    if (m.corner_weight[k][1] > 0.3 && m.corner_weight[k][2] > 0.3) pair.push_back(m.omega(k));
  REQUIRE(pair.size() == 2);
  const double split = std::abs(pair[1] - pair[0]);
  CHECK(split > 0.01);
  CHECK(split < 0.1);
}

TEST_CASE("trivial and critical imbalance have no corner modes") {
  CHECK(analyze_flake(10, -0.3, Polarization::pi()).in_gap_corner_modes().empty());
  CHECK(analyze_flake(10, 0.0, Polarization::pi()).in_gap_corner_modes().empty());
}

TEST_CASE("edge families") {
  const auto z = analyze_flake(10, 0.6, Polarization::pi());
  CHECK(z.in_gap_corner_modes().size() == 3);
  CHECK(families(z).count("F") == 1);
  const auto tilted = families(analyze_flake(10, 0.6, Polarization::theta(kPi / 4.0)));
  for (const char* f : {"E_1", "E_2", "E_3"}) CHECK(tilted.count(f) == 1);
}

TEST_CASE("theta sweep is pi-periodic and thread-independent") {
  const Lattice lat = flake(6, 0.3);
  const std::vector<double> thetas = {0.2, 0.9, 0.2 + kPi, 0.9 + kPi};
  TrackOptions one, many;
  many.threads = 3;
  const auto a = sweep_theta(lat, thetas, one);
  const auto b = sweep_theta(lat, thetas, many);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(std::abs(a.points[i].omega[c] - a.points[i + 2].omega[c]) < 1e-6);
      CHECK(a.points[i].omega[c] == b.points[i].omega[c]);
    }
}

TEST_CASE("best shift recovers a known offset") {
  const std::size_t n = 180;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = kPi * static_cast<double>(i) / n;
    a[i] = std::cos(2.0 * t) + 0.3 * std::sin(4.0 * t);
    b[i] = std::cos(2.0 * (t - kPi / 3.0)) + 0.3 * std::sin(4.0 * (t - kPi / 3.0));
  }
  CHECK(best_shift(a, b) == doctest::Approx(kPi / 3.0).epsilon(1e-9));
  CHECK(best_shift(a, a) == 0.0);
}

TEST_CASE("critical value interpolation") {
  const std::vector<double> x = {0.0, 0.1, 0.2, 0.3};
  CHECK(*critical_value(x, {1.0, 0.9, 0.3, 0.0}) == doctest::Approx(0.1 + 0.1 * (0.4 / 0.6)));
  CHECK_FALSE(critical_value(x, {1.0, 1.0, 0.9, 0.8}).has_value());
}

TEST_CASE("realization seeds are distinct") {
  std::set<std::uint64_t> seeds;
  for (std::size_t k = 0; k < 20; ++k)
    for (std::size_t r = 0; r < 50; ++r) seeds.insert(realization_seed(1, k, r));
  CHECK(seeds.size() == 1000);
  CHECK(realization_seed(1, 2, 3) == realization_seed(1, 2, 3));
  CHECK(realization_seed(1, 2, 3) != realization_seed(2, 2, 3));
}

TEST_CASE("clean ensemble always survives") {
  LatticeSpec s;
  s.cells_per_side = 8;
  s.imbalance = 0.6;
  DisorderOptions opts;
  opts.kappas = {0.0};
  opts.realizations = 3;
  const auto res = disorder_ensemble(s, Polarization::pi(), opts);
  CHECK(res.clean_corner_modes == 3);
  CHECK(res.survival[0] == 1.0);
}

TEST_CASE("disorder options are validated") {
  DisorderOptions opts;
  opts.kappas = {0.0};
  opts.realizations = 0;
  CHECK_THROWS_AS(opts.validate(), ConstraintError);
  opts.realizations = 1;
  opts.kappas.clear();
  CHECK_THROWS_AS(opts.validate(), ConstraintError);
}

TEST_CASE("disorder ensemble is seed-deterministic and thread-independent") {
  LatticeSpec s;
  s.cells_per_side = 6;
  s.imbalance = 0.6;
  DisorderOptions opts;
  opts.kappas = {0.05, 0.1};
  opts.realizations = 4;
  const auto a = disorder_ensemble(s, Polarization::pi(), opts);
  opts.threads = 3;
  const auto b = disorder_ensemble(s, Polarization::pi(), opts);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].seed == b.rows[i].seed);
    CHECK(a.rows[i].in_gap_corner == b.rows[i].in_gap_corner);
    CHECK(a.rows[i].gap == b.rows[i].gap);
  }
}

}
