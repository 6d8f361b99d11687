#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kagome/greens.hpp"

using namespace kagome;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

// textbook dyadic Green's function, written out component by component
cplx reference_component(const Vec3& r, double k, int a, int b) {
  const double d = r.norm();
  const double kr = k * d;
  const cplx pre = std::exp(I * kr) / (4.0 * kPi * d);
  const cplx t = 1.0 + I / kr - 1.0 / (kr * kr);
  const cplx l = -1.0 - 3.0 * I / kr + 3.0 / (kr * kr);
  return pre * (t * (a == b ? 1.0 : 0.0) + l * r[a] * r[b] / (d * d));
}

Vec3 random_vector(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return scale * Vec3(u(rng), u(rng), u(rng));
}

} // namespace

TEST_SUITE("greens") {

TEST_CASE("tensor matches the component formula") {
  std::mt19937_64 rng(3);
  const double k0 = wavenumber(1.0);
  for (int n = 0; n < 50; ++n) {
    const Vec3 r = random_vector(rng, 2.0);
    const CMat3 g = green_tensor(r, k0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) CHECK(std::abs(g(a, b) - reference_component(r, k0, a, b)) < 1e-12 * (1.0 + std::abs(g(a, b))));
  }
}

TEST_CASE("longitudinal contraction along the dipole axis") {
  const double k0 = wavenumber(1.0);
  const CVec3 z(0.0, 0.0, 1.0);
  for (double r : {0.05, 0.3, 1.7}) {
    const double kr = k0 * r;
    const cplx expected = std::exp(I * kr) / (4.0 * kPi * r) * (-2.0 * I / kr + 2.0 / (kr * kr));
    CHECK(std::abs(green_contract(Vec3(0, 0, r), k0, z, z) - expected) < 1e-12 * std::abs(expected));
  }
}

TEST_CASE("self-term limit gives one half for any polarization") {
  const double k0 = wavenumber(1.0);
  std::mt19937_64 rng(11);
  for (int n = 0; n < 20; ++n) {
    const Vec3 dir = random_vector(rng, 1.0).normalized();
    const Polarization p = Polarization::from_vector(CVec3(random_vector(rng, 1.0).cast<cplx>() + I * random_vector(rng, 1.0).cast<cplx>()));
    const cplx v = green_contract(1e-4 * dir, k0, p.vector, p.vector);
    CHECK((3.0 * kPi / k0) * v.imag() == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("reciprocity and transpose symmetry") {
  std::mt19937_64 rng(5);
  const double k0 = wavenumber(1.0);
  for (int n = 0; n < 30; ++n) {
    const Vec3 r = random_vector(rng, 1.0);
    const CMat3 g = green_tensor(r, k0);
    CHECK((g - green_tensor(-r, k0)).cwiseAbs().maxCoeff() < 1e-12 * g.cwiseAbs().maxCoeff());
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-12 * g.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("coupling of two z dipoles half a wavelength apart") {
  const double k0 = wavenumber(1.0);
  const cplx g = coupling(Vec3(0.5, 0, 0), Vec3::Zero(), Polarization::pi(), Polarization::pi(), k0);
  // scalar evaluation: k0 r = pi, transverse factor only
  const cplx brute = (3.0 / 2.0) * std::exp(I * kPi) / (4.0 * kPi * kPi) * (1.0 + I / kPi - 1.0 / (kPi * kPi)) * (2.0 * kPi);
  CHECK(std::isfinite(g.real()));
  CHECK(g.imag() == doctest::Approx(-brute.imag()).epsilon(1e-12));
  CHECK(g.real() == doctest::Approx(-brute.real()).epsilon(1e-12));
}

TEST_CASE("swapping atoms leaves the coupling unchanged") {
  std::mt19937_64 rng(8);
  const double k0 = wavenumber(1.0);
  for (int n = 0; n < 20; ++n) {
    const Vec3 a = random_vector(rng, 0.5), b = random_vector(rng, 0.5);
    const Polarization p = Polarization::from_vector(random_vector(rng, 1.0).cast<cplx>());
    const Polarization q = Polarization::from_vector(random_vector(rng, 1.0).cast<cplx>());
    CHECK(std::abs(coupling(a, b, p, q, k0) - coupling(b, a, q, p, k0)) < 1e-12);
    CHECK(std::abs(coupling(a, b, p, p, k0) - coupling(b, a, p, p, k0)) < 1e-12);
  }
}

TEST_CASE("orthogonal in-plane dipoles separated along z do not couple") {
  const double k0 = wavenumber(1.0);
  const cplx g = coupling(Vec3(0, 0, 0.3), Vec3::Zero(), Polarization::theta(0.0), Polarization::theta(kPi / 2), k0);
  CHECK(std::abs(g) < 1e-14);
}

TEST_CASE("coincident atoms are refused") {
  const double k0 = wavenumber(1.0);
  CHECK_THROWS_AS(green_tensor(Vec3::Zero(), k0), DomainError);
  CHECK_THROWS_AS(coupling(Vec3::Zero(), Vec3(0, 0, 1e-6), Polarization::pi(), Polarization::pi(), k0), DomainError);
}

TEST_CASE("polarization constructors") {
  const auto sp = Polarization::sigma_plus();
  const auto sm = Polarization::sigma_minus();
  CHECK(sp.vector.norm() == doctest::Approx(1.0));
  CHECK(std::abs(sp.vector.dot(sm.vector)) < 1e-15); // conjugate-linear in the first slot
  CHECK_FALSE(sp.is_linear());
  CHECK(Polarization::theta(0.3).is_linear());
  CHECK(std::abs(Polarization::parse("theta_deg:90").vector.y() - 1.0) < 1e-15);
  CHECK(std::abs(Polarization::parse("theta:0").vector.x() - 1.0) < 1e-15);
  CHECK(std::abs(Polarization::parse("sigma-").vector.dot(sm.vector) - 1.0) < 1e-15);
  CHECK_THROWS_AS(Polarization::parse("circular"), ConstraintError);
  CHECK_THROWS_AS(Polarization::from_vector(CVec3::Zero()), ConstraintError);
}

}
