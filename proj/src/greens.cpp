#include "kagome/greens.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace kagome {

namespace {

constexpr cplx I(0.0, 1.0);

double parse_number(std::string_view text) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConstraintError("cannot parse number '" + s + "'");
  return v;
}

} // namespace

Polarization Polarization::pi() { return {CVec3(0.0, 0.0, 1.0)}; }

Polarization Polarization::theta(double angle) {
  return {CVec3(std::cos(angle), std::sin(angle), 0.0)};
}

Polarization Polarization::sigma_plus() {
  return {CVec3(-1.0, -I, 0.0) / std::numbers::sqrt2};
}

Polarization Polarization::sigma_minus() {
  return {CVec3(1.0, -I, 0.0) / std::numbers::sqrt2};
}

Polarization Polarization::from_vector(const CVec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ConstraintError("polarization vector must be nonzero");
  return {v / n};
}

Polarization Polarization::parse(std::string_view text) {
  if (text == "pi" || text == "z") return pi();
  if (text == "x") return theta(0.0);
  if (text == "y") return theta(std::numbers::pi / 2);
  if (text == "sigma+" || text == "sigma_plus") return sigma_plus();
  if (text == "sigma-" || text == "sigma_minus") return sigma_minus();
  if (text.starts_with("theta:")) return theta(parse_number(text.substr(6)));
  if (text.starts_with("theta_deg:"))
    return theta(parse_number(text.substr(10)) * std::numbers::pi / 180.0);
  throw ConstraintError("unknown polarization '" + std::string(text) + "'");
}

bool Polarization::is_linear() const {
  // linear up to a global phase iff v^T v has unit modulus
  const cplx vv = vector.transpose() * vector;
  return std::abs(std::abs(vv) - 1.0) < 1e-12;
}

std::string Polarization::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (int i = 0; i < 3; ++i) {
    if (i) os << ", ";
    os << '(' << vector[i].real() << ", " << vector[i].imag() << ')';
  }
  os << ']';
  return os.str();
}

CMat3 green_tensor(const Vec3& r, double k0) {
  const double dist = r.norm();
  if (!(dist > 0.0)) throw DomainError("green_tensor: zero separation");
  const Vec3 rhat = r / dist;
  const double kr = k0 * dist;
  const cplx pref = std::exp(I * kr) / (4.0 * std::numbers::pi * dist);
  const cplx a = 1.0 + I / kr - 1.0 / (kr * kr);
  const cplx b = 1.0 + 3.0 * I / kr - 3.0 / (kr * kr);
  return pref * (a * CMat3::Identity() - b * (rhat * rhat.transpose()).cast<cplx>());
}

cplx green_contract(const Vec3& r, double k0, const CVec3& p_i, const CVec3& p_j) {
  const double dist = r.norm();
  if (!(dist > 0.0)) throw DomainError("green_tensor: zero separation");
  const Vec3 rhat = r / dist;
  const double kr = k0 * dist;
  const double inv = 1.0 / kr;
  const cplx pref = std::exp(I * kr) / (4.0 * std::numbers::pi * dist);
  const cplx a(1.0 - inv * inv, inv);
  const cplx b(1.0 - 3.0 * inv * inv, 3.0 * inv);
  const cplx pp = p_i.dot(p_j); // Eigen's dot conjugates the left operand
  const cplx ri = rhat.cast<cplx>().dot(p_i);
  const cplx rj = rhat.cast<cplx>().dot(p_j);
  return pref * (a * pp - b * std::conj(ri) * rj);
}

cplx coupling(const Vec3& pos_i, const Vec3& pos_j, const Polarization& pol_i,
              const Polarization& pol_j, double k0, double min_separation) {
  const Vec3 r = pos_i - pos_j;
  const double dist = r.norm();
  const double guard = min_separation * 2.0 * std::numbers::pi / k0;
  if (!(dist > 0.0)) throw DomainError("coupling: coincident positions");
  if (dist < guard) {
    std::ostringstream os;
    os << "coupling: separation " << dist << " below the minimum " << guard;
    throw DomainError(os.str());
  }
  return -(3.0 * std::numbers::pi / k0) * green_contract(r, k0, pol_i.vector, pol_j.vector);
}

} // namespace kagome
