#pragma once

#include <complex>
#include <numbers>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "kagome/geometry.hpp"

namespace kagome {

using cplx = std::complex<double>;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

/// Separations below this many wavelengths are rejected by `coupling`.
inline constexpr double kDefaultMinSeparation = 1e-4;

/// Unit complex dipole orientation.
struct Polarization {
  CVec3 vector = CVec3(0.0, 0.0, 1.0);

  static Polarization pi();
  static Polarization theta(double angle);
  /// (-x - i y) / sqrt(2)
  static Polarization sigma_plus();
  /// (x - i y) / sqrt(2)
  static Polarization sigma_minus();
  /// Normalizes `v`; throws ConstraintError for a zero vector.
  static Polarization from_vector(const CVec3& v);

  /// Accepts pi, z, x, y, sigma+, sigma-, theta:<radians>, theta_deg:<degrees>.
  static Polarization parse(std::string_view text);

  bool is_linear() const;
  std::string describe() const;
};

/// Free-space dyadic Green's tensor. Throws DomainError at r = 0.
CMat3 green_tensor(const Vec3& r, double k0);

/// p_i^* . G(r) . p_j without forming the tensor.
cplx green_contract(const Vec3& r, double k0, const CVec3& p_i, const CVec3& p_j);

/// Dimensionless coupling g with H_ij = hbar Gamma0 g:
/// g = -(3 pi / k0) p_i^* . G(pos_i - pos_j) . p_j, so that Im g -> -1/2
/// as the separation vanishes, matching the -i/2 diagonal.
cplx coupling(const Vec3& pos_i, const Vec3& pos_j, const Polarization& pol_i,
              const Polarization& pol_j, double k0, double min_separation = kDefaultMinSeparation);

inline double wavenumber(double wavelength) { return 2.0 * std::numbers::pi / wavelength; }

} // namespace kagome
