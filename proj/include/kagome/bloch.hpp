#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kagome/geometry.hpp"
#include "kagome/greens.hpp"

namespace kagome {

enum class TaperKind { Smooth, RaisedCosine };

std::string_view to_string(TaperKind kind);
TaperKind parse_taper(std::string_view name);

struct BlochSettings {
  double sum_radius = 400.0;   ///< in units of d
  double taper_fraction = 1.0; ///< outer fraction of the radius that is windowed
  TaperKind taper = TaperKind::Smooth;

  void validate() const;
};

/// Window applied at x = |r| / R_c; one inside 1 - taper_fraction, zero at 1.
double taper_window(double x, double taper_fraction, TaperKind kind);

struct BlochHamiltonian {
  Vec2 k = Vec2::Zero();
  Eigen::Matrix3cd matrix;
  BlochSettings settings;
};

/// Windowed lattice sums for one (spec, polarization, settings) triple.
/// Building is the expensive part; each matrix(k) call is a phase sum.
class BlochSummer {
public:
  BlochSummer(const LatticeSpec& spec, const Polarization& pol, const BlochSettings& settings);

  Eigen::Matrix3cd matrix(const Vec2& k) const;
  const LatticeSpec& spec() const { return spec_; }
  const BlochSettings& settings() const { return settings_; }

private:
  struct Term {
    int n1;
    int n2;
    cplx value;
  };
  // sums for (A,A), (A,B), (A,C), (B,C); the remaining entries follow from
  // g(r) = g(-r) and the equality of the same-sublattice sums
  std::array<std::vector<Term>, 4> terms_;
  int nmax_ = 0;
  LatticeSpec spec_;
  BlochSettings settings_;

  cplx phase_sum(const std::vector<Term>& terms, const Vec2& k, int sign) const;
};

BlochHamiltonian bloch_matrix(const LatticeSpec& spec, const Polarization& pol, const Vec2& k,
                              const BlochSettings& settings = {});

struct BandPoint {
  Vec2 k = Vec2::Zero();
  std::array<double, 3> omega{}; ///< (omega_k - omega0) / Gamma0, ascending
  std::array<double, 3> gamma{}; ///< gamma_k / Gamma0
  bool in_light_cone = false;
};

BandPoint band_point(const BlochSummer& summer, const Vec2& k);

/// Eigenvalues of the 2x2 finite-difference Hessian of Re omega for `band`
/// at k, with step `h` (units 1/lambda0). Opposite signs mark a saddle.
std::array<double, 2> band_hessian(const BlochSummer& summer, const Vec2& k, std::size_t band, double h);

std::vector<BandPoint> band_structure(const LatticeSpec& spec, const Polarization& pol,
                                      const std::vector<Vec2>& ks, const BlochSettings& settings = {},
                                      int threads = 1);

struct ReciprocalPoints {
  Vec2 gamma;
  Vec2 k;
  Vec2 m;
};

ReciprocalPoints high_symmetry_points(const LatticeSpec& spec);

struct KPath {
  std::vector<Vec2> points;
  std::vector<double> distance;
  std::vector<std::pair<std::size_t, std::string>> labels;
};

/// Piecewise-linear path through named points (G, K, M).
KPath high_symmetry_path(const LatticeSpec& spec, const std::vector<std::string>& names,
                         int points_per_segment);

/// Uniform grid over the reciprocal cell spanned by b1, b2.
std::vector<Vec2> bz_grid(const LatticeSpec& spec, int n);

/// Radius-doubling comparison. Points outside the light cone must agree
/// within `tolerance`, points inside within `relaxed`. `diffs` holds the
/// largest omega or gamma change per k point; `clean_beyond` is the smallest
/// |k| / k0 above which every sampled point meets `tolerance`.
struct ConvergenceReport {
  double tolerance = 1e-3;
  double relaxed = 0.1;
  std::vector<double> diffs;
  double max_diff_outside = 0.0;
  double max_diff_inside = 0.0;
  std::size_t n_outside = 0;
  std::size_t n_inside = 0;
  std::size_t failed_outside = 0;
  double clean_beyond = 0.0;
  bool passed = false;
};

ConvergenceReport check_convergence(const LatticeSpec& spec, const Polarization& pol,
                                    const std::vector<Vec2>& ks, const BlochSettings& settings,
                                    int threads = 1);

} // namespace kagome
