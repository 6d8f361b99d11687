#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kagome/hamiltonian.hpp"

namespace kagome {

enum class ModeClass { Corner, Edge, Bulk, Impurity };

std::string_view to_string(ModeClass c);

using Interval = std::pair<double, double>;

struct ClassifyOptions {
  double corner_threshold = 0.7;
  double edge_threshold = 0.6;
  double impurity_threshold = 0.5;
  double corner_radius = 1.0;       ///< in units of d
  double min_gap_factor = 5.0;      ///< minimum gap, in mean level spacings
  std::optional<Interval> gap_window;
};

/// Eigenmodes of one Hamiltonian, sorted by real part.
struct ModeSet {
  CVec eigenvalues;  ///< detuning - i decay / 2, units of Gamma0
  CMat vectors;      ///< unit-norm right eigenvectors as columns
  std::vector<double> ipr;
  std::size_t array_size = 0;

  // filled by classify_modes
  std::vector<ModeClass> cls;
  std::vector<std::array<double, 3>> sublattice_weight;
  std::vector<std::array<double, 3>> corner_weight;
  std::vector<double> corner_total; ///< population near any corner
  std::vector<std::array<double, 3>> edge_weight;
  std::vector<double> edge_total;
  std::vector<double> impurity_weight;
  Interval gap{0.0, 0.0};
  std::vector<bool> in_gap;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  double omega(std::size_t i) const { return eigenvalues[static_cast<Eigen::Index>(i)].real(); }
  double gamma(std::size_t i) const { return -2.0 * eigenvalues[static_cast<Eigen::Index>(i)].imag(); }
  std::vector<std::size_t> in_gap_corner_modes() const;
};

double inverse_participation(const CVec& v);

/// Full non-Hermitian eigendecomposition. No classification.
ModeSet diagonalize(const EffectiveHamiltonian& h);
ModeSet diagonalize(const CMat& h, std::size_t array_size);

/// Population masks are taken from `reference`, which must index the same
/// atoms as the diagonalized array (a disordered copy may use the clean one).
void classify_modes(ModeSet& modes, const Lattice& reference, const ClassifyOptions& opts = {});

ModeSet analyze(const EffectiveHamiltonian& h, const Lattice& reference,
                const ClassifyOptions& opts = {});

/// Edge family of an edge-class mode: "F", "T_ij" or "E_i"; empty otherwise.
std::string edge_family(const ModeSet& modes, std::size_t i, double share = 0.25);

struct ThetaPoint {
  double theta = 0.0;
  std::array<std::size_t, 3> mode{};          ///< tracked mode per corner A, B, C
  std::array<double, 3> omega{};
  std::array<double, 3> gamma{};
  std::array<double, 3> own_weight{};         ///< corner weight on the tracked corner
  std::array<bool, 3> in_gap{};
  std::array<bool, 3> double_corner{};
  std::array<bool, 3> corner_class{};
  Interval gap{0.0, 0.0};
  std::string sector; ///< corners by descending frequency, e.g. "ABC"
  bool reorganized = false;
  std::array<int, 2> reorganized_pair{-1, -1};
};

struct CornerModeTrack {
  std::vector<ThetaPoint> points;
  std::vector<double> reorganization_angles; ///< centers of reorganized runs, in [0, pi)
};

struct TrackOptions {
  ClassifyOptions classify;
  double double_ratio = 0.5; ///< second corner weight / first for a double-corner mode
  int threads = 1;
};

CornerModeTrack sweep_theta(const Lattice& lat, const std::vector<double>& thetas,
                            const TrackOptions& opts = {});

/// Assign corners to distinct modes maximizing the summed corner weight.
std::array<std::size_t, 3> track_corners(const ModeSet& modes);

/// Shift s (radians, within [0, pi)) minimizing the mean mismatch between
/// curve `b` and curve `a` shifted by s; both sampled on a uniform grid over [0, pi).
double best_shift(const std::vector<double>& a, const std::vector<double>& b);

struct DeltaRow {
  double delta = 0.0;
  ModeSet modes;
};

std::vector<DeltaRow> sweep_delta(const LatticeSpec& base, const std::vector<double>& deltas,
                                  const Polarization& pol, const ClassifyOptions& opts = {},
                                  int threads = 1);

struct DisorderOptions {
  std::vector<double> kappas;
  int realizations = 30;
  std::uint64_t seed = 1;
  int min_corner_modes = 3;
  double min_gap_fraction = 0.1; ///< surviving gap width relative to the clean gap
  ClassifyOptions classify;
  int threads = 1;

  void validate() const;
};

struct DisorderRow {
  double kappa = 0.0;
  int realization = 0;
  std::uint64_t seed = 0;
  bool skipped = false;
  bool survived = false;
  int in_gap_corner = 0;
  Interval gap{0.0, 0.0};
};

struct DisorderResult {
  double clean_center = 0.0;
  Interval clean_gap{0.0, 0.0};
  int clean_corner_modes = 0;
  std::vector<DisorderRow> rows;
  std::vector<double> survival; ///< per kappa, over non-skipped realizations
  std::vector<int> skipped;
  std::optional<double> critical_kappa;
};

/// Per-realization seed derived from the ensemble seed.
std::uint64_t realization_seed(std::uint64_t seed, std::size_t kappa_index, std::size_t realization);

DisorderResult disorder_ensemble(const LatticeSpec& spec, const Polarization& pol,
                                 const DisorderOptions& opts);

/// First crossing of `fraction` below `level`, linearly interpolated.
std::optional<double> critical_value(const std::vector<double>& xs, const std::vector<double>& fraction,
                                     double level = 0.5);

} // namespace kagome
