#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kagome/hamiltonian.hpp"

namespace kagome {

enum class PropagationMethod { Eigendecomposition, MatrixExponential };

std::string_view to_string(PropagationMethod m);

/// psi(t) = exp(-i H t) psi0 for a fixed H. Uses one eigendecomposition
/// unless the eigenbasis condition number exceeds `condition_limit`, in
/// which case each call takes a dense matrix exponential.
class Propagator {
public:
  explicit Propagator(const CMat& h, double condition_limit = 1e12);

  CVec apply(const CVec& psi0, double t) const;
  PropagationMethod method() const { return method_; }
  double condition() const { return condition_; }

private:
  CMat h_;
  CMat vectors_;
  CVec values_;
  Eigen::PartialPivLU<CMat> lu_;
  PropagationMethod method_ = PropagationMethod::Eigendecomposition;
  double condition_ = 1.0;
};

using SectorWeights = std::array<double, 6>;

struct DynamicsTrace {
  std::vector<double> times;
  std::vector<CVec> states;
  std::vector<Eigen::VectorXd> populations;
  std::vector<double> total_norm;
  PropagationMethod method = PropagationMethod::Eigendecomposition;
  double condition = 1.0;
  // filled by annotate()
  std::vector<SectorWeights> sectors;
  std::vector<bool> sectors_flagged;
  std::vector<double> chirality;
};

CVec impurity_excited(const EffectiveHamiltonian& h);
/// (|sigma+> + |sigma->) / sqrt(2) for a V-type impurity.
CVec v_type_symmetric(const EffectiveHamiltonian& h);
CVec site_excited(const EffectiveHamiltonian& h, std::size_t index);

DynamicsTrace evolve(const EffectiveHamiltonian& h, const CVec& psi0, const std::vector<double>& times);

/// Array population binned into six 60-degree sectors about `anchor`,
/// sector s centered on angle s * pi / 3. Atoms on a boundary are split
/// between the two sectors. Normalized by the array population; returns
/// zeros and sets `flagged` when that population vanishes.
SectorWeights directional_weights(const Lattice& lat, const Eigen::VectorXd& array_population,
                                  const Vec2& anchor, bool* flagged = nullptr);

/// Azimuthal flux of the coherent probability current about `anchor`:
/// (clockwise - counterclockwise) / (clockwise + counterclockwise).
double chirality(const Lattice& lat, const CMat& h, const CVec& psi, const Vec2& anchor);

void annotate(DynamicsTrace& trace, const Lattice& lat, const EffectiveHamiltonian& h, const Vec2& anchor);

enum class DetuningRule { Fixed, EdgeBandMedian };

struct ScenarioConfig {
  std::string name;
  LatticeSpec lattice;
  Polarization array_polarization = Polarization::pi();
  ImpuritySpec impurity;
  ImpurityAnchor anchor = ImpurityAnchor::CentralHexagon;
  double height_over_d = 0.4;
  double snapshot_time = 0.0;
  int snapshots = 5; ///< evenly spaced times ending at snapshot_time
  DetuningRule detuning_rule = DetuningRule::Fixed;
  std::map<std::string, std::string> notes;
};

std::vector<std::string> scenario_names();
ScenarioConfig scenario_config(const std::string& name);

struct ScenarioResult {
  ScenarioConfig config;
  Lattice lattice;
  EffectiveHamiltonian hamiltonian;
  DynamicsTrace trace;
  Vec2 anchor = Vec2::Zero();
  double detuning = 0.0; ///< resolved impurity detuning
  /// Population on the two edges meeting at the top corner, excluding the
  /// corner atom, at each snapshot: {left (a2), right (a3)}.
  std::vector<std::array<double, 2>> side_edges;
};

ScenarioResult emission_scenario(const ScenarioConfig& config);
ScenarioResult emission_scenario(const std::string& name);

/// max(left, right) / (left + right)
double edge_dominance(const std::array<double, 2>& sides);

} // namespace kagome
