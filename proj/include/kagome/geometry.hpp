#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kagome/errors.hpp"

namespace kagome {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

enum class Sublattice : std::uint8_t { A = 0, B = 1, C = 2 };

char to_char(Sublattice s);

/// Geometry of a breathing-Kagome flake. Lengths are in units of the
/// transition wavelength unless `wavelength` is changed.
struct LatticeSpec {
  double spacing = 0.1;    ///< intercell spacing d = R_a + R_b
  double imbalance = 0.0;  ///< delta, with R_a = (1 + delta) d / 2
  int cells_per_side = 10; ///< L
  double wavelength = 1.0; ///< lambda0

  double intracell() const { return 0.5 * (1.0 + imbalance) * spacing; }
  double intercell() const { return spacing - intracell(); }

  /// Throws ConstraintError when any invariant is violated.
  void validate() const;
};

/// Triangular flake of L(L+1)/2 upward unit triangles.
///
/// Each cell holds B (bottom-left), C (bottom-right) and A (apex). The flake
/// apex is the A atom of cell (0, L-1); the bottom-left corner is the B atom
/// of cell (0, 0) and the bottom-right corner the C atom of cell (L-1, 0).
/// Corners are indexed by their sublattice. Edges follow the directions of
/// the primitive vectors: a1 is the bottom edge (0), a2 the left edge (pi/3),
/// a3 the right edge (2 pi/3).
struct Lattice {
  LatticeSpec spec;
  std::vector<Vec3> positions;
  std::vector<Sublattice> sublattice;
  std::vector<int> cell_index;
  std::vector<std::array<int, 2>> cell_coords;
  std::array<std::size_t, 3> corner_sites{};
  std::array<std::vector<std::size_t>, 3> edge_sets;
  std::array<Vec2, 2> bravais;

  std::size_t size() const { return positions.size(); }
  Vec3 centroid() const;
  std::optional<std::size_t> find(int n1, int n2, Sublattice s) const;
};

Lattice build_flake(const LatticeSpec& spec);

/// In-plane displacements of fixed magnitude strength * R_a.
struct DisorderRealization {
  std::vector<Vec2> displacements;
  double strength = 0.0;
  std::uint64_t seed = 0;
};

DisorderRealization sample_disorder(const Lattice& lat, double strength, std::uint64_t seed);
Lattice displace(const Lattice& lat, const DisorderRealization& disorder);
Lattice apply_disorder(const Lattice& lat, double strength, std::uint64_t seed);

enum class ImpurityAnchor { CentralHexagon, AdjacentCell, TopCornerSite };

std::string_view to_string(ImpurityAnchor a);
ImpurityAnchor parse_anchor(std::string_view name);

struct ImpurityPlacement {
  Vec3 position = Vec3::Zero();
  double height = 0.0; ///< same length unit as the lattice
  ImpurityAnchor anchor = ImpurityAnchor::CentralHexagon;

  Vec2 horizontal() const { return position.head<2>(); }
};

/// Hexagonal plaquette enclosed by cells (n1, n2), (n1 + 1, n2), (n1, n2 + 1).
struct Hexagon {
  std::array<int, 2> cell{};
  std::array<std::size_t, 6> atoms{};
  Vec3 center = Vec3::Zero();
};

std::vector<Hexagon> hexagons(const Lattice& lat);

/// Plaquette closest to the flake centroid. Unique when L = 2 (mod 3); ties
/// are broken by the lowest cell coordinates otherwise.
Hexagon central_hexagon(const Lattice& lat);

ImpurityPlacement place_impurity(const Lattice& lat, ImpurityAnchor anchor, double height);

double min_pair_distance(const std::vector<Vec3>& positions);

} // namespace kagome
