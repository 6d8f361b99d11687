#include "kagome/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace kagome {

char to_char(Sublattice s) {
  switch (s) {
  case Sublattice::A: return 'A';
  case Sublattice::B: return 'B';
  case Sublattice::C: return 'C';
  }
  return '?';
}

void LatticeSpec::validate() const {
  if (!(imbalance > -1.0 && imbalance < 1.0))
    throw ConstraintError("imbalance delta must lie in (-1, 1), got " + std::to_string(imbalance));
  if (cells_per_side < 2)
    throw ConstraintError("cells_per_side must be >= 2, got " + std::to_string(cells_per_side));
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw ConstraintError("spacing must be positive");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw ConstraintError("wavelength must be positive");
}

Vec3 Lattice::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const auto& p : positions) c += p;
  return positions.empty() ? c : Vec3(c / static_cast<double>(positions.size()));
}

std::optional<std::size_t> Lattice::find(int n1, int n2, Sublattice s) const {
  const int L = spec.cells_per_side;
  if (n1 < 0 || n2 < 0 || n1 + n2 > L - 1) return std::nullopt;
  // cells are laid out row by row in n2, each row holding L - n2 cells
  const int row_start = n2 * L - n2 * (n2 - 1) / 2;
  const auto cell = static_cast<std::size_t>(row_start + n1);
  return 3 * cell + static_cast<std::size_t>(s);
}

Lattice build_flake(const LatticeSpec& spec) {
  spec.validate();
  const int L = spec.cells_per_side;
  const double d = spec.spacing;
  const double ra = spec.intracell();
  const double h = std::sqrt(3.0) / 2.0;

  Lattice lat;
  lat.spec = spec;
  lat.bravais = {Vec2(d, 0.0), Vec2(0.5 * d, h * d)};

  const std::array<Vec2, 3> offsets = {Vec2(0.5 * ra, h * ra), Vec2(0.0, 0.0), Vec2(ra, 0.0)};

  const auto cells = static_cast<std::size_t>(L * (L + 1) / 2);
  lat.positions.reserve(3 * cells);
  int cell = 0;
  for (int n2 = 0; n2 < L; ++n2) {
    for (int n1 = 0; n1 < L - n2; ++n1, ++cell) {
      const Vec2 origin = n1 * lat.bravais[0] + n2 * lat.bravais[1];
      for (int s = 0; s < 3; ++s) {
        const Vec2 p = origin + offsets[static_cast<std::size_t>(s)];
        lat.positions.emplace_back(p.x(), p.y(), 0.0);
        lat.sublattice.push_back(static_cast<Sublattice>(s));
        lat.cell_index.push_back(cell);
        lat.cell_coords.push_back({n1, n2});
      }
    }
  }

  lat.corner_sites = {*lat.find(0, L - 1, Sublattice::A), *lat.find(0, 0, Sublattice::B),
                      *lat.find(L - 1, 0, Sublattice::C)};

  for (int k = 0; k < L; ++k) {
    lat.edge_sets[0].push_back(*lat.find(k, 0, Sublattice::B));
    lat.edge_sets[0].push_back(*lat.find(k, 0, Sublattice::C));
    lat.edge_sets[1].push_back(*lat.find(0, k, Sublattice::B));
    lat.edge_sets[1].push_back(*lat.find(0, k, Sublattice::A));
    lat.edge_sets[2].push_back(*lat.find(L - 1 - k, k, Sublattice::C));
    lat.edge_sets[2].push_back(*lat.find(L - 1 - k, k, Sublattice::A));
  }
  return lat;
}

namespace {

// 53-bit uniform in [0, 1); independent of the standard library's distributions
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

DisorderRealization sample_disorder(const Lattice& lat, double strength, std::uint64_t seed) {
  if (!(strength >= 0.0) || !std::isfinite(strength))
    throw ConstraintError("disorder strength must be >= 0");
  DisorderRealization out;
  out.strength = strength;
  out.seed = seed;
  out.displacements.resize(lat.size(), Vec2::Zero());
  if (strength == 0.0) return out;

  const double magnitude = strength * lat.spec.intracell();
  std::mt19937_64 rng(seed);
  for (auto& disp : out.displacements) {
    const double phi = 2.0 * std::numbers::pi * unit_uniform(rng);
    disp = magnitude * Vec2(std::cos(phi), std::sin(phi));
  }
  return out;
}

Lattice displace(const Lattice& lat, const DisorderRealization& disorder) {
  if (disorder.displacements.size() != lat.size())
    throw ConstraintError("disorder realization does not match the lattice size");
  Lattice out = lat;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.positions[i].x() += disorder.displacements[i].x();
    out.positions[i].y() += disorder.displacements[i].y();
  }
  return out;
}

Lattice apply_disorder(const Lattice& lat, double strength, std::uint64_t seed) {
  return displace(lat, sample_disorder(lat, strength, seed));
}

std::string_view to_string(ImpurityAnchor a) {
  switch (a) {
  case ImpurityAnchor::CentralHexagon: return "central_hexagon";
  case ImpurityAnchor::AdjacentCell: return "adjacent_cell";
  case ImpurityAnchor::TopCornerSite: return "top_corner_site";
  }
  return "unknown";
}

ImpurityAnchor parse_anchor(std::string_view name) {
  if (name == "central_hexagon") return ImpurityAnchor::CentralHexagon;
  if (name == "adjacent_cell") return ImpurityAnchor::AdjacentCell;
  if (name == "top_corner_site") return ImpurityAnchor::TopCornerSite;
  throw ConstraintError("unknown impurity anchor '" + std::string(name) + "'");
}

std::vector<Hexagon> hexagons(const Lattice& lat) {
  std::vector<Hexagon> out;
  const int L = lat.spec.cells_per_side;
  for (int n2 = 0; n2 < L; ++n2) {
    for (int n1 = 0; n1 + n2 + 1 <= L - 1; ++n1) {
      Hexagon hex;
      hex.cell = {n1, n2};
      hex.atoms = {*lat.find(n1, n2, Sublattice::A),     *lat.find(n1, n2, Sublattice::C),
                   *lat.find(n1 + 1, n2, Sublattice::B), *lat.find(n1 + 1, n2, Sublattice::A),
                   *lat.find(n1, n2 + 1, Sublattice::C), *lat.find(n1, n2 + 1, Sublattice::B)};
      for (auto i : hex.atoms) hex.center += lat.positions[i];
      hex.center /= 6.0;
      out.push_back(hex);
    }
  }
  return out;
}

Hexagon central_hexagon(const Lattice& lat) {
  if (lat.spec.cells_per_side < 3)
    throw ConstraintError("a central hexagon needs cells_per_side >= 3");
  const auto all = hexagons(lat);
  const Vec3 c = lat.centroid();
  const double tol = 1e-9 * lat.spec.spacing;
  const Hexagon* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& hex : all) {
    const double dist = (hex.center - c).head<2>().norm();
    if (dist < best_dist - tol) {
      best_dist = dist;
      best = &hex;
    }
  }
  return *best;
}

ImpurityPlacement place_impurity(const Lattice& lat, ImpurityAnchor anchor, double height) {
  if (!(height > 0.0) || !std::isfinite(height))
    throw ConstraintError("impurity height must be > 0");
  ImpurityPlacement out;
  out.anchor = anchor;
  out.height = height;
  Vec3 base = Vec3::Zero();
  switch (anchor) {
  case ImpurityAnchor::CentralHexagon: base = central_hexagon(lat).center; break;
  case ImpurityAnchor::AdjacentCell: {
    const auto hex = central_hexagon(lat);
    const int n1 = hex.cell[0];
    const int n2 = hex.cell[1] + 1;
    for (auto s : {Sublattice::A, Sublattice::B, Sublattice::C}) base += lat.positions[*lat.find(n1, n2, s)];
    base /= 3.0;
    break;
  }
  case ImpurityAnchor::TopCornerSite: base = lat.positions[lat.corner_sites[0]]; break;
  }
  out.position = Vec3(base.x(), base.y(), base.z() + height);
  return out;
}

double min_pair_distance(const std::vector<Vec3>& positions) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      best = std::min(best, (positions[i] - positions[j]).norm());
  return best;
}

} // namespace kagome
