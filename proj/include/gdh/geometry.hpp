#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gdh/lattice.hpp"

namespace gdh {

using Point = std::vector<double>;

inline constexpr double kIncidenceTol = 1e-9;

/// Halfspace {x : x.normal >= offset}.
struct Facet {
  Point normal;
  double offset = 0.0;
};

// Convex polytope given by both its vertex list and its facet inequalities.
// Construction only checks shapes and finiteness; validate() checks the
// geometric invariants and is run by every operation that relies on them.
class Polytope {
 public:
  Polytope() = default;
  Polytope(int d, std::vector<Point> vertices, std::vector<Facet> facets);

  /// Axis-aligned box [lo, hi].
  static Polytope box(const Point& lo, const Point& hi);
  /// Standard simplex conv{0, e_1, ..., e_d} scaled by `scale`.
  static Polytope simplex(int d, double scale = 1.0);

  int dim() const { return d_; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }

  /// Throws GeometryError when the polytope is unbounded, a vertex violates
  /// a facet, a facet touches fewer than d vertices, or vertices repeat.
  void validate() const;

  /// x.normal - offset for facet j.
  double slack(std::span<const double> x, std::size_t j) const;

 private:
  int d_ = 0;
  std::vector<Point> vertices_;
  std::vector<Facet> facets_;
};

// Vertex-by-facet incidence, row-major.
struct Incidence {
  std::size_t vertices = 0;
  std::size_t facets = 0;
  std::vector<std::uint8_t> data;

  bool operator()(std::size_t v, std::size_t f) const { return data[v * facets + f] != 0; }
  std::size_t row_sum(std::size_t v) const;
};

struct Simplicity {
  std::vector<bool> vertex_simple;
  bool simple = false;
};

Incidence incidence(const Polytope& p);
Simplicity is_simple(const Polytope& p);
double support_function(const Polytope& p, std::span<const double> theta);
/// Indices of the facets that do not contain vertex j.
std::vector<std::size_t> far_boundary(const Polytope& p, std::size_t j);

// Boolean cells on an integer box; cell k has centre origin + k * spacing.
// The stored box is trimmed to the bounding box of the true cells.
class GridMask {
 public:
  GridMask() = default;
  GridMask(Box box, std::vector<std::uint8_t> cells, double spacing = 1.0, Point origin = {});

  static GridMask full(Box box, double spacing = 1.0, Point origin = {});
  static GridMask from_indices(const std::vector<MultiIndex>& cells, double spacing = 1.0,
                               Point origin = {});

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  double spacing() const { return spacing_; }
  const Point& origin() const { return origin_; }
  std::span<const std::uint8_t> cells() const { return cells_; }

  bool contains(std::span<const int> k) const;
  /// Number of true cells.
  std::size_t size() const { return indices_.size(); }
  /// True cells in row-major order; vectors on the mask use this order.
  const std::vector<MultiIndex>& indices() const { return indices_; }
  /// Position of cell k in indices(), or npos.
  std::size_t position(std::span<const int> k) const;
  Point center(std::span<const int> k) const;

  GridMask translated(std::span<const int> shift) const;
  GridMask negated() const;

  /// Same cell set (boxes are trimmed, so this is plain equality of contents).
  bool same_cells(const GridMask& other) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  Box box_;
  std::vector<std::uint8_t> cells_;
  double spacing_ = 1.0;
  Point origin_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> positions_;
};

struct RealBox {
  Point lo;
  Point hi;
};

// Union of open boxes clipped to (-bound, bound)^d.
struct StaircaseSpec {
  int d = 0;
  std::vector<RealBox> boxes;
  double bound = 0.0;

  void validate() const;
  /// (1, bound)^d is inside the union and every box lies in the open orthant.
  bool orthant_sandwiched() const;
};

GridMask rasterize(const Polytope& p, double h, std::size_t cap = kDefaultGridCap);
GridMask rasterize(const StaircaseSpec& s, double h, std::size_t cap = kDefaultGridCap);

/// Index-set Minkowski sum A + B.
GridMask domain_sum(const GridMask& a, const GridMask& b);

/// Cells of `m` whose Chebyshev distance to the complement is greater than r.
GridMask inner_mask(const GridMask& m, int r);

struct PartitionOfUnity {
  GridMask mask;
  /// mu[j][c] for vertex j and mask cell c.
  std::vector<std::vector<double>> mu;
};

PartitionOfUnity partition_of_unity(const Polytope& p, double h, double margin,
                                    std::size_t cap = kDefaultGridCap);

enum class DomainKind { BoundedMask, OrthantSandwiched };

struct DirectionSpec {
  Point nu;

  explicit DirectionSpec(Point nu_);
};

bool validate_direction(const DirectionSpec& nu, DomainKind kind);

}  // namespace gdh
