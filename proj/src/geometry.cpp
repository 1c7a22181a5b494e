#include "gdh/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "gdh/errors.hpp"
#include "gdh/fft.hpp"

namespace gdh {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Calls fn on every k-subset of {0..n-1}; stops early when fn returns true.
template <class Fn>
bool any_subset(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return false;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    if (fn(idx)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool unbounded(int d, const std::vector<Facet>& facets) {
  const auto nf = facets.size();
  Eigen::MatrixXd n(static_cast<Eigen::Index>(nf), d);
  for (std::size_t j = 0; j < nf; ++j) {
    for (int i = 0; i < d; ++i) n(static_cast<Eigen::Index>(j), i) = facets[j].normal[i] / norm2(facets[j].normal);
  }
  if (nf == 0) return true;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(n);
  lu.setThreshold(1e-10);
  if (lu.rank() < d) return true;

  // A pointed cone {u : N u >= 0} is trivial iff it has no extreme ray, and
  // every extreme ray is cut out by d-1 independent facet normals.
  const auto k = static_cast<std::size_t>(d - 1);
  return any_subset(nf, k, [&](const std::vector<std::size_t>& sel) {
    Eigen::VectorXd u;
    if (k == 0) {
      u = Eigen::VectorXd::Ones(1);
    } else {
      Eigen::MatrixXd s(static_cast<Eigen::Index>(k), d);
      for (std::size_t r = 0; r < k; ++r) s.row(static_cast<Eigen::Index>(r)) = n.row(static_cast<Eigen::Index>(sel[r]));
      Eigen::FullPivLU<Eigen::MatrixXd> slu(s);
      slu.setThreshold(1e-10);
      if (slu.rank() != static_cast<Eigen::Index>(k)) return false;
      u = slu.kernel().col(0).normalized();
    }
    const Eigen::VectorXd nu = n * u;
    return nu.minCoeff() >= -1e-10 || nu.maxCoeff() <= 1e-10;
  });
}

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

bool connected(const Box& box, std::span<const std::uint8_t> cells, std::size_t count) {
  if (count == 0) return false;
  std::vector<std::uint8_t> seen(cells.size(), 0);
  std::size_t start = 0;
  while (!cells[start]) ++start;
  std::deque<std::size_t> queue{start};
  seen[start] = 1;
  std::size_t reached = 0;
  const int d = box.dim();
  while (!queue.empty()) {
    const std::size_t off = queue.front();
    queue.pop_front();
    ++reached;
    MultiIndex k = box.index(off);
    for (int ax = 0; ax < d; ++ax) {
      for (int step : {-1, 1}) {
        k[ax] += step;
        if (box.contains(k)) {
          const auto nb = box.offset(k);
          if (cells[nb] && !seen[nb]) {
            seen[nb] = 1;
            queue.push_back(nb);
          }
        }
        k[ax] -= step;
      }
    }
  }
  return reached == count;
}

}  // namespace

Polytope::Polytope(int d, std::vector<Point> vertices, std::vector<Facet> facets)
    : d_(d), vertices_(std::move(vertices)), facets_(std::move(facets)) {
  if (d_ < 1) throw PreconditionError("polytope: dimension must be >= 1");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (static_cast<int>(vertices_[i].size()) != d_ || !all_finite(vertices_[i])) {
      throw PreconditionError("polytope: vertex " + std::to_string(i) + " has wrong length or non-finite entries");
    }
  }
  for (std::size_t j = 0; j < facets_.size(); ++j) {
    const auto& f = facets_[j];
    if (static_cast<int>(f.normal.size()) != d_ || !all_finite(f.normal) || !std::isfinite(f.offset)) {
      throw PreconditionError("polytope: facet " + std::to_string(j) + " has wrong length or non-finite entries");
    }
    if (norm2(f.normal) < 1e-12) {
      throw GeometryError("polytope: facet " + std::to_string(j) + " has a degenerate (zero) normal");
    }
  }
}

Polytope Polytope::box(const Point& lo, const Point& hi) {
  const int d = static_cast<int>(lo.size());
  std::vector<Facet> facets;
  for (int i = 0; i < d; ++i) {
    Point e(d, 0.0);
    e[i] = 1.0;
    facets.push_back({e, lo[i]});
    e[i] = -1.0;
    facets.push_back({e, -hi[i]});
  }
  std::vector<Point> verts;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Point v(d);
    for (int i = 0; i < d; ++i) v[i] = (mask >> (d - 1 - i)) & 1 ? hi[i] : lo[i];
    verts.push_back(std::move(v));
  }
  return Polytope(d, std::move(verts), std::move(facets));
}

Polytope Polytope::simplex(int d, double scale) {
  std::vector<Point> verts{Point(d, 0.0)};
  std::vector<Facet> facets;
  for (int i = 0; i < d; ++i) {
    Point v(d, 0.0);
    v[i] = scale;
    verts.push_back(v);
    Point e(d, 0.0);
    e[i] = 1.0;
    facets.push_back({e, 0.0});
  }
  facets.push_back({Point(d, -1.0), -scale});
  return Polytope(d, std::move(verts), std::move(facets));
}

double Polytope::slack(std::span<const double> x, std::size_t j) const {
  return dot(x, facets_[j].normal) - facets_[j].offset;
}

void Polytope::validate() const {
  if (vertices_.size() < static_cast<std::size_t>(d_ + 1)) {
    throw GeometryError("polytope: needs at least d+1 vertices");
  }
  if (unbounded(d_, facets_)) throw GeometryError("polytope: facet inequalities describe an unbounded set");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    for (std::size_t k = i + 1; k < vertices_.size(); ++k) {
      double dist = 0.0;
      for (int a = 0; a < d_; ++a) dist = std::max(dist, std::abs(vertices_[i][a] - vertices_[k][a]));
      if (dist <= kIncidenceTol) {
        throw GeometryError("polytope: vertices " + std::to_string(i) + " and " + std::to_string(k) + " coincide");
      }
    }
  }
  for (std::size_t j = 0; j < facets_.size(); ++j) {
    int tight = 0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      const double s = slack(vertices_[i], j);
      if (s < -kIncidenceTol) {
        throw GeometryError("polytope: vertex " + std::to_string(i) + " violates facet " + std::to_string(j));
      }
      if (s <= kIncidenceTol) ++tight;
    }
    if (tight < d_) {
      throw GeometryError("polytope: facet " + std::to_string(j) + " is tight at fewer than d vertices");
    }
  }
}

std::size_t Incidence::row_sum(std::size_t v) const {
  std::size_t s = 0;
  for (std::size_t f = 0; f < facets; ++f) s += data[v * facets + f];
  return s;
}

Incidence incidence(const Polytope& p) {
  p.validate();
  Incidence inc{p.vertices().size(), p.facets().size(), {}};
  inc.data.resize(inc.vertices * inc.facets);
  for (std::size_t v = 0; v < inc.vertices; ++v) {
    for (std::size_t f = 0; f < inc.facets; ++f) {
      inc.data[v * inc.facets + f] = std::abs(p.slack(p.vertices()[v], f)) <= kIncidenceTol;
    }
  }
  return inc;
}

Simplicity is_simple(const Polytope& p) {
  const auto inc = incidence(p);
  Simplicity out;
  out.simple = true;
  for (std::size_t v = 0; v < inc.vertices; ++v) {
    const bool s = inc.row_sum(v) == static_cast<std::size_t>(p.dim());
    out.vertex_simple.push_back(s);
    out.simple = out.simple && s;
  }
  return out;
}

double support_function(const Polytope& p, std::span<const double> theta) {
  p.validate();
  if (static_cast<int>(theta.size()) != p.dim()) throw PreconditionError("support_function: dimension mismatch");
  double best = -INFINITY;
  for (const auto& v : p.vertices()) best = std::max(best, dot(v, theta));
  return best;
}

std::vector<std::size_t> far_boundary(const Polytope& p, std::size_t j) {
  if (j >= p.vertices().size()) {
    throw PreconditionError("far_boundary: vertex index " + std::to_string(j) + " out of range");
  }
  const auto inc = incidence(p);
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < inc.facets; ++f) {
    if (!inc(j, f)) out.push_back(f);
  }
  return out;
}

GridMask::GridMask(Box box, std::vector<std::uint8_t> cells, double spacing, Point origin)
    : spacing_(spacing), origin_(std::move(origin)) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw PreconditionError("mask: spacing must be positive");
  if (cells.size() != box.count()) throw PreconditionError("mask: cell array does not match box");
  if (origin_.empty()) origin_.assign(box.dim(), 0.0);
  if (static_cast<int>(origin_.size()) != box.dim()) throw PreconditionError("mask: origin dimension mismatch");

  const int d = box.dim();
  MultiIndex lo(d, INT32_MAX), hi(d, INT32_MIN);
  std::size_t count = 0;
  for (std::size_t off = 0; off < cells.size(); ++off) {
    if (!cells[off]) continue;
    ++count;
    const auto k = box.index(off);
    for (int i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], k[i]);
      hi[i] = std::max(hi[i], k[i]);
    }
  }
  if (count == 0) throw GeometryError("mask: no cells are set (empty domain)");
  if (!connected(box, cells, count)) throw GeometryError("mask: cells are not axis-connected");

  box_ = Box(lo, hi);
  if (box_ == box) {
    cells_ = std::move(cells);
  } else {
    cells_.assign(box_.count(), 0);
    MultiIndex k = box_.lo;
    std::size_t off = 0;
    do {
      cells_[off++] = cells[box.offset(k)];
    } while (next_index(box_, k));
  }
  positions_.assign(cells_.size(), npos);
  indices_.reserve(count);
  for (std::size_t off = 0; off < cells_.size(); ++off) {
    if (cells_[off]) {
      positions_[off] = indices_.size();
      indices_.push_back(box_.index(off));
    }
  }
}

GridMask GridMask::full(Box box, double spacing, Point origin) {
  const auto n = box.count();
  return GridMask(std::move(box), std::vector<std::uint8_t>(n, 1), spacing, std::move(origin));
}

GridMask GridMask::from_indices(const std::vector<MultiIndex>& cells, double spacing, Point origin) {
  if (cells.empty()) throw GeometryError("mask: no cells are set (empty domain)");
  const auto d = cells.front().size();
  MultiIndex lo = cells.front(), hi = cells.front();
  for (const auto& k : cells) {
    if (k.size() != d) throw PreconditionError("mask: cell indices have mixed dimensions");
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], k[i]);
      hi[i] = std::max(hi[i], k[i]);
    }
  }
  Box box(lo, hi);
  std::vector<std::uint8_t> flags(box.count(), 0);
  for (const auto& k : cells) flags[box.offset(k)] = 1;
  return GridMask(std::move(box), std::move(flags), spacing, std::move(origin));
}

bool GridMask::contains(std::span<const int> k) const {
  return box_.contains(k) && cells_[box_.offset(k)] != 0;
}

std::size_t GridMask::position(std::span<const int> k) const {
  if (!box_.contains(k)) return npos;
  return positions_[box_.offset(k)];
}

Point GridMask::center(std::span<const int> k) const {
  Point c(origin_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += k[i] * spacing_;
  return c;
}

GridMask GridMask::translated(std::span<const int> shift) const {
  return GridMask(box_.translated(shift), cells_, spacing_, origin_);
}

GridMask GridMask::negated() const {
  std::vector<std::uint8_t> rev(cells_.rbegin(), cells_.rend());
  return GridMask(box_.negated(), std::move(rev), spacing_, origin_);
}

bool GridMask::same_cells(const GridMask& other) const {
  return box_ == other.box_ && cells_ == other.cells_;
}

void StaircaseSpec::validate() const {
  if (d < 1) throw PreconditionError("staircase: dimension must be >= 1");
  if (!(bound > 0.0) || !std::isfinite(bound)) throw PreconditionError("staircase: bound must be positive");
  if (boxes.empty()) throw PreconditionError("staircase: at least one box required");
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const auto& bx = boxes[b];
    if (static_cast<int>(bx.lo.size()) != d || static_cast<int>(bx.hi.size()) != d) {
      throw PreconditionError("staircase: box " + std::to_string(b) + " has wrong dimension");
    }
    for (int i = 0; i < d; ++i) {
      if (!(bx.lo[i] < bx.hi[i]) || std::isnan(bx.lo[i]) || std::isnan(bx.hi[i])) {
        throw PreconditionError("staircase: box " + std::to_string(b) + " has lo >= hi");
      }
    }
  }
}

bool StaircaseSpec::orthant_sandwiched() const {
  validate();
  bool covers = false;
  for (const auto& bx : boxes) {
    bool inside = true, big = true;
    for (int i = 0; i < d; ++i) {
      inside = inside && bx.lo[i] >= 0.0;
      big = big && bx.lo[i] <= 1.0 && bx.hi[i] >= bound;
    }
    if (!inside) return false;
    covers = covers || big;
  }
  return covers;
}

GridMask rasterize(const Polytope& p, double h, std::size_t cap) {
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("rasterize: spacing must be positive");
  if (p.vertices().empty()) throw GeometryError("rasterize: polytope has no vertices (empty mask)");
  const int d = p.dim();
  MultiIndex lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    double mn = INFINITY, mx = -INFINITY;
    for (const auto& v : p.vertices()) {
      mn = std::min(mn, v[i]);
      mx = std::max(mx, v[i]);
    }
    if (std::abs(mn / h) > 1e9 || std::abs(mx / h) > 1e9) throw ResourceError("rasterize: index range too large");
    lo[i] = static_cast<int>(std::floor(mn / h));
    hi[i] = static_cast<int>(std::ceil(mx / h));
  }
  Box box(lo, hi);
  checked_product(box.extents(), cap, "rasterize");
  std::vector<std::uint8_t> cells(box.count(), 0);
  std::vector<double> tol(p.facets().size());
  for (std::size_t j = 0; j < tol.size(); ++j) {
    tol[j] = 1e-12 * std::max({1.0, std::abs(p.facets()[j].offset), norm2(p.facets()[j].normal)});
  }
  MultiIndex k = box.lo;
  Point x(d);
  std::size_t off = 0;
  do {
    for (int i = 0; i < d; ++i) x[i] = k[i] * h;
    bool in = true;
    for (std::size_t j = 0; j < tol.size() && in; ++j) in = p.slack(x, j) > tol[j];
    cells[off++] = in;
  } while (next_index(box, k));
  return GridMask(std::move(box), std::move(cells), h);
}

GridMask rasterize(const StaircaseSpec& s, double h, std::size_t cap) {
  s.validate();
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("rasterize: spacing must be positive");
  const int d = s.d;
  MultiIndex lo(d, INT32_MAX), hi(d, INT32_MIN);
  bool any = false;
  for (const auto& bx : s.boxes) {
    MultiIndex blo(d), bhi(d);
    bool nonempty = true;
    for (int i = 0; i < d; ++i) {
      const double a = std::max(bx.lo[i], -s.bound), b = std::min(bx.hi[i], s.bound);
      if (!(a < b)) nonempty = false;
      if (std::abs(a / h) > 1e9 || std::abs(b / h) > 1e9) throw ResourceError("rasterize: index range too large");
      blo[i] = static_cast<int>(std::floor(a / h));
      bhi[i] = static_cast<int>(std::ceil(b / h));
    }
    if (!nonempty) continue;
    any = true;
    for (int i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], blo[i]);
      hi[i] = std::max(hi[i], bhi[i]);
    }
  }
  if (!any) throw GeometryError("rasterize: staircase is empty inside the bounding box");
  Box box(lo, hi);
  checked_product(box.extents(), cap, "rasterize");
  std::vector<std::uint8_t> cells(box.count(), 0);
  MultiIndex k = box.lo;
  std::size_t off = 0;
  do {
    bool in = false;
    for (const auto& bx : s.boxes) {
      bool inside = true;
      for (int i = 0; i < d && inside; ++i) {
        const double c = k[i] * h;
        inside = c > bx.lo[i] && c < bx.hi[i] && std::abs(c) < s.bound;
      }
      if (inside) {
        in = true;
        break;
      }
    }
    cells[off++] = in;
  } while (next_index(box, k));
  return GridMask(std::move(box), std::move(cells), h);
}

GridMask domain_sum(const GridMask& a, const GridMask& b) {
  if (a.dim() != b.dim()) throw PreconditionError("domain_sum: dimension mismatch");
  if (std::abs(a.spacing() - b.spacing()) > 1e-12 * a.spacing()) {
    throw PreconditionError("domain_sum: spacing mismatch");
  }
  const int d = a.dim();
  const Box out = a.box().plus(b.box());
  std::vector<int> dims(d);
  for (int i = 0; i < d; ++i) dims[i] = good_fft_size(out.extent(i));
  const std::size_t total = checked_product(dims, kDefaultGridCap, "domain_sum");
  const Box pad = Box::from_extents(MultiIndex(d, 0), dims);

  auto load = [&](const GridMask& m) {
    std::vector<Complex> buf(total);
    for (const auto& k : m.indices()) {
      MultiIndex r(d);
      for (int i = 0; i < d; ++i) r[i] = k[i] - m.box().lo[i];
      buf[pad.offset(r)] = 1.0;
    }
    return buf;
  };
  FftPlan plan(dims);
  auto fa = load(a), fb = load(b);
  plan.forward(fa);
  plan.forward(fb);
  for (std::size_t i = 0; i < total; ++i) fa[i] *= fb[i];
  plan.backward(fa);

  std::vector<std::uint8_t> cells(out.count(), 0);
  MultiIndex z = out.lo, r(d);
  std::size_t off = 0;
  do {
    for (int i = 0; i < d; ++i) r[i] = z[i] - out.lo[i];
    cells[off++] = fa[pad.offset(r)].real() / static_cast<double>(total) > 0.5;
  } while (next_index(out, z));

  Point origin(a.origin());
  for (int i = 0; i < d; ++i) origin[i] += b.origin()[i];
  return GridMask(out, std::move(cells), a.spacing(), std::move(origin));
}

GridMask inner_mask(const GridMask& m, int r) {
  if (r < 0) throw PreconditionError("inner_mask: radius must be >= 0");
  if (r == 0) return m;
  const int d = m.dim();
  std::vector<std::uint8_t> keep(m.box().count(), 0);
  const Box ball(MultiIndex(d, -r), MultiIndex(d, r));
  MultiIndex s(d);
  for (const auto& k : m.indices()) {
    bool ok = true;
    MultiIndex t = ball.lo;
    do {
      for (int i = 0; i < d; ++i) s[i] = k[i] + t[i];
      ok = m.contains(s);
    } while (ok && next_index(ball, t));
    keep[m.box().offset(k)] = ok;
  }
  return GridMask(m.box(), std::move(keep), m.spacing(), m.origin());
}

PartitionOfUnity partition_of_unity(const Polytope& p, double h, double margin, std::size_t cap) {
  if (!(margin > 0.0)) throw PreconditionError("partition_of_unity: margin must be positive");
  if (!(h < margin / 2.0)) throw PreconditionError("partition_of_unity: spacing must be below margin/2");
  const auto inc = incidence(p);
  const auto nv = p.vertices().size();

  std::vector<std::vector<std::size_t>> far(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    for (std::size_t f = 0; f < inc.facets; ++f) {
      if (!inc(j, f)) far[j].push_back(f);
    }
    if (far[j].empty()) throw GeometryError("partition_of_unity: vertex " + std::to_string(j) + " lies on every facet");
    for (auto f : far[j]) {
      const double dist = p.slack(p.vertices()[j], f) / norm2(p.facets()[f].normal);
      if (!(dist > 2.0 * margin)) {
        throw GeometryError("partition_of_unity: vertex " + std::to_string(j) +
                            " is within 2*margin of its far boundary; use a smaller margin");
      }
    }
  }

  PartitionOfUnity out{rasterize(p, h, cap), std::vector<std::vector<double>>(nv)};
  const auto& cells = out.mask.indices();
  for (auto& mu : out.mu) mu.assign(cells.size(), 0.0);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Point x = out.mask.center(cells[c]);
    double total = 0.0;
    for (std::size_t j = 0; j < nv; ++j) {
      double dist = INFINITY;
      for (auto f : far[j]) dist = std::min(dist, p.slack(x, f) / norm2(p.facets()[f].normal));
      const double w = smoothstep((dist - margin) / margin);
      out.mu[j][c] = w;
      total += w;
    }
    if (!(total > 0.0)) {
      throw GeometryError("partition_of_unity: no bump covers a cell near the centre; use a smaller margin");
    }
    for (std::size_t j = 0; j < nv; ++j) out.mu[j][c] /= total;
  }
  return out;
}

DirectionSpec::DirectionSpec(Point nu_) : nu(std::move(nu_)) {
  if (nu.empty() || !all_finite(nu) || norm2(nu) == 0.0) {
    throw PreconditionError("direction: nu must be a finite nonzero vector");
  }
}

bool validate_direction(const DirectionSpec& nu, DomainKind kind) {
  if (kind == DomainKind::BoundedMask) return true;
  return std::all_of(nu.nu.begin(), nu.nu.end(), [](double v) { return v < 0.0; });
}

}  // namespace gdh
