#include "gdh/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string_view>

#include "gdh/cli.hpp"
#include "gdh/coeffs.hpp"
#include "gdh/errors.hpp"
#include "gdh/factorization.hpp"
#include "gdh/nehari.hpp"
#include "gdh/norms.hpp"

namespace gdh {

namespace gen {

Complex gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  return {re, n(rng)};
}

Kernel kernel(std::mt19937_64& rng, const Box& box) {
  std::vector<Complex> v(box.count());
  for (auto& x : v) x = gaussian(rng);
  return Kernel(box, std::move(v));
}

Box box(std::mt19937_64& rng, int d, int max_extent, int max_offset) {
  std::uniform_int_distribution<int> ext(1, max_extent), off(-max_offset, max_offset);
  MultiIndex lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = off(rng);
    hi[i] = lo[i] + ext(rng) - 1;
  }
  return Box(lo, hi);
}

GridMask blob(std::mt19937_64& rng, int d, int cells, MultiIndex start) {
  if (start.empty()) start.assign(d, 0);
  std::set<MultiIndex> set{start};
  std::vector<MultiIndex> list{start};
  std::uniform_int_distribution<int> axis(0, d - 1), sign(0, 1);
  while (static_cast<int>(list.size()) < cells) {
    MultiIndex k = list[std::uniform_int_distribution<std::size_t>(0, list.size() - 1)(rng)];
    k[axis(rng)] += sign(rng) ? 1 : -1;
    if (set.insert(k).second) list.push_back(k);
  }
  return GridMask::from_indices(list);
}

Polytope polygon(std::mt19937_64& rng, int n, const Point& center, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> ang;
  // Rejection keeps consecutive angles apart so the polygon is not sliver-thin.
  while (true) {
    ang.clear();
    for (int i = 0; i < n; ++i) ang.push_back(2.0 * std::numbers::pi * u(rng));
    std::sort(ang.begin(), ang.end());
    double gap = 2.0 * std::numbers::pi - ang.back() + ang.front();
    for (int i = 1; i < n; ++i) gap = std::min(gap, ang[i] - ang[i - 1]);
    if (gap > 0.6 / n * std::numbers::pi) break;
  }
  std::vector<Point> verts;
  for (double a : ang) verts.push_back({center[0] + radius * std::cos(a), center[1] + radius * std::sin(a)});
  std::vector<Facet> facets;
  for (int i = 0; i < n; ++i) {
    const auto& p = verts[i];
    const auto& q = verts[(i + 1) % n];
    Point nrm{-(q[1] - p[1]), q[0] - p[0]};
    const double len = std::hypot(nrm[0], nrm[1]);
    nrm[0] /= len;
    nrm[1] /= len;
    facets.push_back({nrm, nrm[0] * p[0] + nrm[1] * p[1]});
  }
  return Polytope(2, std::move(verts), std::move(facets));
}

}  // namespace gen

namespace {

using Clock = std::chrono::steady_clock;

std::vector<Complex> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::vector<Complex> v(n);
  for (auto& x : v) x = gen::gaussian(rng);
  return v;
}

double rel_diff(std::span<const Complex> a, std::span<const Complex> b, double floor = 0.0) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  den = std::max(std::sqrt(den), floor);
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num) / den;
}

double l2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

double l1(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::abs(x);
  return s;
}

std::vector<Complex> matvec(const Eigen::MatrixXcd& m, std::span<const Complex> g) {
  Eigen::VectorXcd x(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) x(static_cast<Eigen::Index>(i)) = g[i];
  const Eigen::VectorXcd y = m * x;
  return std::vector<Complex>(y.data(), y.data() + y.size());
}

void record(SuiteReport& out, std::string name, Json params, double deviation, double tolerance, std::string anchor) {
  CaseRecord c;
  c.name = std::move(name);
  c.params = std::move(params);
  c.deviation = deviation;
  c.tolerance = tolerance;
  c.passed = std::isfinite(deviation) && deviation <= tolerance;
  c.anchor = std::move(anchor);
  out.cases.push_back(std::move(c));
}

std::string tag(const std::string& base, int i) { return base + "#" + std::to_string(i); }

// Distance from a 2-D point to the segment pq.
double segment_distance(const Point& x, const Point& p, const Point& q) {
  const double dx = q[0] - p[0], dy = q[1] - p[1];
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((x[0] - p[0]) * dx + (x[1] - p[1]) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(x[0] - p[0] - t * dx, x[1] - p[1] - t * dy);
}

// The two vertices incident to each facet of a polygon.
std::vector<std::pair<std::size_t, std::size_t>> facet_ends(const Polytope& p) {
  const auto inc = incidence(p);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t f = 0; f < inc.facets; ++f) {
    std::vector<std::size_t> vs;
    for (std::size_t v = 0; v < inc.vertices; ++v) {
      if (inc(v, f)) vs.push_back(v);
    }
    out.emplace_back(vs.at(0), vs.at(1));
  }
  return out;
}

// Partition of unity with the largest margin the polygon admits.
std::optional<PartitionOfUnity> build_partition(const Polytope& poly, double& margin) {
  margin = 1e300;
  for (std::size_t j = 0; j < poly.vertices().size(); ++j) {
    for (auto f : far_boundary(poly, j)) margin = std::min(margin, poly.slack(poly.vertices()[j], f));
  }
  margin /= 4.0;
  double h = margin / 2.5;
  for (int attempt = 0; attempt < 10; ++attempt) {
    try {
      return partition_of_unity(poly, h, margin);
    } catch (const GeometryError& e) {
      if (std::string_view(e.what()).find("connected") != std::string_view::npos) {
        h *= 0.7;
      } else {
        margin /= 2.0;
        h = std::min(h, margin / 2.5);
      }
    }
  }
  return std::nullopt;
}

// ---- suites ---------------------------------------------------------------

void suite_trivial(std::uint64_t seed, int count, SuiteReport& out) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const int d = 1 + i % 2;
    const auto mask = gen::blob(rng, d, 1 + static_cast<int>(rng() % 40));
    const CorrelationOperator id(Kernel::delta(MultiIndex(d, 0)), mask, mask, Flavor::Toeplitz);
    const auto g = random_vector(rng, mask.size());
    record(out, tag("identity-apply", i), {{"cells", mask.size()}}, rel_diff(id.apply(g), g), 0.0 + 1e-15,
           "delta kernel acts as the identity");
    record(out, tag("identity-norm", i), {{"cells", mask.size()}}, std::abs(norm_dense(id) - 1.0), 1e-10,
           "delta kernel has norm one");

    const Box reach = mask.box().plus(mask.box());
    const auto ones = hankel(Kernel::constant(reach, 1.0), mask);
    const double n = static_cast<double>(mask.size());
    record(out, tag("ones-norm", i), {{"cells", mask.size()}}, std::abs(norm_dense(ones) - n), 1e-8 * n,
           "all-ones kernel is rank one with norm n");
    const auto og = ones.apply(g);
    Complex s{};
    for (const auto& v : g) s += v;
    double dev = 0.0;
    for (const auto& v : og) dev = std::max(dev, std::abs(v - s));
    record(out, tag("ones-apply", i), {{"cells", mask.size()}}, dev, 1e-12 * (1.0 + std::abs(s)) * n,
           "all-ones kernel sums its input");

    const Window w(std::vector<int>(d, 1 + i % 3));
    const auto sym = eval_symbol(MultiSequence::delta(w), std::vector<int>(d, 8));
    double sdev = 0.0;
    for (const auto& v : sym.values) sdev = std::max(sdev, std::abs(v - 1.0));
    record(out, tag("delta-symbol", i), {{"d", d}}, sdev, 1e-15, "delta symbol is constant");

    const auto cert = certificate_E_eps(Kernel::delta(MultiIndex(d, 0)), mask,
                                        TestFunctionSpec{Point(d, 0.17), DirectionSpec(Point(d, 1.0)), 0.05},
                                        DomainKind::BoundedMask);
    record(out, tag("delta-certificate", i), {{"cells", mask.size()}}, std::abs(cert - 1.0), 1e-12,
           "identity Rayleigh quotient");
  }
  const auto ext = extend_and_certify(MultiSequence::delta(Window({2})));
  record(out, "delta-extension", {{"n", 2}}, std::abs(ext.ratio - 1.0) + std::abs(ext.ext.t_grid - 1.0), 1e-9,
         "delta sequence extends by itself");
  const auto norms = section_norm_growth(MultiSequence::delta(Window({1})), {1, 4, 16, 64});
  double ndev = 0.0;
  for (double v : norms) ndev = std::max(ndev, std::abs(v - 1.0));
  record(out, "delta-sections", {{"sizes", {1, 4, 16, 64}}}, ndev, 1e-10, "identity sections");
}

void suite_coeffs(std::uint64_t seed, int count, SuiteReport& out) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const int d = 1 + i % 2;
    std::vector<int> radii(d), grid(d);
    for (int k = 0; k < d; ++k) {
      radii[k] = 1 + static_cast<int>(rng() % 4);
      grid[k] = 2 * radii[k] - 1 + static_cast<int>(rng() % 9);
    }
    const Window w(radii);
    auto a = MultiSequence::zeros(w), b = MultiSequence::zeros(w), c = MultiSequence::zeros(w);
    const Complex alpha = gen::gaussian(rng), beta = gen::gaussian(rng);
    const Box box = w.box();
    MultiIndex n = box.lo;
    do {
      a.set(n, gen::gaussian(rng));
      b.set(n, gen::gaussian(rng));
      c.set(n, alpha * a.at(n) + beta * b.at(n));
    } while (next_index(box, n));
    const auto sa = eval_symbol(a, grid), sb = eval_symbol(b, grid), sc = eval_symbol(c, grid);
    double lin = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < sa.values.size(); ++j) {
      lin = std::max(lin, std::abs(sc.values[j] - alpha * sa.values[j] - beta * sb.values[j]));
      scale = std::max(scale, std::abs(sc.values[j]));
    }
    const Json params{{"d", d}, {"radii", radii}, {"grid", grid}};
    record(out, tag("linearity", i), params, lin / std::max(scale, 1e-300), 1e-12, "symbol map is linear");

    const auto back = coeffs_from_grid(sa, w);
    double rt = 0.0;
    for (std::size_t j = 0; j < a.coeffs().size(); ++j) rt = std::max(rt, std::abs(back.coeffs()[j] - a.coeffs()[j]));
    record(out, tag("roundtrip", i), params, rt / a.max_abs(), 1e-12, "inverse transform recovers the window");

    // Every coefficient is an average of symbol samples on an alias-free grid.
    record(out, tag("coefficient-bound", i), params, a.max_abs() - sa.max_abs(), 1e-12,
           "coefficients are bounded by the symbol sup");
  }
}

void suite_geometry(std::uint64_t seed, int count, SuiteReport& out) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < count; ++i) {
    const auto poly = gen::polygon(rng, 3 + static_cast<int>(rng() % 5), {u(rng), u(rng)}, 1.0 + u(rng) * 0.5);
    const auto inc = incidence(poly);
    double worst = 0.0;
    for (std::size_t v = 0; v < inc.vertices; ++v) worst = std::max(worst, 2.0 - static_cast<double>(inc.row_sum(v)));
    record(out, tag("incidence-rows", i), {{"vertices", inc.vertices}}, worst, 0.0, "each vertex lies on >= d facets");

    const Point th{u(rng), u(rng)};
    const double lam = std::ldexp(1.0, static_cast<int>(rng() % 9) - 4);
    const double h1 = support_function(poly, th);
    const double h2 = support_function(poly, Point{lam * th[0], lam * th[1]});
    record(out, tag("support-homogeneous", i), {{"lambda", lam}}, std::abs(h2 - lam * h1), 0.0,
           "support function is positively homogeneous");

    const int d = 1 + i % 2;
    const auto a = gen::blob(rng, d, 1 + static_cast<int>(rng() % 12));
    const auto b = gen::blob(rng, d, 1 + static_cast<int>(rng() % 12));
    const auto c = gen::blob(rng, d, 1 + static_cast<int>(rng() % 6));
    const bool comm = domain_sum(a, b).same_cells(domain_sum(b, a));
    const bool assoc = domain_sum(domain_sum(a, b), c).same_cells(domain_sum(a, domain_sum(b, c)));
    record(out, tag("sum-algebra", i), {{"d", d}}, comm && assoc ? 0.0 : 1.0, 0.0,
           "Minkowski sum is commutative and associative");

    double margin = 0.0;
    const auto built = build_partition(poly, margin);
    if (!built) {
      record(out, tag("partition", i), {{"vertices", inc.vertices}}, 1.0, 0.0, "partition of unity exists");
      continue;
    }
    const auto& pou = *built;
    const auto ends = facet_ends(poly);
    double sum_dev = 0.0, support = 0.0;
    for (std::size_t cidx = 0; cidx < pou.mask.size(); ++cidx) {
      double s = 0.0;
      for (const auto& mu : pou.mu) s += mu[cidx];
      sum_dev = std::max(sum_dev, std::abs(s - 1.0));
      const Point x = pou.mask.center(pou.mask.indices()[cidx]);
      for (std::size_t j = 0; j < inc.vertices; ++j) {
        for (auto f : far_boundary(poly, j)) {
          const auto [p, q] = ends[f];
          if (segment_distance(x, poly.vertices()[p], poly.vertices()[q]) < margin * 0.999999) {
            support = std::max(support, pou.mu[j][cidx]);
          }
        }
      }
    }
    record(out, tag("partition-sum", i), {{"cells", pou.mask.size()}}, sum_dev, 1e-12, "partition sums to one");
    record(out, tag("partition-support", i), {{"cells", pou.mask.size()}}, support, 0.0,
           "bump j avoids the far boundary of vertex j");
  }
}

void suite_oracle(std::uint64_t seed, int count, SuiteReport& out) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const int cells_in = 1 + static_cast<int>(rng() % 200), cells_out = 1 + static_cast<int>(rng() % 200);
    const auto in = gen::blob(rng, d, cells_in, gen::box(rng, d, 1, 6).lo);
    const auto outm = gen::blob(rng, d, cells_out, gen::box(rng, d, 1, 6).lo);
    const Flavor flavor = rng() % 2 ? Flavor::Correlation : Flavor::Toeplitz;
    const Box reach = flavor == Flavor::Correlation ? outm.box().plus(in.box())
                                                    : outm.box().plus(in.box().negated());
    // Kernel box: a random sub-box of the reach, occasionally sticking out of it.
    MultiIndex lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
      const int e = reach.extent(k);
      const int a = static_cast<int>(rng() % e), b = static_cast<int>(rng() % e);
      lo[k] = reach.lo[k] + std::min(a, b) - static_cast<int>(rng() % 2);
      hi[k] = reach.lo[k] + std::max(a, b) + static_cast<int>(rng() % 2);
    }
    const auto f = gen::kernel(rng, Box(lo, hi));
    const CorrelationOperator op(f, in, outm, flavor);
    const auto dense = materialize_dense(op);
    const auto g = random_vector(rng, in.size());
    const auto h = random_vector(rng, outm.size());
    const Json params{{"d", d}, {"in", in.size()}, {"out", outm.size()},
                      {"flavor", flavor == Flavor::Correlation ? "psi" : "theta"}};
    // Round-off scale of an FFT apply on input v.
    auto noise_floor = [&](std::span<const Complex> v) { return 1e-3 * l1(f.values()) * l2(v); };
    const auto fg = op.apply(g);
    record(out, tag("apply", i), params, rel_diff(fg, matvec(dense, g), noise_floor(g)), 1e-12,
           "FFT apply equals dense matvec");
    const Eigen::MatrixXcd adj = dense.adjoint();
    record(out, tag("adjoint", i), params, rel_diff(op.apply_adjoint(h), matvec(adj, h), noise_floor(h)), 1e-12,
           "FFT adjoint equals dense adjoint");

    const Complex alpha = gen::gaussian(rng);
    const auto g2 = random_vector(rng, in.size());
    std::vector<Complex> comb(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) comb[k] = alpha * g[k] + g2[k];
    const auto lhs = op.apply(comb);
    const auto fg2 = op.apply(g2);
    std::vector<Complex> rhs(lhs.size());
    for (std::size_t k = 0; k < lhs.size(); ++k) rhs[k] = alpha * fg[k] + fg2[k];
    record(out, tag("linear-vector", i), params, rel_diff(lhs, rhs, noise_floor(comb)), 1e-12,
           "apply is linear in the vector");

    const auto f2 = gen::kernel(rng, f.box());
    std::vector<Complex> fv(f.values().size());
    for (std::size_t k = 0; k < fv.size(); ++k) fv[k] = alpha * f.values()[k] + f2.values()[k];
    const CorrelationOperator op2(f2, in, outm, flavor), opc(Kernel(f.box(), fv), in, outm, flavor);
    const auto klhs = opc.apply(g);
    const auto f2g = op2.apply(g);
    for (std::size_t k = 0; k < klhs.size(); ++k) rhs[k] = alpha * fg[k] + f2g[k];
    record(out, tag("linear-kernel", i), params, rel_diff(klhs, rhs, noise_floor(g) * (std::abs(alpha) + 1.0)), 1e-12,
           "apply is linear in the kernel");
  }
}

void suite_translation(std::uint64_t seed, int count, SuiteReport& out) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const int r = 1 + static_cast<int>(rng() % (d == 1 ? 12 : 6));
    MultiIndex m(d), n(d), mid(d);
    for (int k = 0; k < d; ++k) {
      m[k] = static_cast<int>(rng() % 9) - 4;
      n[k] = static_cast<int>(rng() % 9) - 4;
      if ((m[k] + n[k]) % 2) ++n[k];
      mid[k] = (m[k] + n[k]) / 2;
    }
    const std::vector<int> side(d, r);
    auto cube = [&](const MultiIndex& c) {
      MultiIndex lo(d);
      for (int k = 0; k < d; ++k) lo[k] = r * c[k];
      return cube_mask(side, lo);
    };
    // Kernel support around r(m+n), where the pair interacts.
    MultiIndex lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
      lo[k] = r * (m[k] + n[k]) - static_cast<int>(rng() % 3);
      hi[k] = r * (m[k] + n[k]) + 2 * r - 2 + static_cast<int>(rng() % 3);
    }
    const auto f = gen::kernel(rng, Box(lo, hi));
    const double a = norm_dense(CorrelationOperator(f, cube(m), cube(n), Flavor::Correlation));
    const double b = norm_dense(CorrelationOperator(f, cube(mid), cube(mid), Flavor::Correlation));
    record(out, tag("cube-pair", i), {{"d", d}, {"r", r}, {"m", m}, {"n", n}}, std::abs(a - b) / std::max(b, 1e-300),
           1e-10, "cube pair norm equals midpoint cube norm");
  }
}

void suite_modulation(std::uint64_t seed, int count, SuiteReport& out) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < count; ++i) {
    int d = 1 + static_cast<int>(rng() % 2);
    const int kind = i % 3;
    GridMask mask;
    Kernel f;
    std::vector<Complex> mu;
    if (kind == 2) {
      // Partition-of-unity member on a polygon raster; the kernel lives on its box.
      d = 2;
      const auto poly = gen::polygon(rng, 3 + static_cast<int>(rng() % 3), {0.0, 0.0}, 1.0);
      double margin = 0.0;
      const auto pou = build_partition(poly, margin);
      if (!pou) continue;
      const auto j = static_cast<std::size_t>(rng() % pou->mu.size());
      const Box box = pou->mask.box();
      f = gen::kernel(rng, box);
      mu.assign(box.count(), Complex{});
      for (std::size_t c = 0; c < pou->mask.size(); ++c) mu[box.offset(pou->mask.indices()[c])] = pou->mu[j][c];
      MultiIndex start(d);
      for (int k = 0; k < d; ++k) start[k] = (box.lo[k] + box.hi[k]) / 4;
      mask = gen::blob(rng, d, 6 + static_cast<int>(rng() % 20), start);
    } else {
      mask = gen::blob(rng, d, 2 + static_cast<int>(rng() % 60), gen::box(rng, d, 1, 3).lo);
      const Box reach = mask.box().plus(mask.box());
      f = gen::kernel(rng, reach);
      mu.resize(reach.count());
      if (kind == 1) {
        Point xi(d);
        for (auto& x : xi) x = u(rng);
        MultiIndex k = reach.lo;
        std::size_t off = 0;
        do {
          double ph = 0.0;
          for (int a = 0; a < d; ++a) ph += xi[a] * k[a];
          mu[off++] = std::polar(1.0, 2.0 * std::numbers::pi * ph);
        } while (next_index(reach, k));
      } else {
        for (auto& x : mu) x = gen::gaussian(rng);
      }
    }
    const double base = norm_dense(hankel(f, mask));
    const double mod = norm_dense(hankel(modulate(f, mu), mask));
    const double l1 = modulation_l1(f.box(), mu);
    const Json params{{"d", d}, {"kind", kind}, {"cells", mask.size()}};
    record(out, tag("bound", i), params, mod - l1 * base, 1e-8, "modulated norm is bounded by the l1 multiplier norm");
    if (kind == 1) {
      record(out, tag("unimodular", i), params, std::abs(mod - base) / std::max(base, 1e-300), 1e-12,
             "plane-wave modulation preserves the norm");
    }
  }
}

void suite_mollify(std::uint64_t seed, int count, SuiteReport& out) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < count; ++i) {
    const int d = 1 + static_cast<int>(rng() % 2);
    MollifierSpec spec;
    spec.n = 1 + static_cast<int>(rng() % 3);
    const int r = static_cast<int>(rng() % 4);
    spec.psi.assign(2 * r + 1, 0.0);
    double s = 0.0;
    for (auto& v : spec.psi) s += (v = u(rng) + 0.05);
    for (auto& v : spec.psi) v /= s;
    spec.psi[r] += 1.0 - std::accumulate(spec.psi.begin(), spec.psi.end(), 0.0);
    spec.window_radius = static_cast<int>(rng() % 4);
    const int rn = spec.stencil_radius();

    const int side = d == 1 ? 6 + static_cast<int>(rng() % 20) : 3 + static_cast<int>(rng() % 6);
    const auto upsilon = cube_mask(std::vector<int>(d, side + 2 * rn), gen::box(rng, d, 1, 4).lo);
    const auto inner = inner_mask(upsilon, rn);
    const auto xi = gen::blob(rng, d, 2 + static_cast<int>(rng() % 50), gen::box(rng, d, 1, 4).lo);
    const Box reach = xi.box().plus(upsilon.box());
    MultiIndex lo(reach.lo), hi(reach.hi);
    for (int k = 0; k < d; ++k) {
      lo[k] -= static_cast<int>(rng() % 3);
      hi[k] += static_cast<int>(rng() % 3);
    }
    const auto f = gen::kernel(rng, Box(lo, hi));
    // rho is one wherever the mollified kernel can act and random elsewhere.
    const Box act = xi.box().plus(inner.box());
    const std::uint64_t salt = rng();
    spec.cutoff = [act, salt](std::span<const int> k) {
      if (act.contains(k)) return true;
      std::uint64_t hsh = salt;
      for (int v : k) hsh = (hsh ^ static_cast<std::uint64_t>(v + 1000)) * 1099511628211ULL;
      return (hsh >> 7) % 2 == 0;
    };
    const auto fn = mollify(f, spec);
    const double before = norm_dense(CorrelationOperator(f, upsilon, xi, Flavor::Correlation));
    const double after = norm_dense(CorrelationOperator(fn, inner, xi, Flavor::Correlation));
    record(out, tag("monotone", i),
           {{"d", d}, {"n", spec.n}, {"stencil", spec.psi.size()}, {"window", spec.window_radius}, {"side", side}},
           after / std::max(before, 1e-300) - 1.0, 1e-8, "mollified operator on the inner mask is no larger");
  }
}

void suite_flip(std::uint64_t seed, int count, SuiteReport& out) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const int d = 1 + static_cast<int>(rng() % 2);
    // Union of boxes sharing the centre c = -z, so the mask is symmetric about it.
    MultiIndex two_c(d);
    for (auto& v : two_c) v = static_cast<int>(rng() % 13) - 6;
    std::vector<MultiIndex> cells;
    const int pieces = 1 + static_cast<int>(rng() % 3);
    for (int p = 0; p < pieces; ++p) {
      MultiIndex lo(d), hi(d);
      for (int k = 0; k < d; ++k) {
        const int half = static_cast<int>(rng() % (d == 1 ? 40 : 6));
        lo[k] = static_cast<int>(std::floor(two_c[k] / 2.0)) - half;
        hi[k] = two_c[k] - lo[k];
      }
      const Box b(lo, hi);
      MultiIndex k = b.lo;
      do {
        cells.push_back(k);
      } while (next_index(b, k));
    }
    const auto mask = GridMask::from_indices(cells);
    MultiIndex two_z(d);
    for (int k = 0; k < d; ++k) two_z[k] = -two_c[k];
    const Box reach = mask.box().plus(mask.box().negated());
    const auto f = gen::kernel(rng, reach);
    const auto flip = hankel_toeplitz_flip(f, mask, two_z);
    const CorrelationOperator theta(f, mask, mask, Flavor::Toeplitz);
    const auto gamma = hankel(flip.kernel, mask);
    const double a = norm_dense(theta), b = norm_dense(gamma);
    const Json params{{"d", d}, {"cells", mask.size()}, {"two_z", two_z}};
    record(out, tag("norms", i), params, std::abs(a - b) / std::max(a, 1e-300), 1e-12, "Toeplitz norm equals flipped Hankel norm");
    const auto g = random_vector(rng, mask.size());
    std::vector<Complex> gt(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) gt[c] = g[flip.reflection[c]];
    record(out, tag("entrywise", i), params, rel_diff(gamma.apply(gt), theta.apply(g)), 1e-12,
           "Theta_f g equals Gamma of the reflected input");
  }
}

void suite_norms(std::uint64_t seed, int count, SuiteReport& out) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const auto mask = gen::blob(rng, d, 2 + static_cast<int>(rng() % 60));
    const Flavor flavor = rng() % 2 ? Flavor::Correlation : Flavor::Toeplitz;
    const Box reach = flavor == Flavor::Correlation ? mask.box().plus(mask.box())
                                                    : mask.box().plus(mask.box().negated());
    const CorrelationOperator op(gen::kernel(rng, reach), mask, mask, flavor);
    const double exact = norm_dense(op);
    const auto est = norm_iterative(op, 1e-10, 20000, rng());
    const Json params{{"d", d}, {"cells", mask.size()}};
    record(out, tag("certificate-below", i), params, est.lower_certificate - exact * (1.0 + 1e-12), 0.0,
           "Rayleigh certificate is a lower bound");
    record(out, tag("dense-vs-iterative", i), params, std::abs(est.value - exact) / exact, 1e-6,
           "power iteration agrees with the dense norm");
  }
}

void suite_certificate(std::uint64_t seed, int count, SuiteReport& out) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < count; ++i) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const bool orthant = rng() % 2;
    GridMask mask;
    DomainKind kind = DomainKind::BoundedMask;
    Point nu(d);
    if (orthant) {
      StaircaseSpec s{d, {}, d == 1 ? 200.0 : 14.0};
      s.boxes.push_back({Point(d, 0.0), Point(d, s.bound + 1.0)});
      Point lo(d, 0.0), hi(d, 3.0);
      lo[0] = 0.0;
      hi[0] = s.bound + 1.0;
      s.boxes.push_back({lo, hi});
      mask = rasterize(s, 1.0);
      kind = DomainKind::OrthantSandwiched;
      for (auto& v : nu) v = -(0.2 + u(rng));
    } else {
      mask = gen::blob(rng, d, 2 + static_cast<int>(rng() % 80));
      for (auto& v : nu) v = u(rng) - 0.5;
      if (nu[0] == 0.0) nu[0] = 1.0;
    }
    const auto f = gen::kernel(rng, gen::box(rng, d, 3, 2));
    Point xi(d);
    for (auto& v : xi) v = u(rng);
    const double eps = std::pow(10.0, -1.0 - 2.0 * u(rng));
    const TestFunctionSpec spec{xi, DirectionSpec(nu), eps};
    const double cert = certificate_E_eps(f, mask, spec, kind);
    const CorrelationOperator op(f, mask, mask, Flavor::Toeplitz);
    const double exact = norm_dense(op);
    const Json params{{"d", d}, {"cells", mask.size()}, {"orthant", orthant}, {"eps", eps}};
    record(out, tag("sound", i), params, cert - exact, 1e-10 * (1.0 + exact),
           "certificate stays below the operator norm");

    MultiIndex shift(d);
    for (auto& v : shift) v = static_cast<int>(rng() % 21) - 10;
    const double moved = certificate_E_eps(f, mask.translated(shift), spec, DomainKind::BoundedMask);
    record(out, tag("translation", i), params, std::abs(moved - cert) / std::max(cert, 1e-3 * l1(f.values())), 1e-9,
           "certificate is translation invariant");
  }

  // Symbol echo: d = 1 orthant staircase, kernel with known symbol.
  std::mt19937_64 krng(seed ^ 0x5bd1e995ULL);
  for (int i = 0; i < std::max(1, count / 5); ++i) {
    const auto f = gen::kernel(krng, Box({-2}, {2}));
    const StaircaseSpec s{1, {{{0.0}, {1e9}}}, 4000.5};
    const auto mask = rasterize(s, 1.0);
    double sup = 0.0, arg = 0.0;
    for (int j = 0; j < 4096; ++j) {
      const double xi = j / 4096.0;
      Complex fh{};
      for (int k = -2; k <= 2; ++k) fh += f.at(std::vector<int>{k}) * std::polar(1.0, -2.0 * std::numbers::pi * k * xi);
      if (std::abs(fh) > sup) {
        sup = std::abs(fh);
        arg = xi;
      }
    }
    const double best =
        certificate_sweep(f, mask, {arg}, DirectionSpec({-1.0}), DomainKind::OrthantSandwiched).best_value;
    record(out, tag("symbol-echo", i), {{"L", 4000}}, 0.95 * sup - best, 0.0,
           "certificate sweep reaches the symbol sup");
  }
}

void suite_extension(std::uint64_t seed, int count, SuiteReport& out) {
  for (int i = 0; i < count; ++i) {
    const auto s = trial_seed(seed, i);
    std::mt19937_64 rng(s);
    const int d = i % 4 == 3 ? 2 : 1;
    const Window w(std::vector<int>(d, 2));
    const auto a = random_sequence(w, Ensemble::ComplexGaussian, rng);
    SolverParams sp;
    const auto res = extend_and_certify(a, sp);
    const auto& e = res.ext;
    const double tol = sp.tol;
    const Json params{{"d", d}, {"seed", s}};
    record(out, tag("fidelity", i), params, e.window_residual, 1e-10, "extension keeps the window");
    record(out, tag("bracket", i), params,
           std::max(a.max_abs() - tol - e.t_grid, e.t_grid - a.l1_norm() - tol), 0.0,
           "grid optimum lies between max|a| and sum|a|");
    record(out, tag("certified-sections", i), params, res.max_extension_section - e.t_cert, 1e-9,
           "sections of the extension are bounded by t_cert");
    record(out, tag("coefficient-bound", i), params, e.extension.max_abs() - e.t_cert, 0.0,
           "coefficients are bounded by the certified sup");
    record(out, tag("ratio-floor", i), params, 1.0 - 1e-6 - res.ratio, 0.0, "t_cert dominates the section norm");

    if (d == 1) {
      ExtensionProblem small = ExtensionProblem::with_defaults(a, tol);
      small.grid = {16 * small.ext_radii[0]};
      ExtensionProblem big = small;
      big.ext_radii = {small.ext_radii[0] * 2};
      const auto rs = min_linf_extension(small);
      big.warm_start = rs.extension;
      const auto rb = min_linf_extension(big);
      record(out, tag("monotone-M", i), params, rb.t_grid - rs.t_grid, tol * rs.t_grid,
             "wider extension window never raises the optimum");

      ExtensionProblem mirrored = small;
      mirrored.a = a.reflected();
      const auto rm = min_linf_extension(mirrored);
      record(out, tag("reflection", i), params, std::abs(rm.t_grid - rs.t_grid),
             std::max({tol * rs.t_grid, rs.t_grid - rs.t_lower, rm.t_grid - rm.t_lower}),
             "reflected sequence has the same optimum");
    }
  }
}

void suite_factorization(std::uint64_t seed, int count, SuiteReport& out) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const int d = 1 + i % 2;
    MultiIndex k(d);
    for (auto& v : k) v = static_cast<int>(rng() % 17) - 8;
    const int G = d == 1 ? 256 : 64;
    const double e1 = verify_convolution_identity(k, G);
    const double e2 = verify_convolution_identity(k, G / 2);
    const Json params{{"k", k}, {"G", G}};
    record(out, tag("identity", i), params, e1 - 4.0 * d / G, 0.0, "per-term convolution identity error within 4d/G");
    const double ratio = e2 / e1;
    record(out, tag("rate", i), params, std::max(1.5 - ratio, ratio - 3.0), 0.0, "error halves when G doubles");
  }

  // Smooth bump on [1/4, 3/4]: summability, linearity and the nuclear-norm identity.
  const int G = 512;
  CubeFunction g{1, G, 0, std::vector<Complex>(G)};
  std::uniform_real_distribution<double> u(0.2, 1.0);
  const double amp = u(rng);
  for (int j = 0; j < G; ++j) {
    const double x = static_cast<double>(j) / G;
    const double t = (x - 0.5) / 0.25;
    g.values[j] = std::abs(t) < 1.0 ? amp * std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
  }
  g.margin = G / 4;
  double prev_l1 = -1.0, prev_res = 1e300, last_inc = 0.0, last_l1 = 0.0;
  bool monotone = true;
  for (int K : {4, 8, 16, 32, 64, 128, 255}) {
    const auto r = weak_factorize(g, K);
    monotone = monotone && r.partial_l1 >= prev_l1 && r.residual_sup <= prev_res * (1.0 + 1e-12);
    last_inc = r.partial_l1 - prev_l1;
    last_l1 = r.partial_l1;
    prev_l1 = r.partial_l1;
    prev_res = r.residual_sup;
    record(out, "nuclear-K" + std::to_string(K), {{"K", K}},
           std::abs(r.nuclear_norm - r.partial_l1 / 2.0), 0.0, "nuclear norm is 2^-d times the l1 sum");
  }
  record(out, "summability", {{"G", G}}, monotone ? last_inc - 1e-3 * last_l1 : 1.0, 0.0,
         "partial l1 sums stabilise");

  const double alpha = std::ldexp(1.0, static_cast<int>(rng() % 7) - 3) * (rng() % 2 ? -1.0 : 1.0);
  CubeFunction scaled = g;
  for (auto& v : scaled.values) v *= alpha;
  const auto ra = weak_factorize(g, 32), rb = weak_factorize(scaled, 32);
  double lin = 0.0;
  for (std::size_t t = 0; t < ra.terms.size(); ++t) lin = std::max(lin, std::abs(rb.terms[t].a - alpha * ra.terms[t].a));
  record(out, "linearity", {{"alpha", alpha}}, lin, 0.0, "coefficients scale linearly");
}

// Strip Xi = (0, L) x (0, W): the dense norm of Gamma on the strip is compared
// with its decomposition into blocks between sub-strips of width W.
void suite_strip(std::uint64_t seed, int count, SuiteReport& out) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const int w = 2 + static_cast<int>(rng() % 3);
    const int pieces = 4 + static_cast<int>(rng() % 5);
    const int len = w * pieces;
    const StaircaseSpec spec{2, {{{0.0, 0.0}, {len + 0.5, w + 0.5}}}, 1e6};
    const auto strip = rasterize(spec, 1.0);
    const Box reach = strip.box().plus(strip.box());
    // Kernel decaying along the strip so the blocks have different sizes.
    std::vector<Complex> vals(reach.count());
    MultiIndex k = reach.lo;
    std::size_t off = 0;
    do {
      vals[off++] = gen::gaussian(rng) * std::exp(-0.15 * k[0]);
    } while (next_index(reach, k));
    const Kernel f(reach, vals);
    const auto full_op = hankel(f, strip);
    const auto dense = materialize_dense(full_op);
    const double full = norm_dense(dense);

    std::vector<GridMask> parts;
    for (int p = 0; p < pieces; ++p) parts.push_back(cube_mask(std::vector<int>{w, w}, std::vector<int>{1 + p * w, 1}));
    Eigen::MatrixXcd assembled = Eigen::MatrixXcd::Zero(dense.rows(), dense.cols());
    Eigen::MatrixXd block_norms(pieces, pieces);
    double max_block = 0.0, cov = 0.0;
    for (int a = 0; a < pieces; ++a) {
      for (int b = 0; b < pieces; ++b) {
        const CorrelationOperator blk(f, parts[b], parts[a], Flavor::Correlation);
        const auto m = materialize_dense(blk);
        block_norms(a, b) = norm_dense(m);
        max_block = std::max(max_block, block_norms(a, b));
        for (std::size_t r = 0; r < parts[a].size(); ++r) {
          for (std::size_t c = 0; c < parts[b].size(); ++c) {
            assembled(static_cast<Eigen::Index>(strip.position(parts[a].indices()[r])),
                      static_cast<Eigen::Index>(strip.position(parts[b].indices()[c]))) +=
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
          }
        }
        if ((a + b) % 2 == 0) {
          const int mid = (a + b) / 2;
          const double mid_norm = norm_dense(CorrelationOperator(f, parts[mid], parts[mid], Flavor::Correlation));
          cov = std::max(cov, std::abs(block_norms(a, b) - mid_norm) / std::max(mid_norm, 1e-300));
        }
      }
    }
    const double upper = norm_dense(Eigen::MatrixXcd(block_norms.cast<Complex>()));
    const Json params{{"w", w}, {"pieces", pieces}};
    record(out, tag("reassembled", i), params, std::abs(norm_dense(assembled) - full) / full, 1e-9,
           "block reassembly reproduces the strip norm");
    record(out, tag("sandwich", i), params, std::max(max_block - full, full - upper) / full, 1e-9,
           "strip norm lies between the largest block and the block-norm matrix");
    record(out, tag("block-translation", i), params, cov, 1e-9, "blocks with equal index sums have equal norms");
  }
}

void suite_cli(std::uint64_t seed, int count, SuiteReport& out) {
  auto strip_wall = [](Json j) {
    j.erase("wall_s");
    return j;
  };
  for (int i = 0; i < std::max(1, count); ++i) {
    const std::vector<std::string> args{"sweep", "--d", "1", "--n", "2", "--trials", "2", "--seed",
                                        std::to_string(seed + i)};
    std::ostringstream o1, o2, e1, e2;
    const int c1 = run_cli(args, o1, e1), c2 = run_cli(args, o2, e2);
    const bool same = c1 == c2 && strip_wall(Json::parse(o1.str())) == strip_wall(Json::parse(o2.str()));
    record(out, tag("deterministic", i), {{"args", args}}, same ? 0.0 : 1.0, 0.0, "same inputs and seed give the same report");
  }
  std::ostringstream o, e;
  const int bad = run_cli({"extend", "--input", "/nonexistent/input.json"}, o, e);
  record(out, "input-error-exit", Json::object(), bad == kExitInput ? 0.0 : 1.0, 0.0, "input errors exit with code 2");
  std::ostringstream o3, e3;
  const int cap = run_cli({"sweep", "--d", "3", "--n", "40", "--trials", "1"}, o3, e3);
  record(out, "resource-exit", Json::object(), cap == kExitResource ? 0.0 : 1.0, 0.0, "resource caps exit with code 4");
}

void suite_checklist(std::uint64_t, int, SuiteReport& out) {
  const auto missing = uncovered_invariants();
  record(out, "coverage", {{"missing", missing}}, static_cast<double>(missing.size()), 0.0,
         "every invariant is covered by a suite");
}

}  // namespace

double SuiteReport::worst_ratio() const {
  double w = 0.0;
  for (const auto& c : cases) {
    if (!std::isfinite(c.deviation)) return INFINITY;
    if (c.tolerance > 0.0) {
      w = std::max(w, c.deviation / c.tolerance);
    } else if (c.deviation > 0.0) {
      return INFINITY;
    }
  }
  return w;
}

std::size_t SuiteReport::failures() const {
  return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const CaseRecord& c) { return !c.passed; }));
}

const std::vector<InvariantInfo>& invariant_checklist() {
  static const std::vector<InvariantInfo> list{
      {"coeffs.linearity", "coeffs", "eval_symbol is linear"},
      {"coeffs.coefficient_bound", "coeffs", "|a_n| is bounded by the symbol sup and by t_cert"},
      {"coeffs.roundtrip", "coeffs", "coeffs_from_grid inverts eval_symbol on alias-free grids"},
      {"geometry.incidence_rows", "geometry", "incidence rows sum to at least d"},
      {"geometry.support_homogeneous", "geometry", "support function is positively homogeneous"},
      {"geometry.sum_algebra", "geometry", "domain_sum is commutative and associative"},
      {"geometry.partition", "geometry", "partition of unity sums to one and avoids far boundaries"},
      {"operators.oracle", "operators", "FFT apply equals the dense matvec"},
      {"operators.translation", "operators", "cube-pair norms equal midpoint norms"},
      {"operators.modulation", "operators", "modulated norm bounded by the l1 multiplier norm"},
      {"operators.mollify", "operators", "mollification on inner masks does not increase the norm"},
      {"operators.linearity", "operators", "apply is linear in kernel and vector"},
      {"norms.lower_certificate", "norms", "power-iteration certificate is a lower bound"},
      {"norms.agreement", "norms", "dense and iterative norms agree"},
      {"norms.certificate_translation", "norms", "E_eps certificate is translation invariant"},
      {"norms.certificate_symbol", "norms", "certificate sweep reaches 0.95 of the symbol sup"},
      {"norms.certificate_sound", "norms", "certificate never exceeds the operator norm"},
      {"nehari.window_fidelity", "nehari", "extension agrees with a on its window"},
      {"nehari.bracket", "nehari", "max|a| <= t_grid <= sum|a|"},
      {"nehari.certification", "nehari", "sections of the extension are bounded by t_cert"},
      {"nehari.monotone_M", "nehari", "enlarging M never raises t_grid"},
      {"nehari.flip_consistency", "nehari", "reflected sequence has the same t_grid"},
      {"nehari.ratio_floor", "nehari", "t_cert / ||T_a|| >= 1"},
      {"factorization.rate", "factorization", "per-term identity error is O(1/G)"},
      {"factorization.summability", "factorization", "partial l1 sums stabilise"},
      {"factorization.linearity", "factorization", "coefficient map is linear"},
      {"factorization.nuclear", "factorization", "nuclear norm equals 2^-d times the l1 sum"},
      {"cli.determinism", "cli", "reports are reproducible from inputs and seed"},
      {"cli.exit_codes", "cli", "exit codes distinguish input, convergence and resource errors"},
      {"harness.coverage", "harness", "every invariant is covered by a registered suite"},
      {"harness.strip", "harness", "strip decomposition reproduces the full norm"},
      {"harness.flip", "harness", "Toeplitz and flipped Hankel norms agree"},
      {"harness.trivial", "harness", "delta kernels and identity operators give exact values"},
  };
  return list;
}

const std::vector<SuiteInfo>& suite_registry() {
  static const std::vector<SuiteInfo> reg{
      {"trivial", "delta kernels and identity operators", {"harness.trivial"}, 10, suite_trivial},
      {"coeffs", "symbol evaluation and inversion", {"coeffs.linearity", "coeffs.roundtrip", "coeffs.coefficient_bound"}, 30, suite_coeffs},
      {"geometry", "polytopes, sums and partitions of unity",
       {"geometry.incidence_rows", "geometry.support_homogeneous", "geometry.sum_algebra", "geometry.partition"}, 20, suite_geometry},
      {"oracle", "FFT operators against dense matrices", {"operators.oracle", "operators.linearity"}, 50, suite_oracle},
      {"translation", "cube translation covariance", {"operators.translation"}, 50, suite_translation},
      {"modulation", "modulation bound", {"operators.modulation"}, 50, suite_modulation},
      {"mollify", "mollification monotonicity", {"operators.mollify"}, 50, suite_mollify},
      {"flip", "Toeplitz to Hankel flip", {"harness.flip"}, 50, suite_flip},
      {"norms", "dense and iterative norms", {"norms.lower_certificate", "norms.agreement"}, 30, suite_norms},
      {"certificate", "E_eps certificates",
       {"norms.certificate_translation", "norms.certificate_symbol", "norms.certificate_sound"}, 20, suite_certificate},
      {"extension", "minimal sup-norm extension",
       {"nehari.window_fidelity", "nehari.bracket", "nehari.certification", "nehari.monotone_M", "nehari.flip_consistency",
        "nehari.ratio_floor", "coeffs.coefficient_bound"}, 8, suite_extension},
      {"factorization", "tent-function weak factorization",
       {"factorization.rate", "factorization.summability", "factorization.linearity", "factorization.nuclear"}, 10, suite_factorization},
      {"strip", "strip-domain block decomposition", {"harness.strip"}, 10, suite_strip},
      {"cli", "command-line determinism and exit codes", {"cli.determinism", "cli.exit_codes"}, 1, suite_cli},
      {"checklist", "invariant coverage", {"harness.coverage"}, 1, suite_checklist},
  };
  return reg;
}

std::vector<std::string> uncovered_invariants() {
  std::set<std::string> covered;
  for (const auto& s : suite_registry()) covered.insert(s.covers.begin(), s.covers.end());
  std::vector<std::string> out;
  for (const auto& inv : invariant_checklist()) {
    if (!covered.count(inv.id)) out.push_back(inv.id);
  }
  return out;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed, int count) {
  const auto& reg = suite_registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const SuiteInfo& s) { return s.name == name; });
  if (it == reg.end()) throw PreconditionError("unknown suite '" + name + "'");
  if (count < 0) throw PreconditionError("suite count must be >= 0");
  SuiteReport rep;
  rep.suite = name;
  rep.seed = seed;
  rep.count = count == 0 ? it->default_count : count;
  const auto t0 = Clock::now();
  it->body(seed, rep.count, rep);
  rep.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
  rep.passed = !rep.cases.empty() && rep.failures() == 0;
  return rep;
}

Json to_json(const SuiteReport& r) {
  Json cases = Json::array();
  for (const auto& c : r.cases) {
    cases.push_back({{"name", c.name},
                     {"params", c.params},
                     {"deviation", c.deviation},
                     {"tolerance", c.tolerance},
                     {"passed", c.passed},
                     {"anchor", c.anchor}});
  }
  const double worst = r.worst_ratio();
  return {{"suite", r.suite},
          {"seed", r.seed},
          {"count", r.count},
          {"passed", r.passed},
          {"failures", r.failures()},
          {"worst_ratio", std::isfinite(worst) ? Json(worst) : Json(nullptr)},
          {"wall_s", r.wall_s},
          {"cases", cases}};
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string junit_xml(const std::vector<SuiteReport>& reports) {
  std::ostringstream x;
  x.precision(17);
  std::size_t tests = 0, failures = 0;
  for (const auto& r : reports) {
    tests += r.cases.size();
    failures += r.failures();
  }
  x << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  x << "<testsuites tests=\"" << tests << "\" failures=\"" << failures << "\">\n";
  for (const auto& r : reports) {
    x << "  <testsuite name=\"" << xml_escape(r.suite) << "\" tests=\"" << r.cases.size() << "\" failures=\""
      << r.failures() << "\" time=\"" << r.wall_s << "\">\n";
    for (const auto& c : r.cases) {
      x << "    <testcase classname=\"" << xml_escape(r.suite) << "\" name=\"" << xml_escape(c.name) << "\"";
      if (c.passed) {
        x << "/>\n";
      } else {
        x << ">\n      <failure message=\"deviation " << c.deviation << " exceeds tolerance " << c.tolerance << "\">"
          << xml_escape(c.anchor + " " + c.params.dump()) << "</failure>\n    </testcase>\n";
      }
    }
    x << "  </testsuite>\n";
  }
  x << "</testsuites>\n";
  return x.str();
}

}  // namespace gdh
