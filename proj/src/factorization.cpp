#include "gdh/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gdh/errors.hpp"
#include "gdh/fft.hpp"

namespace gdh {
namespace {

double lambda(double t) { return 0.5 - std::abs(t - 0.5); }

std::size_t wrapped_offset(std::span<const int> k, int G) {
  std::size_t off = 0;
  for (int v : k) {
    int r = v % G;
    if (r < 0) r += G;
    off = off * static_cast<std::size_t>(G) + static_cast<std::size_t>(r);
  }
  return off;
}

// e^{2 pi i k.j / G} with the phase reduced mod G first.
Complex unit_phase(std::span<const int> k, std::span<const int> j, int G) {
  long long s = 0;
  for (std::size_t i = 0; i < k.size(); ++i) s += static_cast<long long>(k[i]) * j[i];
  s %= G;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(s) / G);
}

Box cube_box(int d, int G) { return Box(MultiIndex(d, 0), MultiIndex(d, G - 1)); }

// Overwrite entries with j_axis = 0 so each line along `axis` has
// sum_j q_j (-1)^j = 0.
void fill_nyquist(std::vector<Complex>& q, int d, int G, int axis) {
  const Box box = cube_box(d, G);
  MultiIndex j = box.lo;
  do {
    if (j[axis] != 0) continue;
    Complex s{};
    MultiIndex t = j;
    for (int v = 1; v < G; ++v) {
      t[axis] = v;
      s += (v % 2 ? -1.0 : 1.0) * q[box.offset(t)];
    }
    q[box.offset(j)] = -s;
  } while (next_index(box, j));
}

}  // namespace

void CubeFunction::validate() const {
  if (d < 1) throw PreconditionError("cube function: d must be >= 1");
  if (G < 2) throw PreconditionError("cube function: G must be >= 2");
  if (margin < 0) throw PreconditionError("cube function: margin must be >= 0");
  const std::vector<int> sizes(d, G);
  const auto n = checked_product(sizes, kDefaultGridCap, "cube function");
  if (values.size() != n) {
    throw PreconditionError("cube function: expected " + std::to_string(n) + " samples, got " +
                            std::to_string(values.size()));
  }
  const Box box = cube_box(d, G);
  MultiIndex j = box.lo;
  std::size_t off = 0;
  do {
    const Complex v = values[off++];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw PreconditionError("cube function: non-finite sample");
    if (margin == 0 || v == Complex{}) continue;
    for (int i = 0; i < d; ++i) {
      if (j[i] < margin || j[i] > G - margin) {
        throw PreconditionError("cube function: sample " + std::to_string(off - 1) +
                                " is nonzero inside the declared boundary margin");
      }
    }
  } while (next_index(box, j));
}

std::vector<double> tent_grid(int d, int G) {
  if (d < 1) throw PreconditionError("tent_grid: d must be >= 1");
  if (G < 2) throw PreconditionError("tent_grid: G must be >= 2");
  const std::vector<int> sizes(d, G);
  std::vector<double> out(checked_product(sizes, kDefaultGridCap, "tent_grid"));
  std::vector<double> axis(G);
  for (int j = 0; j < G; ++j) axis[j] = lambda(static_cast<double>(j) / G);
  const Box box = cube_box(d, G);
  MultiIndex j = box.lo;
  std::size_t off = 0;
  do {
    double v = 1.0;
    for (int i = 0; i < d; ++i) v *= axis[j[i]];
    out[off++] = v;
  } while (next_index(box, j));
  return out;
}

FactorizationResult weak_factorize(const CubeFunction& g, int K, const FactorizeOptions& opt) {
  g.validate();
  if (K < 0) throw PreconditionError("weak_factorize: K must be >= 0");
  if (2 * K >= g.G) throw PreconditionError("weak_factorize: K >= G/2 would alias coefficients");
  if (g.margin < 2 && !opt.relaxed_margin) {
    throw PreconditionError("weak_factorize: support margin " + std::to_string(g.margin) +
                            " < 2 cells, so g / Lambda would divide by values at the boundary");
  }
  if (opt.relaxed_margin && g.G % 2 != 0) throw PreconditionError("weak_factorize: relaxed margin needs even G");

  const auto lam = tent_grid(g.d, g.G);
  std::vector<Complex> q(lam.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (g.values[i] == Complex{} || lam[i] == 0.0) continue;
    q[i] = g.values[i] / lam[i];
  }
  if (opt.relaxed_margin) {
    for (int axis = 0; axis < g.d; ++axis) fill_nyquist(q, g.d, g.G, axis);
  }

  const std::vector<int> dims(g.d, g.G);
  FftPlan plan(dims);
  plan.forward(q);
  const double scale = 1.0 / static_cast<double>(q.size());

  FactorizationResult out;
  const Box kbox(MultiIndex(g.d, -K), MultiIndex(g.d, K));
  MultiIndex k = kbox.lo;
  do {
    const Complex a = q[wrapped_offset(k, g.G)] * scale;
    out.terms.push_back({k, a});
    out.partial_l1 += std::abs(a);
  } while (next_index(kbox, k));
  out.nuclear_norm = out.partial_l1 / std::pow(2.0, g.d);

  const auto rec = reconstruct(out.terms, g.d, g.G);
  for (std::size_t i = 0; i < rec.values.size(); ++i) {
    out.residual_sup = std::max(out.residual_sup, std::abs(g.values[i] - rec.values[i]));
  }
  return out;
}

double verify_convolution_identity(const MultiIndex& k, int G) {
  if (G < 4) throw PreconditionError("verify_convolution_identity: G must be >= 4");
  const int d = static_cast<int>(k.size());
  if (d < 1) throw PreconditionError("verify_convolution_identity: k must be nonempty");

  // Samples of h_k on [0,1)^d, zero-padded to [0,2)^d for a linear convolution.
  const std::vector<int> dims(d, 2 * G);
  const Box pad(MultiIndex(d, 0), MultiIndex(d, 2 * G - 1));
  std::vector<Complex> h(checked_product(dims, kDefaultGridCap, "verify_convolution_identity"));
  const Box cube = cube_box(d, G);
  MultiIndex j = cube.lo;
  do {
    bool inside = true;
    for (int i = 0; i < d; ++i) inside = inside && j[i] > 0 && 2 * j[i] < G;
    if (inside) h[pad.offset(j)] = unit_phase(k, j, G);
  } while (next_index(cube, j));

  FftPlan plan(dims);
  plan.forward(h);
  for (auto& v : h) v *= v;
  plan.backward(h);
  const double scale = 1.0 / (static_cast<double>(h.size()) * std::pow(static_cast<double>(G), d));

  const auto lam = tent_grid(d, G);
  double err = 0.0;
  j = cube.lo;
  std::size_t off = 0;
  do {
    const Complex expected = unit_phase(k, j, G) * lam[off++];
    err = std::max(err, std::abs(h[pad.offset(j)] * scale - expected));
  } while (next_index(cube, j));
  return err;
}

CubeFunction reconstruct(const std::vector<FactorTerm>& terms, int d, int G) {
  const auto lam = tent_grid(d, G);
  CubeFunction out{d, G, 0, std::vector<Complex>(lam.size())};
  if (terms.empty()) return out;
  for (const auto& t : terms) {
    if (static_cast<int>(t.k.size()) != d) throw PreconditionError("reconstruct: term dimension mismatch");
    out.values[wrapped_offset(t.k, G)] += t.a;
  }
  FftPlan(std::vector<int>(d, G)).backward(out.values);
  for (std::size_t i = 0; i < lam.size(); ++i) out.values[i] *= lam[i];
  return out;
}

}  // namespace gdh
