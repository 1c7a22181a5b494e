#include "gdh/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gdh/errors.hpp"
#include "gdh/fft.hpp"

namespace gdh {
namespace {

bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

MultiIndex negate(std::span<const int> k) {
  MultiIndex out(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = -k[i];
  return out;
}

// One side of the FFT convolution: the transformed, cropped kernel and how
// input cells are placed in the padded buffer.
struct Side {
  Box kernel_box;
  std::vector<Complex> spectrum;
  bool reverse_input = false;
  bool zero = false;
};

}  // namespace

struct CorrelationOperator::Plan {
  std::vector<int> dims;
  Box pad;
  FftPlan fft;
  Side forward;
  Side adjoint;

  explicit Plan(std::vector<int> d) : dims(d), pad(Box::from_extents(MultiIndex(d.size(), 0), d)), fft(std::move(d)) {}

  Side make_side(const Kernel& k, bool reverse) const {
    Side s;
    s.reverse_input = reverse;
    s.kernel_box = k.box();
    if (k.box().empty()) {
      s.zero = true;
      return s;
    }
    s.spectrum.assign(fft.size(), Complex{});
    const auto vals = k.values();
    MultiIndex idx = k.box().lo, r(idx.size());
    std::size_t off = 0;
    bool any = false;
    do {
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = idx[i] - k.box().lo[i];
      s.spectrum[pad.offset(r)] = vals[off];
      any = any || vals[off] != Complex{};
      ++off;
    } while (next_index(k.box(), idx));
    s.zero = !any;
    fft.forward(s.spectrum);
    return s;
  }

  std::vector<Complex> run(const Side& side, std::span<const Complex> g, const GridMask& in,
                           const GridMask& out) const {
    std::vector<Complex> result(out.size());
    if (side.zero) return result;
    const int d = in.dim();
    const MultiIndex in_lo = side.reverse_input ? negate(in.box().hi) : in.box().lo;
    std::vector<Complex> buf(fft.size());
    MultiIndex r(d);
    const auto& cells = in.indices();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      for (int i = 0; i < d; ++i) {
        const int u = side.reverse_input ? -cells[c][i] : cells[c][i];
        r[i] = u - in_lo[i];
      }
      buf[pad.offset(r)] = g[c];
    }
    fft.forward(buf);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= side.spectrum[i];
    fft.backward(buf);
    const double scale = 1.0 / static_cast<double>(fft.size());
    const auto& ocells = out.indices();
    for (std::size_t c = 0; c < ocells.size(); ++c) {
      bool inside = true;
      for (int i = 0; i < d; ++i) {
        r[i] = ocells[c][i] - side.kernel_box.lo[i] - in_lo[i];
        inside = inside && r[i] >= 0 && r[i] < dims[i];
      }
      if (inside) result[c] = buf[pad.offset(r)] * scale;
    }
    return result;
  }
};

Kernel::Kernel(Box box, std::vector<Complex> values) : box_(std::move(box)), values_(std::move(values)) {
  if (box_.empty()) throw PreconditionError("kernel: support box is empty");
  if (values_.size() != box_.count()) throw PreconditionError("kernel: value count does not match box");
  if (!std::all_of(values_.begin(), values_.end(), finite)) throw PreconditionError("kernel: non-finite value");
}

Kernel Kernel::delta(MultiIndex at, Complex value) {
  Box b(at, at);
  return Kernel(std::move(b), {value});
}

Kernel Kernel::constant(Box box, Complex value) {
  const auto n = box.count();
  return Kernel(std::move(box), std::vector<Complex>(n, value));
}

Kernel Kernel::from_sequence(const MultiSequence& a) {
  const auto c = a.coeffs();
  return Kernel(a.window().box(), std::vector<Complex>(c.begin(), c.end()));
}

Complex Kernel::at(std::span<const int> k) const {
  if (!box_.contains(k)) return {};
  return values_[box_.offset(k)];
}

Kernel Kernel::shifted(std::span<const int> shift) const {
  return Kernel(box_.translated(negate(shift)), values_);
}

Kernel Kernel::reflected_conj() const {
  std::vector<Complex> v(values_.rbegin(), values_.rend());
  for (auto& x : v) x = std::conj(x);
  return Kernel(box_.negated(), std::move(v));
}

Kernel Kernel::conj() const {
  std::vector<Complex> v(values_);
  for (auto& x : v) x = std::conj(x);
  return Kernel(box_, std::move(v));
}

Kernel Kernel::cropped(const Box& window) const {
  Box b = box_.intersect(window);
  if (b.empty()) {
    // Keep a single zero so the kernel stays a valid value.
    return Kernel(Box(box_.lo, box_.lo), {Complex{}});
  }
  std::vector<Complex> v(b.count());
  MultiIndex k = b.lo;
  std::size_t off = 0;
  do {
    v[off++] = values_[box_.offset(k)];
  } while (next_index(b, k));
  return Kernel(std::move(b), std::move(v));
}

CorrelationOperator::CorrelationOperator(Kernel kernel, GridMask input, GridMask output, Flavor flavor)
    : kernel_(std::move(kernel)), input_(std::move(input)), output_(std::move(output)), flavor_(flavor) {
  const int d = kernel_.dim();
  if (input_.dim() != d || output_.dim() != d) throw PreconditionError("operator: dimension mismatch");
  if (std::abs(input_.spacing() - output_.spacing()) > 1e-12 * input_.spacing()) {
    throw PreconditionError("operator: input and output masks have different spacing");
  }

  const Box reach = flavor_ == Flavor::Correlation ? output_.box().plus(input_.box())
                                                   : output_.box().plus(input_.box().negated());
  const Kernel f = kernel_.cropped(reach);
  std::vector<int> dims(d);
  for (int i = 0; i < d; ++i) {
    dims[i] = good_fft_size(f.box().extent(i) + std::max(input_.box().extent(i), output_.box().extent(i)) - 1);
  }
  checked_product(dims, kDefaultGridCap, "operator");
  auto plan = std::make_shared<Plan>(dims);
  if (flavor_ == Flavor::Correlation) {
    plan->forward = plan->make_side(f, true);
    plan->adjoint = plan->make_side(f.conj(), true);
  } else {
    plan->forward = plan->make_side(f, false);
    plan->adjoint = plan->make_side(f.reflected_conj(), false);
  }
  plan_ = std::move(plan);
}

Complex CorrelationOperator::entry(std::span<const int> x, std::span<const int> y) const {
  MultiIndex k(x.size());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = flavor_ == Flavor::Correlation ? x[i] + y[i] : x[i] - y[i];
  return kernel_.at(k);
}

std::vector<Complex> CorrelationOperator::apply(std::span<const Complex> g) const {
  if (g.size() != input_.size()) {
    throw PreconditionError("apply: vector length " + std::to_string(g.size()) + " does not match input mask size " +
                            std::to_string(input_.size()));
  }
  return plan_->run(plan_->forward, g, input_, output_);
}

std::vector<Complex> CorrelationOperator::apply_adjoint(std::span<const Complex> h) const {
  if (h.size() != output_.size()) {
    throw PreconditionError("apply_adjoint: vector length does not match output mask size");
  }
  return plan_->run(plan_->adjoint, h, output_, input_);
}

CorrelationOperator CorrelationOperator::adjoint() const {
  if (flavor_ == Flavor::Correlation) return CorrelationOperator(kernel_.conj(), output_, input_, flavor_);
  return CorrelationOperator(kernel_.reflected_conj(), output_, input_, flavor_);
}

CorrelationOperator hankel(Kernel f, const GridMask& mask) {
  return CorrelationOperator(std::move(f), mask, mask, Flavor::Correlation);
}

Eigen::MatrixXcd materialize_dense(const CorrelationOperator& op, std::size_t cap) {
  const auto rows = op.rows(), cols = op.cols();
  if (cols != 0 && rows > cap / cols) {
    throw ResourceError("materialize_dense: " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " exceeds the dense cap of " + std::to_string(cap) + " entries");
  }
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const auto& xs = op.output().indices();
  const auto& ys = op.input().indices();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = op.entry(xs[i], ys[j]);
    }
  }
  return m;
}

GridMask cube_mask(std::span<const int> n, std::span<const int> lo) {
  MultiIndex l(n.size(), 0);
  if (!lo.empty()) l.assign(lo.begin(), lo.end());
  for (int v : n) {
    if (v < 1) throw PreconditionError("cube_mask: sizes must be positive");
  }
  return GridMask::full(Box::from_extents(l, n));
}

ToeplitzSection toeplitz_matrix(const MultiSequence& a, std::span<const int> n) {
  if (static_cast<int>(n.size()) != a.dim()) throw PreconditionError("toeplitz_matrix: dimension mismatch");
  bool truncated = false;
  for (int i = 0; i < a.dim(); ++i) truncated = truncated || a.window().radii[i] < n[i];
  const GridMask cube = cube_mask(n);
  return ToeplitzSection{CorrelationOperator(Kernel::from_sequence(a), cube, cube, Flavor::Toeplitz), truncated};
}

FlipResult hankel_toeplitz_flip(const Kernel& f, const GridMask& mask, std::span<const int> two_z) {
  if (static_cast<int>(two_z.size()) != mask.dim() || f.dim() != mask.dim()) {
    throw PreconditionError("hankel_toeplitz_flip: dimension mismatch");
  }
  FlipResult out{f.shifted(two_z), {}};
  out.reflection.reserve(mask.size());
  MultiIndex y(mask.dim());
  for (const auto& x : mask.indices()) {
    for (int i = 0; i < mask.dim(); ++i) y[i] = -x[i] - two_z[i];
    const auto pos = mask.position(y);
    if (pos == GridMask::npos) {
      throw PreconditionError("hankel_toeplitz_flip: mask is not symmetric about -z");
    }
    out.reflection.push_back(pos);
  }
  return out;
}

void MollifierSpec::validate() const {
  if (n < 1) throw PreconditionError("mollifier: scale n must be >= 1");
  if (psi.empty() || psi.size() % 2 == 0) throw PreconditionError("mollifier: stencil length must be odd");
  double s = 0.0;
  for (double v : psi) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError("mollifier: stencil must be nonnegative");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12) throw PreconditionError("mollifier: stencil must sum to 1");
  if (window_radius < 0) throw PreconditionError("mollifier: window radius must be >= 0");
}

int MollifierSpec::stencil_radius() const {
  const int r = static_cast<int>(psi.size() / 2);
  return static_cast<int>(std::floor(static_cast<double>(r) / n + 0.5));
}

std::vector<double> MollifierSpec::scaled_stencil() const {
  validate();
  const int r = static_cast<int>(psi.size() / 2);
  const int rn = stencil_radius();
  std::vector<double> out(2 * rn + 1, 0.0);
  for (int j = -r; j <= r; ++j) {
    const int mag = static_cast<int>(std::floor(std::abs(j) / static_cast<double>(n) + 0.5));
    const int b = j < 0 ? -mag : mag;
    out[b + rn] += psi[j + r];
  }
  return out;
}

std::vector<double> mollifier_window(int m) {
  if (m < 1) throw PreconditionError("mollifier_window: radius must be >= 1");
  std::vector<double> eta(2 * m - 1);
  for (int j = -(m - 1); j <= m - 1; ++j) {
    const double c = std::cos(std::numbers::pi * j / (2.0 * m));
    eta[j + m - 1] = c * c;
  }
  double energy = 0.0;
  for (double e : eta) energy += e * e;
  const int r = 2 * (m - 1);
  std::vector<double> w(2 * r + 1, 0.0);
  for (int k = -r; k <= r; ++k) {
    double s = 0.0;
    for (int j = -(m - 1); j <= m - 1; ++j) {
      const int t = j + k;
      if (t >= -(m - 1) && t <= m - 1) s += eta[j + m - 1] * eta[t + m - 1];
    }
    w[k + r] = s / energy;
  }
  w[r] = 1.0;
  return w;
}

Kernel mollify(const Kernel& f, const MollifierSpec& spec) {
  const auto psi = spec.scaled_stencil();
  const int rn = spec.stencil_radius();
  const int d = f.dim();

  // Separable stencil convolution, one axis at a time.
  Box box = f.box();
  std::vector<Complex> vals(f.values().begin(), f.values().end());
  for (int ax = 0; ax < d; ++ax) {
    Box grown = box;
    grown.lo[ax] -= rn;
    grown.hi[ax] += rn;
    std::vector<Complex> next(grown.count());
    MultiIndex k = box.lo;
    std::size_t off = 0;
    do {
      const Complex v = vals[off++];
      if (v == Complex{}) continue;
      MultiIndex t = k;
      for (int s = -rn; s <= rn; ++s) {
        t[ax] = k[ax] + s;
        next[grown.offset(t)] += psi[s + rn] * v;
      }
    } while (next_index(box, k));
    box = std::move(grown);
    vals = std::move(next);
  }

  std::vector<double> omega;
  int wr = 0;
  if (spec.window_radius > 0) {
    omega = mollifier_window(spec.n * spec.window_radius);
    wr = static_cast<int>(omega.size() / 2);
  }
  MultiIndex k = box.lo;
  std::size_t off = 0;
  do {
    double w = 1.0;
    if (spec.cutoff && !spec.cutoff(k)) w = 0.0;
    for (int i = 0; i < d && w != 0.0 && !omega.empty(); ++i) {
      w *= std::abs(k[i]) <= wr ? omega[k[i] + wr] : 0.0;
    }
    vals[off++] *= w;
  } while (next_index(box, k));
  return Kernel(std::move(box), std::move(vals));
}

Kernel modulate(const Kernel& f, std::span<const Complex> mu) {
  if (mu.size() != f.values().size()) throw PreconditionError("modulate: multiplier shape does not match kernel box");
  std::vector<Complex> v(f.values().begin(), f.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= mu[i];
  return Kernel(f.box(), std::move(v));
}

double modulation_l1(const Box& box, std::span<const Complex> mu) {
  if (mu.size() != box.count()) throw PreconditionError("modulation_l1: multiplier shape does not match box");
  std::vector<Complex> buf(mu.begin(), mu.end());
  FftPlan(box.extents()).forward(buf);
  double s = 0.0;
  for (const auto& c : buf) s += std::abs(c);
  return s / static_cast<double>(buf.size());
}

}  // namespace gdh
