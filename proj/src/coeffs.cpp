#include "gdh/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gdh/errors.hpp"
#include "gdh/fft.hpp"

namespace gdh {
namespace {

int wrap(int n, int g) {
  const int r = n % g;
  return r < 0 ? r + g : r;
}

std::size_t grid_offset(std::span<const int> n, std::span<const int> sizes) {
  std::size_t off = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    off = off * static_cast<std::size_t>(sizes[i]) + static_cast<std::size_t>(wrap(n[i], sizes[i]));
  }
  return off;
}

}  // namespace

Window::Window(std::vector<int> radii_) : radii(std::move(radii_)) {
  if (radii.empty()) throw PreconditionError("window: dimension must be >= 1");
  for (int r : radii) {
    if (r < 1) throw PreconditionError("window: radii must be positive");
  }
}

std::size_t Window::size() const {
  std::size_t n = 1;
  for (int r : radii) n *= static_cast<std::size_t>(2 * r - 1);
  return n;
}

Box Window::box() const {
  MultiIndex lo(radii.size()), hi(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    lo[i] = -(radii[i] - 1);
    hi[i] = radii[i] - 1;
  }
  return Box(std::move(lo), std::move(hi));
}

bool Window::contains(std::span<const int> n) const {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (std::abs(n[i]) > radii[i] - 1) return false;
  }
  return true;
}

std::size_t Window::offset(std::span<const int> n) const { return box().offset(n); }

MultiIndex Window::index(std::size_t offset) const { return box().index(offset); }

MultiSequence::MultiSequence(Window window, std::vector<Complex> coeffs)
    : window_(std::move(window)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != window_.size()) {
    throw PreconditionError("multisequence: expected " + std::to_string(window_.size()) +
                            " coefficients, got " + std::to_string(coeffs_.size()));
  }
  for (const auto& c : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw PreconditionError("multisequence: non-finite coefficient");
    }
  }
}

MultiSequence MultiSequence::zeros(Window window) {
  const auto n = window.size();
  return MultiSequence(std::move(window), std::vector<Complex>(n));
}

MultiSequence MultiSequence::delta(Window window) {
  auto a = zeros(std::move(window));
  a.set(MultiIndex(a.dim(), 0), 1.0);
  return a;
}

Complex MultiSequence::at(std::span<const int> n) const {
  if (!window_.contains(n)) return {};
  return coeffs_[window_.offset(n)];
}

void MultiSequence::set(std::span<const int> n, Complex value) {
  if (!window_.contains(n)) throw PreconditionError("multisequence: index outside window");
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw PreconditionError("multisequence: non-finite coefficient");
  }
  coeffs_[window_.offset(n)] = value;
}

MultiSequence MultiSequence::embedded(const Window& larger) const {
  if (larger.dim() != dim()) throw PreconditionError("multisequence: dimension mismatch");
  for (int i = 0; i < dim(); ++i) {
    if (larger.radii[i] < window_.radii[i]) {
      throw PreconditionError("multisequence: target window is smaller than source");
    }
  }
  auto out = zeros(larger);
  const Box box = window_.box();
  MultiIndex n = box.lo;
  std::size_t k = 0;
  do {
    out.coeffs_[larger.offset(n)] = coeffs_[k++];
  } while (next_index(box, n));
  return out;
}

MultiSequence MultiSequence::reflected() const {
  // Row-major over a symmetric box: negating every index reverses the order.
  std::vector<Complex> rev(coeffs_.rbegin(), coeffs_.rend());
  return MultiSequence(window_, std::move(rev));
}

double MultiSequence::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double MultiSequence::l1_norm() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::abs(c);
  return s;
}

double SymbolGrid::max_abs() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

SymbolGrid eval_symbol(const MultiSequence& a, std::span<const int> sizes, std::size_t cap) {
  if (static_cast<int>(sizes.size()) != a.dim()) {
    throw PreconditionError("eval_symbol: grid dimension does not match sequence");
  }
  const std::size_t total = checked_product(sizes, cap, "eval_symbol");
  SymbolGrid grid{std::vector<int>(sizes.begin(), sizes.end()), std::vector<Complex>(total)};

  // Indices are reduced mod G; coarse grids alias correctly because
  // exp(-2 pi i n j / G) is G-periodic in n.
  const Box box = a.window().box();
  MultiIndex n = box.lo;
  std::size_t k = 0;
  const auto coeffs = a.coeffs();
  do {
    grid.values[grid_offset(n, sizes)] += coeffs[k++];
  } while (next_index(box, n));

  FftPlan(grid.sizes).forward(grid.values);
  return grid;
}

MultiSequence coeffs_from_grid(const SymbolGrid& grid, const Window& window) {
  if (static_cast<int>(grid.sizes.size()) != window.dim()) {
    throw PreconditionError("coeffs_from_grid: dimension mismatch");
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < grid.sizes.size(); ++i) {
    if (grid.sizes[i] < 2 * window.radii[i] - 1) {
      throw PreconditionError("coeffs_from_grid: window wider than alias-free band on axis " +
                              std::to_string(i));
    }
    total *= static_cast<std::size_t>(grid.sizes[i]);
  }
  if (grid.values.size() != total) throw PreconditionError("coeffs_from_grid: value count mismatch");

  std::vector<Complex> buf = grid.values;
  FftPlan(grid.sizes).backward(buf);
  const double scale = 1.0 / static_cast<double>(total);

  auto out = MultiSequence::zeros(window);
  const Box box = window.box();
  MultiIndex n = box.lo;
  do {
    out.set(n, buf[grid_offset(n, grid.sizes)] * scale);
  } while (next_index(box, n));
  return out;
}

}  // namespace gdh
