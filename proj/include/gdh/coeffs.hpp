#pragma once

#include <span>
#include <vector>

#include "gdh/lattice.hpp"

namespace gdh {

// Symmetric index window {-N_i+1, ..., N_i-1} per axis.
struct Window {
  std::vector<int> radii;

  Window() = default;
  explicit Window(std::vector<int> radii_);

  int dim() const { return static_cast<int>(radii.size()); }
  std::size_t size() const;
  /// The window as an inclusive integer box.
  Box box() const;
  bool contains(std::span<const int> n) const;
  /// Row-major offset; index 0 maps to the array centre.
  std::size_t offset(std::span<const int> n) const;
  MultiIndex index(std::size_t offset) const;

  friend bool operator==(const Window&, const Window&) = default;
};

// Finitely supported multi-sequence a_n on a symmetric window.
class MultiSequence {
 public:
  MultiSequence() = default;
  MultiSequence(Window window, std::vector<Complex> coeffs);

  static MultiSequence zeros(Window window);
  /// a = delta_0 on the given window.
  static MultiSequence delta(Window window);

  const Window& window() const { return window_; }
  int dim() const { return window_.dim(); }
  std::span<const Complex> coeffs() const { return coeffs_; }

  /// a_n, or 0 when n lies outside the window.
  Complex at(std::span<const int> n) const;
  void set(std::span<const int> n, Complex value);

  /// Same coefficients on a larger window (zero-filled).
  MultiSequence embedded(const Window& larger) const;
  /// a'_n = a_{-n}.
  MultiSequence reflected() const;

  double max_abs() const;
  double l1_norm() const;

 private:
  Window window_;
  std::vector<Complex> coeffs_;
};

// Trigonometric polynomial samples at theta_j = (j_1/G_1, ..., j_d/G_d).
struct SymbolGrid {
  std::vector<int> sizes;
  std::vector<Complex> values;

  double max_abs() const;
};

/// values[j] = sum_n a_n exp(-2 pi i n.theta_j), via one zero-padded FFT.
SymbolGrid eval_symbol(const MultiSequence& a, std::span<const int> sizes,
                       std::size_t cap = kDefaultGridCap);

/// Fourier coefficients of grid data restricted to `window`. Requires
/// G_i >= 2 N_i - 1 so that no two window indices alias.
MultiSequence coeffs_from_grid(const SymbolGrid& grid, const Window& window);

}  // namespace gdh
