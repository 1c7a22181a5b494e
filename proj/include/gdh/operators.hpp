#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gdh/coeffs.hpp"
#include "gdh/geometry.hpp"
#include "gdh/lattice.hpp"

namespace gdh {

// Finitely supported lattice function; zero outside `box`.
class Kernel {
 public:
  Kernel() = default;
  Kernel(Box box, std::vector<Complex> values);

  static Kernel delta(MultiIndex at, Complex value = 1.0);
  static Kernel constant(Box box, Complex value);
  static Kernel from_sequence(const MultiSequence& a);

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  std::span<const Complex> values() const { return values_; }

  Complex at(std::span<const int> k) const;
  /// k -> f(k + shift).
  Kernel shifted(std::span<const int> shift) const;
  /// k -> conj(f(-k)).
  Kernel reflected_conj() const;
  Kernel conj() const;
  /// Restriction to the intersection with `window` (may be all zero).
  Kernel cropped(const Box& window) const;

 private:
  Box box_;
  std::vector<Complex> values_;
};

enum class Flavor {
  Correlation,  ///< (Psi g)(x) = sum_y f(x+y) g(y)
  Toeplitz,     ///< (Theta g)(x) = sum_y f(x-y) g(y)
};

// Kernel operator from vectors on `input` cells to vectors on `output` cells,
// applied by one zero-padded FFT convolution over the bounding boxes.
class CorrelationOperator {
 public:
  CorrelationOperator(Kernel kernel, GridMask input, GridMask output, Flavor flavor);

  const Kernel& kernel() const { return kernel_; }
  const GridMask& input() const { return input_; }
  const GridMask& output() const { return output_; }
  Flavor flavor() const { return flavor_; }
  std::size_t rows() const { return output_.size(); }
  std::size_t cols() const { return input_.size(); }

  /// Kernel value coupling output cell x and input cell y.
  Complex entry(std::span<const int> x, std::span<const int> y) const;

  std::vector<Complex> apply(std::span<const Complex> g) const;
  std::vector<Complex> apply_adjoint(std::span<const Complex> h) const;
  CorrelationOperator adjoint() const;

 private:
  struct Plan;
  Kernel kernel_;
  GridMask input_;
  GridMask output_;
  Flavor flavor_;
  std::shared_ptr<const Plan> plan_;
};

/// Hankel operator Gamma_f on one mask (Psi with equal input and output).
CorrelationOperator hankel(Kernel f, const GridMask& mask);

Eigen::MatrixXcd materialize_dense(const CorrelationOperator& op, std::size_t cap = kDefaultDenseCap);

/// Cube {0..N_1-1} x ... x {0..N_d-1}.
GridMask cube_mask(std::span<const int> n, std::span<const int> lo = {});

struct ToeplitzSection {
  CorrelationOperator op;
  /// Set when the window is narrower than the section, so some coefficients were taken as 0.
  bool truncated = false;
};

/// T_a(v)(m) = sum_n a_{m-n} v_n on the cube {0..N-1}^d.
ToeplitzSection toeplitz_matrix(const MultiSequence& a, std::span<const int> n);

struct FlipResult {
  Kernel kernel;
  /// reflection[i] is the position in the mask of -x_i - 2z.
  std::vector<std::size_t> reflection;
};

/// Theta_f g = Gamma_{f~} g~ with f~(x) = f(x + 2z), g~(x) = g(-x - 2z).
/// `two_z` is 2z, which may be odd for half-integer centres.
FlipResult hankel_toeplitz_flip(const Kernel& f, const GridMask& mask, std::span<const int> two_z);

struct MollifierSpec {
  int n = 1;
  /// Odd-length nonnegative 1-D stencil summing to 1, applied on every axis.
  std::vector<double> psi{1.0};
  /// omega_n is built from a bump of radius n * window_radius; 0 means omega = 1.
  int window_radius = 0;
  /// Cutoff rho_n; empty means rho = 1.
  std::function<bool(std::span<const int>)> cutoff;

  void validate() const;
  /// psi_n after rescaling by n.
  std::vector<double> scaled_stencil() const;
  int stencil_radius() const;
};

/// Normalised autocorrelation of a cos^2 bump of radius m, as values at
/// k = -2(m-1), ..., 2(m-1). The centre value is 1 and the DFT is nonnegative.
std::vector<double> mollifier_window(int m);

Kernel mollify(const Kernel& f, const MollifierSpec& spec);

Kernel modulate(const Kernel& f, std::span<const Complex> mu);

/// sum_k |mu^_k| for mu periodised over the kernel box.
double modulation_l1(const Box& box, std::span<const Complex> mu);

}  // namespace gdh
