#pragma once

#include <vector>

#include "gdh/lattice.hpp"

namespace gdh {

// Samples of g at x_j = j / G on [0,1)^d, row-major.
struct CubeFunction {
  int d = 1;
  int G = 2;
  /// g vanishes on cells with some j_i < margin or j_i > G - margin.
  int margin = 0;
  std::vector<Complex> values;

  void validate() const;
};

struct FactorTerm {
  MultiIndex k;
  Complex a;
};

struct FactorizationResult {
  std::vector<FactorTerm> terms;
  double residual_sup = 0.0;
  double partial_l1 = 0.0;
  /// 2^-d * partial_l1, the sum of ||g_k|| ||h_k|| over the terms.
  double nuclear_norm = 0.0;
};

/// Samples of Lambda(x) = prod (1/2 - |x_i - 1/2|) at x_j = j / G.
std::vector<double> tent_grid(int d, int G);

struct FactorizeOptions {
  /// Accept margin < 2; cells where Lambda = 0 are then filled so that
  /// g / Lambda has no Nyquist component along any axis (G must be even).
  bool relaxed_margin = false;
};

FactorizationResult weak_factorize(const CubeFunction& g, int K, const FactorizeOptions& opt = {});

/// sup_x |(h_k * h_k)(x) - e^{2 pi i k.x} Lambda(x)| for the Riemann-sum convolution at spacing 1/G.
double verify_convolution_identity(const MultiIndex& k, int G);

/// Samples of sum_k a_k e^{2 pi i k.x} Lambda(x).
CubeFunction reconstruct(const std::vector<FactorTerm>& terms, int d, int G);

}  // namespace gdh
