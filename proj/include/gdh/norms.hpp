#pragma once

#include <cstdint>
#include <vector>

#include "gdh/geometry.hpp"
#include "gdh/operators.hpp"

namespace gdh {

struct NormEstimate {
  double value = 0.0;
  /// ||A v|| / ||v|| at the final iterate; never exceeds the true norm.
  double lower_certificate = 0.0;
  int iterations = 0;
  bool converged = false;
  double tol = 0.0;
};

/// Largest singular value of the dense matrix.
double norm_dense(const CorrelationOperator& op, std::size_t cap = kDefaultDenseCap);
double norm_dense(const Eigen::MatrixXcd& m);

/// Power iteration on A*A from a seeded complex Gaussian start.
NormEstimate norm_iterative(const CorrelationOperator& op, double tol = 1e-8, int max_iter = 5000,
                            std::uint64_t seed = 42);

struct TestFunctionSpec {
  Point xi;
  DirectionSpec nu;
  double eps = 0.1;
};

/// |<Theta_f E, E>| / ||E||^2 with E(x) = exp(eps x.nu + 2 pi i x.xi) on the mask.
double certificate_E_eps(const Kernel& f, const GridMask& mask, const TestFunctionSpec& spec, DomainKind kind);

struct CertificateSweep {
  std::vector<double> eps;
  /// Value per eps; NaN where the weights left the exponent range.
  std::vector<double> values;
  double best_eps = 0.0;
  double best_value = 0.0;
};

inline const std::vector<double> kDefaultEpsSweep{1e-1, 1e-2, 1e-3, 1e-4};

CertificateSweep certificate_sweep(const Kernel& f, const GridMask& mask, const Point& xi, const DirectionSpec& nu,
                                   DomainKind kind, const std::vector<double>& eps = kDefaultEpsSweep);

}  // namespace gdh
