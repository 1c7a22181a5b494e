#include "gdh/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "gdh/errors.hpp"

namespace gdh {
namespace {

double norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace

double norm_dense(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  // Largest eigenvalue of the smaller Gram matrix.
  const Eigen::MatrixXcd gram = m.rows() >= m.cols() ? Eigen::MatrixXcd(m.adjoint() * m) : Eigen::MatrixXcd(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error("norm_dense: eigenvalue iteration failed");
  return std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0));
}

double norm_dense(const CorrelationOperator& op, std::size_t cap) { return norm_dense(materialize_dense(op, cap)); }

NormEstimate norm_iterative(const CorrelationOperator& op, double tol, int max_iter, std::uint64_t seed) {
  if (!(tol > 0.0)) throw PreconditionError("norm_iterative: tol must be positive");
  if (max_iter < 1) throw PreconditionError("norm_iterative: max_iter must be >= 1");
  NormEstimate est;
  est.tol = tol;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  std::vector<Complex> v(op.cols());
  for (auto& x : v) x = {gauss(rng), gauss(rng)};
  double nv = norm(v);
  for (auto& x : v) x /= nv;

  double prev = 0.0;
  int calm = 0;
  for (int it = 1; it <= max_iter; ++it) {
    const auto av = op.apply(v);
    const auto w = op.apply_adjoint(av);
    const double nav = norm(av);
    const double nw = norm(w);
    est.iterations = it;
    est.lower_certificate = std::max(est.lower_certificate, nav);
    // ||A*A v|| >= ||Av||^2 for unit v, so sqrt(||A*A v||) never falls below the certificate.
    est.value = std::max(std::sqrt(nw), est.lower_certificate);
    if (nw == 0.0) {
      est.converged = true;
      break;
    }
    const double change = std::abs(est.value - prev) / est.value;
    calm = change < tol ? calm + 1 : 0;
    prev = est.value;
    if (calm >= 3) {
      est.converged = true;
      break;
    }
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / nw;
  }
  return est;
}

double certificate_E_eps(const Kernel& f, const GridMask& mask, const TestFunctionSpec& spec, DomainKind kind) {
  const int d = mask.dim();
  if (static_cast<int>(spec.xi.size()) != d || static_cast<int>(spec.nu.nu.size()) != d) {
    throw PreconditionError("certificate_E_eps: dimension mismatch");
  }
  if (!(spec.eps > 0.0)) throw PreconditionError("certificate_E_eps: eps must be positive");
  if (!validate_direction(spec.nu, kind)) {
    throw PreconditionError("certificate_E_eps: direction nu is not in the barrier cone of the domain");
  }

  const auto& cells = mask.indices();
  std::vector<double> expo(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += cells[c][i] * spec.nu.nu[i];
    expo[c] = spec.eps * s;
  }
  const auto [mn, mx] = std::minmax_element(expo.begin(), expo.end());
  if (*mx - *mn > 700.0) {
    throw RangeError("certificate_E_eps: exponential weight spans e^" + std::to_string(*mx - *mn) +
                     "; use a smaller eps or a smaller bounding box");
  }
  const double top = *mx;
  std::vector<Complex> e(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    // Phase reduced mod 1 before scaling by 2 pi keeps rational xi exact.
    double phase = 0.0;
    for (int i = 0; i < d; ++i) phase += std::fmod(cells[c][i] * spec.xi[i], 1.0);
    phase = std::fmod(phase, 1.0);
    e[c] = std::exp(expo[c] - top) * std::polar(1.0, 2.0 * std::numbers::pi * phase);
  }
  const CorrelationOperator op(f, mask, mask, Flavor::Toeplitz);
  const auto te = op.apply(e);
  Complex num{};
  double den = 0.0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    num += te[c] * std::conj(e[c]);
    den += std::norm(e[c]);
  }
  if (!(den > 0.0)) throw RangeError("certificate_E_eps: test function underflowed");
  return std::abs(num) / den;
}

CertificateSweep certificate_sweep(const Kernel& f, const GridMask& mask, const Point& xi, const DirectionSpec& nu,
                                   DomainKind kind, const std::vector<double>& eps) {
  if (eps.empty()) throw PreconditionError("certificate_sweep: eps list is empty");
  CertificateSweep out;
  out.eps = eps;
  bool any = false;
  for (double e : eps) {
    double v = std::numeric_limits<double>::quiet_NaN();
    try {
      v = certificate_E_eps(f, mask, TestFunctionSpec{xi, nu, e}, kind);
    } catch (const RangeError&) {
    }
    out.values.push_back(v);
    if (!std::isnan(v) && (!any || v > out.best_value)) {
      any = true;
      out.best_value = v;
      out.best_eps = e;
    }
  }
  if (!any) {
    throw RangeError("certificate_sweep: every eps overflowed the exponent range; use smaller eps values");
  }
  return out;
}

}  // namespace gdh
