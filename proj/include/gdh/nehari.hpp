#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gdh/coeffs.hpp"

namespace gdh {

struct ExtensionProblem {
  MultiSequence a;
  std::vector<int> ext_radii;
  std::vector<int> grid;
  double tol = 1e-6;
  int max_iter = 20000;
  /// Optional starting extension, no wider than the extension radii. Its
  /// entries on a's window are replaced by a.
  std::optional<MultiSequence> warm_start;

  /// M = 4N and G = 8M per axis.
  static ExtensionProblem with_defaults(MultiSequence a, double tol = 1e-6, int max_iter = 20000);
  void validate() const;
};

struct ExtensionResult {
  MultiSequence extension;
  double t_grid = 0.0;
  double t_cert = 0.0;
  double window_residual = 0.0;
  int iterations = 0;
  int bisection_steps = 0;
  /// Largest level proved infeasible on the grid (lower end of the final bracket).
  double t_lower = 0.0;
  bool converged = false;
};

/// 1 / (1 - pi * sum (M_i - 1) / G_i); throws when the denominator is not positive.
double bernstein_factor(const std::vector<int>& ext_radii, const std::vector<int>& grid);

ExtensionResult min_linf_extension(const ExtensionProblem& p);

struct SolverParams {
  /// Extension radius is ext_factor * N per axis.
  int ext_factor = 4;
  /// Grid size is grid_factor * M per axis.
  int grid_factor = 8;
  double tol = 1e-6;
  int max_iter = 20000;
  /// Sections of the extension are checked at sizes N, 2N, ..., section_check * N.
  int section_check = 4;
};

struct CertifiedExtension {
  ExtensionResult ext;
  double section_norm = 0.0;
  double ratio = 0.0;
  /// Largest section norm of the extension over the checked sizes.
  double max_extension_section = 0.0;
  bool sections_bounded = false;
};

CertifiedExtension extend_and_certify(const MultiSequence& a, const SolverParams& p = {});

enum class Ensemble { ComplexGaussian, RealSymmetric, PlusMinusOne };

Ensemble parse_ensemble(const std::string& name);
std::string ensemble_name(Ensemble e);

/// Draws coefficients on the window; the same engine state gives the same sequence.
MultiSequence random_sequence(const Window& w, Ensemble e, std::mt19937_64& rng);

struct SweepConfig {
  int d = 1;
  int n = 2;
  int trials = 1;
  std::uint64_t seed = 42;
  Ensemble ensemble = Ensemble::ComplexGaussian;
  SolverParams solver;
  int threads = 1;
  /// Overrides the ensemble; called with the per-trial seed.
  std::function<MultiSequence(std::uint64_t)> generator;
};

struct SweepRow {
  int trial = 0;
  std::uint64_t seed = 0;
  double section_norm = 0.0;
  double t_cert = 0.0;
  double ratio = 0.0;
  bool converged = false;
};

struct SweepReport {
  int d = 1;
  int n = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::string ensemble;
  std::vector<SweepRow> rows;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  double min_ratio = 0.0;
  int nonconverged = 0;
};

std::uint64_t trial_seed(std::uint64_t seed, int trial);

SweepReport sweep_constant(const SweepConfig& cfg);

/// Norms of the Toeplitz sections of `a` at the given cube sizes.
std::vector<double> section_norm_growth(const MultiSequence& a, const std::vector<int>& sizes);
/// Same, with coefficients taken from symbol samples.
std::vector<double> section_norm_growth(const SymbolGrid& symbol, const std::vector<int>& sizes);

}  // namespace gdh
