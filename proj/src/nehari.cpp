#include "gdh/nehari.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "gdh/errors.hpp"
#include "gdh/fft.hpp"
#include "gdh/norms.hpp"
#include "gdh/operators.hpp"

namespace gdh {
namespace {

std::size_t wrapped_offset(std::span<const int> n, std::span<const int> g) {
  std::size_t off = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    int r = n[i] % g[i];
    if (r < 0) r += g[i];
    off = off * static_cast<std::size_t>(g[i]) + static_cast<std::size_t>(r);
  }
  return off;
}

enum class Verdict { Feasible, Infeasible, Undecided };

// Grid-space alternating projections between the affine set of symbols with
// prescribed window coefficients and the ball {|y_j| <= t}.
class LevelSolver {
 public:
  explicit LevelSolver(const ExtensionProblem& p)
      : p_(p), fft_(p.grid), size_(fft_.size()), in_m_(size_, 0), best_spec_(size_) {
    const Box mbox = Window(p.ext_radii).box();
    MultiIndex n = mbox.lo;
    do {
      in_m_[wrapped_offset(n, p.grid)] = 1;
    } while (next_index(mbox, n));
    const Box wbox = p.a.window().box();
    n = wbox.lo;
    std::size_t k = 0;
    do {
      fixed_.emplace_back(wrapped_offset(n, p.grid), p.a.coeffs()[k++]);
    } while (next_index(wbox, n));
    if (p.warm_start) {
      const Box sbox = p.warm_start->window().box();
      n = sbox.lo;
      k = 0;
      do {
        best_spec_[wrapped_offset(n, p.grid)] = p.warm_start->coeffs()[k++];
      } while (next_index(sbox, n));
    }
    for (const auto& [off, v] : fixed_) best_spec_[off] = v;
    std::vector<Complex> y;
    synth(best_spec_, y);
    best_max_ = max_abs(y);
  }

  double best_max() const { return best_max_; }
  const std::vector<Complex>& best_spec() const { return best_spec_; }
  int iterations() const { return iterations_; }

  Verdict check(double t) {
    const double accept = t * (1.0 + p_.tol / 4.0);
    std::vector<Complex> x, x_new, z, w, spec;
    synth(best_spec_, x);
    z = x;
    double theta = 1.0;
    double d_prev = std::numeric_limits<double>::infinity();
    double d_mark = std::numeric_limits<double>::quiet_NaN();

    for (int it = 1; it <= p_.max_iter; ++it) {
      ++iterations_;
      w = z;
      for (auto& v : w) {
        const double a = std::abs(v);
        if (a > t) v *= t / a;
      }
      project(w, spec, x_new);
      const double m = max_abs(x_new);
      if (m < best_max_) {
        best_max_ = m;
        best_spec_ = spec;
      }
      if (m <= accept) return Verdict::Feasible;

      double d2 = 0.0;
      for (const auto& v : x_new) {
        const double e = std::abs(v) - t;
        if (e > 0.0) d2 += e * e;
      }
      const double d = std::sqrt(d2);

      if (d > d_prev) {
        theta = 1.0;
        z = x_new;
      } else {
        const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        const double beta = (theta - 1.0) / theta_next;
        for (std::size_t i = 0; i < size_; ++i) z[i] = x_new[i] + beta * (x_new[i] - x[i]);
        theta = theta_next;
      }
      x.swap(x_new);
      d_prev = d;

      if (it % 100 == 0) {
        if (!std::isnan(d_mark)) {
          const double rate = (d_mark - d) / 100.0;
          if (rate <= 0.0 || d / rate > static_cast<double>(p_.max_iter - it)) return Verdict::Infeasible;
        }
        d_mark = d;
      }
    }
    return Verdict::Undecided;
  }

 private:
  void synth(const std::vector<Complex>& spec, std::vector<Complex>& y) const {
    y = spec;
    fft_.forward(y);
  }

  void project(std::vector<Complex>& w, std::vector<Complex>& spec, std::vector<Complex>& y) const {
    fft_.backward(w);
    const double scale = 1.0 / static_cast<double>(size_);
    spec.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) spec[i] = in_m_[i] ? w[i] * scale : Complex{};
    for (const auto& [off, v] : fixed_) spec[off] = v;
    synth(spec, y);
  }

  static double max_abs(const std::vector<Complex>& y) {
    double m = 0.0;
    for (const auto& v : y) m = std::max(m, std::abs(v));
    return m;
  }

  const ExtensionProblem& p_;
  FftPlan fft_;
  std::size_t size_;
  std::vector<std::uint8_t> in_m_;
  std::vector<std::pair<std::size_t, Complex>> fixed_;
  std::vector<Complex> best_spec_;
  double best_max_ = 0.0;
  int iterations_ = 0;
};

double section_norm(const MultiSequence& a, int n) {
  const std::vector<int> sizes(a.dim(), n);
  const auto sec = toeplitz_matrix(a, sizes);
  const auto rows = sec.op.rows();
  if (rows * rows <= kDefaultDenseCap) return norm_dense(sec.op);
  return norm_iterative(sec.op, 1e-12, 20000, 7).value;
}

}  // namespace

ExtensionProblem ExtensionProblem::with_defaults(MultiSequence a, double tol, int max_iter) {
  ExtensionProblem p{std::move(a), {}, {}, tol, max_iter, std::nullopt};
  for (int r : p.a.window().radii) {
    p.ext_radii.push_back(4 * r);
    p.grid.push_back(32 * r);
  }
  return p;
}

void ExtensionProblem::validate() const {
  const int d = a.dim();
  if (d < 1) throw PreconditionError("extension: empty coefficient window");
  if (static_cast<int>(ext_radii.size()) != d || static_cast<int>(grid.size()) != d) {
    throw PreconditionError("extension: radii and grid must have one entry per axis");
  }
  for (int i = 0; i < d; ++i) {
    if (ext_radii[i] < a.window().radii[i]) {
      throw PreconditionError("extension: extension radius smaller than the coefficient window on axis " +
                              std::to_string(i));
    }
    if (grid[i] < 8 * ext_radii[i]) {
      throw PreconditionError("extension: grid must be at least 8x the extension radius on axis " + std::to_string(i));
    }
  }
  checked_product(grid, kDefaultGridCap, "extension grid");
  if (!(tol > 0.0)) throw PreconditionError("extension: tol must be positive");
  if (max_iter < 100) throw PreconditionError("extension: max_iter must be >= 100");
  if (warm_start) {
    if (warm_start->dim() != d) throw PreconditionError("extension: warm start dimension mismatch");
    for (int i = 0; i < d; ++i) {
      if (warm_start->window().radii[i] > ext_radii[i]) {
        throw PreconditionError("extension: warm start is wider than the extension radii");
      }
    }
  }
  bernstein_factor(ext_radii, grid);
}

double bernstein_factor(const std::vector<int>& ext_radii, const std::vector<int>& grid) {
  double s = 0.0;
  for (std::size_t i = 0; i < ext_radii.size(); ++i) s += (ext_radii[i] - 1) / static_cast<double>(grid[i]);
  const double den = 1.0 - std::numbers::pi * s;
  if (!(den > 0.0)) {
    throw PreconditionError("extension: Bernstein denominator is not positive; increase the grid size");
  }
  return 1.0 / den;
}

ExtensionResult min_linf_extension(const ExtensionProblem& p) {
  p.validate();
  LevelSolver solver(p);
  double lo = p.a.max_abs();
  double hi = solver.best_max();
  bool decided = true;
  int steps = 0;
  while (hi - lo > p.tol * hi && steps < 200) {
    ++steps;
    const double t = 0.5 * (lo + hi);
    const auto verdict = solver.check(t);
    if (verdict == Verdict::Feasible) {
      hi = std::min(hi, solver.best_max());
    } else {
      if (verdict == Verdict::Undecided) decided = false;
      lo = t;
      hi = std::min(hi, solver.best_max());
    }
  }

  ExtensionResult r;
  r.t_grid = solver.best_max();
  r.t_lower = std::min(lo, r.t_grid);
  r.iterations = solver.iterations();
  r.bisection_steps = steps;
  r.converged = decided && hi - lo <= p.tol * hi;

  const Window mw(p.ext_radii);
  auto ext = MultiSequence::zeros(mw);
  const Box mbox = mw.box();
  const auto& spec = solver.best_spec();
  std::vector<int> degree(p.a.dim(), 0);
  MultiIndex n = mbox.lo;
  do {
    const Complex c = spec[wrapped_offset(n, p.grid)];
    ext.set(n, c);
    if (c != Complex{}) {
      for (int i = 0; i < p.a.dim(); ++i) degree[i] = std::max(degree[i], std::abs(n[i]));
    }
  } while (next_index(mbox, n));

  const Box wbox = p.a.window().box();
  n = wbox.lo;
  do {
    r.window_residual = std::max(r.window_residual, std::abs(ext.at(n) - p.a.at(n)));
  } while (next_index(wbox, n));

  // Bernstein inflation with the realised degree of the extension.
  std::vector<int> eff(degree.size());
  for (std::size_t i = 0; i < eff.size(); ++i) eff[i] = degree[i] + 1;
  r.t_cert = r.t_grid * bernstein_factor(eff, p.grid);
  r.extension = std::move(ext);
  return r;
}

CertifiedExtension extend_and_certify(const MultiSequence& a, const SolverParams& sp) {
  const auto& radii = a.window().radii;
  for (int r : radii) {
    if (r != radii.front()) throw PreconditionError("extend_and_certify: window must be a cube");
  }
  if (sp.ext_factor < 1 || sp.grid_factor < 8 || sp.section_check < 1) {
    throw PreconditionError("extend_and_certify: invalid solver parameters");
  }
  ExtensionProblem p{a, {}, {}, sp.tol, sp.max_iter, std::nullopt};
  for (int r : radii) {
    p.ext_radii.push_back(sp.ext_factor * r);
    p.grid.push_back(sp.grid_factor * sp.ext_factor * r);
  }

  CertifiedExtension out;
  out.ext = min_linf_extension(p);
  const int n = radii.front();
  out.section_norm = section_norm(a, n);
  out.ratio = out.section_norm > 0.0 ? out.ext.t_cert / out.section_norm : std::numeric_limits<double>::infinity();
  out.sections_bounded = true;
  for (int s = 1; s <= sp.section_check; ++s) {
    const double v = section_norm(out.ext.extension, s * n);
    out.max_extension_section = std::max(out.max_extension_section, v);
    out.sections_bounded = out.sections_bounded && v <= out.ext.t_cert + 1e-9;
  }
  return out;
}

Ensemble parse_ensemble(const std::string& name) {
  if (name == "complex-gaussian") return Ensemble::ComplexGaussian;
  if (name == "real-symmetric") return Ensemble::RealSymmetric;
  if (name == "pm1") return Ensemble::PlusMinusOne;
  throw ParseError("unknown ensemble '" + name + "' (expected complex-gaussian, real-symmetric or pm1)");
}

std::string ensemble_name(Ensemble e) {
  switch (e) {
    case Ensemble::ComplexGaussian:
      return "complex-gaussian";
    case Ensemble::RealSymmetric:
      return "real-symmetric";
    case Ensemble::PlusMinusOne:
      return "pm1";
  }
  return "unknown";
}

MultiSequence random_sequence(const Window& w, Ensemble e, std::mt19937_64& rng) {
  auto a = MultiSequence::zeros(w);
  const Box box = w.box();
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  std::normal_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  MultiIndex n = box.lo, m(n.size());
  do {
    switch (e) {
      case Ensemble::ComplexGaussian: {
        const double re = half(rng);
        a.set(n, {re, half(rng)});
        break;
      }
      case Ensemble::RealSymmetric: {
        for (std::size_t i = 0; i < n.size(); ++i) m[i] = -n[i];
        // Fill each +-n pair once, on its row-major-first member.
        if (box.offset(n) <= box.offset(m)) {
          const double v = unit(rng);
          a.set(n, v);
          a.set(m, v);
        }
        break;
      }
      case Ensemble::PlusMinusOne:
        a.set(n, coin(rng) ? 1.0 : -1.0);
        break;
    }
  } while (next_index(box, n));
  return a;
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) { return seed ^ static_cast<std::uint64_t>(trial); }

SweepReport sweep_constant(const SweepConfig& cfg) {
  if (cfg.trials < 1) throw PreconditionError("sweep: trials must be >= 1");
  if (cfg.d < 1 || cfg.n < 1) throw PreconditionError("sweep: d and n must be >= 1");
  SweepReport rep;
  rep.d = cfg.d;
  rep.n = cfg.n;
  rep.trials = cfg.trials;
  rep.seed = cfg.seed;
  rep.ensemble = cfg.generator ? "custom" : ensemble_name(cfg.ensemble);
  rep.rows.resize(cfg.trials);

  const Window w(std::vector<int>(cfg.d, cfg.n));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(cfg.trials);
  auto worker = [&] {
    for (int t = next++; t < cfg.trials; t = next++) {
      try {
        const auto s = trial_seed(cfg.seed, t);
        MultiSequence a;
        if (cfg.generator) {
          a = cfg.generator(s);
        } else {
          std::mt19937_64 rng(s);
          a = random_sequence(w, cfg.ensemble, rng);
        }
        const auto res = extend_and_certify(a, cfg.solver);
        rep.rows[t] = SweepRow{t, s, res.section_norm, res.ext.t_cert, res.ratio, res.ext.converged};
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const int nthreads = std::clamp(cfg.threads, 1, cfg.trials);
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<double> ratios;
  for (const auto& row : rep.rows) {
    if (row.converged) {
      ratios.push_back(row.ratio);
    } else {
      ++rep.nonconverged;
    }
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    rep.max_ratio = ratios.back();
    rep.min_ratio = ratios.front();
    const auto m = ratios.size();
    rep.median_ratio = m % 2 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
  } else {
    rep.max_ratio = rep.median_ratio = rep.min_ratio = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

std::vector<double> section_norm_growth(const MultiSequence& a, const std::vector<int>& sizes) {
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw PreconditionError("section_norm_growth: sizes must be positive and increasing");
    }
  }
  std::vector<double> out;
  for (int n : sizes) out.push_back(section_norm(a, n));
  return out;
}

std::vector<double> section_norm_growth(const SymbolGrid& symbol, const std::vector<int>& sizes) {
  if (sizes.empty()) return {};
  const int nmax = *std::max_element(sizes.begin(), sizes.end());
  const Window w(std::vector<int>(symbol.sizes.size(), nmax));
  return section_norm_growth(coeffs_from_grid(symbol, w), sizes);
}

}  // namespace gdh
