// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gdh/cli.hpp"
#include "gdh/errors.hpp"
#include "gdh/factorization.hpp"
#include "gdh/geometry.hpp"
#include "gdh/harness.hpp"
#include "gdh/nehari.hpp"
#include "gdh/norms.hpp"
#include "gdh/operators.hpp"

using namespace gdh;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Verdict suite_verdict(const std::string& name, std::uint64_t seed, int count) {
  const auto r = run_suite(name, seed, count);
  Verdict v;
  v.ok = r.passed;
  std::ostringstream s;
  s << r.cases.size() << " checks, " << r.failures() << " failed, worst deviation/tolerance " << r.worst_ratio();
  for (const auto& c : r.cases) {
    if (!c.passed) {
      s << "; first failure " << c.name << " dev=" << c.deviation << " tol=" << c.tolerance;
      break;
    }
  }
  v.detail = s.str();
  return v;
}

Verdict oracle_equivalence() { return suite_verdict("oracle", 1001, 100); }

Verdict trivial_norms() {
  std::mt19937_64 rng(1002);
  double worst_delta = 0.0, worst_ones = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int d = 1 + i % 2;
    const auto mask = gen::blob(rng, d, 1 + static_cast<int>(rng() % 150));
    const CorrelationOperator id(Kernel::delta(MultiIndex(d, 0)), mask, mask, Flavor::Toeplitz);
    worst_delta = std::max(worst_delta, std::abs(norm_dense(id) - 1.0));
    worst_delta = std::max(worst_delta, std::abs(norm_iterative(id, 1e-12, 1000).value - 1.0));
  }
  bool ok = worst_delta <= 1e-10;
  for (int n : {1, 7, 50, 200, 1000}) {
    const auto mask = cube_mask(std::vector<int>{n});
    const auto op = hankel(Kernel::constant(mask.box().plus(mask.box()), 1.0), mask);
    const double v = n <= 200 ? norm_dense(op) : norm_iterative(op, 1e-12, 1000).value;
    worst_ones = std::max(worst_ones, std::abs(v - n) / n);
  }
  std::mt19937_64 rng2(1003);
  for (int i = 0; i < 10; ++i) {
    const auto mask = gen::blob(rng2, 2, 5 + static_cast<int>(rng2() % 100));
    const auto op = hankel(Kernel::constant(mask.box().plus(mask.box()), 1.0), mask);
    const double n = static_cast<double>(mask.size());
    worst_ones = std::max(worst_ones, std::abs(norm_dense(op) - n) / n);
  }
  ok = ok && worst_ones <= 1e-8;
  return {ok, fmt("delta |norm-1| max %.2e (tol 1e-10), ones |norm-n|/n max %.2e (tol 1e-8)", worst_delta,
                  worst_ones)};
}

Verdict extension_constant() {
  Verdict v;
  std::ostringstream s;
  for (int n : {2, 3, 4}) {
    SweepConfig cfg;
    cfg.n = n;
    cfg.trials = 200;
    cfg.seed = 1004 + static_cast<std::uint64_t>(n);
    const auto rep = sweep_constant(cfg);
    const bool ok = rep.max_ratio <= 3.1 && rep.min_ratio >= 1.0 - 1e-6;
    v.ok = v.ok && ok;
    s << "N=" << n << " max " << rep.max_ratio << " median " << rep.median_ratio << " min " << rep.min_ratio
      << " nonconverged " << rep.nonconverged << "; ";
  }
  v.detail = s.str();
  return v;
}

Verdict singleton_exactness() {
  std::mt19937_64 rng(1005);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int d = 1 + i % 2;
    std::vector<int> radii(d);
    for (auto& r : radii) r = 1 + static_cast<int>(rng() % 3);
    auto a = MultiSequence::zeros(Window(radii));
    MultiIndex k(d);
    for (int j = 0; j < d; ++j) k[j] = static_cast<int>(rng() % (2 * radii[j] - 1)) - (radii[j] - 1);
    const Complex w = gen::gaussian(rng);
    a.set(k, w);
    const auto r = min_linf_extension(ExtensionProblem::with_defaults(a));
    worst = std::max(worst, std::abs(r.t_grid - std::abs(w)));
  }
  return {worst <= 1e-6, fmt("max |t_grid - |a_k|| = %.2e over 20 cases (tol 1e-6)", worst)};
}

Verdict section_growth() {
  const MultiSequence a(Window({2}), {1.0, 0.0, 1.0});
  const std::vector<int> sizes{15, 63, 255, 511};
  const auto v = section_norm_growth(a, sizes);
  double worst = 0.0;
  bool monotone = true, bounded = true;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    worst = std::max(worst, std::abs(v[i] - 2.0 * std::cos(std::numbers::pi / (sizes[i] + 1))));
    if (i > 0) monotone = monotone && v[i] >= v[i - 1];
    bounded = bounded && v[i] <= 2.0;
  }
  return {worst <= 1e-6 && monotone && bounded,
          fmt("max deviation from 2cos(pi/(N+1)) %.2e, nondecreasing %g, <= 2 %g, N=511 norm %.12f", worst, monotone,
              bounded, v.back())};
}

Verdict certificate() {
  const StaircaseSpec s{1, {{{0.0}, {1e9}}}, 4096.5};
  const auto mask = rasterize(s, 1.0);
  const Kernel f(Box({-1}, {1}), {1.0, 0.0, 1.0});
  const CorrelationOperator op(f, mask, mask, Flavor::Toeplitz);
  const double iter = norm_iterative(op, 1e-10, 20000, 7).value;
  Verdict v;
  std::ostringstream out;
  out << "L=" << mask.size() << " iterative norm " << iter << ";";
  for (double xi : {0.0, 0.1, 0.25}) {
    const auto sw = certificate_sweep(f, mask, {xi}, DirectionSpec({-1.0}), DomainKind::OrthantSandwiched);
    const double target = std::abs(2.0 * std::cos(2.0 * std::numbers::pi * xi));
    bool ok = std::abs(sw.best_value - target) <= 0.02 * target + 1e-12;
    for (double c : sw.values) ok = ok && !(c > iter + 1e-8);
    v.ok = v.ok && ok;
    out << " xi=" << xi << " best " << sw.best_value << " (eps " << sw.best_eps << ") target " << target;
  }
  v.detail = out.str();
  return v;
}

Verdict hilbert() {
  std::ostringstream out, err;
  const int code = run_cli({"demo", "hilbert", "--sizes", "64,256,1024,4096"}, out, err);
  if (code != kExitOk) return {false, "demo exited with " + std::to_string(code) + ": " + err.str()};
  const auto rows = Json::parse(out.str())["result"]["sections"];
  Verdict v;
  std::ostringstream s;
  double prev = 0.0;
  for (const auto& r : rows) {
    const double n = r["norm"].get<double>();
    v.ok = v.ok && n > prev && n <= std::numbers::pi + 1e-9 && r["converged"].get<bool>();
    prev = n;
    s << r["size"].get<int>() << ":" << n << " ";
  }
  v.detail = s.str();
  return v;
}

Verdict flip() { return suite_verdict("flip", 1008, 50); }
Verdict translation() { return suite_verdict("translation", 1009, 50); }
Verdict modulation() { return suite_verdict("modulation", 1010, 50); }
Verdict mollification() { return suite_verdict("mollify", 1011, 50); }

std::optional<PartitionOfUnity> partition(const Polytope& poly) {
  double margin = 1e300;
  for (std::size_t j = 0; j < poly.vertices().size(); ++j) {
    for (auto f : far_boundary(poly, j)) margin = std::min(margin, poly.slack(poly.vertices()[j], f));
  }
  margin /= 4.0;
  double h = margin / 2.5;
  for (int attempt = 0; attempt < 10; ++attempt) {
    try {
      return partition_of_unity(poly, h, margin);
    } catch (const GeometryError& e) {
      if (std::string_view(e.what()).find("connected") != std::string_view::npos) {
        h *= 0.7;
      } else {
        margin /= 2.0;
        h = std::min(h, margin / 2.5);
      }
    }
  }
  return std::nullopt;
}

Verdict factorization() {
  Verdict v;
  std::ostringstream s;

  // Per-term identity on the k-grid.
  double worst_scaled = 0.0, rmin = 1e300, rmax = 0.0;
  auto check = [&](const MultiIndex& k) {
    const int d = static_cast<int>(k.size());
    const double e128 = verify_convolution_identity(k, 128), e256 = verify_convolution_identity(k, 256);
    worst_scaled = std::max({worst_scaled, e128 / (4.0 * d / 128), e256 / (4.0 * d / 256)});
    rmin = std::min(rmin, e128 / e256);
    rmax = std::max(rmax, e128 / e256);
  };
  for (int k = -8; k <= 8; ++k) check({k});
  for (int a = -8; a <= 8; a += 4) {
    for (int b = -8; b <= 8; b += 4) check({a, b});
  }
  const bool identity_ok = worst_scaled <= 1.0 && rmin >= 1.5 && rmax <= 3.0;
  s << "identity error/(4d/G) max " << worst_scaled << ", halving ratio in [" << rmin << ", " << rmax << "]";

  // Smooth bump at G = 512.
  const int G = 512;
  CubeFunction g{1, G, G / 4, std::vector<Complex>(G)};
  for (int j = 0; j < G; ++j) {
    const double t = (static_cast<double>(j) / G - 0.5) / 0.25;
    if (std::abs(t) < 1.0) g.values[j] = std::exp(1.0 - 1.0 / (1.0 - t * t));
  }
  double prev = 1e300, at32 = 0.0;
  bool monotone = true;
  for (int K : {1, 2, 4, 8, 16, 32, 64, 128, 255}) {
    const double r = weak_factorize(g, K).residual_sup;
    monotone = monotone && r <= prev * (1.0 + 1e-12);
    prev = r;
    if (K == 32) at32 = r;
  }
  const bool bump_ok = at32 <= 1e-3 && monotone;
  s << "; bump residual at K=32 " << at32 << " (tol 1e-3), nonincreasing in K " << monotone;

  // Partition of unity on polytope masks.
  std::vector<Polytope> polys{Polytope::box({0.0, 0.0}, {1.0, 1.0}), Polytope::simplex(2),
                              Polytope::box({0.0, 0.0, 0.0}, {1.0, 2.0, 1.5}), Polytope::simplex(3, 2.0)};
  std::mt19937_64 rng(1012);
  for (int i = 0; i < 6; ++i) polys.push_back(gen::polygon(rng, 3 + i % 4, {0.0, 0.0}, 1.0));
  double pou_dev = 0.0;
  bool pou_built = true;
  for (const auto& p : polys) {
    const auto pou = partition(p);
    if (!pou) {
      pou_built = false;
      continue;
    }
    for (std::size_t c = 0; c < pou->mask.size(); ++c) {
      double sum = 0.0;
      for (const auto& mu : pou->mu) sum += mu[c];
      pou_dev = std::max(pou_dev, std::abs(sum - 1.0));
    }
  }
  const bool pou_ok = pou_built && pou_dev <= 1e-12;
  s << "; partition-of-unity |sum-1| max " << pou_dev << " over " << polys.size() << " polytopes";

  v.ok = identity_ok && bump_ok && pou_ok;
  v.detail = s.str();
  return v;
}

Verdict strip() { return suite_verdict("strip", 1013, 10); }

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "oracle-equivalence", 30.0, oracle_equivalence},
      {2, "trivial-norms", 0.0, trivial_norms},
      {3, "extension-constant-d1", 300.0, extension_constant},
      {4, "single-coefficient-exactness", 0.0, singleton_exactness},
      {5, "section-growth", 0.0, section_growth},
      {6, "e-eps-certificate", 60.0, certificate},
      {7, "hilbert-sections", 120.0, hilbert},
      {8, "flip-equality", 0.0, flip},
      {9, "translation-covariance", 0.0, translation},
      {10, "modulation-bound", 0.0, modulation},
      {11, "mollification-monotonicity", 0.0, mollification},
      {12, "weak-factorization", 0.0, factorization},
      {13, "strip-decomposition", 0.0, strip},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && wall > c.budget_s) {
      v.ok = false;
      v.detail += " [over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget]";
    }
    if (!v.ok) ++failed;
    std::printf("%s %2d %-30s %7.2fs  %s\n", v.ok ? "PASS" : "FAIL", c.id, c.name, wall, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
