#include <gtest/gtest.h>

#include <random>

#include "gdh/errors.hpp"
#include "gdh/harness.hpp"
#include "gdh/norms.hpp"
#include "oracles.hpp"

using namespace gdh;

TEST(NormDense, IdentityAndOnes) {
  std::mt19937_64 rng(1);
  const auto mask = gen::blob(rng, 2, 17);
  EXPECT_NEAR(norm_dense(CorrelationOperator(Kernel::delta({0, 0}), mask, mask, Flavor::Toeplitz)), 1.0, 1e-12);
  EXPECT_NEAR(norm_dense(hankel(Kernel::constant(mask.box().plus(mask.box()), 1.0), mask)), 17.0, 1e-12 * 17);
}

TEST(NormIterative, Identity) {
  const auto mask = cube_mask(std::vector<int>{7, 3});
  const auto est = norm_iterative(CorrelationOperator(Kernel::delta({0, 0}), mask, mask, Flavor::Toeplitz), 1e-10);
  EXPECT_TRUE(est.converged);
  EXPECT_NEAR(est.value, 1.0, 1e-10);
  EXPECT_LE(est.lower_certificate, 1.0 + 1e-15);
}

TEST(NormIterative, DeltaFlipIsPartialIsometry) {
  const auto mask = cube_mask(std::vector<int>{9});
  const auto op = hankel(Kernel::delta({6}), mask);
  EXPECT_NEAR(oracle::spectral_norm(oracle::dense(Kernel::delta({6}), mask, mask, Flavor::Correlation)), 1.0, 1e-14);
  EXPECT_NEAR(norm_iterative(op, 1e-10).value, 1.0, 1e-10);
}

TEST(NormIterative, AgreesWithDense) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto mask = gen::blob(rng, 1 + t % 2, 20);
    const auto f = gen::kernel(rng, mask.box().plus(mask.box().negated()));
    const CorrelationOperator op(f, mask, mask, Flavor::Toeplitz);
    const double exact = oracle::spectral_norm(oracle::dense(f, mask, mask, Flavor::Toeplitz));
    const auto est = norm_iterative(op, 1e-8, 5000, 100 + t);
    EXPECT_LE(std::abs(est.value - exact), 1e-6 * exact);
    EXPECT_LE(est.lower_certificate, exact * (1.0 + 1e-12));
    EXPECT_LE(est.lower_certificate, est.value * (1.0 + est.tol));
  }
}

TEST(NormIterative, DeterministicPerSeed) {
  std::mt19937_64 rng(3);
  const auto mask = gen::blob(rng, 2, 40);
  const auto op = hankel(gen::kernel(rng, mask.box().plus(mask.box())), mask);
  const auto a = norm_iterative(op, 1e-9, 5000, 5), b = norm_iterative(op, 1e-9, 5000, 5);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(NormIterative, MaxIterFlagsNonConvergence) {
  std::mt19937_64 rng(4);
  const auto mask = gen::blob(rng, 2, 60);
  const auto op = hankel(gen::kernel(rng, mask.box().plus(mask.box())), mask);
  const auto est = norm_iterative(op, 1e-15, 2);
  EXPECT_FALSE(est.converged);
  EXPECT_GT(est.lower_certificate, 0.0);
  EXPECT_THROW(norm_iterative(op, 0.0), PreconditionError);
}

TEST(Certificate, DeltaGivesOne) {
  std::mt19937_64 rng(5);
  const auto mask = gen::blob(rng, 2, 30);
  for (double eps : {1e-1, 1e-3}) {
    const TestFunctionSpec spec{{0.31, 0.77}, DirectionSpec({0.3, -1.0}), eps};
    EXPECT_NEAR(certificate_E_eps(Kernel::delta({0, 0}), mask, spec, DomainKind::BoundedMask), 1.0, 1e-14);
  }
}

TEST(Certificate, CosineSymbolOnLongStaircase) {
  const StaircaseSpec s{1, {{{0.0}, {1e9}}}, 4096.5};
  const auto mask = rasterize(s, 1.0);
  ASSERT_TRUE(s.orthant_sandwiched());
  Kernel f(Box({-1}, {1}), {1.0, 0.0, 1.0});
  for (double xi : {0.0, 0.1, 0.2, 0.4}) {
    const auto sw = certificate_sweep(f, mask, {xi}, DirectionSpec({-1.0}), DomainKind::OrthantSandwiched);
    const double target = std::abs(2.0 * std::cos(2.0 * std::numbers::pi * xi));
    EXPECT_NEAR(sw.best_value, target, 0.02 * target);
  }
}

TEST(Certificate, BelowIterativeNorm) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 10; ++t) {
    const auto mask = gen::blob(rng, 2, 50);
    const auto f = gen::kernel(rng, Box({-2, -2}, {2, 2}));
    const TestFunctionSpec spec{{u(rng), u(rng)}, DirectionSpec({u(rng) - 0.5, u(rng) - 0.5}), 0.05};
    const double c = certificate_E_eps(f, mask, spec, DomainKind::BoundedMask);
    const auto est = norm_iterative(CorrelationOperator(f, mask, mask, Flavor::Toeplitz), 1e-10, 20000);
    EXPECT_LE(c, est.value + 1e-8);
  }
}

TEST(Certificate, TranslationInvariant) {
  std::mt19937_64 rng(7);
  const auto mask = gen::blob(rng, 2, 40);
  const auto f = gen::kernel(rng, Box({-1, -2}, {2, 1}));
  const TestFunctionSpec spec{{0.2, 0.6}, DirectionSpec({1.0, -0.5}), 0.1};
  const double a = certificate_E_eps(f, mask, spec, DomainKind::BoundedMask);
  const double b = certificate_E_eps(f, mask.translated(std::vector<int>{17, -9}), spec, DomainKind::BoundedMask);
  EXPECT_NEAR(a, b, 1e-12 * a);
}

TEST(Certificate, Errors) {
  const auto mask = cube_mask(std::vector<int>{5000});
  const TestFunctionSpec bad_dir{{0.0}, DirectionSpec({1.0}), 0.1};
  EXPECT_THROW(certificate_E_eps(Kernel::delta({0}), mask, bad_dir, DomainKind::OrthantSandwiched), PreconditionError);
  const TestFunctionSpec huge{{0.0}, DirectionSpec({-1.0}), 1.0};
  EXPECT_THROW(certificate_E_eps(Kernel::delta({0}), mask, huge, DomainKind::OrthantSandwiched), RangeError);
  const auto sw = certificate_sweep(Kernel::delta({0}), mask, {0.0}, DirectionSpec({-1.0}), DomainKind::OrthantSandwiched,
                                    {1.0, 1e-2});
  EXPECT_TRUE(std::isnan(sw.values[0]));
  EXPECT_EQ(sw.best_eps, 1e-2);
}
