#include <gtest/gtest.h>

#include <random>

#include "gdh/errors.hpp"
#include "gdh/harness.hpp"
#include "gdh/norms.hpp"
#include "gdh/operators.hpp"
#include "oracles.hpp"

using namespace gdh;

namespace {

double rel(const std::vector<Complex>& a, const Eigen::VectorXcd& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b(static_cast<Eigen::Index>(i)));
    den += std::norm(b(static_cast<Eigen::Index>(i)));
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

Eigen::VectorXcd to_eigen(const std::vector<Complex>& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<Complex> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::vector<Complex> v(n);
  for (auto& x : v) x = gen::gaussian(rng);
  return v;
}

}  // namespace

TEST(Apply, DeltaThetaIsIdentity) {
  std::mt19937_64 rng(1);
  const auto mask = gen::blob(rng, 2, 30);
  const CorrelationOperator op(Kernel::delta({0, 0}), mask, mask, Flavor::Toeplitz);
  const auto g = random_vec(rng, mask.size());
  EXPECT_EQ(op.apply(g).size(), g.size());
  EXPECT_LE(rel(op.apply(g), to_eigen(g)), 1e-15);
}

TEST(Apply, OnesKernelSums) {
  std::mt19937_64 rng(2);
  const auto mask = gen::blob(rng, 1, 12);
  const auto op = hankel(Kernel::constant(mask.box().plus(mask.box()), 1.0), mask);
  const auto g = random_vec(rng, mask.size());
  Complex s{};
  for (const auto& v : g) s += v;
  for (const auto& v : op.apply(g)) EXPECT_LT(std::abs(v - s), 1e-13);
}

TEST(Apply, DeltaShiftFlips) {
  std::mt19937_64 rng(3);
  const auto in = gen::blob(rng, 1, 10);
  const auto out = gen::blob(rng, 1, 10, {2});
  const int s = 5;
  const CorrelationOperator op(Kernel::delta({s}), in, out, Flavor::Correlation);
  const auto g = random_vec(rng, in.size());
  const auto h = op.apply(g);
  for (std::size_t r = 0; r < out.size(); ++r) {
    const std::vector<int> y{s - out.indices()[r][0]};
    const auto p = in.position(y);
    EXPECT_LT(std::abs(h[r] - (p == GridMask::npos ? Complex{} : g[p])), 1e-13);
  }
}

TEST(Apply, MatchesDefinitionOracle) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 40; ++t) {
    const int d = 1 + t % 2;
    const auto in = gen::blob(rng, d, 1 + static_cast<int>(rng() % 150), gen::box(rng, d, 1, 5).lo);
    const auto out = gen::blob(rng, d, 1 + static_cast<int>(rng() % 150), gen::box(rng, d, 1, 5).lo);
    const auto flavor = t % 3 == 0 ? Flavor::Toeplitz : Flavor::Correlation;
    const auto f = gen::kernel(rng, gen::box(rng, d, 12, 8));
    const CorrelationOperator op(f, in, out, flavor);
    const auto m = oracle::dense(f, in, out, flavor);
    const auto g = random_vec(rng, in.size()), h = random_vec(rng, out.size());
    EXPECT_LE(rel(op.apply(g), m * to_eigen(g)), 1e-12);
    EXPECT_LE(rel(op.apply_adjoint(h), m.adjoint() * to_eigen(h)), 1e-12);
    EXPECT_LE((materialize_dense(op) - m).norm(), 1e-12 * (1.0 + m.norm()));
    const auto adj = op.adjoint();
    EXPECT_LE(rel(adj.apply(h), m.adjoint() * to_eigen(h)), 1e-12);
  }
}

TEST(Apply, KernelOutsideReachIsZero) {
  const auto mask = cube_mask(std::vector<int>{3});
  const CorrelationOperator op(Kernel::delta({40}), mask, mask, Flavor::Correlation);
  for (const auto& v : op.apply(std::vector<Complex>(3, 1.0))) EXPECT_EQ(v, Complex{});
}

TEST(Apply, LengthMismatch) {
  const auto mask = cube_mask(std::vector<int>{3});
  const auto op = hankel(Kernel::delta({0}), mask);
  EXPECT_THROW(op.apply(std::vector<Complex>(2)), PreconditionError);
  EXPECT_THROW(CorrelationOperator(Kernel::delta({0, 0}), mask, mask, Flavor::Toeplitz), PreconditionError);
}

TEST(MaterializeDense, SmallCases) {
  const auto mask = GridMask::from_indices({{-1}, {0}, {1}});
  const auto id = materialize_dense(CorrelationOperator(Kernel::delta({0}), mask, mask, Flavor::Toeplitz));
  EXPECT_TRUE(id.isApprox(Eigen::MatrixXcd::Identity(3, 3)));
  const auto one = GridMask::from_indices({{2}}), other = GridMask::from_indices({{5}});
  const Kernel f(Box({-5}, {10}), [] {
    std::vector<Complex> v(16);
    for (int i = 0; i < 16; ++i) v[i] = i - 5;
    return v;
  }());
  EXPECT_EQ(materialize_dense(CorrelationOperator(f, other, one, Flavor::Correlation))(0, 0), Complex(7));
  EXPECT_EQ(materialize_dense(CorrelationOperator(f, other, one, Flavor::Toeplitz))(0, 0), Complex(-3));
  const auto big = cube_mask(std::vector<int>{2001});
  EXPECT_THROW(materialize_dense(hankel(Kernel::delta({0}), big)), ResourceError);
}

TEST(ToeplitzMatrix, SmallExample) {
  auto a = MultiSequence::zeros(Window({2}));
  a.set(std::vector<int>{-1}, 2.0);
  a.set(std::vector<int>{0}, 1.0);
  a.set(std::vector<int>{1}, 3.0);
  const auto sec = toeplitz_matrix(a, std::vector<int>{2});
  EXPECT_FALSE(sec.truncated);
  Eigen::MatrixXcd expect(2, 2);
  expect << 1.0, 2.0, 3.0, 1.0;
  EXPECT_TRUE(materialize_dense(sec.op).isApprox(expect));
  EXPECT_TRUE(toeplitz_matrix(a, std::vector<int>{4}).truncated);
}

TEST(ToeplitzMatrix, DeltaIsIdentity) {
  for (int n : {1, 3, 7}) {
    const auto sec = toeplitz_matrix(MultiSequence::delta(Window({2, 2})), std::vector<int>{n, n});
    EXPECT_TRUE(materialize_dense(sec.op).isApprox(Eigen::MatrixXcd::Identity(n * n, n * n)));
  }
}

TEST(ToeplitzMatrix, TwoLevelNestedBlocks) {
  std::mt19937_64 rng(5);
  const Window w({2, 2});
  std::vector<Complex> c(w.size());
  for (auto& v : c) v = gen::gaussian(rng);
  const MultiSequence a(w, c);
  const auto sec = toeplitz_matrix(a, std::vector<int>{2, 2});
  EXPECT_LE((materialize_dense(sec.op) - oracle::block_toeplitz_2d(a, 2)).norm(), 1e-15);
}

TEST(Flip, IdentityOnSymmetricTriple) {
  const auto mask = GridMask::from_indices({{-1}, {0}, {1}});
  const auto r = hankel_toeplitz_flip(Kernel::delta({0}), mask, std::vector<int>{0});
  EXPECT_EQ(r.kernel.at(std::vector<int>{0}), Complex(1.0));
  EXPECT_EQ(r.reflection, (std::vector<std::size_t>{2, 1, 0}));
}

TEST(Flip, CubeHalfIntegerCentre) {
  const int n = 4;
  const auto mask = cube_mask(std::vector<int>{n});
  std::mt19937_64 rng(6);
  const auto f = gen::kernel(rng, Box({-3}, {3}));
  const auto r = hankel_toeplitz_flip(f, mask, std::vector<int>{-(n - 1)});
  for (int x = -3; x <= 6; ++x) EXPECT_EQ(r.kernel.at(std::vector<int>{x}), f.at(std::vector<int>{x - (n - 1)}));
}

TEST(Flip, AsymmetricRejected) {
  const auto mask = GridMask::from_indices({{0}, {1}, {2}});
  EXPECT_THROW(hankel_toeplitz_flip(Kernel::delta({0}), mask, std::vector<int>{0}), PreconditionError);
}

TEST(Flip, EntrywiseAndNorms) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const int d = 1 + t % 2;
    std::vector<MultiIndex> cells;
    for (int piece = 0; piece < 3; ++piece) {
      MultiIndex lo(d), hi(d);
      for (int i = 0; i < d; ++i) {
        hi[i] = static_cast<int>(rng() % 5);
        lo[i] = -hi[i];
      }
      const Box b(lo, hi);
      MultiIndex k = b.lo;
      do {
        cells.push_back(k);
      } while (next_index(b, k));
    }
    MultiIndex shift(d, 3);
    const auto mask = GridMask::from_indices(cells).translated(shift);
    MultiIndex two_z(d, -6);
    const auto f = gen::kernel(rng, mask.box().plus(mask.box().negated()));
    const auto flip = hankel_toeplitz_flip(f, mask, two_z);
    const auto theta = oracle::dense(f, mask, mask, Flavor::Toeplitz);
    const auto gamma = oracle::dense(flip.kernel, mask, mask, Flavor::Correlation);
    Eigen::MatrixXcd permuted(gamma.rows(), gamma.cols());
    for (Eigen::Index c = 0; c < gamma.cols(); ++c) permuted.col(static_cast<Eigen::Index>(flip.reflection[c])) = gamma.col(c);
    EXPECT_LE((permuted - theta).norm(), 1e-14 * (1.0 + theta.norm()));
    EXPECT_NEAR(oracle::spectral_norm(theta), oracle::spectral_norm(gamma), 1e-12 * oracle::spectral_norm(theta));
  }
}

TEST(Mollify, IdentityLimit) {
  std::mt19937_64 rng(8);
  const auto f = gen::kernel(rng, Box({-3, -2}, {4, 5}));
  MollifierSpec spec;
  spec.n = 10;
  spec.psi = {0.25, 0.5, 0.25};
  const auto g = mollify(f, spec);
  EXPECT_EQ(spec.stencil_radius(), 0);
  for (std::size_t i = 0; i < f.values().size(); ++i) EXPECT_EQ(g.at(f.box().index(i)), f.values()[i]);
}

TEST(Mollify, UniformStencilPlateau) {
  MollifierSpec spec;
  spec.psi = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const auto g = mollify(Kernel::delta({0}), spec);
  for (int k = -1; k <= 1; ++k) EXPECT_NEAR(g.at(std::vector<int>{k}).real(), 1.0 / 3, 1e-16);
  EXPECT_EQ(g.at(std::vector<int>{2}), Complex{});
}

TEST(Mollify, StencilShrinksWithScale) {
  MollifierSpec spec;
  spec.psi.assign(9, 1.0 / 9);
  for (int n : {1, 2, 3, 4, 9}) {
    spec.n = n;
    EXPECT_EQ(spec.stencil_radius(), static_cast<int>(std::floor(4.0 / n + 0.5)));
    const auto s = spec.scaled_stencil();
    double sum = 0.0;
    for (double v : s) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-15);
  }
  spec.psi = {0.5, 0.5};
  EXPECT_THROW(spec.validate(), PreconditionError);
}

TEST(Mollify, WindowHasNonnegativeSpectrum) {
  for (int m : {1, 2, 5, 9}) {
    const auto w = mollifier_window(m);
    const int r = static_cast<int>(w.size() / 2);
    EXPECT_EQ(w[r], 1.0);
    for (int j = 0; j < 64; ++j) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k) s += w[k + r] * std::cos(2.0 * std::numbers::pi * k * j / 64.0);
      EXPECT_GE(s, -1e-12);
    }
  }
}

TEST(Mollify, NormMonotoneOnInnerMask) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    MollifierSpec spec;
    spec.n = 1 + t % 3;
    spec.psi = {0.2, 0.3, 0.3, 0.15, 0.05};
    spec.window_radius = t % 3;
    const int rn = spec.stencil_radius();
    const auto ups = cube_mask(std::vector<int>{8 + 2 * rn, 8 + 2 * rn});
    const auto inner = inner_mask(ups, rn);
    const auto xi = gen::blob(rng, 2, 20);
    const auto f = gen::kernel(rng, xi.box().plus(ups.box()));
    const double before = oracle::spectral_norm(oracle::dense(f, ups, xi, Flavor::Correlation));
    const double after = oracle::spectral_norm(oracle::dense(mollify(f, spec), inner, xi, Flavor::Correlation));
    EXPECT_LE(after, before * (1.0 + 1e-8));
  }
}

TEST(Modulate, ConstantAndPlaneWave) {
  std::mt19937_64 rng(10);
  const auto mask = gen::blob(rng, 2, 25);
  const auto f = gen::kernel(rng, mask.box().plus(mask.box()));
  const std::vector<Complex> ones(f.values().size(), 1.0);
  const auto same = modulate(f, ones);
  for (std::size_t i = 0; i < ones.size(); ++i) EXPECT_EQ(same.values()[i], f.values()[i]);
  EXPECT_NEAR(modulation_l1(f.box(), ones), 1.0, 1e-14);

  std::vector<Complex> wave(f.values().size());
  for (std::size_t i = 0; i < wave.size(); ++i) {
    const auto k = f.box().index(i);
    wave[i] = oracle::expi(0.3 * k[0] - 0.17 * k[1]);
  }
  const double a = oracle::spectral_norm(oracle::dense(f, mask, mask, Flavor::Correlation));
  const double b = oracle::spectral_norm(oracle::dense(modulate(f, wave), mask, mask, Flavor::Correlation));
  EXPECT_NEAR(a, b, 1e-12 * a);
}

TEST(Modulate, L1BoundOnRandomMultipliers) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    const auto mask = gen::blob(rng, 1 + t % 2, 15);
    const auto f = gen::kernel(rng, mask.box().plus(mask.box()));
    std::vector<Complex> mu(f.values().size());
    for (auto& v : mu) v = gen::gaussian(rng);
    const double base = norm_dense(hankel(f, mask));
    const double mod = norm_dense(hankel(modulate(f, mu), mask));
    EXPECT_LE(mod, modulation_l1(f.box(), mu) * base + 1e-8);
  }
}

TEST(Kernel, Transforms) {
  std::mt19937_64 rng(12);
  const auto f = gen::kernel(rng, Box({-1, 0}, {2, 3}));
  const auto s = f.shifted(std::vector<int>{1, -2});
  EXPECT_EQ(s.at(std::vector<int>{0, 2}), f.at(std::vector<int>{1, 0}));
  const auto r = f.reflected_conj();
  EXPECT_EQ(r.at(std::vector<int>{-2, -3}), std::conj(f.at(std::vector<int>{2, 3})));
  const auto c = f.cropped(Box({0, 0}, {0, 0}));
  EXPECT_EQ(c.at(std::vector<int>{0, 0}), f.at(std::vector<int>{0, 0}));
  EXPECT_EQ(c.at(std::vector<int>{1, 0}), Complex{});
  EXPECT_THROW(Kernel(Box({0}, {1}), {1.0}), PreconditionError);
}
