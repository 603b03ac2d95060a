// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "support/oracles.hpp"
#include "uqc/errors.hpp"
#include "uqc/nn/adam.hpp"
#include "uqc/nn/layers.hpp"
#include "uqc/nn/losses.hpp"
#include "uqc/nn/rng.hpp"

namespace uqc {
namespace {

using testing::naive_matmul;
using testing::random_matrix;

TEST(Rng, SameSeedSameStream) {
  RngStream a(42);
  RngStream b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_EQ(a.counter(), 100u);
}

TEST(Rng, ForkDoesNotAdvanceParent) {
  RngStream a(7);
  RngStream b(7);
  RngStream child = a.fork(3);
  (void)child.next_u64();
  EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(a.fork(1).next_u64(), a.fork(2).next_u64());
}

TEST(Rng, UniformIndexInRangeAndCoversAll) {
  RngStream rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto k = rng.uniform_index(7);
    ASSERT_LT(k, 7u);
    ++hits[k];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, NormalMoments) {
  RngStream rng(11);
  double s = 0.0;
  double s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.015);
}

TEST(Rng, ShuffleIsPermutation) {
  RngStream rng(9);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}

TEST(Linear, IdentityWeights) {
  LinearLayer layer(2, 2);
  layer.weights() << 1, 0, 0, 1;
  layer.bias().setZero();
  Matrix x(1, 2);
  x << 3, 4;
  const Matrix y = layer.apply(x);
  EXPECT_EQ(y(0, 0), 3.0);
  EXPECT_EQ(y(0, 1), 4.0);
}

TEST(Linear, ScalarAffine) {
  LinearLayer layer(1, 1);
  layer.weights()(0, 0) = 2.0;
  layer.bias()(0, 0) = 1.0;
  Matrix x(1, 1);
  x(0, 0) = 3.0;
  EXPECT_EQ(layer.apply(x)(0, 0), 7.0);
}

TEST(Linear, MatchesNaiveMatmul) {
  RngStream rng(3);
  LinearLayer layer(5, 3);
  layer.init_glorot(rng);
  layer.bias() = random_matrix(1, 3, rng);
  const Matrix x = random_matrix(4, 5, rng);
  const Matrix got = layer.forward(x, false);
  Matrix want = naive_matmul(x, layer.weights().transpose());
  for (Eigen::Index i = 0; i < want.rows(); ++i) want.row(i) += layer.bias();
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(got(i, j), want(i, j), 1e-12);
  }
  EXPECT_FALSE(layer.has_cache());
}

TEST(Linear, GlorotBound) {
  RngStream rng(4);
  LinearLayer layer(30, 20);
  layer.init_glorot(rng);
  const double bound = std::sqrt(6.0 / 50.0);
  EXPECT_LE(layer.weights().cwiseAbs().maxCoeff(), bound);
  EXPECT_EQ(layer.bias().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Linear, ShapeAndStateChecks) {
  LinearLayer layer(3, 2);
  EXPECT_THROW(layer.apply(Matrix::Zero(2, 4)), DimensionError);
  EXPECT_THROW(layer.backward(Matrix::Zero(1, 2)), StateError);
}

TEST(Activations, KnownValues) {
  Matrix x(1, 2);
  x << -1, 2;
  const Matrix r = relu(x);
  EXPECT_EQ(r(0, 0), 0.0);
  EXPECT_EQ(r(0, 1), 2.0);
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(softplus(800.0), 800.0, 1e-12);
  EXPECT_GT(softplus(-800.0), -1e-300);
  const Matrix s = softmax(Matrix::Zero(1, 2));
  EXPECT_EQ(s(0, 0), 0.5);
  EXPECT_EQ(s(0, 1), 0.5);
}

TEST(Activations, SoftmaxProperties) {
  RngStream rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix logits = random_matrix(5, 2, rng, 20.0);
    const Matrix p = softmax(logits);
    Matrix shifted = logits;
    for (Eigen::Index i = 0; i < 5; ++i) shifted.row(i).array() += 50.0 * rng.normal();
    const Matrix q = softmax(shifted);
    for (Eigen::Index i = 0; i < 5; ++i) {
      EXPECT_GE(p(i, 0), 0.0);
      EXPECT_GE(p(i, 1), 0.0);
      EXPECT_NEAR(p(i, 0) + p(i, 1), 1.0, 1e-12);
      EXPECT_NEAR(p(i, 0), q(i, 0), 1e-12);
      EXPECT_NEAR(p(i, 1), q(i, 1), 1e-12);
    }
  }
}

TEST(Dropout, ZeroProbabilityAndEvalAreIdentity) {
  RngStream rng(1);
  const Matrix x = random_matrix(4, 6, rng);
  DropoutLayer none(0.0);
  EXPECT_EQ(none.forward(x, true, rng), x);
  DropoutLayer some(0.5);
  EXPECT_EQ(some.forward(x, false, rng), x);
  EXPECT_EQ(some.apply(x, false, rng), x);
}

TEST(Dropout, RejectsBadProbability) {
  EXPECT_THROW(DropoutLayer(1.0), ArgumentError);
  EXPECT_THROW(DropoutLayer(-0.1), ArgumentError);
}

TEST(Dropout, InvertedScalingIsUnbiased) {
  RngStream rng(12);
  DropoutLayer layer(0.1);
  const Matrix ones = Matrix::Ones(1000, 100);
  const Matrix y = layer.forward(ones, true, rng);
  const double m = y.mean();
  EXPECT_GE(m, 0.99);
  EXPECT_LE(m, 1.01);
  // Survivors are scaled, the rest are zero.
  for (Eigen::Index j = 0; j < 100; ++j) {
    const double v = y(0, j);
    EXPECT_TRUE(v == 0.0 || std::abs(v - 1.0 / 0.9) < 1e-15);
  }
}

TEST(CrossEntropy, KnownValues) {
  Matrix p(1, 2);
  p << 1.0, 0.0;
  std::vector<int> y0{0};
  EXPECT_LE(cross_entropy_loss(p, y0).loss, 1e-12);
  p << 0.5, 0.5;
  std::vector<int> y1{1};
  EXPECT_NEAR(cross_entropy_loss(p, y1).loss, std::log(2.0), 1e-15);
  // Certain and wrong: clamped, finite.
  p << 1.0, 0.0;
  EXPECT_NEAR(cross_entropy_loss(p, y1).loss, -std::log(kLogFloor), 1e-9);
}

TEST(CrossEntropy, GradientMatchesFiniteDifferences) {
  RngStream rng(21);
  const Matrix logits = random_matrix(5, 2, rng, 2.0);
  std::vector<int> y{0, 1, 1, 0, 1};
  const Matrix g = cross_entropy_loss(softmax(logits), y).grad_logits;
  const double h = 1e-5;
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index c = 0; c < 2; ++c) {
      Matrix up = logits;
      Matrix down = logits;
      up(i, c) += h;
      down(i, c) -= h;
      const double num =
          (cross_entropy_loss(softmax(up), y).loss - cross_entropy_loss(softmax(down), y).loss) / (2 * h);
      EXPECT_LT(testing::rel_error(g(i, c), num), 1e-4);
    }
  }
}

TEST(StochasticNll, TinySigmaReducesToCrossEntropy) {
  RngStream rng(2);
  const Matrix mu = random_matrix(6, 2, rng).cwiseAbs();
  const Matrix sigma = Matrix::Constant(6, 2, 1e-9);
  std::vector<int> y{0, 1, 0, 1, 1, 0};
  RngStream noise_rng(4);
  const double nll = stochastic_nll_loss(mu, sigma, y, 50, noise_rng).loss;
  EXPECT_NEAR(nll, cross_entropy_loss(softmax(mu), y).loss, 1e-6);
}

TEST(StochasticNll, SymmetricMeanGivesLn2) {
  const Matrix mu = Matrix::Zero(4, 2);
  const Matrix sigma = Matrix::Constant(4, 2, 1.5);
  std::vector<int> y{0, 1, 0, 1};
  RngStream rng(5);
  const double nll = stochastic_nll_loss(mu, sigma, y, 20000, rng).loss;
  EXPECT_NEAR(nll, std::log(2.0), 0.01);
}

TEST(StochasticNll, Errors) {
  std::vector<int> y{0};
  RngStream rng(1);
  EXPECT_THROW(stochastic_nll_loss(Matrix::Zero(1, 2), Matrix::Zero(1, 2), y, 5, rng), DomainError);
  EXPECT_THROW(stochastic_nll_loss(Matrix::Zero(1, 2), Matrix::Ones(1, 2), y, 0, rng), ArgumentError);
}

TEST(StochasticNll, GradientMatchesFiniteDifferences) {
  RngStream rng(31);
  const Matrix mu = random_matrix(4, 2, rng);
  const Matrix sigma = random_matrix(4, 2, rng).cwiseAbs().array() + 0.2;
  std::vector<int> y{1, 0, 0, 1};
  RngStream noise_rng(6);
  const LogitNoise noise(4, 9, noise_rng);
  const HeteroLossAndGrad g = stochastic_nll_loss(mu, sigma, y, noise);
  const double h = 1e-5;
  for (int which = 0; which < 2; ++which) {
    for (Eigen::Index i = 0; i < 4; ++i) {
      for (Eigen::Index c = 0; c < 2; ++c) {
        Matrix mu_u = mu, mu_d = mu, s_u = sigma, s_d = sigma;
        if (which == 0) {
          mu_u(i, c) += h;
          mu_d(i, c) -= h;
        } else {
          s_u(i, c) += h;
          s_d(i, c) -= h;
        }
        const double num =
            (stochastic_nll_loss(mu_u, s_u, y, noise).loss - stochastic_nll_loss(mu_d, s_d, y, noise).loss) / (2 * h);
        const double ana = which == 0 ? g.grad_mu(i, c) : g.grad_sigma(i, c);
        EXPECT_LT(testing::rel_error(ana, num), 1e-4) << "which=" << which << " i=" << i << " c=" << c;
      }
    }
  }
}

TEST(Adam, FirstStepFromZero) {
  Matrix w = Matrix::Zero(1, 1);
  Matrix g = Matrix::Ones(1, 1);
  AdamState adam;
  std::vector<Matrix*> params{&w};
  std::vector<const Matrix*> grads{&g};
  adam.step(params, grads);
  // Bias-corrected moments are both 1 after the first step, so the update is
  // lr / (1 + eps).
  EXPECT_NEAR(w(0, 0), -0.001 / (1.0 + 1e-8), 1e-18);
  EXPECT_EQ(adam.t(), 1u);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  RngStream rng(3);
  Matrix w = random_matrix(3, 3, rng);
  const Matrix before = w;
  Matrix g = Matrix::Zero(3, 3);
  AdamState adam;
  std::vector<Matrix*> params{&w};
  std::vector<const Matrix*> grads{&g};
  for (int i = 0; i < 10; ++i) adam.step(params, grads);
  EXPECT_EQ(w, before);
}

TEST(Adam, ShapeMismatchThrows) {
  Matrix w = Matrix::Zero(2, 2);
  Matrix g = Matrix::Zero(2, 2);
  Matrix g_bad = Matrix::Zero(3, 2);
  AdamState adam;
  std::vector<Matrix*> params{&w};
  std::vector<const Matrix*> grads{&g};
  adam.step(params, grads);
  std::vector<const Matrix*> bad{&g_bad};
  EXPECT_THROW(adam.step(params, bad), DimensionError);
}

TEST(Adam, Deterministic) {
  auto run = [] {
    RngStream rng(17);
    Matrix w = random_matrix(4, 4, rng);
    AdamState adam;
    for (int i = 0; i < 20; ++i) {
      Matrix g = random_matrix(4, 4, rng);
      std::vector<Matrix*> params{&w};
      std::vector<const Matrix*> grads{&g};
      adam.step(params, grads);
    }
    return w;
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace uqc
