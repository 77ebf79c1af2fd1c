// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/neural/ops.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "webseq/errors.hpp"
#include "webseq/neural/tensor.hpp"

namespace webseq::nn {
namespace {

Matrix random(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Matrix m(r, c);
  Rng rng(seed);
  fill_normal(m, 1.0, rng);
  return m;
}

TEST(Attention, SinglePositionReturnsValue) {
  const Matrix v = random(1, 4, 1);
  EXPECT_EQ(attention(random(1, 3, 2), random(1, 3, 3), v, 3.0), v);
}

TEST(Attention, ZeroLogitsAverageValues) {
  const Matrix v = random(5, 3, 4);
  const Matrix out = attention(Matrix::Zero(2, 6), random(5, 6, 5), v, 6.0);
  for (Eigen::Index r = 0; r < 2; ++r) {
    EXPECT_LT((out.row(r) - v.colwise().mean()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Attention, HandComputedTwoByOne) {
  Matrix q(2, 1), v(2, 1);
  q << 1, 0;
  v << 1, 0;
  Matrix w;
  const Matrix out = attention(q, q, v, 1.0, &w);
  const double e = std::numbers::e;
  EXPECT_NEAR(out(0, 0), e / (e + 1.0), 1e-15);
  EXPECT_NEAR(out(1, 0), 0.5, 1e-15);
  EXPECT_LT(max_row_sum_deviation(w), 1e-15);
}

TEST(Attention, ShapeErrors) {
  EXPECT_THROW(attention(random(2, 3, 1), random(2, 4, 1), random(2, 2, 1), 3.0), ShapeError);
  EXPECT_THROW(attention(random(2, 3, 1), random(2, 3, 1), random(3, 2, 1), 3.0), ShapeError);
}

TEST(Softmax, RowsSumToOneEvenForLargeLogits) {
  Matrix logits = random(6, 9, 7) * 300.0;
  const Matrix p = softmax_rows(logits);
  EXPECT_LT(max_row_sum_deviation(p), 1e-12);
  EXPECT_GE(p.minCoeff(), 0.0);
}

TEST(Softmax, BackwardMatchesFiniteDifference) {
  const Matrix x = random(3, 5, 8);
  const Matrix up = random(3, 5, 9);
  const Matrix analytic = softmax_rows_backward(softmax_rows(x), up);
  const double h = 1e-6;
  for (Eigen::Index r = 0; r < 3; ++r) {
    for (Eigen::Index c = 0; c < 5; ++c) {
      Matrix a = x, b = x;
      a(r, c) += h;
      b(r, c) -= h;
      const double num = ((softmax_rows(a) - softmax_rows(b)).cwiseProduct(up)).sum() / (2 * h);
      EXPECT_NEAR(analytic(r, c), num, 1e-7);
    }
  }
}

TEST(LayerNorm, NormalizesRowsAndBackwardChecks) {
  const Matrix x = random(4, 6, 10) * 3.0;
  const Matrix gamma = Matrix::Ones(1, 6), beta = Matrix::Zero(1, 6);
  LayerNormCache cache;
  const Matrix y = layer_norm(x, gamma, beta, cache);
  for (Eigen::Index r = 0; r < 4; ++r) {
    EXPECT_NEAR(y.row(r).mean(), 0.0, 1e-12);
    EXPECT_NEAR(y.row(r).squaredNorm() / 6.0, 1.0, 1e-4);
  }
  const Matrix g2 = random(1, 6, 11), b2 = random(1, 6, 12), up = random(4, 6, 13);
  Matrix dg = Matrix::Zero(1, 6), db = Matrix::Zero(1, 6);
  LayerNormCache c2;
  layer_norm(x, g2, b2, c2);
  const Matrix dx = layer_norm_backward(up, g2, c2, dg, db);
  const double h = 1e-6;
  auto f = [&](const Matrix& in) {
    LayerNormCache c;
    return layer_norm(in, g2, b2, c).cwiseProduct(up).sum();
  };
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 6; ++c) {
      Matrix a = x, b = x;
      a(r, c) += h;
      b(r, c) -= h;
      EXPECT_NEAR(dx(r, c), (f(a) - f(b)) / (2 * h), 1e-6);
    }
  }
}

TEST(Gelu, DerivativeMatchesFiniteDifference) {
  const Matrix x = random(1, 50, 14) * 3.0;
  const Matrix d = gelu_derivative(x);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    Matrix a = x, b = x;
    a(0, i) += h;
    b(0, i) -= h;
    EXPECT_NEAR(d(0, i), (gelu(a)(0, i) - gelu(b)(0, i)) / (2 * h), 1e-7);
  }
}

TEST(Dropout, MaskStatistics) {
  Rng rng(15);
  const Matrix m = dropout_mask(200, 200, 0.2, rng);
  std::size_t zeros = 0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double v = m.data()[i];
    ASSERT_TRUE(v == 0.0 || std::abs(v - 1.25) < 1e-15);
    zeros += v == 0.0;
  }
  EXPECT_NEAR(zeros / 40000.0, 0.2, 0.01);
}

TEST(CrossEntropy, ValueAndGradient) {
  Matrix logits(1, 3);
  logits << 0.0, std::log(2.0), std::log(5.0);
  Matrix d;
  const double loss = cross_entropy(logits, {1}, &d);
  EXPECT_NEAR(loss, -std::log(2.0 / 8.0), 1e-12);
  EXPECT_NEAR(d(0, 0), 1.0 / 8.0, 1e-12);
  EXPECT_NEAR(d(0, 1), 2.0 / 8.0 - 1.0, 1e-12);
  EXPECT_NEAR(d(0, 2), 5.0 / 8.0, 1e-12);
}

TEST(TensorSet, LayoutAndRounding) {
  TensorSet t;
  const auto a = t.add("a", 2, 3, true);
  const auto b = t.add("b", 1, 4, false);
  EXPECT_EQ(t.find("b"), b);
  EXPECT_EQ(t.find("zzz"), t.size());
  EXPECT_EQ(t.parameter_count(), 10u);
  EXPECT_TRUE(t.decays(a));
  EXPECT_FALSE(t.decays(b));
  t[a](0, 0) = 0.1;
  t.round_to_float();
  EXPECT_EQ(t[a](0, 0), static_cast<double>(0.1f));
  const auto z = t.zeros_like();
  EXPECT_TRUE(z.same_layout(t));
  EXPECT_EQ(z[a].squaredNorm(), 0.0);
}

}  // namespace
}  // namespace webseq::nn
