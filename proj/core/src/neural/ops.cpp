// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/neural/ops.hpp"

#include <cmath>
#include <numbers>

#include "webseq/errors.hpp"

namespace webseq::nn {

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double peak = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - peak).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

Matrix softmax_rows_backward(const Matrix& probs, const Matrix& upstream) {
  Matrix out = probs.cwiseProduct(upstream);
  const Eigen::VectorXd dots = out.rowwise().sum();
  out -= probs.cwiseProduct(dots.replicate(1, probs.cols()));
  return out;
}

double max_row_sum_deviation(const Matrix& probs) {
  if (probs.rows() == 0) return 0.0;
  return (probs.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v, double d_k, Matrix* weights) {
  if (q.cols() != k.cols()) {
    throw ShapeError("attention: Q has width " + std::to_string(q.cols()) + " but K has " +
                     std::to_string(k.cols()));
  }
  if (k.rows() != v.rows()) {
    throw ShapeError("attention: K has " + std::to_string(k.rows()) + " rows but V has " +
                     std::to_string(v.rows()));
  }
  if (!(d_k > 0.0)) throw ShapeError("attention: d_k must be positive");
  Matrix probs = softmax_rows((q * k.transpose()) / std::sqrt(d_k));
  Matrix out = probs * v;
  if (weights) *weights = std::move(probs);
  return out;
}

Matrix layer_norm(const Matrix& x, const Matrix& gamma, const Matrix& beta, LayerNormCache& cache) {
  const auto n = static_cast<double>(x.cols());
  cache.normalized.resize(x.rows(), x.cols());
  cache.inv_std.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / n;
    const auto centered = (x.row(r).array() - mean).matrix();
    const double var = centered.squaredNorm() / n;
    const double inv = 1.0 / std::sqrt(var + kLayerNormEpsilon);
    cache.inv_std(r) = inv;
    cache.normalized.row(r) = centered * inv;
  }
  Matrix out = cache.normalized.array().rowwise() * gamma.row(0).array();
  out.array().rowwise() += beta.row(0).array();
  return out;
}

Matrix layer_norm_backward(const Matrix& upstream, const Matrix& gamma, const LayerNormCache& cache,
                           Matrix& dgamma, Matrix& dbeta) {
  const auto n = static_cast<double>(upstream.cols());
  dgamma.row(0) += upstream.cwiseProduct(cache.normalized).colwise().sum();
  dbeta.row(0) += upstream.colwise().sum();
  const Matrix dxhat = upstream.array().rowwise() * gamma.row(0).array();
  Matrix dx(upstream.rows(), upstream.cols());
  for (Eigen::Index r = 0; r < upstream.rows(); ++r) {
    const double mean_d = dxhat.row(r).sum() / n;
    const double mean_dx = dxhat.row(r).dot(cache.normalized.row(r)) / n;
    dx.row(r) = cache.inv_std(r) *
                (dxhat.row(r).array() - mean_d - cache.normalized.row(r).array() * mean_dx).matrix();
  }
  return dx;
}

namespace {
constexpr double kGeluScale = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluCubic = 0.044715;
}  // namespace

Matrix gelu(const Matrix& x) {
  return x.unaryExpr([](double v) {
    return 0.5 * v * (1.0 + std::tanh(kGeluScale * (v + kGeluCubic * v * v * v)));
  });
}

Matrix gelu_derivative(const Matrix& x) {
  return x.unaryExpr([](double v) {
    const double inner = kGeluScale * (v + kGeluCubic * v * v * v);
    const double t = std::tanh(inner);
    const double dinner = kGeluScale * (1.0 + 3.0 * kGeluCubic * v * v);
    return 0.5 * (1.0 + t) + 0.5 * v * (1.0 - t * t) * dinner;
  });
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  Matrix mask(rows, cols);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.uniform() < rate ? 0.0 : keep_scale;
  }
  return mask;
}

void fill_normal(Matrix& m, double stddev, Rng& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = stddev * rng.normal();
}

void fill_xavier(Matrix& m, Rng& rng) {
  fill_normal(m, std::sqrt(2.0 / static_cast<double>(m.rows() + m.cols())), rng);
}

double cross_entropy(const Matrix& logits, const std::vector<std::size_t>& targets, Matrix* dlogits) {
  double loss = 0.0;
  if (dlogits) dlogits->resize(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double peak = logits.row(r).maxCoeff();
    const double log_sum = std::log((logits.row(r).array() - peak).exp().sum()) + peak;
    const auto t = static_cast<Eigen::Index>(targets[static_cast<std::size_t>(r)]);
    loss += log_sum - logits(r, t);
    if (dlogits) {
      dlogits->row(r) = (logits.row(r).array() - log_sum).exp();
      (*dlogits)(r, t) -= 1.0;
    }
  }
  return loss;
}

}  // namespace webseq::nn
