// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "webseq/neural/tensor.hpp"
#include "webseq/rng.hpp"

namespace webseq::nn {

/// Row-wise numerically stable softmax.
Matrix softmax_rows(const Matrix& logits);

/// Backward of a row-wise softmax given its output and the upstream gradient.
Matrix softmax_rows_backward(const Matrix& probs, const Matrix& upstream);

/// Largest |row sum - 1| over a matrix of probabilities.
double max_row_sum_deviation(const Matrix& probs);

/// Scaled dot-product attention, Softmax(Q K^T / sqrt(d_k)) V.
/// Q and K need the same width, K and V the same row count; ShapeError otherwise.
/// `weights`, when non-null, receives the attention matrix.
Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v, double d_k,
                 Matrix* weights = nullptr);

/// Layer normalization over each row. Caches the normalized rows and the
/// per-row inverse standard deviation for the backward pass.
struct LayerNormCache {
  Matrix normalized;
  Eigen::VectorXd inv_std;
};

inline constexpr double kLayerNormEpsilon = 1e-5;

Matrix layer_norm(const Matrix& x, const Matrix& gamma, const Matrix& beta, LayerNormCache& cache);

/// Returns dL/dx and accumulates dL/dgamma, dL/dbeta.
Matrix layer_norm_backward(const Matrix& upstream, const Matrix& gamma, const LayerNormCache& cache,
                           Matrix& dgamma, Matrix& dbeta);

/// tanh-approximated GELU and its derivative.
Matrix gelu(const Matrix& x);
Matrix gelu_derivative(const Matrix& x);

/// Inverted-dropout mask: entries are 0 with probability `rate`, else 1/(1-rate).
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng);

/// Fills with N(0, stddev^2).
void fill_normal(Matrix& m, double stddev, Rng& rng);

/// Glorot-style normal init with stddev sqrt(2 / (fan_in + fan_out)).
void fill_xavier(Matrix& m, Rng& rng);

/// Cross-entropy of each row of `logits` against `targets`; writes
/// softmax(logits) - onehot into `dlogits` (unscaled).
double cross_entropy(const Matrix& logits, const std::vector<std::size_t>& targets, Matrix* dlogits);

}  // namespace webseq::nn
