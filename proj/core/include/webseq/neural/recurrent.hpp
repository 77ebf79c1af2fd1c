// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "webseq/neural/model.hpp"

namespace webseq::nn {

/// Stacked bidirectional LSTM over event embeddings.
///
/// kBiLstm reads out [h_fwd; h_bwd] at each query position. kLstmAttention
/// adds additive attention over all steps, alpha = softmax(v^T tanh(H Wa + ba)),
/// and reads out [sum_i alpha_i H_i ; H_q].
class RecurrentModel final : public SequenceModel {
 public:
  explicit RecurrentModel(const ModelConfig& config);

  std::unique_ptr<SequenceModel> clone() const override;

  Matrix logits(std::span<const EventId> ids, std::span<const std::size_t> queries) const override;
  double loss(std::span<const EventId> ids, std::span<const std::size_t> queries,
              std::span<const EventId> targets, Rng* dropout_rng, TensorSet* grads,
              double weight) const override;

  /// Additive attention weights over the steps (evaluation mode); empty for kBiLstm.
  RowVector attention_weights(std::span<const EventId> ids) const;

 private:
  struct Direction {
    std::size_t wx, wh, b;
  };
  struct DirectionCache {
    Matrix gates;  // activated i, f, g, o per step
    Matrix cells;
    Matrix hidden;
  };
  struct Pass;

  void encode(std::span<const EventId> ids, Rng* dropout_rng, Pass& pass) const;
  Matrix readout(const Pass& pass, std::span<const std::size_t> queries) const;

  DirectionCache run_direction(const Matrix& input, const Direction& dir, bool reverse) const;
  Matrix backward_direction(const Matrix& input, const Direction& dir, bool reverse,
                            const DirectionCache& cache, const Matrix& dhidden, TensorSet& g) const;

  bool attentive() const { return config_.kind == ModelKind::kLstmAttention; }

  std::size_t embedding_ = 0;
  std::vector<Direction> forward_;
  std::vector<Direction> backward_;
  std::size_t att_w_ = 0, att_b_ = 0, att_v_ = 0;
  std::size_t out_w_ = 0, out_b_ = 0;
};

}  // namespace webseq::nn
