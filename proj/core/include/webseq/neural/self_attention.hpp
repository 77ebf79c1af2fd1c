// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "webseq/neural/model.hpp"

namespace webseq::nn {

/// Bidirectional encoder: event + position embeddings, `layers` post-norm
/// blocks of multi-head attention and a GELU feed-forward, then an untied
/// linear readout to the vocabulary at each query position.
class SelfAttentionModel final : public SequenceModel {
 public:
  explicit SelfAttentionModel(const ModelConfig& config);

  std::unique_ptr<SequenceModel> clone() const override;

  Matrix logits(std::span<const EventId> ids, std::span<const std::size_t> queries) const override;
  double loss(std::span<const EventId> ids, std::span<const std::size_t> queries,
              std::span<const EventId> targets, Rng* dropout_rng, TensorSet* grads,
              double weight) const override;

  /// Embedded input: event_table[ids[i]] + position_table[i].
  Matrix embed(std::span<const EventId> ids) const;

  /// Attention weights in evaluation mode, layer-major then head (L*H matrices, n x n).
  std::vector<Matrix> attention_maps(std::span<const EventId> ids) const;

  std::size_t event_table_slot() const { return event_table_; }
  std::size_t position_table_slot() const { return position_table_; }

 private:
  struct Block {
    std::size_t wq, bq, wk, bk, wv, bv, wo, bo, ln1_g, ln1_b, w1, b1, w2, b2, ln2_g, ln2_b;
  };
  struct BlockCache;
  struct Pass;

  /// Runs the encoder; fills `pass` with everything the backward step needs.
  void encode(std::span<const EventId> ids, Rng* dropout_rng, Pass& pass) const;

  std::size_t event_table_ = 0;
  std::size_t position_table_ = 0;
  std::vector<Block> blocks_;
  std::size_t out_w_ = 0;
  std::size_t out_b_ = 0;
};

}  // namespace webseq::nn
