// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "webseq/neural/tensor.hpp"
#include "webseq/prediction.hpp"
#include "webseq/rng.hpp"
#include "webseq/sequencer.hpp"

namespace webseq::nn {

enum class ModelKind { kSelfAttention, kBiLstm, kLstmAttention };

/// "self_attn", "bilstm", "lstm_attn".
std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// Architecture hyperparameters. Zero-valued widths resolve to their defaults
/// (head width d/H, feed-forward width 4d, additive-attention width = hidden).
struct ModelConfig {
  ModelKind kind = ModelKind::kSelfAttention;
  std::size_t vocab_size = 0;
  std::size_t d_model = 128;
  std::size_t max_window = 128;
  std::size_t layers = 8;
  std::size_t heads = 8;
  std::size_t head_width = 0;
  std::size_t ff_width = 0;
  std::size_t lstm_layers = 1;
  std::size_t hidden = 128;
  double dropout = 0.2;
  std::size_t attention_width = 0;
  std::uint64_t seed = 0;

  std::size_t resolved_head_width() const { return head_width ? head_width : d_model / heads; }
  std::size_t resolved_ff_width() const { return ff_width ? ff_width : 4 * d_model; }
  std::size_t resolved_attention_width() const { return attention_width ? attention_width : hidden; }

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// A context-based event model: embeds a window, encodes it and emits one
/// distribution over the vocabulary per query position.
///
/// Weights live in a TensorSet. Evaluation-mode calls are const, deterministic
/// and independent of any RNG; training-mode calls take an explicit RNG for dropout.
class SequenceModel {
 public:
  explicit SequenceModel(ModelConfig config) : config_(std::move(config)) {}
  virtual ~SequenceModel() = default;

  virtual std::unique_ptr<SequenceModel> clone() const = 0;

  const ModelConfig& config() const noexcept { return config_; }
  ModelKind kind() const noexcept { return config_.kind; }
  TensorSet& parameters() noexcept { return params_; }
  const TensorSet& parameters() const noexcept { return params_; }

  /// Logits (queries x vocab) in evaluation mode.
  virtual Matrix logits(std::span<const EventId> ids, std::span<const std::size_t> queries) const = 0;

  /// Summed cross-entropy over the queries. With `grads` non-null, adds
  /// weight * dLoss/dParam into it. `dropout_rng` null means evaluation mode.
  virtual double loss(std::span<const EventId> ids, std::span<const std::size_t> queries,
                      std::span<const EventId> targets, Rng* dropout_rng, TensorSet* grads,
                      double weight = 1.0) const = 0;

  /// One normalized distribution per masked index. Throws ContractError for an
  /// unmasked window and ShapeError for ids or lengths the model cannot embed.
  std::vector<PredictionDistribution> forward(const SequenceWindow& window) const;

  /// Metadata: true once the model went through masked pre-training.
  bool pretrained = false;

 protected:
  void check_input(std::span<const EventId> ids, std::span<const std::size_t> queries) const;

  ModelConfig config_;
  TensorSet params_;
};

/// Builds a freshly initialized model of `config.kind`, seeded from `config.seed`.
std::unique_ptr<SequenceModel> make_model(const ModelConfig& config);

}  // namespace webseq::nn
