// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/neural/model.hpp"

#include "webseq/errors.hpp"
#include "webseq/neural/ops.hpp"
#include "webseq/neural/recurrent.hpp"
#include "webseq/neural/self_attention.hpp"

namespace webseq::nn {

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kSelfAttention: return "self_attn";
    case ModelKind::kBiLstm: return "bilstm";
    case ModelKind::kLstmAttention: return "lstm_attn";
  }
  return "self_attn";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "self_attn") return ModelKind::kSelfAttention;
  if (name == "bilstm") return ModelKind::kBiLstm;
  if (name == "lstm_attn") return ModelKind::kLstmAttention;
  throw ConfigError("unknown neural model \"" + std::string(name) +
                    "\" (expected self_attn, bilstm or lstm_attn)");
}

void ModelConfig::validate() const {
  if (vocab_size == 0) throw ConfigError("model vocabulary size must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (kind == ModelKind::kSelfAttention) {
    if (d_model == 0 || heads == 0) throw ConfigError("self-attention needs d_model and heads > 0");
    if (head_width == 0 && d_model % heads != 0) {
      throw ConfigError("d_model must be divisible by heads when head_width is unset");
    }
    if (max_window == 0) throw ConfigError("position table needs at least one row");
  } else {
    if (d_model == 0 || hidden == 0) throw ConfigError("recurrent model needs d_model and hidden > 0");
    if (lstm_layers == 0 || lstm_layers > 3) throw ConfigError("lstm_layers must be 1, 2 or 3");
  }
}

void SequenceModel::check_input(std::span<const EventId> ids,
                                std::span<const std::size_t> queries) const {
  for (EventId id : ids) {
    if (id >= config_.vocab_size) {
      throw ShapeError("event id " + std::to_string(id) + " outside model vocabulary of " +
                       std::to_string(config_.vocab_size));
    }
  }
  if (config_.kind == ModelKind::kSelfAttention && ids.size() > config_.max_window) {
    throw ShapeError("window of " + std::to_string(ids.size()) + " exceeds position table of " +
                     std::to_string(config_.max_window));
  }
  for (std::size_t q : queries) {
    if (q >= ids.size()) throw ShapeError("query position outside window");
  }
}

std::vector<PredictionDistribution> SequenceModel::forward(const SequenceWindow& window) const {
  if (window.masked_indices.empty()) {
    throw ContractError("forward needs a masked window (pre-training or target mode)");
  }
  const Matrix probs = softmax_rows(logits(window.ids, window.masked_indices));
  std::vector<PredictionDistribution> out;
  out.reserve(window.masked_indices.size());
  for (std::size_t i = 0; i < window.masked_indices.size(); ++i) {
    PredictionDistribution dist;
    dist.model_id = std::string(model_kind_name(config_.kind));
    dist.target_index = window.masked_indices[i];
    const auto row = probs.row(static_cast<Eigen::Index>(i));
    dist.probs.assign(row.data(), row.data() + row.size());
    out.push_back(std::move(dist));
  }
  return out;
}

std::unique_ptr<SequenceModel> make_model(const ModelConfig& config) {
  config.validate();
  switch (config.kind) {
    case ModelKind::kSelfAttention: return std::make_unique<SelfAttentionModel>(config);
    case ModelKind::kBiLstm:
    case ModelKind::kLstmAttention: return std::make_unique<RecurrentModel>(config);
  }
  throw ConfigError("unknown model kind");
}

}  // namespace webseq::nn
