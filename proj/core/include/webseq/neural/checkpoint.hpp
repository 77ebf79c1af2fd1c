// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "webseq/baselines.hpp"
#include "webseq/neural/model.hpp"
#include "webseq/sequencer.hpp"

namespace webseq::nn {

inline constexpr char kCheckpointMagic[8] = {'W', 'S', 'E', 'Q', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMetadata {
  std::string model;  ///< "self_attn", "bilstm", "lstm_attn", "markov", "ngram"
  std::optional<ModelConfig> config;
  std::uint64_t vocab_fingerprint = 0;
  std::uint64_t seed = 0;
  std::size_t window_size = 0;
  TargetMode target_mode = TargetMode::kLast;
  bool pretrained = false;
  std::vector<double> train_loss;
  std::vector<double> valid_loss;
};

/// Versioned binary container: magic, version, JSON metadata, float32
/// row-major little-endian tensors and named text blobs.
struct Checkpoint {
  CheckpointMetadata metadata;
  TensorSet tensors;
  std::map<std::string, std::string> blobs;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
/// Throws IoError on truncated or foreign data, CompatibilityError on a version mismatch.
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

Checkpoint make_checkpoint(const SequenceModel& model, CheckpointMetadata metadata);
Checkpoint make_checkpoint(const TransitionTable& table, CheckpointMetadata metadata);

/// Rebuilds a neural model. With `expected_vocab` set, a different vocabulary
/// fingerprint raises CompatibilityError.
std::unique_ptr<SequenceModel> restore_model(const Checkpoint& checkpoint,
                                             std::optional<std::uint64_t> expected_vocab = {});
TransitionTable restore_table(const Checkpoint& checkpoint,
                              std::optional<std::uint64_t> expected_vocab = {});

}  // namespace webseq::nn
