// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "webseq/ingest.hpp"
#include "webseq/neural/model.hpp"
#include "webseq/neural/trainer.hpp"
#include "webseq/sequencer.hpp"

namespace webseq {

enum class GroupBy { kApp, kActor };

struct SplitConfig {
  std::size_t train_days = 64;
  std::size_t valid_days = 10;
  std::size_t test_days = 10;
};

struct ExtractorConfig {
  std::size_t rare_threshold = 2;
  std::optional<double> theta;  ///< overrides the fitted gibberish threshold
  bool use_word_list = true;    ///< anchor the threshold on the bundled dictionary
};

/// Thresholds checked by `evaluate`; unset ones are not checked. They apply to
/// every successful cell of `model` (all cells when `model` is empty).
struct AcceptanceThresholds {
  std::string model;
  std::optional<double> min_top1;
  std::optional<double> min_top10;
  std::optional<double> max_mean_normal_score;
  std::optional<double> min_mean_injected_score;
  std::optional<double> min_auc;

  bool any() const {
    return min_top1 || min_top10 || max_mean_normal_score || min_mean_injected_score || min_auc;
  }
};

struct EvaluateConfig {
  std::vector<std::string> models = {"markov", "ngram", "bilstm", "lstm_attn", "self_attn"};
  std::vector<std::size_t> windows = {8, 16, 32, 64, 128};
  std::vector<bool> pretraining = {true, false};
  std::vector<TargetMode> target_modes = {TargetMode::kLast, TargetMode::kCentered};
  std::vector<std::size_t> top_n = {1, 10};
  std::vector<std::size_t> fpr_thresholds = {1, 2, 3, 5, 10, 20, 50};
  /// Random injection into test streams for score separation and ROC.
  bool inject = true;
  double inject_rate = 0.01;
  std::size_t eval_stride = 1;
  AcceptanceThresholds acceptance;
};

struct SynthConfig {
  std::size_t days = 84;
  std::size_t events_per_day = 2000;
};

struct RunConfig {
  std::uint64_t seed = 0;

  std::string input_path;
  LogFormat input_format = LogFormat::kJsonl;
  std::string default_app = "default";
  bool strict = false;
  std::string run_root;  ///< empty: $WEBSEQ_RUN_ROOT, else ./runs

  SplitConfig split;
  GroupBy group_by = GroupBy::kApp;
  RequestFilter filter;
  ExtractorConfig extractor;

  std::size_t window_size = 16;
  std::size_t train_stride = 1;
  TargetMode target_mode = TargetMode::kLast;
  double mask_rate = 0.25;

  nn::ModelConfig model;  ///< vocab_size is filled from the extracted vocabulary
  nn::TrainConfig train;
  EvaluateConfig evaluate;
  SynthConfig synth;

  /// Throws ConfigError on inconsistent values.
  void validate() const;

  /// Canonical JSON with every field spelled out.
  std::string to_json() const;

  /// FNV-1a of to_json(), hex.
  std::string fingerprint() const;

  WindowConfig window_config(std::size_t window, TargetMode mode, std::size_t stride) const;
};

/// Parses a JSON config; missing keys keep their defaults, unknown keys are rejected.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

std::string_view group_by_name(GroupBy group_by);

/// Run directory for a config: <root>/<fingerprint>.
std::filesystem::path run_directory(const RunConfig& config);

}  // namespace webseq
