// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "webseq/neural/model.hpp"
#include "webseq/sequencer.hpp"

namespace webseq::nn {

struct TrainConfig {
  std::size_t batch_size = 128;
  std::size_t epochs = 100;
  std::size_t patience = 10;
  /// Epoch cap for the pre-training stage; `epochs` when unset.
  std::optional<std::size_t> pretrain_epochs;
  double pretrain_lr = 1e-3;
  /// pretrain_lr / 10 when unset.
  std::optional<double> finetune_lr;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  double resolved_finetune_lr() const { return finetune_lr ? *finetune_lr : pretrain_lr / 10.0; }
  std::size_t resolved_pretrain_epochs() const { return pretrain_epochs ? *pretrain_epochs : epochs; }

  /// Throws ConfigError for non-positive sizes or rates.
  void validate() const;
};

/// Stops once the monitored loss has not decreased for `patience` epochs.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  /// Records the loss of `epoch` (0-based); true when training should stop.
  bool observe(std::size_t epoch, double loss);

  std::size_t best_epoch() const noexcept { return best_epoch_; }
  double best_loss() const noexcept { return best_loss_; }

 private:
  std::size_t patience_;
  std::size_t best_epoch_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
};

struct TrainResult {
  std::vector<double> train_loss;  ///< mean cross-entropy per masked position, per epoch
  std::vector<double> valid_loss;  ///< empty when no validation windows were given
  std::size_t best_epoch = 0;
  bool stopped_early = false;

  std::size_t epochs_run() const noexcept { return train_loss.size(); }
};

/// Called after every epoch with (epoch, train loss, valid loss or NaN).
using EpochCallback = std::function<void(std::size_t, double, double)>;

/// Adam with decoupled weight decay on weight matrices (embeddings, biases and
/// norm parameters are exempt). Parameters are kept at float32 precision.
class AdamW {
 public:
  AdamW(const TensorSet& params, const TrainConfig& cfg);
  void step(TensorSet& params, const TensorSet& grads, double lr);

 private:
  TensorSet m_, v_;
  double beta1_, beta2_, epsilon_, weight_decay_;
  std::uint64_t t_ = 0;
};

/// Masked-event pre-training. `train` and `valid` are unmasked windows; training
/// windows are re-masked every epoch, validation windows once with a fixed seed.
/// Leaves the model at its best-validation weights and sets `pretrained`.
TrainResult pretrain(SequenceModel& model, std::span<const SequenceWindow> train,
                     std::span<const SequenceWindow> valid, const WindowConfig& window_cfg,
                     const TrainConfig& cfg, const EpochCallback& on_epoch = {});

/// Target-only training at the fine-tuning rate. Windows without a mask get
/// their target slot masked; masked windows are used as they are.
TrainResult finetune(SequenceModel& model, std::span<const SequenceWindow> train,
                     std::span<const SequenceWindow> valid, const TrainConfig& cfg,
                     const EpochCallback& on_epoch = {});

/// Mean cross-entropy per masked position over masked windows, evaluation mode.
double evaluate_loss(const SequenceModel& model, std::span<const SequenceWindow> windows);

}  // namespace webseq::nn
