// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/neural/trainer.hpp"

#include <cmath>
#include <numeric>

#include "webseq/errors.hpp"

namespace webseq::nn {

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (pretrain_epochs && *pretrain_epochs == 0) throw ConfigError("pretrain_epochs must be positive");
  if (!(pretrain_lr > 0.0)) throw ConfigError("pretrain_lr must be positive");
  if (!(resolved_finetune_lr() > 0.0)) throw ConfigError("finetune_lr must be positive");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
}

bool EarlyStopper::observe(std::size_t epoch, double loss) {
  if (loss < best_loss_) {
    best_loss_ = loss;
    best_epoch_ = epoch;
  }
  return epoch - best_epoch_ >= patience_;
}

AdamW::AdamW(const TensorSet& params, const TrainConfig& cfg)
    : m_(params.zeros_like()),
      v_(params.zeros_like()),
      beta1_(cfg.beta1),
      beta2_(cfg.beta2),
      epsilon_(cfg.epsilon),
      weight_decay_(cfg.weight_decay) {}

void AdamW::step(TensorSet& params, const TensorSet& grads, double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t s = 0; s < params.size(); ++s) {
    Matrix& p = params[s];
    const Matrix& g = grads[s];
    m_[s] = beta1_ * m_[s] + (1.0 - beta1_) * g;
    v_[s] = beta2_ * v_[s] + (1.0 - beta2_) * g.cwiseProduct(g);
    if (params.decays(s) && weight_decay_ > 0.0) p *= 1.0 - lr * weight_decay_;
    p.array() -= lr * (m_[s].array() / c1) / ((v_[s].array() / c2).sqrt() + epsilon_);
  }
  params.round_to_float();
}

namespace {

std::vector<EventId> targets_of(const SequenceWindow& w) {
  std::vector<EventId> out;
  out.reserve(w.masked_indices.size());
  for (std::size_t i : w.masked_indices) out.push_back(w.original_ids[i]);
  return out;
}

using EpochWindows =
    std::function<const std::vector<SequenceWindow>&(std::size_t epoch, Rng& rng)>;

TrainResult run_training(SequenceModel& model, const EpochWindows& make_epoch,
                         std::span<const SequenceWindow> valid, std::size_t epochs, double lr,
                         const TrainConfig& cfg, std::uint64_t salt, const EpochCallback& on_epoch) {
  Rng rng(Rng::derive(cfg.seed, salt));
  AdamW optimizer(model.parameters(), cfg);
  TensorSet grads = model.parameters().zeros_like();
  EarlyStopper stopper(cfg.patience);
  TrainResult result;
  TensorSet best = model.parameters();

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const std::vector<SequenceWindow>& windows = make_epoch(epoch, rng);
    std::vector<std::size_t> order(windows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    double epoch_loss = 0.0;
    std::size_t epoch_positions = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::size_t positions = 0;
      for (std::size_t b = start; b < stop; ++b) positions += windows[order[b]].masked_indices.size();
      if (positions == 0) continue;
      grads.set_zero();
      const double weight = 1.0 / static_cast<double>(positions);
      for (std::size_t b = start; b < stop; ++b) {
        const SequenceWindow& w = windows[order[b]];
        epoch_loss += model.loss(w.ids, w.masked_indices, targets_of(w), &rng, &grads, weight);
      }
      epoch_positions += positions;
      optimizer.step(model.parameters(), grads, lr);
    }
    const double train_loss = epoch_loss / static_cast<double>(std::max<std::size_t>(1, epoch_positions));
    if (!std::isfinite(train_loss)) {
      throw TrainingError("training loss diverged at epoch " + std::to_string(epoch));
    }
    result.train_loss.push_back(train_loss);

    double monitored = train_loss;
    double valid_loss = std::nan("");
    if (!valid.empty()) {
      valid_loss = evaluate_loss(model, valid);
      result.valid_loss.push_back(valid_loss);
      monitored = valid_loss;
    }
    if (on_epoch) on_epoch(epoch, train_loss, valid_loss);

    const bool stop = stopper.observe(epoch, monitored);
    if (stopper.best_epoch() == epoch) best = model.parameters();
    if (stop) {
      result.stopped_early = epoch + 1 < epochs;
      break;
    }
  }
  result.best_epoch = stopper.best_epoch();
  model.parameters() = std::move(best);
  return result;
}

}  // namespace

double evaluate_loss(const SequenceModel& model, std::span<const SequenceWindow> windows) {
  double total = 0.0;
  std::size_t positions = 0;
  for (const SequenceWindow& w : windows) {
    if (w.masked_indices.empty()) throw ContractError("evaluate_loss needs masked windows");
    total += model.loss(w.ids, w.masked_indices, targets_of(w), nullptr, nullptr, 1.0);
    positions += w.masked_indices.size();
  }
  return positions ? total / static_cast<double>(positions) : 0.0;
}

TrainResult pretrain(SequenceModel& model, std::span<const SequenceWindow> train,
                     std::span<const SequenceWindow> valid, const WindowConfig& window_cfg,
                     const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  window_cfg.validate();
  if (train.empty()) throw TrainingError("pre-training needs at least one window");

  Rng valid_rng(Rng::derive(cfg.seed, 0x7a11d));
  std::vector<SequenceWindow> valid_masked;
  valid_masked.reserve(valid.size());
  for (const SequenceWindow& w : valid) {
    valid_masked.push_back(mask_for_pretraining(w.unmasked(), window_cfg, valid_rng));
  }
  std::vector<SequenceWindow> buffer;
  const EpochWindows make_epoch = [&](std::size_t, Rng& rng) -> const std::vector<SequenceWindow>& {
    buffer.clear();
    buffer.reserve(train.size());
    for (const SequenceWindow& w : train) {
      buffer.push_back(mask_for_pretraining(w.masked_indices.empty() ? w : w.unmasked(), window_cfg, rng));
    }
    return buffer;
  };
  TrainResult result = run_training(model, make_epoch, valid_masked, cfg.resolved_pretrain_epochs(),
                                    cfg.pretrain_lr, cfg, 0x9e7, on_epoch);
  model.pretrained = true;
  return result;
}

TrainResult finetune(SequenceModel& model, std::span<const SequenceWindow> train,
                     std::span<const SequenceWindow> valid, const TrainConfig& cfg,
                     const EpochCallback& on_epoch) {
  cfg.validate();
  if (train.empty()) throw TrainingError("fine-tuning needs at least one window");
  auto prepare = [](std::span<const SequenceWindow> in) {
    std::vector<SequenceWindow> out;
    out.reserve(in.size());
    for (const SequenceWindow& w : in) out.push_back(w.masked_indices.empty() ? mask_target(w) : w);
    return out;
  };
  const std::vector<SequenceWindow> train_masked = prepare(train);
  const std::vector<SequenceWindow> valid_masked = prepare(valid);
  const EpochWindows make_epoch = [&](std::size_t, Rng&) -> const std::vector<SequenceWindow>& {
    return train_masked;
  };
  return run_training(model, make_epoch, valid_masked, cfg.epochs, cfg.resolved_finetune_lr(), cfg,
                      0xf17e, on_epoch);
}

}  // namespace webseq::nn
