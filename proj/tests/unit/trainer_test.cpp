// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/neural/trainer.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "webseq/errors.hpp"
#include "webseq/sequencer.hpp"
#include "webseq/vocabulary.hpp"

namespace webseq::nn {
namespace {

constexpr EventId A = kFirstNormalId, B = kFirstNormalId + 1;

ModelConfig tiny(ModelKind kind) {
  ModelConfig c;
  c.kind = kind;
  c.vocab_size = 6;
  c.d_model = 16;
  c.hidden = 16;
  c.layers = 1;
  c.heads = 2;
  c.max_window = 8;
  c.dropout = 0.1;
  c.seed = 2;
  return c;
}

std::vector<SequenceWindow> alternating_windows(std::size_t n, std::size_t w) {
  std::vector<EventId> ids;
  for (std::size_t i = 0; i < n + w; ++i) ids.push_back(i % 2 ? B : A);
  WindowConfig wc;
  wc.window_size = w;
  return make_windows(ids, wc).windows;
}

TEST(TrainConfig, Defaults) {
  TrainConfig c;
  EXPECT_EQ(c.batch_size, 128u);
  EXPECT_EQ(c.epochs, 100u);
  EXPECT_EQ(c.patience, 10u);
  EXPECT_DOUBLE_EQ(c.pretrain_lr, 0.001);
  EXPECT_DOUBLE_EQ(c.resolved_finetune_lr(), 0.0001);
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(EarlyStopper, FlatLossStopsAfterPatience) {
  EarlyStopper s(10);
  std::size_t epoch = 0;
  for (double loss : {5.0, 4.0, 3.0}) EXPECT_FALSE(s.observe(epoch++, loss));
  // Flat from epoch 2 on.
  for (; epoch < 12; ++epoch) EXPECT_FALSE(s.observe(epoch, 3.0)) << epoch;
  EXPECT_TRUE(s.observe(12, 3.0));
  EXPECT_EQ(s.best_epoch(), 2u);
}

TEST(EarlyStopper, ImprovementResets) {
  EarlyStopper s(2);
  EXPECT_FALSE(s.observe(0, 1.0));
  EXPECT_FALSE(s.observe(1, 1.5));
  EXPECT_FALSE(s.observe(2, 0.5));
  EXPECT_FALSE(s.observe(3, 0.7));
  EXPECT_TRUE(s.observe(4, 0.6));
}

TEST(Training, LearnsAlternation) {
  for (auto kind : {ModelKind::kSelfAttention, ModelKind::kBiLstm, ModelKind::kLstmAttention}) {
    const auto model = make_model(tiny(kind));
    const auto windows = alternating_windows(64, 6);
    TrainConfig tc;
    tc.batch_size = 16;
    tc.epochs = 30;
    tc.finetune_lr = 0.01;
    tc.seed = 1;
    finetune(*model, windows, {}, tc);
    // Last slot after ...A must be B.
    SequenceWindow w = windows[0];
    ASSERT_EQ(w.ids[4], A);
    const auto d = model->forward(mask_target(w));
    EXPECT_GT(d[0].probs[B], 0.9) << model_kind_name(kind);
  }
}

TEST(Training, MemorizesSingleWindow) {
  const auto model = make_model(tiny(ModelKind::kSelfAttention));
  WindowConfig wc;
  wc.window_size = 6;
  const std::vector<EventId> ids = {3, 4, 5, 3, 5, 4};
  const auto windows = std::vector<SequenceWindow>(8, make_windows(ids, wc).windows[0]);
  TrainConfig tc;
  tc.batch_size = 8;
  tc.epochs = 150;
  tc.patience = 1000;
  tc.pretrain_lr = 0.01;
  tc.seed = 3;
  const auto r = pretrain(*model, windows, {}, wc, tc);
  ASSERT_EQ(r.epochs_run(), 150u);
  EXPECT_LT(r.train_loss.back(), 0.1);
  EXPECT_LT(r.train_loss.back(), r.train_loss.front());
  EXPECT_TRUE(model->pretrained);
}

TEST(Training, SameSeedSameCurves) {
  auto run = [] {
    const auto model = make_model(tiny(ModelKind::kBiLstm));
    const auto windows = alternating_windows(40, 6);
    const auto valid = alternating_windows(10, 6);
    WindowConfig wc;
    wc.window_size = 6;
    TrainConfig tc;
    tc.batch_size = 8;
    tc.epochs = 4;
    tc.seed = 9;
    auto r = pretrain(*model, windows, valid, wc, tc);
    const auto f = finetune(*model, windows, valid, tc);
    r.train_loss.insert(r.train_loss.end(), f.train_loss.begin(), f.train_loss.end());
    r.valid_loss.insert(r.valid_loss.end(), f.valid_loss.begin(), f.valid_loss.end());
    return r;
  };
  const auto a = run(), b = run();
  EXPECT_EQ(a.train_loss, b.train_loss);
  EXPECT_EQ(a.valid_loss, b.valid_loss);
  EXPECT_EQ(a.train_loss.size(), 8u);
}

TEST(Training, EarlyStopsOnValidation) {
  const auto model = make_model(tiny(ModelKind::kBiLstm));
  const auto windows = alternating_windows(32, 6);
  TrainConfig tc;
  tc.batch_size = 8;
  tc.epochs = 200;
  tc.patience = 3;
  tc.finetune_lr = 0.05;
  const auto r = finetune(*model, windows, windows, tc);
  EXPECT_TRUE(r.stopped_early);
  EXPECT_LT(r.epochs_run(), 200u);
  EXPECT_EQ(r.epochs_run(), r.best_epoch + 1 + tc.patience);
  // Best weights are restored.
  std::vector<SequenceWindow> masked;
  for (const auto& w : windows) masked.push_back(mask_target(w));
  EXPECT_NEAR(evaluate_loss(*model, masked), r.valid_loss[r.best_epoch], 1e-6);
}

TEST(Training, EmptyInputIsAnError) {
  const auto model = make_model(tiny(ModelKind::kSelfAttention));
  WindowConfig wc;
  wc.window_size = 6;
  EXPECT_THROW(pretrain(*model, {}, {}, wc, TrainConfig{}), TrainingError);
  EXPECT_THROW(finetune(*model, {}, {}, TrainConfig{}), TrainingError);
}

TEST(AdamW, DecayOnlyOnFlaggedSlots) {
  TensorSet p;
  p.add("w", 1, 1, true);
  p.add("b", 1, 1, false);
  p[0](0, 0) = 1.0;
  p[1](0, 0) = 1.0;
  TrainConfig tc;
  tc.weight_decay = 0.5;
  AdamW opt(p, tc);
  const TensorSet g = p.zeros_like();
  opt.step(p, g, 0.1);
  EXPECT_NEAR(p[0](0, 0), 0.95, 1e-7);
  EXPECT_EQ(p[1](0, 0), 1.0);
}

}  // namespace
}  // namespace webseq::nn
