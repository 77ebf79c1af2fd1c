// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "webseq/errors.hpp"
#include "webseq/neural/gradient_check.hpp"
#include "webseq/neural/ops.hpp"
#include "webseq/neural/recurrent.hpp"
#include "webseq/neural/self_attention.hpp"
#include "webseq/sequencer.hpp"
#include "webseq/vocabulary.hpp"

namespace webseq::nn {
namespace {

ModelConfig small(ModelKind kind, std::size_t vocab = 12) {
  ModelConfig c;
  c.kind = kind;
  c.vocab_size = vocab;
  c.d_model = 8;
  c.hidden = 6;
  c.layers = 2;
  c.heads = 2;
  c.lstm_layers = 2;
  c.max_window = 16;
  c.seed = 3;
  return c;
}

SequenceWindow window(std::vector<EventId> ids, std::size_t target) {
  SequenceWindow w;
  w.ids = ids;
  w.original_ids = std::move(ids);
  w.target_index = target;
  return w;
}

const ModelKind kKinds[] = {ModelKind::kSelfAttention, ModelKind::kBiLstm, ModelKind::kLstmAttention};

TEST(ModelConfig, DefaultsAndValidation) {
  ModelConfig c;
  EXPECT_EQ(c.d_model, 128u);
  EXPECT_EQ(c.layers, 8u);
  EXPECT_EQ(c.heads, 8u);
  EXPECT_EQ(c.resolved_head_width(), 16u);
  EXPECT_EQ(c.resolved_ff_width(), 512u);
  EXPECT_DOUBLE_EQ(c.dropout, 0.2);
  c.vocab_size = 10;
  EXPECT_NO_THROW(c.validate());
  c.dropout = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_model_kind("gru"), ConfigError);
  for (auto k : kKinds) EXPECT_EQ(parse_model_kind(model_kind_name(k)), k);
}

TEST(Embed, AdditiveIdentities) {
  SelfAttentionModel m(small(ModelKind::kSelfAttention));
  const std::vector<EventId> ids = {3, 4, 5, 3, 7, 8, 9, 10};
  const Matrix full = m.embed(ids);
  EXPECT_EQ(full.rows(), 8);
  EXPECT_EQ(full.cols(), 8);
  SelfAttentionModel no_events = m;
  no_events.parameters()[no_events.event_table_slot()].setZero();
  const Matrix pos = no_events.embed(ids);
  for (Eigen::Index i = 0; i < 8; ++i) {
    EXPECT_EQ(pos.row(i), m.parameters()[m.position_table_slot()].row(i));
  }
  SelfAttentionModel no_positions = m;
  no_positions.parameters()[no_positions.position_table_slot()].setZero();
  const Matrix ev = no_positions.embed(ids);
  for (Eigen::Index i = 0; i < 8; ++i) {
    EXPECT_EQ(ev.row(i), m.parameters()[m.event_table_slot()].row(ids[static_cast<std::size_t>(i)]));
  }
}

TEST(Embed, PaperWidth) {
  ModelConfig c;
  c.vocab_size = 20;
  c.layers = 1;
  SelfAttentionModel m(c);
  const std::vector<EventId> ids(8, 3);
  const Matrix e = m.embed(ids);
  EXPECT_EQ(e.rows(), 8);
  EXPECT_EQ(e.cols(), 128);
}

TEST(Forward, UntrainedModelsEmitDistributions) {
  for (auto kind : kKinds) {
    const auto m = make_model(small(kind));
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<EventId> ids(2 + rng.below(15));
      for (auto& id : ids) id = static_cast<EventId>(rng.below(12));
      WindowConfig wc;
      wc.window_size = ids.size();
      const auto masked = mask_for_pretraining(window(ids, ids.size() - 1), wc, rng);
      const auto dists = m->forward(masked);
      ASSERT_EQ(dists.size(), masked.masked_indices.size());
      for (std::size_t q = 0; q < dists.size(); ++q) {
        double sum = 0.0;
        for (double p : dists[q].probs) {
          ASSERT_GE(p, 0.0);
          sum += p;
        }
        ASSERT_NEAR(sum, 1.0, 1e-6);
        EXPECT_EQ(dists[q].target_index, masked.masked_indices[q]);
        EXPECT_EQ(dists[q].model_id, model_kind_name(kind));
      }
      // Evaluation mode is deterministic.
      ASSERT_EQ(m->forward(masked)[0].probs, dists[0].probs);
    }
  }
}

TEST(Forward, Contracts) {
  for (auto kind : kKinds) {
    const auto m = make_model(small(kind));
    EXPECT_THROW(m->forward(window({3, 4, 5}, 2)), ContractError);
    EXPECT_THROW(m->forward(mask_target(window({3, 4, 50}, 1))), ShapeError);
  }
  const auto sa = make_model(small(ModelKind::kSelfAttention));
  EXPECT_THROW(sa->forward(mask_target(window(std::vector<EventId>(17, 3), 16))), ShapeError);
}

TEST(Attention, RuntimeRowSums) {
  SelfAttentionModel m(small(ModelKind::kSelfAttention));
  const auto maps = m.attention_maps(std::vector<EventId>{3, 4, 5, 6, 1});
  ASSERT_EQ(maps.size(), 4u);
  for (const auto& a : maps) EXPECT_LT(max_row_sum_deviation(a), 1e-6);
  RecurrentModel r(small(ModelKind::kLstmAttention));
  const RowVector alpha = r.attention_weights(std::vector<EventId>{3, 4, 5, 6, 1});
  EXPECT_NEAR(alpha.sum(), 1.0, 1e-12);
  EXPECT_EQ(RecurrentModel(small(ModelKind::kBiLstm)).attention_weights(std::vector<EventId>{3}).size(), 0);
}

TEST(Dropout, OnlyInTraining) {
  for (auto kind : kKinds) {
    const auto m = make_model(small(kind));
    const std::vector<EventId> ids = {3, 4, 5, 6, 7, 8};
    const std::vector<std::size_t> q = {5};
    const std::vector<EventId> t = {8};
    const double eval = m->loss(ids, q, t, nullptr, nullptr);
    Rng a(1), b(2);
    const double train_a = m->loss(ids, q, t, &a, nullptr);
    const double train_b = m->loss(ids, q, t, &b, nullptr);
    EXPECT_NE(train_a, eval);
    EXPECT_NE(train_a, train_b);
    EXPECT_EQ(m->loss(ids, q, t, nullptr, nullptr), eval);
  }
}

TEST(Parameters, AreFloat32AndSeeded) {
  for (auto kind : kKinds) {
    const auto a = make_model(small(kind));
    const auto b = make_model(small(kind));
    for (std::size_t s = 0; s < a->parameters().size(); ++s) {
      const Matrix& m = a->parameters()[s];
      ASSERT_EQ(m, b->parameters()[s]);
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        ASSERT_EQ(m.data()[i], static_cast<double>(static_cast<float>(m.data()[i])));
      }
    }
  }
}

TEST(GradientCheck, AllArchitecturesBothModes) {
  for (auto kind : kKinds) {
    ModelConfig c;
    c.kind = kind;
    c.vocab_size = 8;
    c.d_model = 4;
    c.hidden = 4;
    c.layers = 1;
    c.heads = 1;
    c.max_window = 4;
    c.seed = 11;
    const auto m = make_model(c);
    WindowConfig wc;
    wc.window_size = 4;
    wc.mask_rate = 0.5;
    Rng rng(4);
    const auto w = mask_for_pretraining(window({3, 7, 4, 5}, 3), wc, rng);
    const auto eval = gradient_check(*m, w);
    EXPECT_LT(eval.max_relative_error, 1e-3) << model_kind_name(kind) << " " << eval.worst_tensor;
    EXPECT_EQ(eval.checked, m->parameters().parameter_count());
    GradientCheckOptions opts;
    opts.dropout_seed = 5;
    const auto train = gradient_check(*m, w, opts);
    EXPECT_LT(train.max_relative_error, 1e-3) << model_kind_name(kind) << " " << train.worst_tensor;
  }
}

TEST(GradientCheck, DeeperStacks) {
  for (auto kind : kKinds) {
    auto c = small(kind, 9);
    c.d_model = 6;
    c.hidden = 5;
    c.heads = 3;
    const auto m = make_model(c);
    const auto r = gradient_check(*m, mask_target(window({3, 4, 5, 6, 7, 8}, 3)));
    EXPECT_LT(r.max_relative_error, 1e-3) << model_kind_name(kind) << " " << r.worst_tensor;
  }
}

TEST(Clone, IsIndependent) {
  for (auto kind : kKinds) {
    const auto m = make_model(small(kind));
    auto c = m->clone();
    c->parameters()[0].setZero();
    EXPECT_NE(m->parameters()[0], c->parameters()[0]);
    EXPECT_EQ(c->kind(), kind);
  }
}

}  // namespace
}  // namespace webseq::nn
