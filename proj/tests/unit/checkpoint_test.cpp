// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/neural/checkpoint.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "webseq/baselines.hpp"
#include "webseq/errors.hpp"
#include "webseq/sequencer.hpp"

namespace webseq::nn {
namespace {

ModelConfig config(ModelKind kind) {
  ModelConfig c;
  c.kind = kind;
  c.vocab_size = 10;
  c.d_model = 8;
  c.hidden = 6;
  c.layers = 2;
  c.heads = 2;
  c.max_window = 8;
  c.seed = 17;
  return c;
}

CheckpointMetadata meta(std::string model) {
  CheckpointMetadata m;
  m.model = std::move(model);
  m.vocab_fingerprint = 0xfeedfacecafebeefULL;
  m.seed = 4;
  m.window_size = 8;
  m.target_mode = TargetMode::kCentered;
  m.pretrained = true;
  m.train_loss = {2.5, 1.25};
  m.valid_loss = {2.75, 1.5};
  return m;
}

std::string bytes(const Checkpoint& c) {
  std::ostringstream out;
  write_checkpoint(out, c);
  return out.str();
}

TEST(Checkpoint, NeuralRoundTripPredictsIdentically) {
  for (auto kind : {ModelKind::kSelfAttention, ModelKind::kBiLstm, ModelKind::kLstmAttention}) {
    const auto model = make_model(config(kind));
    model->pretrained = true;
    const auto ckpt = make_checkpoint(*model, meta(std::string(model_kind_name(kind))));
    std::istringstream in(bytes(ckpt));
    const auto back = read_checkpoint(in);
    EXPECT_EQ(bytes(back), bytes(ckpt));
    const auto restored = restore_model(back, 0xfeedfacecafebeefULL);
    EXPECT_TRUE(restored->pretrained);
    SequenceWindow w;
    w.original_ids = {3, 4, 5, 6, 7, 8, 9, 3};
    w.ids = w.original_ids;
    w.target_index = 4;
    const auto masked = mask_target(w);
    EXPECT_EQ(restored->forward(masked)[0].probs, model->forward(masked)[0].probs);
    EXPECT_EQ(back.metadata.train_loss, ckpt.metadata.train_loss);
    EXPECT_EQ(back.metadata.target_mode, TargetMode::kCentered);
  }
}

TEST(Checkpoint, TableRoundTrip) {
  const std::vector<EventId> seq = {3, 4, 3, 4, 5, 3};
  const auto table = fit_ngram(seq, 3, 6);
  const auto ckpt = make_checkpoint(table, meta("ngram"));
  std::istringstream in(bytes(ckpt));
  EXPECT_EQ(restore_table(read_checkpoint(in)), table);
}

TEST(Checkpoint, RejectsForeignAndTruncatedData) {
  const auto ckpt = make_checkpoint(*make_model(config(ModelKind::kBiLstm)), meta("bilstm"));
  const std::string data = bytes(ckpt);
  std::istringstream foreign("NOTACKPT" + data.substr(8));
  EXPECT_THROW(read_checkpoint(foreign), IoError);
  for (std::size_t cut : {4ul, 12ul, data.size() / 2, data.size() - 1}) {
    std::istringstream truncated(data.substr(0, cut));
    EXPECT_THROW(read_checkpoint(truncated), IoError) << cut;
  }
  std::string future = data;
  future[8] = 9;
  std::istringstream newer(future);
  EXPECT_THROW(read_checkpoint(newer), CompatibilityError);
}

TEST(Checkpoint, VocabularyMismatch) {
  const auto ckpt = make_checkpoint(*make_model(config(ModelKind::kSelfAttention)), meta("self_attn"));
  EXPECT_THROW(restore_model(ckpt, 1234), CompatibilityError);
  const std::vector<EventId> seq = {3, 4, 3};
  const auto table_ckpt = make_checkpoint(fit_ngram(seq, 2, 6), meta("markov"));
  EXPECT_THROW(restore_table(table_ckpt, 1234), CompatibilityError);
}

TEST(Checkpoint, FileRoundTripIsAtomic) {
  const auto dir = std::filesystem::temp_directory_path() / "webseq_ckpt_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto ckpt = make_checkpoint(*make_model(config(ModelKind::kLstmAttention)), meta("lstm_attn"));
  save_checkpoint(dir / "model.bin", ckpt);
  EXPECT_FALSE(std::filesystem::exists(dir / "model.bin.tmp"));
  EXPECT_EQ(bytes(load_checkpoint(dir / "model.bin")), bytes(ckpt));
  EXPECT_THROW(load_checkpoint(dir / "missing.bin"), IoError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace webseq::nn
