// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/sequencer.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <sstream>

#include "webseq/errors.hpp"
#include "webseq/rng.hpp"
#include "webseq/vocabulary.hpp"

namespace webseq {
namespace {

std::vector<EventId> iota_ids(std::size_t n, EventId first = kFirstNormalId) {
  std::vector<EventId> ids(n);
  std::iota(ids.begin(), ids.end(), first);
  return ids;
}

WindowConfig config(std::size_t w, std::size_t stride = 1, TargetMode mode = TargetMode::kLast) {
  WindowConfig c;
  c.window_size = w;
  c.stride = stride;
  c.target_mode = mode;
  return c;
}

TEST(MakeWindows, CountsAndTargets) {
  const auto r = make_windows(iota_ids(10), config(8));
  ASSERT_EQ(r.windows.size(), 3u);
  for (const auto& w : r.windows) {
    EXPECT_EQ(w.target_index, 7u);
    EXPECT_TRUE(w.masked_indices.empty());
    EXPECT_EQ(w.ids, w.original_ids);
  }
  EXPECT_EQ(r.windows[2].offset, 2u);
  EXPECT_EQ(make_windows(iota_ids(10), config(8, 1, TargetMode::kCentered)).windows[0].target_index, 4u);
  EXPECT_EQ(target_index_for(9, TargetMode::kCentered), 4u);
}

TEST(MakeWindows, ShortInputIsEmpty) {
  const auto r = make_windows(iota_ids(5), config(8));
  EXPECT_TRUE(r.windows.empty());
  EXPECT_EQ(r.short_inputs, 1u);
}

TEST(MakeWindows, RejectsBadConfig) {
  EXPECT_THROW(make_windows(iota_ids(10), config(8, 0)), ConfigError);
  WindowConfig c = config(8);
  c.mask_rate = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_target_mode("middle"), ConfigError);
  EXPECT_EQ(parse_target_mode("centered"), TargetMode::kCentered);
}

TEST(MakeWindows, StrideEqualToWidthPartitions) {
  for (std::size_t n : {16u, 17u, 23u, 40u}) {
    const auto ids = iota_ids(n);
    const auto r = make_windows(ids, config(8, 8));
    std::vector<int> seen(n, 0);
    for (const auto& w : r.windows) {
      for (std::size_t i = 0; i < w.size(); ++i) ++seen[w.offset + i];
    }
    const std::size_t covered = r.windows.size() * 8;
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(seen[i], i < covered ? 1 : 0);
    EXPECT_EQ(r.tail_dropped, n - covered);
  }
}

TEST(Masking, CountLaw) {
  Rng rng(1);
  for (std::size_t w : kWindowSizes) {
    const auto windows = make_windows(iota_ids(w + 20), config(w)).windows;
    for (const auto& win : windows) {
      const auto m = mask_for_pretraining(win, config(w), rng);
      ASSERT_EQ(m.masked_indices.size(), w / 4);
      ASSERT_EQ(mask_target(win).masked_indices.size(), 1u);
    }
  }
  EXPECT_EQ(pretraining_mask_count(2, 0.25), 1u);
  EXPECT_EQ(pretraining_mask_count(1, 0.25), 1u);
}

TEST(Masking, InvariantsAndReconstruction) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t w = 2 + rng.below(40);
    WindowConfig c = config(w);
    c.mask_rate = 0.05 + 0.9 * rng.uniform();
    std::vector<EventId> ids(w);
    for (auto& id : ids) id = kFirstNormalId + static_cast<EventId>(rng.below(30));
    const auto win = make_windows(ids, c).windows.at(0);
    const auto m = mask_for_pretraining(win, c, rng);
    ASSERT_TRUE(std::is_sorted(m.masked_indices.begin(), m.masked_indices.end()));
    for (std::size_t i = 0; i < w; ++i) {
      const bool masked = std::binary_search(m.masked_indices.begin(), m.masked_indices.end(), i);
      ASSERT_EQ(masked, m.ids[i] == kMaskId);
      ASSERT_EQ(masked, m.ids[i] != m.original_ids[i]);
    }
    ASSERT_EQ(m.unmasked(), win);
  }
}

TEST(Masking, SeedDeterminism) {
  const auto win = make_windows(iota_ids(8), config(8)).windows.at(0);
  Rng a(99), b(99);
  EXPECT_EQ(mask_for_pretraining(win, config(8), a), mask_for_pretraining(win, config(8), b));
}

TEST(Masking, PositionsAreUniform) {
  // Every slot, including the last, is chosen about mask_rate of the time.
  Rng rng(5);
  const auto win = make_windows(iota_ids(8), config(8)).windows.at(0);
  std::vector<int> hits(8, 0);
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    for (std::size_t idx : mask_for_pretraining(win, config(8), rng).masked_indices) ++hits[idx];
  }
  for (int h : hits) EXPECT_NEAR(h / static_cast<double>(trials), 0.25, 0.015);
}

TEST(MaskTarget, SlotsAndDoubleMaskIsAnError) {
  const auto last = make_windows(iota_ids(8), config(8)).windows.at(0);
  const auto centered = make_windows(iota_ids(8), config(8, 1, TargetMode::kCentered)).windows.at(0);
  EXPECT_EQ(mask_target(last).masked_indices, std::vector<std::size_t>{7});
  EXPECT_EQ(mask_target(centered).masked_indices, std::vector<std::size_t>{4});
  EXPECT_EQ(mask_target(last).target(), last.ids[7]);
  EXPECT_THROW(mask_target(mask_target(last)), ContractError);
  Rng rng(1);
  EXPECT_THROW(mask_for_pretraining(mask_target(last), config(8), rng), ContractError);
}

TEST(DumpWindow, GoldenFile) {
  const auto r = make_windows(iota_ids(12, 10), config(8, 2, TargetMode::kCentered));
  std::string dump;
  for (const auto& w : r.windows) dump += dump_window(mask_target(w)) + "\n";
  std::ifstream in(std::string(WEBSEQ_GOLDEN_DIR) + "/windows_centered_w8_s2.txt");
  std::stringstream golden;
  golden << in.rdbuf();
  EXPECT_EQ(dump, golden.str());
}

}  // namespace
}  // namespace webseq
