// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "webseq/rng.hpp"
#include "webseq/vocabulary.hpp"

namespace webseq {

enum class TargetMode { kLast, kCentered };

TargetMode parse_target_mode(std::string_view name);
std::string_view target_mode_name(TargetMode mode);

struct WindowConfig {
  std::size_t window_size = 16;
  std::size_t stride = 1;
  TargetMode target_mode = TargetMode::kLast;
  double mask_rate = 0.25;
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError for a zero stride, zero window or a rate outside (0, 1).
  void validate() const;
};

/// Window size grid evaluated by the ablation study.
inline constexpr std::size_t kWindowSizes[] = {8, 16, 32, 64, 128};

/// Fixed-length slice of an event stream.
///
/// `ids[i] == kMaskId` exactly at `masked_indices`, and `original_ids` holds
/// the unmasked slice, so unmasking is always lossless.
struct SequenceWindow {
  std::vector<EventId> ids;
  std::vector<EventId> original_ids;
  std::size_t target_index = 0;
  std::vector<std::size_t> masked_indices;  ///< ascending
  std::size_t offset = 0;                   ///< start position in the source stream

  std::size_t size() const noexcept { return ids.size(); }
  EventId target() const { return original_ids.at(target_index); }

  /// Restores original_ids into ids and clears the mask set.
  SequenceWindow unmasked() const;

  friend bool operator==(const SequenceWindow&, const SequenceWindow&) = default;
};

std::size_t target_index_for(std::size_t window_size, TargetMode mode);

/// max(1, round(rate * w)).
std::size_t pretraining_mask_count(std::size_t window_size, double mask_rate);

struct WindowBuildResult {
  std::vector<SequenceWindow> windows;
  std::size_t short_inputs = 0;  ///< inputs shorter than the window (skipped)
  std::size_t tail_dropped = 0;  ///< trailing ids not covered by any window
};

/// Windows at offsets 0, stride, 2*stride, ...; no masking applied.
WindowBuildResult make_windows(std::span<const EventId> ids, const WindowConfig& cfg);

/// Masks max(1, round(rate * w)) positions chosen uniformly without replacement.
/// Throws ContractError when the window already carries a mask.
SequenceWindow mask_for_pretraining(const SequenceWindow& window, const WindowConfig& cfg,
                                    Rng& rng);

/// Masks only the target slot. Throws ContractError when the window already carries a mask.
SequenceWindow mask_target(const SequenceWindow& window);

/// Debug line: ids space-separated with "|" before the target id.
std::string dump_window(const SequenceWindow& window);

}  // namespace webseq
