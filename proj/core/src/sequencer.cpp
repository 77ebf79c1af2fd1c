// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/sequencer.hpp"

#include <cmath>

#include "webseq/errors.hpp"

namespace webseq {

TargetMode parse_target_mode(std::string_view name) {
  if (name == "last") return TargetMode::kLast;
  if (name == "centered") return TargetMode::kCentered;
  throw ConfigError("unknown target mode \"" + std::string(name) + "\" (expected last or centered)");
}

std::string_view target_mode_name(TargetMode mode) {
  return mode == TargetMode::kLast ? "last" : "centered";
}

void WindowConfig::validate() const {
  if (window_size == 0) throw ConfigError("window size must be positive");
  if (stride == 0) throw ConfigError("stride must be at least 1");
  if (!(mask_rate > 0.0 && mask_rate < 1.0)) throw ConfigError("mask rate must lie in (0, 1)");
}

SequenceWindow SequenceWindow::unmasked() const {
  SequenceWindow out = *this;
  out.ids = original_ids;
  out.masked_indices.clear();
  return out;
}

std::size_t target_index_for(std::size_t window_size, TargetMode mode) {
  return mode == TargetMode::kLast ? window_size - 1 : window_size / 2;
}

std::size_t pretraining_mask_count(std::size_t window_size, double mask_rate) {
  const auto n = static_cast<std::size_t>(std::llround(mask_rate * static_cast<double>(window_size)));
  return std::min(window_size, std::max<std::size_t>(1, n));
}

WindowBuildResult make_windows(std::span<const EventId> ids, const WindowConfig& cfg) {
  cfg.validate();
  WindowBuildResult result;
  const std::size_t w = cfg.window_size;
  if (ids.size() < w) {
    result.short_inputs = 1;
    result.tail_dropped = ids.size();
    return result;
  }
  const std::size_t target = target_index_for(w, cfg.target_mode);
  std::size_t covered = 0;
  for (std::size_t offset = 0; offset + w <= ids.size(); offset += cfg.stride) {
    SequenceWindow win;
    win.ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(offset),
                   ids.begin() + static_cast<std::ptrdiff_t>(offset + w));
    win.original_ids = win.ids;
    win.target_index = target;
    win.offset = offset;
    covered = offset + w;
    result.windows.push_back(std::move(win));
  }
  result.tail_dropped = ids.size() - covered;
  return result;
}

SequenceWindow mask_for_pretraining(const SequenceWindow& window, const WindowConfig& cfg,
                                    Rng& rng) {
  if (!window.masked_indices.empty()) throw ContractError("window is already masked");
  SequenceWindow out = window;
  const std::size_t count = pretraining_mask_count(window.size(), cfg.mask_rate);
  out.masked_indices = rng.sample_without_replacement(window.size(), count);
  for (std::size_t i : out.masked_indices) out.ids[i] = kMaskId;
  return out;
}

SequenceWindow mask_target(const SequenceWindow& window) {
  if (!window.masked_indices.empty()) throw ContractError("window is already masked");
  if (window.target_index >= window.size()) throw ContractError("target index outside window");
  SequenceWindow out = window;
  out.masked_indices = {window.target_index};
  out.ids[window.target_index] = kMaskId;
  return out;
}

std::string dump_window(const SequenceWindow& window) {
  std::string out;
  for (std::size_t i = 0; i < window.ids.size(); ++i) {
    if (i > 0) out.push_back(' ');
    if (i == window.target_index) out += "| ";
    out += std::to_string(window.ids[i]);
  }
  return out;
}

}  // namespace webseq
