// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "webseq/neural/model.hpp"
#include "webseq/sequencer.hpp"

namespace webseq::nn {

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  std::size_t checked = 0;
};

struct GradientCheckOptions {
  double step = 1e-4;
  /// Denominator floor: |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
  /// When set, dropout runs in training mode with a mask fixed by this seed.
  std::optional<std::uint64_t> dropout_seed;
};

/// Compares analytic gradients of the window loss with central finite
/// differences on every parameter. The window must be masked.
GradientCheckResult gradient_check(const SequenceModel& model, const SequenceWindow& window,
                                   const GradientCheckOptions& options = {});

}  // namespace webseq::nn
