// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/neural/gradient_check.hpp"

#include <algorithm>
#include <cmath>

#include "webseq/errors.hpp"

namespace webseq::nn {

GradientCheckResult gradient_check(const SequenceModel& model, const SequenceWindow& window,
                                   const GradientCheckOptions& options) {
  if (window.masked_indices.empty()) throw ContractError("gradient check needs a masked window");
  std::vector<EventId> targets;
  for (std::size_t i : window.masked_indices) targets.push_back(window.original_ids[i]);

  auto probe = model.clone();
  auto evaluate = [&](TensorSet* grads) {
    if (options.dropout_seed) {
      Rng rng(*options.dropout_seed);
      return probe->loss(window.ids, window.masked_indices, targets, &rng, grads, 1.0);
    }
    return probe->loss(window.ids, window.masked_indices, targets, nullptr, grads, 1.0);
  };

  TensorSet analytic = probe->parameters().zeros_like();
  evaluate(&analytic);

  GradientCheckResult result;
  TensorSet& params = probe->parameters();
  for (std::size_t s = 0; s < params.size(); ++s) {
    Matrix& p = params[s];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double saved = p.data()[i];
      p.data()[i] = saved + options.step;
      const double up = evaluate(nullptr);
      p.data()[i] = saved - options.step;
      const double down = evaluate(nullptr);
      p.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[s].data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_tensor = params.name(s);
      }
      ++result.checked;
    }
  }
  return result;
}

}  // namespace webseq::nn
