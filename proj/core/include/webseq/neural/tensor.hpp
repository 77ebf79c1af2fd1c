// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace webseq::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

/// Named, ordered collection of parameter tensors.
///
/// Models keep their weights in one TensorSet and address them by slot index,
/// so gradients, optimizer moments and checkpoints all share the same layout.
class TensorSet {
 public:
  std::size_t add(std::string name, Eigen::Index rows, Eigen::Index cols, bool decay);

  std::size_t size() const noexcept { return values_.size(); }
  Matrix& operator[](std::size_t slot) { return values_[slot]; }
  const Matrix& operator[](std::size_t slot) const { return values_[slot]; }
  const std::string& name(std::size_t slot) const { return names_[slot]; }
  bool decays(std::size_t slot) const { return decay_[slot]; }

  /// Slot of a named tensor, or size() when absent.
  std::size_t find(std::string_view name) const;

  /// Same names and shapes, all zeros.
  TensorSet zeros_like() const;
  void set_zero();

  /// Total scalar count.
  std::size_t parameter_count() const;

  /// Rounds every entry to the nearest float32 so that weights written to a
  /// 32-bit checkpoint reload bit-identically.
  void round_to_float();

  /// True when names and shapes match.
  bool same_layout(const TensorSet& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> values_;
  std::vector<bool> decay_;
};

}  // namespace webseq::nn
