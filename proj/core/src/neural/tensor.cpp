// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/neural/tensor.hpp"

namespace webseq::nn {

std::size_t TensorSet::add(std::string name, Eigen::Index rows, Eigen::Index cols, bool decay) {
  names_.push_back(std::move(name));
  values_.push_back(Matrix::Zero(rows, cols));
  decay_.push_back(decay);
  return values_.size() - 1;
}

std::size_t TensorSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return names_.size();
}

TensorSet TensorSet::zeros_like() const {
  TensorSet out = *this;
  out.set_zero();
  return out;
}

void TensorSet::set_zero() {
  for (auto& m : values_) m.setZero();
}

std::size_t TensorSet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& m : values_) n += static_cast<std::size_t>(m.size());
  return n;
}

void TensorSet::round_to_float() {
  for (auto& m : values_) {
    m = m.unaryExpr([](double v) { return static_cast<double>(static_cast<float>(v)); });
  }
}

bool TensorSet::same_layout(const TensorSet& other) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (names_[i] != other.names_[i] || values_[i].rows() != other.values_[i].rows() ||
        values_[i].cols() != other.values_[i].cols()) {
      return false;
    }
  }
  return true;
}

}  // namespace webseq::nn
