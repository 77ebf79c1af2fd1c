// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace webseq {

/// Character trigram model ("two-character" Markov chain) used to decide
/// whether a path element looks machine-generated.
///
/// Characters are lowercased; anything outside a-z collapses to one OTHER
/// symbol, and a BOUNDARY symbol pads both ends. Transition probabilities use
/// add-one smoothing, so every context row is a proper distribution.
class CharMarkovModel {
 public:
  static constexpr std::size_t kAlphabet = 28;  // a-z, OTHER, BOUNDARY
  static constexpr std::size_t kOther = 26;
  static constexpr std::size_t kBoundary = 27;

  CharMarkovModel();

  static std::size_t symbol_of(char c) noexcept;
  static char symbol_char(std::size_t symbol) noexcept;

  double log_prob(std::size_t c1, std::size_t c2, std::size_t c3) const {
    return log_probs_[(c1 * kAlphabet + c2) * kAlphabet + c3];
  }
  double prob(char c1, char c2, char c3) const;

  /// Mean per-transition log-probability of `element` padded as "^^element^".
  double score(std::string_view element) const;

  double threshold() const noexcept { return threshold_; }
  void set_threshold(double theta);

  void save(std::ostream& out) const;
  static CharMarkovModel load(std::istream& in);

  friend bool operator==(const CharMarkovModel&, const CharMarkovModel&) = default;

 private:
  friend class CharMarkovFitter;
  std::vector<double> log_probs_;
  double threshold_ = 0.0;
};

struct CharMarkovFitOptions {
  /// Sample whose minimum score anchors the "good" side of the threshold. When
  /// empty, the training corpus itself is used.
  std::vector<std::string> good_sample;
  std::size_t random_sample_size = 1000;
  std::size_t random_min_length = 8;
  std::size_t random_max_length = 12;
  std::uint64_t seed = 0x5eed;
  std::optional<double> threshold_override;
};

/// Fits transition counts on `corpus` and calibrates the threshold as the
/// midpoint between the lowest good-sample score and the highest score of a
/// generated uniform-random alphanumeric sample. Throws FitError on an empty corpus.
CharMarkovModel fit_char_markov(const std::vector<std::string>& corpus,
                                const CharMarkovFitOptions& options = {});

/// True when the element is machine-generated: shorter than three characters,
/// all digits, or scoring below the model threshold.
bool is_random_element(const CharMarkovModel& model, std::string_view element);

/// The dictionary compiled into the library (one lowercase word per line).
std::string_view bundled_word_list();

/// bundled_word_list() split into words.
std::vector<std::string> bundled_words();

}  // namespace webseq
