// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/char_markov.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "webseq/errors.hpp"
#include "webseq/rng.hpp"

namespace webseq {
namespace {

constexpr std::string_view kHeader = "webseq-charmarkov v1";
constexpr std::string_view kAlphanumeric = "abcdefghijklmnopqrstuvwxyz0123456789";

std::vector<std::size_t> padded_symbols(std::string_view element) {
  std::vector<std::size_t> symbols;
  symbols.reserve(element.size() + 3);
  symbols.push_back(CharMarkovModel::kBoundary);
  symbols.push_back(CharMarkovModel::kBoundary);
  for (char c : element) symbols.push_back(CharMarkovModel::symbol_of(c));
  symbols.push_back(CharMarkovModel::kBoundary);
  return symbols;
}

}  // namespace

class CharMarkovFitter {
 public:
  static void assign(CharMarkovModel& model, std::vector<double> log_probs) {
    model.log_probs_ = std::move(log_probs);
  }
};

CharMarkovModel::CharMarkovModel()
    : log_probs_(kAlphabet * kAlphabet * kAlphabet,
                 -std::log(static_cast<double>(kAlphabet))) {}

std::size_t CharMarkovModel::symbol_of(char c) noexcept {
  if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (c >= 'a' && c <= 'z') return static_cast<std::size_t>(c - 'a');
  return kOther;
}

char CharMarkovModel::symbol_char(std::size_t symbol) noexcept {
  if (symbol < 26) return static_cast<char>('a' + symbol);
  return symbol == kOther ? '#' : '^';
}

double CharMarkovModel::prob(char c1, char c2, char c3) const {
  return std::exp(log_prob(symbol_of(c1), symbol_of(c2), symbol_of(c3)));
}

double CharMarkovModel::score(std::string_view element) const {
  const auto s = padded_symbols(element);
  double total = 0.0;
  for (std::size_t i = 2; i < s.size(); ++i) total += log_prob(s[i - 2], s[i - 1], s[i]);
  return total / static_cast<double>(s.size() - 2);
}

void CharMarkovModel::set_threshold(double theta) {
  if (!std::isfinite(theta)) throw FitError("char-markov threshold must be finite");
  threshold_ = theta;
}

void CharMarkovModel::save(std::ostream& out) const {
  out << kHeader << '\n';
  out << "theta " << std::setprecision(17) << threshold_ << '\n';
  for (std::size_t a = 0; a < kAlphabet; ++a) {
    for (std::size_t b = 0; b < kAlphabet; ++b) {
      for (std::size_t c = 0; c < kAlphabet; ++c) {
        out << symbol_char(a) << symbol_char(b) << '\t' << symbol_char(c) << '\t'
            << std::setprecision(17) << log_prob(a, b, c) << '\n';
      }
    }
  }
}

CharMarkovModel CharMarkovModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw ParseError("not a webseq char-markov file");
  }
  CharMarkovModel model;
  if (!std::getline(in, line) || !line.starts_with("theta ")) {
    throw ParseError("char-markov file missing theta", 2);
  }
  model.set_threshold(std::stod(line.substr(6)));
  auto symbol_index = [](char c) -> std::size_t {
    if (c >= 'a' && c <= 'z') return static_cast<std::size_t>(c - 'a');
    if (c == '#') return kOther;
    if (c == '^') return kBoundary;
    return kAlphabet;
  };
  std::size_t seen = 0;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.size() < 6 || line[2] != '\t' || line[4] != '\t') {
      throw ParseError("malformed char-markov row", line_no);
    }
    const std::size_t a = symbol_index(line[0]);
    const std::size_t b = symbol_index(line[1]);
    const std::size_t c = symbol_index(line[3]);
    if (a >= kAlphabet || b >= kAlphabet || c >= kAlphabet) {
      throw ParseError("unknown symbol in char-markov row", line_no);
    }
    model.log_probs_[(a * kAlphabet + b) * kAlphabet + c] = std::stod(line.substr(5));
    ++seen;
  }
  if (seen != kAlphabet * kAlphabet * kAlphabet) {
    throw ParseError("char-markov table is incomplete");
  }
  return model;
}

CharMarkovModel fit_char_markov(const std::vector<std::string>& corpus,
                                const CharMarkovFitOptions& options) {
  if (corpus.empty()) throw FitError("char-markov corpus is empty");
  constexpr std::size_t A = CharMarkovModel::kAlphabet;
  std::vector<double> counts(A * A * A, 0.0);
  for (const auto& element : corpus) {
    const auto s = padded_symbols(element);
    for (std::size_t i = 2; i < s.size(); ++i) counts[(s[i - 2] * A + s[i - 1]) * A + s[i]] += 1.0;
  }
  std::vector<double> log_probs(A * A * A);
  for (std::size_t ctx = 0; ctx < A * A; ++ctx) {
    double total = static_cast<double>(A);
    for (std::size_t c = 0; c < A; ++c) total += counts[ctx * A + c];
    for (std::size_t c = 0; c < A; ++c) {
      log_probs[ctx * A + c] = std::log((counts[ctx * A + c] + 1.0) / total);
    }
  }
  CharMarkovModel model;
  CharMarkovFitter::assign(model, std::move(log_probs));

  if (options.threshold_override) {
    model.set_threshold(*options.threshold_override);
    return model;
  }

  const auto& good = options.good_sample.empty() ? corpus : options.good_sample;
  double good_min = std::numeric_limits<double>::infinity();
  for (const auto& w : good) {
    if (!w.empty()) good_min = std::min(good_min, model.score(w));
  }
  if (!std::isfinite(good_min)) throw FitError("char-markov good sample has no usable elements");

  Rng rng(options.seed);
  double random_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < options.random_sample_size; ++i) {
    const auto len = static_cast<std::size_t>(rng.between(
        static_cast<std::int64_t>(options.random_min_length),
        static_cast<std::int64_t>(options.random_max_length)));
    std::string s(len, 'a');
    for (char& c : s) c = kAlphanumeric[rng.below(kAlphanumeric.size())];
    random_max = std::max(random_max, model.score(s));
  }
  if (!std::isfinite(random_max)) random_max = good_min;
  model.set_threshold(0.5 * (good_min + random_max));
  return model;
}

bool is_random_element(const CharMarkovModel& model, std::string_view element) {
  if (element.size() < 3) return true;
  if (std::all_of(element.begin(), element.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return true;
  }
  return model.score(element) < model.threshold();
}

std::vector<std::string> bundled_words() {
  std::vector<std::string> words;
  std::istringstream in{std::string(bundled_word_list())};
  std::string w;
  while (std::getline(in, w)) {
    if (!w.empty()) words.push_back(w);
  }
  return words;
}

}  // namespace webseq
