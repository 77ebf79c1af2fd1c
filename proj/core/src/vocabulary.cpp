// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/vocabulary.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "webseq/errors.hpp"
#include "webseq/hash.hpp"

namespace webseq {

EventVocabulary::EventVocabulary() {
  add(std::string(kPadToken), 0);
  add(std::string(kMaskToken), 0);
  add(std::string(kRareToken), 0);
}

void EventVocabulary::add(std::string token, std::uint64_t count) {
  index_.emplace(token, static_cast<EventId>(tokens_.size()));
  tokens_.push_back(std::move(token));
  counts_.push_back(count);
}

EventId EventVocabulary::encode(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? kRareId : it->second;
}

const std::string& EventVocabulary::decode(EventId id) const {
  if (id >= tokens_.size()) {
    throw ContractError("event id " + std::to_string(id) + " outside vocabulary of size " +
                        std::to_string(tokens_.size()));
  }
  return tokens_[id];
}

bool EventVocabulary::contains(std::string_view token) const {
  return index_.contains(std::string(token));
}

std::uint64_t EventVocabulary::train_count(EventId id) const {
  return id < counts_.size() ? counts_[id] : 0;
}

std::vector<EventId> EventVocabulary::normal_ids() const {
  std::vector<EventId> ids;
  for (EventId id = kFirstNormalId; id < tokens_.size(); ++id) ids.push_back(id);
  return ids;
}

void EventVocabulary::save(std::ostream& out) const {
  for (std::size_t id = 0; id < tokens_.size(); ++id) {
    out << id << '\t' << tokens_[id] << '\t' << counts_[id] << '\n';
  }
}

std::string EventVocabulary::serialize() const {
  std::ostringstream out;
  save(out);
  return out.str();
}

EventVocabulary EventVocabulary::load(std::istream& in, std::size_t rare_threshold) {
  EventVocabulary vocab;
  vocab.tokens_.clear();
  vocab.counts_.clear();
  vocab.index_.clear();
  vocab.rare_threshold_ = rare_threshold;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t1 = line.find('\t');
    const auto t2 = line.rfind('\t');
    if (t1 == std::string::npos || t2 == t1) throw ParseError("malformed vocabulary row", line_no);
    const std::string id_text = line.substr(0, t1);
    std::string token = line.substr(t1 + 1, t2 - t1 - 1);
    std::uint64_t count = 0;
    try {
      if (std::stoull(id_text) != vocab.tokens_.size()) {
        throw ParseError("vocabulary ids must be dense and ascending", line_no);
      }
      count = std::stoull(line.substr(t2 + 1));
    } catch (const std::logic_error&) {
      throw ParseError("non-numeric vocabulary field", line_no);
    }
    vocab.add(std::move(token), count);
  }
  if (vocab.size() < kFirstNormalId || vocab.tokens_[kPadId] != kPadToken ||
      vocab.tokens_[kMaskId] != kMaskToken || vocab.tokens_[kRareId] != kRareToken) {
    throw ParseError("vocabulary must start with PAD, MASK, RARE");
  }
  return vocab;
}

std::uint64_t EventVocabulary::fingerprint() const { return fnv1a64(serialize()); }

EventVocabulary build_vocabulary(const std::vector<Event>& train_events,
                                 std::size_t rare_threshold) {
  if (train_events.empty()) throw FitError("cannot build a vocabulary from zero events");
  if (rare_threshold == 0) throw FitError("rare threshold must be positive");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& e : train_events) {
    if (e.kind == EventKind::kNormal) ++counts[e.token];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  std::uint64_t folded = 0;
  for (auto& [token, count] : counts) {
    if (count >= rare_threshold) {
      kept.emplace_back(token, count);
    } else {
      folded += count;
    }
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  EventVocabulary vocab;
  vocab.rare_threshold_ = rare_threshold;
  vocab.counts_[kRareId] = folded;
  for (auto& [token, count] : kept) vocab.add(std::move(token), count);
  return vocab;
}

}  // namespace webseq
