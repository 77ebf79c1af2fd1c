// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/baselines.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "webseq/errors.hpp"

namespace webseq {

TransitionTable::TransitionTable(std::size_t order, std::size_t vocab_size)
    : order_(order), vocab_size_(vocab_size), levels_(order) {
  if (order == 0) throw FitError("n-gram order must be at least 1");
}

const TransitionTable::Row* TransitionTable::find(const Context& context) const {
  if (context.size() >= order_) return nullptr;
  const auto& level = levels_[context.size()];
  const auto it = level.find(context);
  return it == level.end() ? nullptr : &it->second;
}

const std::map<Context, TransitionTable::Row>& TransitionTable::level(
    std::size_t context_length) const {
  return levels_.at(context_length);
}

void TransitionTable::increment(const Context& context, EventId next) {
  Row& row = levels_.at(context.size())[context];
  ++row.next[next];
  ++row.total;
  if (next >= vocab_size_) vocab_size_ = next + 1;
}

void TransitionTable::save(std::ostream& out) const {
  out << "# order=" << order_ << " vocab=" << vocab_size_ << '\n';
  for (const auto& level : levels_) {
    for (const auto& [context, row] : level) {
      std::string ctx;
      for (std::size_t i = 0; i < context.size(); ++i) {
        if (i > 0) ctx.push_back(',');
        ctx += std::to_string(context[i]);
      }
      for (const auto& [event, count] : row.next) {
        out << ctx << '\t' << event << '\t' << count << '\n';
      }
    }
  }
}

TransitionTable TransitionTable::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("# order=")) {
    throw ParseError("transition table missing header", 1);
  }
  std::size_t order = 0;
  std::size_t vocab = 0;
  if (std::sscanf(line.c_str(), "# order=%zu vocab=%zu", &order, &vocab) != 2 || order == 0) {
    throw ParseError("malformed transition table header", 1);
  }
  TransitionTable table(order, vocab);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError("malformed transition row", line_no);
    Context ctx;
    std::istringstream ids(line.substr(0, t1));
    std::string part;
    try {
      while (std::getline(ids, part, ',')) ctx.push_back(static_cast<EventId>(std::stoul(part)));
      const auto event = static_cast<EventId>(std::stoul(line.substr(t1 + 1, t2 - t1 - 1)));
      const auto count = std::stoull(line.substr(t2 + 1));
      if (ctx.size() >= order) throw ParseError("context longer than order-1", line_no);
      Row& row = table.levels_[ctx.size()][ctx];
      row.next[event] += count;
      row.total += count;
    } catch (const std::logic_error&) {
      throw ParseError("non-numeric transition field", line_no);
    }
  }
  return table;
}

namespace {

void count_stream(TransitionTable& table, std::span<const EventId> events) {
  const std::size_t order = table.order();
  for (std::size_t i = 0; i < events.size(); ++i) {
    // Every suffix context of length k < order that fits before position i.
    for (std::size_t k = 0; k < order && k <= i; ++k) {
      Context ctx(events.begin() + static_cast<std::ptrdiff_t>(i - k),
                  events.begin() + static_cast<std::ptrdiff_t>(i));
      table.increment(ctx, events[i]);
    }
  }
}

}  // namespace

TransitionTable fit_ngram(std::span<const EventId> events, std::size_t order,
                          std::size_t vocab_size) {
  if (order == 0) throw FitError("n-gram order must be at least 1");
  if (events.size() < order) {
    throw FitError("need at least " + std::to_string(order) + " events to fit an order-" +
                   std::to_string(order) + " model");
  }
  TransitionTable table(order, vocab_size);
  count_stream(table, events);
  return table;
}

TransitionTable fit_ngram(const std::vector<std::vector<EventId>>& streams, std::size_t order,
                          std::size_t vocab_size) {
  if (order == 0) throw FitError("n-gram order must be at least 1");
  TransitionTable table(order, vocab_size);
  bool any = false;
  for (const auto& s : streams) {
    if (s.size() >= order) any = true;
    count_stream(table, s);
  }
  if (!any) throw FitError("no stream is long enough for an order-" + std::to_string(order) + " model");
  return table;
}

PredictionDistribution predict(const TransitionTable& table, std::span<const EventId> context) {
  PredictionDistribution dist;
  dist.model_id = table.order() == 2 ? "markov" : std::to_string(table.order()) + "gram";
  dist.probs.assign(table.vocab_size(), 0.0);
  const std::size_t max_len = std::min(table.order() - 1, context.size());
  for (std::size_t len = max_len + 1; len-- > 0;) {
    const Context ctx(context.end() - static_cast<std::ptrdiff_t>(len), context.end());
    const auto* row = table.find(ctx);
    if (row == nullptr || row->total == 0) continue;
    const double total = static_cast<double>(row->total);
    for (const auto& [event, count] : row->next) {
      dist.probs[event] = static_cast<double>(count) / total;
    }
    return dist;
  }
  // An empty table has nothing to back off to; stay total with a uniform vector.
  if (!dist.probs.empty()) {
    std::fill(dist.probs.begin(), dist.probs.end(), 1.0 / static_cast<double>(dist.probs.size()));
  }
  return dist;
}

}  // namespace webseq
