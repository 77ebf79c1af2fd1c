// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "webseq/errors.hpp"
#include "webseq/ingest.hpp"
#include "webseq/rng.hpp"

namespace webseq {

/// A page visit: the document request followed by its assets and API calls.
/// Entries are request templates such as "GET /queue/item/{hex}?view={num}";
/// {hex} and {num} are filled with fresh random values when rendered.
struct PageTemplate {
  std::string name;
  std::vector<std::string> requests;
};

/// Whenever `trigger` is emitted at position i, `forced` is emitted at i + distance.
struct LongRangeRule {
  std::string trigger;
  std::string forced;
  std::size_t distance = 2;
};

struct SessionGrammar {
  std::string app = "workqueue";
  std::vector<PageTemplate> pages;
  std::vector<std::vector<double>> transitions;  ///< row-stochastic, pages x pages
  std::size_t start_page = 0;
  double noise_rate = 0.0;  ///< chance of a distractor before each page request
  std::vector<std::string> distractors;
  std::vector<LongRangeRule> long_range;
  std::size_t actors = 8;

  /// Throws ValidationError: empty pages, bad transition rows, distance < 2,
  /// forced tokens that are themselves triggers, noise without distractors.
  void validate() const;

  /// Every distinct request template the grammar can emit, sorted.
  std::vector<std::string> templates() const;
};

/// Desk-scale enterprise-like application with about a hundred distinct events.
SessionGrammar default_grammar();

/// Template stream of exactly `count` entries. `pages_out`, when given,
/// receives the sequence of visited page indices.
std::vector<std::string> generate_templates(const SessionGrammar& grammar, std::size_t count,
                                            Rng& rng, std::vector<std::size_t>* pages_out = nullptr);

/// Fills placeholders and splits the template into a request.
RawRequest render_request(std::string_view request_template, Timestamp timestamp,
                          const std::string& app, std::optional<std::string> actor, Rng& rng);

/// First synthetic day, a Monday.
inline constexpr std::chrono::sys_days kSynthEpoch =
    std::chrono::sys_days{std::chrono::year{2020} / 1 / 6};

struct InjectionLabel {
  std::size_t position = 0;
  std::string kind;  ///< "random", "scanner_burst" or "exploit_probe"

  friend bool operator==(const InjectionLabel&, const InjectionLabel&) = default;
};

template <typename T>
struct InjectionResult {
  std::vector<T> stream;
  std::vector<InjectionLabel> labels;  ///< ascending positions in `stream`
};

enum class AttackKind { kScannerBurst, kExploitProbe };

/// Throws ValidationError for anything but "scanner_burst" or "exploit_probe".
AttackKind parse_attack_kind(std::string_view name);
std::string_view attack_kind_name(AttackKind kind);

inline constexpr std::size_t kScannerBurstLength = 20;

/// Inserts max(1, ceil(rate * n)) events drawn uniformly from `pool` at uniform
/// positions. Removing the labelled positions restores the input.
template <typename T>
InjectionResult<T> inject_random(const std::vector<T>& stream, double rate, std::span<const T> pool,
                                 Rng& rng) {
  if (!(rate > 0.0 && rate < 1.0)) throw ValidationError("injection rate must lie in (0, 1)");
  if (pool.empty()) throw ValidationError("injection pool is empty");
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(rate * static_cast<double>(stream.size()) - 1e-9)));
  const std::size_t total = stream.size() + count;
  const std::vector<std::size_t> slots = rng.sample_without_replacement(total, count);
  InjectionResult<T> out;
  out.stream.reserve(total);
  std::size_t next_slot = 0;
  std::size_t source = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (next_slot < slots.size() && slots[next_slot] == i) {
      out.stream.push_back(pool[static_cast<std::size_t>(rng.below(pool.size()))]);
      out.labels.push_back({i, "random"});
      ++next_slot;
    } else {
      out.stream.push_back(stream[source++]);
    }
  }
  return out;
}

/// Attack-style injection. scanner_burst inserts kScannerBurstLength
/// consecutive never-seen events produced by `novel(k)`. exploit_probe inserts
/// `probes` known events from `pool`, each right after an event it never
/// follows anywhere in the input.
template <typename T>
InjectionResult<T> inject_attack(const std::vector<T>& stream, AttackKind kind,
                                 std::span<const T> pool,
                                 const std::function<T(std::size_t)>& novel, Rng& rng,
                                 std::size_t probes = 10) {
  if (stream.empty()) throw ValidationError("cannot inject into an empty stream");
  InjectionResult<T> out;
  if (kind == AttackKind::kScannerBurst) {
    const auto at = static_cast<std::size_t>(rng.below(stream.size() + 1));
    out.stream.assign(stream.begin(), stream.begin() + static_cast<std::ptrdiff_t>(at));
    for (std::size_t k = 0; k < kScannerBurstLength; ++k) {
      out.labels.push_back({out.stream.size(), "scanner_burst"});
      out.stream.push_back(novel(k));
    }
    out.stream.insert(out.stream.end(), stream.begin() + static_cast<std::ptrdiff_t>(at), stream.end());
    return out;
  }

  if (pool.empty()) throw ValidationError("exploit_probe needs a non-empty pool of known events");
  std::set<std::pair<T, T>> seen;
  for (std::size_t i = 1; i < stream.size(); ++i) seen.emplace(stream[i - 1], stream[i]);

  // Each probe goes after stream[at - 1]; pick distinct anchors, then a token
  // whose bigram with the anchor never occurs.
  const std::size_t anchors = std::min(probes, stream.size());
  const std::vector<std::size_t> picks = rng.sample_without_replacement(stream.size(), anchors);
  std::vector<std::pair<std::size_t, T>> inserts;
  for (std::size_t pick : picks) {
    const std::size_t at = pick + 1;
    const T& before = stream[pick];
    for (int attempt = 0; attempt < 256; ++attempt) {
      const T& candidate = pool[static_cast<std::size_t>(rng.below(pool.size()))];
      if (!seen.count({before, candidate})) {
        inserts.emplace_back(at, candidate);
        break;
      }
    }
  }
  std::size_t source = 0;
  for (const auto& [at, token] : inserts) {
    while (source < at) out.stream.push_back(stream[source++]);
    out.labels.push_back({out.stream.size(), "exploit_probe"});
    out.stream.push_back(token);
  }
  while (source < stream.size()) out.stream.push_back(stream[source++]);
  return out;
}

/// Removes labelled positions; inverse of the injections above.
template <typename T>
std::vector<T> strip_injections(const std::vector<T>& stream, const std::vector<InjectionLabel>& labels) {
  std::vector<T> out;
  out.reserve(stream.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (next < labels.size() && labels[next].position == i) {
      ++next;
      continue;
    }
    out.push_back(stream[i]);
  }
  return out;
}

/// Request templates a vulnerability scanner would probe; none occur in any grammar.
std::string scanner_template(std::size_t k);

struct SynthOptions {
  std::size_t days = 84;
  std::size_t events_per_day = 2000;
  std::uint64_t seed = 0;
  std::optional<std::string> inject;  ///< "random", "scanner_burst", "exploit_probe"
  double inject_rate = 0.01;
  std::size_t inject_from_day = 0;  ///< injections only touch days >= this one
};

struct SyntheticLog {
  std::vector<std::string> templates;
  std::vector<RawRequest> requests;
  std::vector<InjectionLabel> labels;
};

/// Deterministic given the options: `days * events_per_day` grammar requests
/// spread evenly over each day, optionally followed by injection.
SyntheticLog synthesize(const SessionGrammar& grammar, const SynthOptions& options);

/// `<index>\t<kind>` per label.
void write_labels(std::ostream& out, const std::vector<InjectionLabel>& labels);
std::vector<InjectionLabel> read_labels(std::istream& in);

}  // namespace webseq
