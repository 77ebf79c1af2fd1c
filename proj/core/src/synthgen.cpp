// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/synthgen.hpp"

#include <array>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

namespace webseq {

namespace {

constexpr std::array<std::string_view, 20> kScannerTemplates = {
    "GET /wp-login.php",
    "GET /.env",
    "GET /phpmyadmin/index.php",
    "GET /cgi-bin/test.cgi",
    "GET /admin/config.bak",
    "GET /.git/config",
    "GET /server-status",
    "GET /actuator/health",
    "GET /vendor/phpunit/eval-stdin.php",
    "POST /xmlrpc.php",
    "GET /etc/passwd?file={num}",
    "GET /shell.aspx",
    "GET /console/login",
    "GET /solr/admin/cores",
    "GET /jmx-console/",
    "GET /manager/html",
    "GET /owa/auth/logon.aspx",
    "GET /boaform/admin/formLogin",
    "GET /HNAP1/",
    "GET /.DS_Store",
};

std::string replace_all(std::string text, std::string_view needle,
                        const std::function<std::string()>& make) {
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    const std::string value = make();
    text.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return text;
}

}  // namespace

void SessionGrammar::validate() const {
  if (pages.empty()) throw ValidationError("grammar has no pages");
  for (const auto& page : pages) {
    if (page.requests.empty()) throw ValidationError("page \"" + page.name + "\" has no requests");
  }
  if (transitions.size() != pages.size()) {
    throw ValidationError("transition matrix needs one row per page");
  }
  for (std::size_t p = 0; p < transitions.size(); ++p) {
    const auto& row = transitions[p];
    if (row.size() != pages.size()) throw ValidationError("transition row has the wrong width");
    double sum = 0.0;
    for (double w : row) {
      if (!(w >= 0.0)) throw ValidationError("transition probabilities must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ValidationError("transitions out of page \"" + pages[p].name + "\" sum to " +
                            std::to_string(sum));
    }
  }
  if (start_page >= pages.size()) throw ValidationError("start page out of range");
  if (!(noise_rate >= 0.0 && noise_rate < 1.0)) throw ValidationError("noise rate must lie in [0, 1)");
  if (noise_rate > 0.0 && distractors.empty()) {
    throw ValidationError("noise rate is positive but there are no distractors");
  }
  std::set<std::string> triggers;
  for (const auto& rule : long_range) {
    if (rule.distance < 2) throw ValidationError("long-range distance must be at least 2");
    if (!triggers.insert(rule.trigger).second) {
      throw ValidationError("trigger \"" + rule.trigger + "\" has more than one rule");
    }
  }
  for (const auto& rule : long_range) {
    if (triggers.count(rule.forced)) {
      throw ValidationError("forced request \"" + rule.forced + "\" is itself a trigger");
    }
  }
  if (actors == 0) throw ValidationError("grammar needs at least one actor");
}

std::vector<std::string> SessionGrammar::templates() const {
  std::set<std::string> all;
  for (const auto& page : pages) all.insert(page.requests.begin(), page.requests.end());
  all.insert(distractors.begin(), distractors.end());
  for (const auto& rule : long_range) all.insert(rule.forced);
  return {all.begin(), all.end()};
}

SessionGrammar default_grammar() {
  static const std::array<std::string, 14> kPages = {
      "login",  "dashboard", "queue",   "ticket", "search", "reports", "settings",
      "profile", "calendar", "inbox",  "projects", "admin", "help",    "billing"};
  SessionGrammar g;
  g.app = "workqueue";
  g.noise_rate = 0.05;
  g.distractors = {"GET /api/notifications/count", "GET /api/heartbeat",
                   "POST /api/telemetry/events",   "GET /api/chat/unread",
                   "GET /api/presence/status",     "GET /static/fonts/icons.woff",
                   "GET /api/feature/flags",       "POST /api/metrics/client"};
  for (const auto& name : kPages) {
    PageTemplate page;
    page.name = name;
    page.requests = {"GET /workqueue/" + name + "?view={num}",
                     "GET /static/common/vendor.js",
                     "GET /static/common/theme.css",
                     "GET /static/" + name + "/app.js",
                     "GET /static/" + name + "/style.css",
                     "GET /static/" + name + "/icons.svg",
                     "GET /api/" + name + "/summary?since={num}"};
    g.pages.push_back(std::move(page));
  }
  auto& pages = g.pages;
  pages[0].requests.push_back("POST /workqueue/login/submit");
  pages[1].requests.push_back("GET /api/session/refresh");
  pages[2].requests.push_back("GET /api/queue/items?page={num}&size={num}");
  pages[3].requests.push_back("GET /api/ticket/{hex}/details");
  pages[3].requests.push_back("POST /api/ticket/{hex}/comment");
  pages[4].requests.push_back("GET /api/search/results?q={num}&page={num}");
  pages[8].requests.push_back("GET /static/fonts/roboto.woff");
  pages[13].requests.push_back("GET /api/billing/invoice/{num}");

  const std::size_t n = pages.size();
  g.transitions.assign(n, std::vector<double>(n, 0.0));
  g.transitions[0][1] = 1.0;
  for (std::size_t p = 1; p < n; ++p) {
    // Successors skip the login page so sessions stay signed in.
    auto wrap = [n](std::size_t q) { return 1 + (q - 1) % (n - 1); };
    g.transitions[p][wrap(p + 1)] += 0.6;
    g.transitions[p][wrap(p + 3)] += 0.3;
    g.transitions[p][p == 6 ? 0 : wrap(p + 7)] += 0.1;
  }
  g.long_range = {{"POST /workqueue/login/submit", "GET /api/profile/preferences", 12},
                  {"POST /api/ticket/{hex}/comment", "GET /api/audit/confirm?ref={num}", 6}};
  return g;
}

std::vector<std::string> generate_templates(const SessionGrammar& grammar, std::size_t count, Rng& rng,
                                            std::vector<std::size_t>* pages_out) {
  grammar.validate();
  std::map<std::string, const LongRangeRule*> rules;
  for (const auto& rule : grammar.long_range) rules[rule.trigger] = &rule;

  std::vector<std::string> out;
  out.reserve(count);
  std::vector<const std::string*> scheduled(count, nullptr);
  std::size_t page = grammar.start_page;
  std::size_t entry = 0;
  if (pages_out) pages_out->push_back(page);

  auto next_grammar_request = [&]() -> const std::string& {
    if (entry == grammar.pages[page].requests.size()) {
      page = rng.categorical(grammar.transitions[page]);
      entry = 0;
      if (pages_out) pages_out->push_back(page);
    }
    if (grammar.noise_rate > 0.0 && rng.bernoulli(grammar.noise_rate)) {
      return grammar.distractors[static_cast<std::size_t>(rng.below(grammar.distractors.size()))];
    }
    return grammar.pages[page].requests[entry++];
  };

  std::size_t suppressed_in_a_row = 0;
  while (out.size() < count) {
    const std::size_t i = out.size();
    if (scheduled[i]) {
      out.push_back(*scheduled[i]);
      continue;
    }
    const std::string& request = next_grammar_request();
    if (const auto it = rules.find(request); it != rules.end()) {
      const std::size_t slot = i + it->second->distance;
      if (slot >= count || scheduled[slot]) {
        if (++suppressed_in_a_row > 100000) {
          throw ValidationError("grammar cannot make progress: every request is a suppressed trigger");
        }
        continue;
      }
      scheduled[slot] = &it->second->forced;
    }
    suppressed_in_a_row = 0;
    out.push_back(request);
  }
  return out;
}

RawRequest render_request(std::string_view request_template, Timestamp timestamp,
                          const std::string& app, std::optional<std::string> actor, Rng& rng) {
  const auto space = request_template.find(' ');
  if (space == std::string_view::npos) {
    throw ValidationError("request template \"" + std::string(request_template) +
                          "\" lacks a method");
  }
  std::string uri(request_template.substr(space + 1));
  uri = replace_all(std::move(uri), "{hex}", [&rng] {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s(16, '0');
    for (char& c : s) c = kHex[rng.below(16)];
    return s;
  });
  uri = replace_all(std::move(uri), "{num}", [&rng] { return std::to_string(rng.between(1, 99999)); });

  RawRequest r;
  r.timestamp = timestamp;
  r.method = std::string(request_template.substr(0, space));
  auto [path, query] = split_uri(uri);
  r.path = std::move(path);
  r.query = std::move(query);
  r.query_param_count = count_query_params(r.query);
  r.app_id = app;
  r.actor_id = std::move(actor);
  return r;
}

AttackKind parse_attack_kind(std::string_view name) {
  if (name == "scanner_burst") return AttackKind::kScannerBurst;
  if (name == "exploit_probe") return AttackKind::kExploitProbe;
  throw ValidationError("unknown attack kind \"" + std::string(name) +
                        "\" (expected scanner_burst or exploit_probe)");
}

std::string_view attack_kind_name(AttackKind kind) {
  return kind == AttackKind::kScannerBurst ? "scanner_burst" : "exploit_probe";
}

std::string scanner_template(std::size_t k) {
  return std::string(kScannerTemplates[k % kScannerTemplates.size()]);
}

SyntheticLog synthesize(const SessionGrammar& grammar, const SynthOptions& options) {
  if (options.days == 0 || options.events_per_day == 0) {
    throw ValidationError("synthesis needs at least one day and one event per day");
  }
  const std::size_t total = options.days * options.events_per_day;
  Rng gen_rng(Rng::derive(options.seed, 1));
  Rng render_rng(Rng::derive(options.seed, 2));
  Rng inject_rng(Rng::derive(options.seed, 3));

  SyntheticLog log;
  std::vector<std::string> clean = generate_templates(grammar, total, gen_rng);
  std::vector<Timestamp> times(total);
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t day = i / options.events_per_day;
    const std::size_t slot = i % options.events_per_day;
    const auto offset_ms = static_cast<std::int64_t>(slot) * 86'400'000 /
                           static_cast<std::int64_t>(options.events_per_day);
    times[i] = Timestamp{kSynthEpoch} + std::chrono::days(day) + std::chrono::milliseconds(offset_ms);
  }

  std::vector<bool> injected(total, false);
  if (options.inject) {
    const std::size_t from = std::min(total, options.inject_from_day * options.events_per_day);
    const std::vector<std::string> tail(clean.begin() + static_cast<std::ptrdiff_t>(from), clean.end());
    if (tail.empty()) throw ValidationError("no events left to inject into");
    const std::vector<std::string> pool = grammar.templates();
    InjectionResult<std::string> result;
    if (*options.inject == "random") {
      result = inject_random<std::string>(tail, options.inject_rate, pool, inject_rng);
    } else {
      const AttackKind kind = parse_attack_kind(*options.inject);
      const std::size_t probes = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(options.inject_rate * static_cast<double>(tail.size()))));
      result = inject_attack<std::string>(tail, kind, pool, scanner_template, inject_rng, probes);
    }
    clean.resize(from);
    clean.insert(clean.end(), result.stream.begin(), result.stream.end());
    // Injected requests borrow the timestamp of the request they follow, or of
    // the next one at the start of the injected range, so they stay on its days.
    std::vector<Timestamp> merged(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(from));
    std::size_t next_label = 0;
    std::size_t source = from;
    injected.assign(clean.size(), false);
    for (std::size_t j = 0; j < result.stream.size(); ++j) {
      const std::size_t position = from + j;
      if (next_label < result.labels.size() && result.labels[next_label].position == j) {
        merged.push_back(merged.size() == from ? times[source] : merged.back());
        injected[position] = true;
        log.labels.push_back({position, result.labels[next_label].kind});
        ++next_label;
      } else {
        merged.push_back(times[source++]);
      }
    }
    times = std::move(merged);
  }

  log.requests.reserve(clean.size());
  constexpr std::size_t kSessionLength = 40;
  std::string actor;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (i % kSessionLength == 0) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "u%02u",
                    static_cast<unsigned>(render_rng.below(grammar.actors)));
      actor = buf;
    }
    log.requests.push_back(render_request(clean[i], times[i], grammar.app, actor, render_rng));
  }
  log.templates = std::move(clean);
  return log;
}

void write_labels(std::ostream& out, const std::vector<InjectionLabel>& labels) {
  for (const auto& label : labels) out << label.position << '\t' << label.kind << '\n';
}

std::vector<InjectionLabel> read_labels(std::istream& in) {
  std::vector<InjectionLabel> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("label line lacks a tab", line_no);
    InjectionLabel label;
    try {
      label.position = std::stoull(line.substr(0, tab));
    } catch (const std::exception&) {
      throw ParseError("label index is not a number", line_no);
    }
    label.kind = line.substr(tab + 1);
    labels.push_back(std::move(label));
  }
  return labels;
}

}  // namespace webseq
