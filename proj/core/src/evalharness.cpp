// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/evalharness.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "webseq/anomaly.hpp"
#include "webseq/errors.hpp"

namespace webseq {

double top_n_accuracy(std::span<const ScoredPair> pairs, std::size_t n) {
  std::vector<std::size_t> ranks;
  ranks.reserve(pairs.size());
  for (const auto& [dist, truth] : pairs) ranks.push_back(rank_of(dist, truth));
  return top_n_accuracy_from_ranks(ranks, n);
}

double top_n_accuracy_from_ranks(std::span<const std::size_t> ranks, std::size_t n) {
  if (ranks.empty()) throw MetricError("Top-N accuracy of zero predictions is undefined");
  if (n == 0) throw MetricError("Top-N cutoff must be at least 1");
  const auto hits = std::count_if(ranks.begin(), ranks.end(), [n](std::size_t r) { return r < n; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

std::vector<FprPoint> fpr_curve(std::span<const std::size_t> normal_ranks,
                                std::span<const std::size_t> thresholds) {
  if (normal_ranks.empty()) throw MetricError("FPR of zero normal events is undefined");
  std::vector<FprPoint> out;
  out.reserve(thresholds.size());
  for (std::size_t k : thresholds) {
    const auto alarms = std::count_if(normal_ranks.begin(), normal_ranks.end(),
                                      [k](std::size_t r) { return r >= k; });
    out.push_back({k, static_cast<double>(alarms) / static_cast<double>(normal_ranks.size())});
  }
  return out;
}

RocCurve roc(std::span<const double> normal_scores, std::span<const double> anomalous_scores) {
  if (normal_scores.empty() || anomalous_scores.empty()) {
    throw MetricError("ROC needs both normal and anomalous scores");
  }
  std::vector<std::pair<double, bool>> all;  // (score, is_anomalous)
  all.reserve(normal_scores.size() + anomalous_scores.size());
  for (double s : normal_scores) all.emplace_back(s, false);
  for (double s : anomalous_scores) all.emplace_back(s, true);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  const double neg = static_cast<double>(normal_scores.size());
  const double pos = static_cast<double>(anomalous_scores.size());
  RocCurve curve;
  double tp = 0.0;
  double fp = 0.0;
  curve.points.push_back({all.front().first + 1.0, 0.0, 0.0});
  std::size_t i = 0;
  while (i < all.size()) {
    const double threshold = all[i].first;
    while (i < all.size() && all[i].first == threshold) {
      (all[i].second ? tp : fp) += 1.0;
      ++i;
    }
    const RocPoint& prev = curve.points.back();
    const RocPoint next{threshold, fp / neg, tp / pos};
    curve.auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) * 0.5;
    curve.points.push_back(next);
  }
  return curve;
}

std::string EvaluationReport::fingerprint() const {
  return model + "-w" + std::to_string(window) + "-" + (pretrained ? "pt" : "scratch") + "-" +
         target_mode + "-s" + std::to_string(seed);
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

namespace {

double accuracy_or_zero(const EvaluationReport& r, std::size_t n) {
  const auto it = r.top_n_accuracy.find(n);
  return it == r.top_n_accuracy.end() ? 0.0 : it->second;
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c == '\n' ? ' ' : c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_cells_csv(std::ostream& out, const std::vector<EvaluationReport>& reports) {
  out << "fingerprint,model,window,pretrain,target_mode,seed,evaluated,top1_pct,top10_pct,auc,"
         "mean_normal_score,mean_injected_score,injected,error\n";
  for (const auto& r : reports) {
    out << r.fingerprint() << ',' << r.model << ',' << r.window << ',' << (r.pretrained ? 1 : 0)
        << ',' << r.target_mode << ',' << r.seed << ',' << r.evaluated << ','
        << format_fixed(100.0 * accuracy_or_zero(r, 1), 2) << ','
        << format_fixed(100.0 * accuracy_or_zero(r, 10), 2) << ',' << format_fixed(r.roc.auc) << ','
        << format_fixed(r.mean_normal_score) << ',' << format_fixed(r.mean_injected_score) << ','
        << r.injected << ',' << csv_escape(r.error) << '\n';
  }
}

void write_model_table_csv(std::ostream& out, const std::vector<EvaluationReport>& reports,
                           const std::string& target_mode) {
  out << "model,top1_pct,top10_pct\n";
  std::vector<std::string> order;
  std::map<std::string, const EvaluationReport*> best;
  for (const auto& r : reports) {
    if (!r.ok() || r.target_mode != target_mode) continue;
    auto [it, inserted] = best.emplace(r.model, &r);
    if (inserted) {
      order.push_back(r.model);
    } else if (accuracy_or_zero(r, 1) > accuracy_or_zero(*it->second, 1)) {
      it->second = &r;
    }
  }
  for (const auto& model : order) {
    const auto& r = *best.at(model);
    out << model << ',' << format_fixed(100.0 * accuracy_or_zero(r, 1), 2) << ','
        << format_fixed(100.0 * accuracy_or_zero(r, 10), 2) << '\n';
  }
}

void write_fpr_csv(std::ostream& out, const EvaluationReport& report) {
  out << "k,fpr\n";
  for (const auto& p : report.fpr) out << p.k << ',' << format_fixed(p.fpr) << '\n';
}

void write_roc_csv(std::ostream& out, const EvaluationReport& report) {
  out << "threshold,fpr,tpr\n";
  for (const auto& p : report.roc.points) {
    out << format_fixed(p.threshold) << ',' << format_fixed(p.fpr) << ',' << format_fixed(p.tpr)
        << '\n';
  }
}

}  // namespace webseq
