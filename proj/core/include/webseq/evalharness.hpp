// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "webseq/prediction.hpp"

namespace webseq {

/// One scored prediction: a distribution and the event that actually occurred.
using ScoredPair = std::pair<PredictionDistribution, EventId>;

/// Fraction of pairs whose true event ranks below `n`. Throws MetricError on
/// empty input or n == 0.
double top_n_accuracy(std::span<const ScoredPair> pairs, std::size_t n);

/// Same metric from precomputed ranks.
double top_n_accuracy_from_ranks(std::span<const std::size_t> ranks, std::size_t n);

struct FprPoint {
  std::size_t k = 0;
  double fpr = 0.0;

  friend bool operator==(const FprPoint&, const FprPoint&) = default;
};

/// FPR(K) = fraction of known-normal events with rank >= K (alarm raised).
std::vector<FprPoint> fpr_curve(std::span<const std::size_t> normal_ranks,
                                std::span<const std::size_t> thresholds);

struct RocPoint {
  double threshold = 0.0;  ///< flag when score >= threshold
  double fpr = 0.0;
  double tpr = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;  ///< descending threshold, from (0,0) to (1,1)
  double auc = 0.0;
};

/// Sweeps every distinct observed score as a threshold, anomalies being the
/// positive class. Tied scores move FPR and TPR together, so the trapezoidal
/// AUC equals the Mann-Whitney statistic with half credit for ties.
RocCurve roc(std::span<const double> normal_scores, std::span<const double> anomalous_scores);

/// Metrics for one model configuration.
struct EvaluationReport {
  std::string model;
  std::size_t window = 0;
  bool pretrained = false;
  std::string target_mode = "last";
  std::uint64_t seed = 0;
  std::size_t evaluated = 0;
  std::map<std::size_t, double> top_n_accuracy;
  std::vector<FprPoint> fpr;
  RocCurve roc;
  double mean_normal_score = 0.0;
  double mean_injected_score = 0.0;
  std::size_t injected = 0;
  std::string error;  ///< non-empty when the cell failed

  /// "<model>-w<window>-<pt|scratch>-<mode>-s<seed>".
  std::string fingerprint() const;
  bool ok() const noexcept { return error.empty(); }
};

/// Fixed-precision decimal used in every report file so reruns are byte-identical.
std::string format_fixed(double value, int digits = 6);

/// Per-cell summary: fingerprint, model, window, pretrain, target_mode, seed,
/// evaluated, top1/top10 (%), AUC, mean scores, error.
void write_cells_csv(std::ostream& out, const std::vector<EvaluationReport>& reports);

/// `model,top1_pct,top10_pct` using each model's best-Top-1 cell for the given target mode.
void write_model_table_csv(std::ostream& out, const std::vector<EvaluationReport>& reports,
                           const std::string& target_mode);

/// `k,fpr` rows.
void write_fpr_csv(std::ostream& out, const EvaluationReport& report);

/// `threshold,fpr,tpr` rows.
void write_roc_csv(std::ostream& out, const EvaluationReport& report);

}  // namespace webseq
