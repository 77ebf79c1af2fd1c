// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "webseq/anomaly.hpp"
#include "webseq/baselines.hpp"
#include "webseq/char_markov.hpp"
#include "webseq/config.hpp"
#include "webseq/evalharness.hpp"
#include "webseq/ingest.hpp"
#include "webseq/neural/checkpoint.hpp"
#include "webseq/neural/model.hpp"
#include "webseq/vocabulary.hpp"

namespace webseq {

/// Encoded events of one group (application or actor), in time order.
struct EventStream {
  std::string group;
  std::vector<EventId> ids;
  std::vector<Timestamp> timestamps;
  std::vector<std::string> tokens;  ///< canonical event before vocabulary lookup
  std::vector<std::size_t> sources;  ///< index into the encoded request list; not persisted

  std::size_t size() const noexcept { return ids.size(); }
};

/// Per-application row of the extraction summary.
struct ExtractSummaryRow {
  std::string application;
  std::size_t train_events = 0;
  std::size_t valid_events = 0;
  std::size_t test_events = 0;
  std::size_t unique_events = 0;  ///< distinct training events that survive the rare fold
};

struct ExtractSummary {
  std::size_t requests = 0;
  std::size_t filtered_out = 0;
  std::size_t excluded = 0;       ///< requests on days outside every split
  std::size_t random_elements = 0;  ///< path elements replaced by RANDOM
  std::size_t vocab_size = 0;
  std::vector<ExtractSummaryRow> rows;
};

void print_summary(std::ostream& out, const ExtractSummary& summary);

struct ExtractedDataset {
  CharMarkovModel char_model;
  EventVocabulary vocab;
  std::vector<EventStream> train;
  std::vector<EventStream> valid;
  std::vector<EventStream> test;
  ExtractSummary summary;
};

/// Filter, split by day, fit the gibberish detector and the vocabulary on the
/// training split, then canonicalize and encode every split.
ExtractedDataset extract_dataset(const std::vector<RawRequest>& requests, const RunConfig& config);

/// Canonicalizes and encodes requests, grouped and sorted by time (stable).
std::vector<EventStream> encode_streams(const std::vector<RawRequest>& requests,
                                        const CharMarkovModel& char_model,
                                        const EventVocabulary& vocab, GroupBy group_by);

/// Writes vocab.tsv, charmodel.txt, events_{train,valid,test}.tsv and summary.tsv.
void save_dataset(const std::filesystem::path& dir, const ExtractedDataset& dataset);
ExtractedDataset load_dataset(const std::filesystem::path& dir, std::size_t rare_threshold);

/// Writes through a temporary file and renames, so readers never see partial output.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Anything that maps a target-masked window to a distribution over events.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual std::string name() const = 0;
  virtual std::size_t vocab_size() const = 0;
  virtual PredictionDistribution predict(const SequenceWindow& window) const = 0;
};

/// Markov / n-gram baseline; conditions on the events left of the target only.
class NgramForecaster final : public Forecaster {
 public:
  explicit NgramForecaster(TransitionTable table) : table_(std::move(table)) {}
  std::string name() const override { return table_.order() == 2 ? "markov" : "ngram"; }
  std::size_t vocab_size() const override { return table_.vocab_size(); }
  PredictionDistribution predict(const SequenceWindow& window) const override;
  const TransitionTable& table() const { return table_; }

 private:
  TransitionTable table_;
};

class NeuralForecaster final : public Forecaster {
 public:
  explicit NeuralForecaster(std::unique_ptr<nn::SequenceModel> model) : model_(std::move(model)) {}
  std::string name() const override { return std::string(nn::model_kind_name(model_->kind())); }
  std::size_t vocab_size() const override { return model_->config().vocab_size; }
  PredictionDistribution predict(const SequenceWindow& window) const override;
  const nn::SequenceModel& model() const { return *model_; }

 private:
  std::unique_ptr<nn::SequenceModel> model_;
};

/// One configuration of the ablation study.
struct CellSpec {
  std::string model;  ///< markov, ngram, bilstm, lstm_attn, self_attn
  std::size_t window = 16;
  bool pretrain = true;
  TargetMode target_mode = TargetMode::kLast;

  bool neural() const { return model != "markov" && model != "ngram"; }
  /// Same string as EvaluationReport::fingerprint() for this cell.
  std::string fingerprint(std::uint64_t seed) const;
};

struct LossRecord {
  std::string stage;  ///< "pretrain" or "finetune"
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double valid_loss = 0.0;  ///< NaN without validation data
};

struct TrainedCell {
  std::unique_ptr<Forecaster> forecaster;
  nn::Checkpoint checkpoint;
  std::vector<LossRecord> losses;
};

using LossCallback = std::function<void(const LossRecord&)>;

/// Trains one cell on the training split (validation split for early stopping).
/// A from-scratch neural cell trains for pretrain_epochs + epochs at the
/// fine-tuning rate, matching the total budget of its pretrained counterpart.
TrainedCell train_cell(const ExtractedDataset& dataset, const RunConfig& config, const CellSpec& cell,
                       const LossCallback& on_epoch = {});

std::unique_ptr<Forecaster> load_forecaster(const nn::Checkpoint& checkpoint,
                                            std::optional<std::uint64_t> expected_vocab = {});

/// losses.csv: stage,epoch,train_loss,valid_loss.
std::string format_losses(const std::vector<LossRecord>& losses);

struct ScoredEvent {
  std::size_t stream = 0;
  std::size_t position = 0;
  AnomalyVerdict verdict;
};

/// Scores every event that has a full window around it (the first
/// target_index events of a stream, and in centered mode the last
/// w - 1 - target_index, have none).
std::vector<ScoredEvent> score_streams(const Forecaster& forecaster, const std::vector<EventStream>& streams,
                                       std::size_t window, TargetMode mode, std::size_t k,
                                       std::size_t stride = 1);

/// Top-N, FPR and, when injection is enabled, score separation and ROC on the test split.
EvaluationReport evaluate_cell(const Forecaster& forecaster, const ExtractedDataset& dataset,
                               const RunConfig& config, const CellSpec& cell);

/// The cells `config.evaluate` asks for: for each target mode, one cell per
/// baseline (at the smallest window), and model x window x pretraining for
/// the neural models.
std::vector<CellSpec> ablation_cells(const RunConfig& config);

using CellCallback = std::function<void(const CellSpec&, const EvaluationReport&)>;

/// Trains and evaluates every cell. A failing cell is recorded in its report
/// and the matrix continues. Checkpoints go to `models_dir` when given.
std::vector<EvaluationReport> ablation_matrix(const ExtractedDataset& dataset, const RunConfig& config,
                                              const std::optional<std::filesystem::path>& models_dir = {},
                                              const CellCallback& on_cell = {});

/// cells.csv, model_comparison_<mode>.csv, window_ablation.csv,
/// centered_comparison.csv and per-cell fpr_/roc_ curves.
void write_reports(const std::filesystem::path& dir, const std::vector<EvaluationReport>& reports);

/// Human-readable descriptions of every threshold a report violates.
std::vector<std::string> acceptance_violations(const std::vector<EvaluationReport>& reports,
                                               const AcceptanceThresholds& thresholds);

}  // namespace webseq
