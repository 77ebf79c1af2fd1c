// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "webseq/errors.hpp"
#include "webseq/extractor.hpp"
#include "webseq/neural/trainer.hpp"
#include "webseq/synthgen.hpp"

namespace webseq {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSplitNames[] = {"train", "valid", "test"};

std::string group_key(const RawRequest& r, GroupBy group_by) {
  if (group_by == GroupBy::kApp) return r.app_id;
  return r.actor_id.value_or("-");
}

std::string sanitize(std::string text) {
  for (char& c : text) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

std::string events_tsv(const std::vector<EventStream>& streams) {
  std::string out;
  for (const auto& s : streams) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out += s.group;
      out += '\t';
      out += format_rfc3339(s.timestamps[i]);
      out += '\t';
      out += std::to_string(s.ids[i]);
      out += '\t';
      out += s.tokens[i];
      out += '\n';
    }
  }
  return out;
}

std::vector<EventStream> parse_events_tsv(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<EventStream> streams;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) throw ParseError(path.string() + ": expected 4 tab-separated fields", line_no);
    const auto ts = parse_rfc3339(fields[1]);
    if (!ts) throw ParseError(path.string() + ": bad timestamp", line_no);
    if (streams.empty() || streams.back().group != fields[0]) streams.push_back({fields[0], {}, {}, {}, {}});
    auto& s = streams.back();
    s.timestamps.push_back(*ts);
    try {
      s.ids.push_back(static_cast<EventId>(std::stoul(fields[2])));
    } catch (const std::exception&) {
      throw ParseError(path.string() + ": bad event id", line_no);
    }
    s.tokens.push_back(fields[3]);
  }
  return streams;
}

std::vector<SequenceWindow> collect_windows(const std::vector<EventStream>& streams,
                                            const WindowConfig& wc) {
  std::vector<SequenceWindow> out;
  for (const auto& s : streams) {
    auto built = make_windows(s.ids, wc);
    for (auto& w : built.windows) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

void print_summary(std::ostream& out, const ExtractSummary& s) {
  out << std::left << std::setw(20) << "application" << std::right << std::setw(14) << "train_events"
      << std::setw(14) << "valid_events" << std::setw(14) << "test_events" << std::setw(15)
      << "unique_events" << '\n';
  for (const auto& row : s.rows) {
    out << std::left << std::setw(20) << row.application << std::right << std::setw(14)
        << row.train_events << std::setw(14) << row.valid_events << std::setw(14) << row.test_events
        << std::setw(15) << row.unique_events << '\n';
  }
  out << "requests=" << s.requests << " filtered=" << s.filtered_out << " excluded=" << s.excluded
      << " random_elements=" << s.random_elements << " vocabulary=" << s.vocab_size << '\n';
}

std::vector<EventStream> encode_streams(const std::vector<RawRequest>& requests,
                                        const CharMarkovModel& char_model, const EventVocabulary& vocab,
                                        GroupBy group_by) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < requests.size(); ++i) groups[group_key(requests[i], group_by)].push_back(i);
  std::vector<EventStream> out;
  for (auto& [group, indices] : groups) {
    std::stable_sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
      return requests[a].timestamp < requests[b].timestamp;
    });
    EventStream s;
    s.group = group;
    for (std::size_t i : indices) {
      Event e = canonicalize(requests[i], char_model);
      s.ids.push_back(vocab.encode(e));
      s.timestamps.push_back(requests[i].timestamp);
      s.tokens.push_back(sanitize(std::move(e.token)));
      s.sources.push_back(i);
    }
    out.push_back(std::move(s));
  }
  return out;
}

ExtractedDataset extract_dataset(const std::vector<RawRequest>& requests, const RunConfig& config) {
  ExtractedDataset ds;
  ExtractSummary& summary = ds.summary;
  summary.requests = requests.size();
  std::vector<RawRequest> kept;
  kept.reserve(requests.size());
  for (const auto& r : requests) {
    if (config.filter.admits(r)) {
      kept.push_back(r);
    } else {
      ++summary.filtered_out;
    }
  }
  if (kept.empty()) throw FitError("no requests left after filtering");

  const DatasetSplit split =
      split_by_day(kept, config.split.train_days, config.split.valid_days, config.split.test_days);
  const SplitRequests parts = partition(kept, split);
  summary.excluded = kept.size() - parts.train.size() - parts.valid.size() - parts.test.size();

  CharMarkovFitOptions options;
  options.seed = Rng::derive(config.seed, 0xc4a2);
  options.threshold_override = config.extractor.theta;
  const std::vector<std::string> elements = training_elements(parts.train);
  if (config.extractor.use_word_list) {
    // Raw path elements include the very identifiers we want to catch, so
    // only distinct elements the dictionary-only model accepts join the corpus.
    options.good_sample = bundled_words();
    const CharMarkovModel bootstrap = fit_char_markov(options.good_sample, options);
    std::set<std::string> accepted;
    for (const auto& e : elements) {
      if (!is_random_element(bootstrap, e)) accepted.insert(e);
    }
    std::vector<std::string> corpus = options.good_sample;
    corpus.insert(corpus.end(), accepted.begin(), accepted.end());
    ds.char_model = fit_char_markov(corpus, options);
  } else {
    const std::set<std::string> distinct(elements.begin(), elements.end());
    ds.char_model = fit_char_markov({distinct.begin(), distinct.end()}, options);
  }

  std::vector<Event> train_events;
  train_events.reserve(parts.train.size());
  for (const auto& r : parts.train) train_events.push_back(canonicalize(r, ds.char_model));
  ds.vocab = build_vocabulary(train_events, config.extractor.rare_threshold);
  summary.vocab_size = ds.vocab.size();

  ds.train = encode_streams(parts.train, ds.char_model, ds.vocab, config.group_by);
  ds.valid = encode_streams(parts.valid, ds.char_model, ds.vocab, config.group_by);
  ds.test = encode_streams(parts.test, ds.char_model, ds.vocab, config.group_by);

  std::map<std::string, ExtractSummaryRow> rows;
  std::map<std::string, std::set<EventId>> unique;
  const std::vector<RawRequest>* splits[] = {&parts.train, &parts.valid, &parts.test};
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < splits[k]->size(); ++i) {
      const RawRequest& r = (*splits[k])[i];
      auto& row = rows[r.app_id];
      row.application = r.app_id;
      (k == 0 ? row.train_events : k == 1 ? row.valid_events : row.test_events) += 1;
      for (const auto& element : segment_path(r.path)) {
        if (is_random_element(ds.char_model, element.text)) ++summary.random_elements;
      }
      if (k == 0) {
        const EventId id = ds.vocab.encode(train_events[i]);
        if (id >= kFirstNormalId) unique[r.app_id].insert(id);
      }
    }
  }
  for (auto& [app, row] : rows) {
    row.unique_events = unique[app].size();
    summary.rows.push_back(row);
  }
  return ds;
}

void save_dataset(const fs::path& dir, const ExtractedDataset& ds) {
  fs::create_directories(dir);
  std::ostringstream charmodel;
  ds.char_model.save(charmodel);
  write_file_atomic(dir / "charmodel.txt", charmodel.str());
  write_file_atomic(dir / "vocab.tsv", ds.vocab.serialize());
  const std::vector<EventStream>* splits[] = {&ds.train, &ds.valid, &ds.test};
  for (std::size_t k = 0; k < 3; ++k) {
    write_file_atomic(dir / (std::string("events_") + kSplitNames[k] + ".tsv"), events_tsv(*splits[k]));
  }
  std::ostringstream summary;
  const auto& s = ds.summary;
  summary << "# requests\t" << s.requests << "\n# filtered\t" << s.filtered_out << "\n# excluded\t"
          << s.excluded << "\n# random_elements\t" << s.random_elements << "\n# vocabulary\t"
          << s.vocab_size << "\napplication\ttrain_events\tvalid_events\ttest_events\tunique_events\n";
  for (const auto& row : s.rows) {
    summary << row.application << '\t' << row.train_events << '\t' << row.valid_events << '\t'
            << row.test_events << '\t' << row.unique_events << '\n';
  }
  write_file_atomic(dir / "summary.tsv", summary.str());
}

ExtractedDataset load_dataset(const fs::path& dir, std::size_t rare_threshold) {
  if (!fs::exists(dir / "vocab.tsv")) {
    throw IoError("no extracted dataset in " + dir.string() + " (run `webseq extract` first)");
  }
  ExtractedDataset ds;
  {
    std::istringstream in(read_file(dir / "charmodel.txt"));
    ds.char_model = CharMarkovModel::load(in);
  }
  {
    std::istringstream in(read_file(dir / "vocab.tsv"));
    ds.vocab = EventVocabulary::load(in, rare_threshold);
  }
  ds.train = parse_events_tsv(dir / "events_train.tsv");
  ds.valid = parse_events_tsv(dir / "events_valid.tsv");
  ds.test = parse_events_tsv(dir / "events_test.tsv");
  for (const auto* split : {&ds.train, &ds.valid, &ds.test}) {
    for (const auto& s : *split) {
      for (EventId id : s.ids) {
        if (id >= ds.vocab.size()) throw ParseError("event id outside the saved vocabulary");
      }
    }
  }

  std::istringstream in(read_file(dir / "summary.tsv"));
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    const auto f = split_tabs(line);
    if (f.size() < 2) continue;
    auto num = [](const std::string& t) { return static_cast<std::size_t>(std::stoull(t)); };
    if (f[0] == "# requests") ds.summary.requests = num(f[1]);
    else if (f[0] == "# filtered") ds.summary.filtered_out = num(f[1]);
    else if (f[0] == "# excluded") ds.summary.excluded = num(f[1]);
    else if (f[0] == "# random_elements") ds.summary.random_elements = num(f[1]);
    else if (f[0] == "# vocabulary") ds.summary.vocab_size = num(f[1]);
    else if (f[0] == "application") header_seen = true;
    else if (header_seen && f.size() == 5) {
      ds.summary.rows.push_back({f[0], num(f[1]), num(f[2]), num(f[3]), num(f[4])});
    }
  }
  return ds;
}

PredictionDistribution NgramForecaster::predict(const SequenceWindow& window) const {
  const std::span<const EventId> context(window.ids.data(), window.target_index);
  PredictionDistribution dist = webseq::predict(table_, context);
  dist.target_index = window.target_index;
  return dist;
}

PredictionDistribution NeuralForecaster::predict(const SequenceWindow& window) const {
  auto dists = model_->forward(window);
  for (auto& d : dists) {
    if (d.target_index == window.target_index) return std::move(d);
  }
  throw ContractError("window target is not masked");
}

std::string CellSpec::fingerprint(std::uint64_t seed) const {
  EvaluationReport r;
  r.model = model;
  r.window = window;
  r.pretrained = neural() && pretrain;
  r.target_mode = std::string(target_mode_name(target_mode));
  r.seed = seed;
  return r.fingerprint();
}

TrainedCell train_cell(const ExtractedDataset& dataset, const RunConfig& config, const CellSpec& cell,
                       const LossCallback& on_epoch) {
  TrainedCell out;
  nn::CheckpointMetadata meta;
  meta.vocab_fingerprint = dataset.vocab.fingerprint();
  meta.seed = config.seed;
  meta.window_size = cell.window;
  meta.target_mode = cell.target_mode;

  if (!cell.neural()) {
    std::vector<std::vector<EventId>> streams;
    for (const auto& s : dataset.train) streams.push_back(s.ids);
    TransitionTable table = fit_ngram(streams, cell.model == "markov" ? 2 : 3, dataset.vocab.size());
    meta.model = cell.model;
    out.checkpoint = nn::make_checkpoint(table, meta);
    out.forecaster = std::make_unique<NgramForecaster>(std::move(table));
    return out;
  }

  nn::ModelConfig mc = config.model;
  mc.kind = nn::parse_model_kind(cell.model);
  mc.vocab_size = dataset.vocab.size();
  mc.seed = config.seed;
  if (mc.kind == nn::ModelKind::kSelfAttention && cell.window > mc.max_window) {
    throw ConfigError("window " + std::to_string(cell.window) + " exceeds the position table (" +
                      std::to_string(mc.max_window) + " rows)");
  }
  auto model = nn::make_model(mc);

  nn::TrainConfig tc = config.train;
  tc.seed = config.seed;
  const WindowConfig train_wc = config.window_config(cell.window, cell.target_mode, config.train_stride);
  const WindowConfig valid_wc =
      config.window_config(cell.window, cell.target_mode, config.evaluate.eval_stride);
  const std::vector<SequenceWindow> train = collect_windows(dataset.train, train_wc);
  const std::vector<SequenceWindow> valid = collect_windows(dataset.valid, valid_wc);
  if (train.empty()) {
    throw TrainingError("no training stream is as long as the window (" + std::to_string(cell.window) + ")");
  }

  auto recorder = [&](const char* stage) {
    return [&out, &on_epoch, stage](std::size_t epoch, double train_loss, double valid_loss) {
      LossRecord rec{stage, epoch, train_loss, valid_loss};
      out.losses.push_back(rec);
      if (on_epoch) on_epoch(rec);
    };
  };
  nn::TrainResult pre;
  if (cell.pretrain) {
    pre = nn::pretrain(*model, train, valid, train_wc, tc, recorder("pretrain"));
  } else {
    tc.epochs += tc.resolved_pretrain_epochs();
  }
  const nn::TrainResult fine = nn::finetune(*model, train, valid, tc, recorder("finetune"));

  meta.train_loss = pre.train_loss;
  meta.train_loss.insert(meta.train_loss.end(), fine.train_loss.begin(), fine.train_loss.end());
  meta.valid_loss = pre.valid_loss;
  meta.valid_loss.insert(meta.valid_loss.end(), fine.valid_loss.begin(), fine.valid_loss.end());
  out.checkpoint = nn::make_checkpoint(*model, meta);
  out.forecaster = std::make_unique<NeuralForecaster>(std::move(model));
  return out;
}

std::unique_ptr<Forecaster> load_forecaster(const nn::Checkpoint& checkpoint,
                                            std::optional<std::uint64_t> expected_vocab) {
  if (checkpoint.metadata.config) {
    return std::make_unique<NeuralForecaster>(nn::restore_model(checkpoint, expected_vocab));
  }
  return std::make_unique<NgramForecaster>(nn::restore_table(checkpoint, expected_vocab));
}

std::string format_losses(const std::vector<LossRecord>& losses) {
  std::string out = "stage,epoch,train_loss,valid_loss\n";
  for (const auto& r : losses) {
    out += r.stage + ',' + std::to_string(r.epoch) + ',' + format_double(r.train_loss) + ',' +
           format_double(r.valid_loss) + '\n';
  }
  return out;
}

std::vector<ScoredEvent> score_streams(const Forecaster& forecaster, const std::vector<EventStream>& streams,
                                       std::size_t window, TargetMode mode, std::size_t k,
                                       std::size_t stride) {
  WindowConfig wc;
  wc.window_size = window;
  wc.stride = stride;
  wc.target_mode = mode;
  wc.validate();
  std::vector<ScoredEvent> out;
  for (std::size_t si = 0; si < streams.size(); ++si) {
    const auto built = make_windows(streams[si].ids, wc);
    for (const auto& w : built.windows) {
      const SequenceWindow masked = mask_target(w);
      const PredictionDistribution dist = forecaster.predict(masked);
      out.push_back({si, w.offset + w.target_index, judge(dist, w.target(), k)});
    }
  }
  return out;
}

EvaluationReport evaluate_cell(const Forecaster& forecaster, const ExtractedDataset& dataset,
                               const RunConfig& config, const CellSpec& cell) {
  EvaluationReport report;
  report.model = cell.model;
  report.window = cell.window;
  report.pretrained = cell.neural() && cell.pretrain;
  report.target_mode = std::string(target_mode_name(cell.target_mode));
  report.seed = config.seed;

  const auto scored = score_streams(forecaster, dataset.test, cell.window, cell.target_mode, 1,
                                    config.evaluate.eval_stride);
  if (scored.empty()) throw MetricError("no test window fits; test streams are shorter than the window");
  std::vector<std::size_t> ranks;
  ranks.reserve(scored.size());
  for (const auto& s : scored) ranks.push_back(s.verdict.rank);
  report.evaluated = ranks.size();
  std::set<std::size_t> cutoffs(config.evaluate.top_n.begin(), config.evaluate.top_n.end());
  cutoffs.insert(1);
  cutoffs.insert(10);
  for (std::size_t n : cutoffs) report.top_n_accuracy[n] = top_n_accuracy_from_ranks(ranks, n);
  if (!config.evaluate.fpr_thresholds.empty()) {
    report.fpr = fpr_curve(ranks, config.evaluate.fpr_thresholds);
  }

  if (config.evaluate.inject) {
    Rng rng(Rng::derive(config.seed, 0x1a7ec7));
    const std::vector<EventId> pool = dataset.vocab.normal_ids();
    std::vector<double> normal, injected;
    for (const auto& stream : dataset.test) {
      if (stream.size() < cell.window) continue;
      const auto result = inject_random<EventId>(stream.ids, config.evaluate.inject_rate, pool, rng);
      std::vector<bool> is_injected(result.stream.size(), false);
      for (const auto& label : result.labels) is_injected[label.position] = true;
      EventStream corrupted;
      corrupted.ids = result.stream;
      const auto verdicts = score_streams(forecaster, {corrupted}, cell.window, cell.target_mode, 1, 1);
      for (const auto& v : verdicts) {
        (is_injected[v.position] ? injected : normal).push_back(v.verdict.score);
      }
    }
    if (!normal.empty() && !injected.empty()) {
      report.roc = roc(normal, injected);
      double sn = 0.0, si = 0.0;
      for (double s : normal) sn += s;
      for (double s : injected) si += s;
      report.mean_normal_score = sn / static_cast<double>(normal.size());
      report.mean_injected_score = si / static_cast<double>(injected.size());
      report.injected = injected.size();
    }
  }
  return report;
}

std::vector<CellSpec> ablation_cells(const RunConfig& config) {
  const auto& e = config.evaluate;
  const std::size_t baseline_window =
      e.windows.empty() ? config.window_size : *std::min_element(e.windows.begin(), e.windows.end());
  std::vector<CellSpec> cells;
  for (TargetMode mode : e.target_modes) {
    for (const auto& model : e.models) {
      if (model == "markov" || model == "ngram") {
        cells.push_back({model, baseline_window, false, mode});
        continue;
      }
      for (std::size_t w : e.windows) {
        for (bool pt : e.pretraining) cells.push_back({model, w, pt, mode});
      }
    }
  }
  return cells;
}

std::vector<EvaluationReport> ablation_matrix(const ExtractedDataset& dataset, const RunConfig& config,
                                              const std::optional<fs::path>& models_dir,
                                              const CellCallback& on_cell) {
  std::vector<EvaluationReport> reports;
  for (const CellSpec& cell : ablation_cells(config)) {
    EvaluationReport report;
    try {
      TrainedCell trained = train_cell(dataset, config, cell);
      if (models_dir) {
        const fs::path dir = *models_dir / cell.fingerprint(config.seed);
        nn::save_checkpoint(dir / "checkpoint.bin", trained.checkpoint);
        write_file_atomic(dir / "losses.csv", format_losses(trained.losses));
      }
      report = evaluate_cell(*trained.forecaster, dataset, config, cell);
    } catch (const std::exception& e) {
      report = EvaluationReport{};
      report.model = cell.model;
      report.window = cell.window;
      report.pretrained = cell.neural() && cell.pretrain;
      report.target_mode = std::string(target_mode_name(cell.target_mode));
      report.seed = config.seed;
      report.error = e.what();
    }
    if (on_cell) on_cell(cell, report);
    reports.push_back(std::move(report));
  }
  return reports;
}

void write_reports(const fs::path& dir, const std::vector<EvaluationReport>& reports) {
  fs::create_directories(dir);
  {
    std::ostringstream out;
    write_cells_csv(out, reports);
    write_file_atomic(dir / "cells.csv", out.str());
  }
  std::set<std::string> modes;
  for (const auto& r : reports) modes.insert(r.target_mode);
  for (const auto& mode : modes) {
    std::ostringstream out;
    write_model_table_csv(out, reports, mode);
    write_file_atomic(dir / ("model_comparison_" + mode + ".csv"), out.str());
  }

  auto top = [](const EvaluationReport& r, std::size_t n) {
    const auto it = r.top_n_accuracy.find(n);
    return format_fixed(100.0 * (it == r.top_n_accuracy.end() ? 0.0 : it->second), 2);
  };
  {
    std::ostringstream out;
    out << "model,window,pretrain,target_mode,top1_pct,top10_pct\n";
    for (const auto& r : reports) {
      if (!r.ok() || r.model == "markov" || r.model == "ngram") continue;
      out << r.model << ',' << r.window << ',' << (r.pretrained ? 1 : 0) << ',' << r.target_mode << ','
          << top(r, 1) << ',' << top(r, 10) << '\n';
    }
    write_file_atomic(dir / "window_ablation.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "model,window,pretrain,last_top1_pct,centered_top1_pct,last_top10_pct,centered_top10_pct\n";
    for (const auto& last : reports) {
      if (!last.ok() || last.target_mode != "last") continue;
      for (const auto& centered : reports) {
        if (!centered.ok() || centered.target_mode != "centered" || centered.model != last.model ||
            centered.window != last.window || centered.pretrained != last.pretrained) {
          continue;
        }
        out << last.model << ',' << last.window << ',' << (last.pretrained ? 1 : 0) << ','
            << top(last, 1) << ',' << top(centered, 1) << ',' << top(last, 10) << ','
            << top(centered, 10) << '\n';
      }
    }
    write_file_atomic(dir / "centered_comparison.csv", out.str());
  }
  for (const auto& r : reports) {
    if (!r.ok()) continue;
    std::ostringstream fpr;
    write_fpr_csv(fpr, r);
    write_file_atomic(dir / "curves" / ("fpr_" + r.fingerprint() + ".csv"), fpr.str());
    if (r.injected > 0) {
      std::ostringstream curve;
      write_roc_csv(curve, r);
      write_file_atomic(dir / "curves" / ("roc_" + r.fingerprint() + ".csv"), curve.str());
    }
  }
}

std::vector<std::string> acceptance_violations(const std::vector<EvaluationReport>& reports,
                                               const AcceptanceThresholds& t) {
  std::vector<std::string> out;
  if (!t.any()) return out;
  std::size_t matched = 0;
  for (const auto& r : reports) {
    if (!r.ok() || (!t.model.empty() && r.model != t.model)) continue;
    ++matched;
    auto acc = [&r](std::size_t n) {
      const auto it = r.top_n_accuracy.find(n);
      return it == r.top_n_accuracy.end() ? 0.0 : it->second;
    };
    auto fail = [&](const std::string& what, double got, double limit) {
      out.push_back(r.fingerprint() + ": " + what + " " + format_fixed(got, 4) + " (limit " +
                    format_fixed(limit, 4) + ")");
    };
    if (t.min_top1 && acc(1) < *t.min_top1) fail("top1", acc(1), *t.min_top1);
    if (t.min_top10 && acc(10) < *t.min_top10) fail("top10", acc(10), *t.min_top10);
    const bool needs_injection = t.max_mean_normal_score || t.min_mean_injected_score || t.min_auc;
    if (needs_injection && r.injected == 0) {
      out.push_back(r.fingerprint() + ": no injected events were scored");
      continue;
    }
    if (t.max_mean_normal_score && r.mean_normal_score > *t.max_mean_normal_score) {
      fail("mean normal score", r.mean_normal_score, *t.max_mean_normal_score);
    }
    if (t.min_mean_injected_score && r.mean_injected_score < *t.min_mean_injected_score) {
      fail("mean injected score", r.mean_injected_score, *t.min_mean_injected_score);
    }
    if (t.min_auc && r.roc.auc < *t.min_auc) fail("auc", r.roc.auc, *t.min_auc);
  }
  if (matched == 0) {
    out.push_back("no successful cell" + (t.model.empty() ? std::string() : " for model " + t.model) +
                  " to check thresholds against");
  }
  return out;
}

}  // namespace webseq
