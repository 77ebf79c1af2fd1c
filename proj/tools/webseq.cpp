// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

// webseq command-line tool. Every subcommand resolves one RunConfig and works
// inside <run root>/<config fingerprint>, so reruns land in the same place.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "webseq/errors.hpp"
#include "webseq/hash.hpp"
#include "webseq/pipeline.hpp"
#include "webseq/synthgen.hpp"
#include "webseq/timeutil.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace webseq;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAcceptance = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string input;
  std::string format;
  std::string run_root;
  std::optional<std::size_t> train_days;
  std::optional<std::size_t> valid_days;
  std::optional<std::size_t> test_days;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_split = true) {
  cmd->add_option("-c,--config", o.config_path, "JSON run config (defaults apply when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Override the config seed");
  cmd->add_option("-i,--input", o.input, "Override the input log path");
  cmd->add_option("--format", o.format, "Input format: jsonl or clf");
  cmd->add_option("--run-root", o.run_root, "Run root (default: $WEBSEQ_RUN_ROOT, then ./runs)");
  if (with_split) {
    cmd->add_option("--train-days", o.train_days, "Days in the training split");
    cmd->add_option("--valid-days", o.valid_days, "Days in the validation split");
    cmd->add_option("--test-days", o.test_days, "Days in the test split");
  }
}

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.input.empty()) cfg.input_path = o.input;
  if (!o.format.empty()) cfg.input_format = parse_log_format(o.format);
  if (!o.run_root.empty()) cfg.run_root = o.run_root;
  if (o.train_days) cfg.split.train_days = *o.train_days;
  if (o.valid_days) cfg.split.valid_days = *o.valid_days;
  if (o.test_days) cfg.split.test_days = *o.test_days;
  cfg.validate();
  return cfg;
}

std::vector<RawRequest> read_log(const std::string& path, const RunConfig& cfg, ReadStats* stats = nullptr) {
  if (path.empty()) throw ConfigError("no input log (set input.path in the config or pass --input)");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input log " + path);
  try {
    return read_requests(in, cfg.input_format, cfg.default_app, cfg.strict, stats);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void log_line(const std::string& msg) { std::cerr << "webseq: " << msg << '\n'; }

fs::path extract_dir(const RunConfig& cfg) { return run_directory(cfg) / "extract"; }

// The run root is where the run lives, not part of what it is.
void write_run_config(const RunConfig& cfg) {
  RunConfig stored = cfg;
  stored.run_root.clear();
  write_file_atomic(run_directory(cfg) / "config.json", stored.to_json() + "\n");
}

// Extracts on first use so train/evaluate/score work on a fresh run directory.
ExtractedDataset dataset_for(const RunConfig& cfg) {
  const fs::path dir = extract_dir(cfg);
  if (fs::exists(dir / "vocab.tsv")) return load_dataset(dir, cfg.extractor.rare_threshold);
  log_line("no extracted artifacts under " + dir.string() + ", extracting");
  ExtractedDataset ds = extract_dataset(read_log(cfg.input_path, cfg), cfg);
  write_run_config(cfg);
  save_dataset(dir, ds);
  return ds;
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return hex64(fnv1a64(buf.str()));
}

// synth ---------------------------------------------------------------------

struct SynthArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::size_t> days;
  std::optional<std::size_t> events_per_day;
  std::optional<std::uint64_t> seed;
  std::string inject;
  double inject_rate = 0.01;
  std::size_t inject_from_day = 0;
};

int cmd_synth(const SynthArgs& a) {
  RunConfig cfg = a.config_path.empty() ? RunConfig{} : load_run_config(a.config_path);
  SynthOptions opt;
  opt.days = a.days.value_or(cfg.synth.days);
  opt.events_per_day = a.events_per_day.value_or(cfg.synth.events_per_day);
  opt.seed = a.seed.value_or(cfg.seed);
  if (!a.inject.empty()) opt.inject = a.inject;
  opt.inject_rate = a.inject_rate;
  opt.inject_from_day = a.inject_from_day;

  const SyntheticLog log = synthesize(default_grammar(), opt);
  std::string body;
  for (const auto& r : log.requests) body += to_jsonl(r) + "\n";
  const fs::path out(a.out_dir);
  write_file_atomic(out / "log.jsonl", body);
  std::ostringstream labels;
  write_labels(labels, log.labels);
  write_file_atomic(out / "labels.tsv", labels.str());
  std::cout << "wrote " << log.requests.size() << " requests (" << log.labels.size() << " injected) to "
            << (out / "log.jsonl").string() << '\n';
  return 0;
}

// ingest --------------------------------------------------------------------

int cmd_ingest(const CommonOptions& o, const std::string& output) {
  const RunConfig cfg = resolve_config(o);
  ReadStats stats;
  const auto requests = read_log(cfg.input_path, cfg, &stats);
  std::vector<RawRequest> kept;
  for (const auto& r : requests)
    if (cfg.filter.admits(r)) kept.push_back(r);
  const DatasetSplit split = split_by_day(kept, cfg.split.train_days, cfg.split.valid_days,
                                          cfg.split.test_days);
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto& r : kept) ++counts[static_cast<int>(split.assign(r))];

  const fs::path out = output.empty() ? run_directory(cfg) / "ingest" / "requests.jsonl" : fs::path(output);
  std::string body;
  for (const auto& r : kept) body += to_jsonl(r) + "\n";
  write_file_atomic(out, body);

  std::cout << "lines " << stats.lines << "  parsed " << stats.parsed << "  skipped " << stats.skipped
            << "  blank " << stats.blank << "  filtered " << (requests.size() - kept.size()) << '\n';
  const std::set<CalendarDate>* days[] = {&split.train_days, &split.valid_days, &split.test_days,
                                          &split.excluded_days};
  const Split order[] = {Split::kTrain, Split::kValid, Split::kTest, Split::kExcluded};
  for (int k = 0; k < 4; ++k) {
    std::cout << std::left << std::setw(10) << split_name(order[k]) << std::right << std::setw(4)
              << days[k]->size() << " days " << std::setw(10) << counts[k] << " requests";
    if (!days[k]->empty())
      std::cout << "  " << format_date(*days[k]->begin()) << " .. " << format_date(*days[k]->rbegin());
    std::cout << '\n';
  }
  std::cout << "canonical log: " << out.string() << '\n';
  return 0;
}

// extract -------------------------------------------------------------------

int cmd_extract(const CommonOptions& o) {
  const RunConfig cfg = resolve_config(o);
  const auto requests = read_log(cfg.input_path, cfg);
  const ExtractedDataset ds = extract_dataset(requests, cfg);
  const fs::path run = run_directory(cfg);
  write_run_config(cfg);
  save_dataset(run / "extract", ds);
  print_summary(std::cout, ds.summary);
  std::cout << "artifacts: " << (run / "extract").string() << '\n';
  return 0;
}

// train ---------------------------------------------------------------------

struct CellArgs {
  std::string model = "self_attn";
  bool pretrain = true;
  std::optional<std::size_t> window;
  bool centered = false;
};

int cmd_train(const CommonOptions& o, const CellArgs& a) {
  const RunConfig cfg = resolve_config(o);
  CellSpec cell;
  cell.model = a.model;
  cell.window = a.window.value_or(cfg.window_size);
  cell.pretrain = cell.neural() && a.pretrain;
  cell.target_mode = a.centered ? TargetMode::kCentered : cfg.target_mode;

  const ExtractedDataset ds = dataset_for(cfg);
  TrainedCell trained = train_cell(ds, cfg, cell, [](const LossRecord& r) {
    std::ostringstream msg;
    msg << r.stage << " epoch " << r.epoch << " train " << format_fixed(r.train_loss, 5);
    if (r.valid_loss == r.valid_loss) msg << " valid " << format_fixed(r.valid_loss, 5);
    log_line(msg.str());
  });
  const fs::path dir = run_directory(cfg) / "models" / cell.fingerprint(cfg.seed);
  nn::save_checkpoint(dir / "checkpoint.bin", trained.checkpoint);
  write_file_atomic(dir / "losses.csv", format_losses(trained.losses));
  std::cout << "checkpoint " << (dir / "checkpoint.bin").string() << "  fnv1a "
            << file_hash(dir / "checkpoint.bin") << '\n';
  return 0;
}

// evaluate ------------------------------------------------------------------

struct EvaluateArgs {
  bool centered = false;
  bool last = false;
  std::vector<std::string> models;
  std::vector<std::size_t> windows;
  bool keep_models = false;
};

int cmd_evaluate(const CommonOptions& o, const EvaluateArgs& a) {
  RunConfig cfg = resolve_config(o);
  const fs::path run = run_directory(cfg);
  const ExtractedDataset ds = dataset_for(cfg);

  // Cell selection does not change the run directory; it only narrows the matrix.
  if (a.centered && !a.last) cfg.evaluate.target_modes = {TargetMode::kCentered};
  if (a.last && !a.centered) cfg.evaluate.target_modes = {TargetMode::kLast};
  if (!a.models.empty()) cfg.evaluate.models = a.models;
  if (!a.windows.empty()) cfg.evaluate.windows = a.windows;
  cfg.validate();

  // A narrowed matrix gets its own directory so it never mixes with the full one.
  std::string reports_name = "reports";
  if (a.centered != a.last) reports_name += a.centered ? "_centered" : "_last";
  for (const auto& m : a.models) reports_name += "_" + m;
  for (std::size_t w : a.windows) reports_name += "_w" + std::to_string(w);
  const fs::path reports_dir = run / reports_name;

  std::optional<fs::path> models_dir;
  if (a.keep_models) models_dir = run / "models";
  const auto reports = ablation_matrix(ds, cfg, models_dir, [](const CellSpec&, const EvaluationReport& r) {
    std::ostringstream msg;
    msg << r.fingerprint();
    if (!r.error.empty()) {
      msg << " failed: " << r.error;
    } else {
      for (const auto& [n, acc] : r.top_n_accuracy) msg << " top" << n << " " << format_fixed(acc, 4);
      if (r.injected > 0) msg << " auc " << format_fixed(r.roc.auc, 4);
    }
    log_line(msg.str());
  });
  write_reports(reports_dir, reports);
  std::cout << "reports: " << reports_dir.string() << '\n';

  const auto violations = acceptance_violations(reports, cfg.evaluate.acceptance);
  for (const auto& v : violations) std::cerr << "acceptance: " << v << '\n';
  return violations.empty() ? 0 : kExitAcceptance;
}

// score ---------------------------------------------------------------------

struct ScoreArgs {
  std::string checkpoint;
  std::string stream;
  std::string output;
  std::string labels;
  std::size_t k = 10;
  std::optional<std::size_t> stride;
};

int cmd_score(const CommonOptions& o, const ScoreArgs& a) {
  const RunConfig cfg = resolve_config(o);
  const nn::Checkpoint ckpt = nn::load_checkpoint(a.checkpoint);
  const std::string stream_path = a.stream.empty() ? cfg.input_path : a.stream;
  const auto requests = read_log(stream_path, cfg);
  std::vector<InjectionLabel> labels;
  if (!a.labels.empty()) {
    std::ifstream in(a.labels);
    if (!in) throw IoError("cannot open labels " + a.labels);
    labels = read_labels(in);
  }

  const ExtractedDataset ds = dataset_for(cfg);
  const auto forecaster = load_forecaster(ckpt, ds.vocab.fingerprint());
  const auto streams = encode_streams(requests, ds.char_model, ds.vocab, cfg.group_by);
  const std::size_t w = ckpt.metadata.window_size;
  const auto scored = score_streams(*forecaster, streams, w, ckpt.metadata.target_mode, a.k,
                                    a.stride.value_or(1));

  std::ostringstream body;
  const char* group_key = cfg.group_by == GroupBy::kApp ? "app" : "actor";
  for (const auto& e : scored) {
    const EventStream& s = streams[e.stream];
    json rec;
    rec["index"] = s.sources[e.position];
    rec["ts"] = format_rfc3339(s.timestamps[e.position]);
    rec[group_key] = s.group;
    rec["token"] = s.tokens[e.position];
    rec["tau"] = e.verdict.rank;
    rec["s"] = e.verdict.score;
    rec["alarmed"] = e.verdict.alarmed;
    rec["K"] = e.verdict.top_k;
    body << rec.dump() << '\n';
  }
  if (a.output.empty()) {
    std::cout << body.str();
  } else {
    write_file_atomic(a.output, body.str());
  }

  std::size_t alarms = 0;
  for (const auto& e : scored) alarms += e.verdict.alarmed ? 1 : 0;
  std::ostringstream msg;
  msg << "scored " << scored.size() << " of " << requests.size() << " requests, " << alarms << " alarms at K="
      << a.k;
  log_line(msg.str());

  if (!labels.empty()) {
    std::vector<char> injected(requests.size(), 0);
    for (const auto& l : labels)
      if (l.position < injected.size()) injected[l.position] = 1;
    double sum[2] = {0.0, 0.0};
    std::size_t n[2] = {0, 0};
    for (const auto& e : scored) {
      const int k = injected[streams[e.stream].sources[e.position]];
      sum[k] += e.verdict.score;
      ++n[k];
    }
    std::ostringstream sep;
    sep << "mean s unlabeled " << format_fixed(n[0] ? sum[0] / n[0] : 0.0, 4) << " (n=" << n[0]
        << ")  labeled " << format_fixed(n[1] ? sum[1] / n[1] : 0.0, 4) << " (n=" << n[1] << ")";
    log_line(sep.str());
  }
  return 0;
}

// report --------------------------------------------------------------------

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

void print_table(std::ostream& out, const std::string& title, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], r[i].size());
    }
  out << "== " << title << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i > 0) out << "  ";
      out << std::setw(static_cast<int>(width[i])) << (i == 0 ? std::left : std::right) << r[i];
    }
    out << '\n';
  }
  out << '\n';
}

int cmd_report(const CommonOptions& o, const std::string& reports_dir, bool all_cells) {
  const fs::path dir = reports_dir.empty() ? run_directory(resolve_config(o)) / "reports" : fs::path(reports_dir);
  if (!fs::exists(dir / "cells.csv")) throw IoError("no reports under " + dir.string() + " (run evaluate first)");
  std::vector<std::string> names;
  for (const char* mode : {"last", "centered"})
    names.push_back(std::string("model_comparison_") + mode + ".csv");
  names.push_back("window_ablation.csv");
  names.push_back("centered_comparison.csv");
  if (all_cells) names.push_back("cells.csv");
  for (const auto& name : names)
    if (fs::exists(dir / name)) print_table(std::cout, name, read_csv(dir / name));
  return 0;
}

int cmd_config(const CommonOptions& o) {
  const RunConfig cfg = resolve_config(o);
  std::cout << json::parse(cfg.to_json()).dump(2) << '\n';
  std::cerr << "run directory: " << run_directory(cfg).string() << '\n';
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"webseq: HTTP log event sequences, forecasting and anomaly scoring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "webseq 0.3.0");

  CommonOptions common;

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic log (log.jsonl, labels.tsv)");
  synth_cmd->add_option("-c,--config", synth.config_path, "Run config for synth defaults and seed")
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("-o,--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--days", synth.days);
  synth_cmd->add_option("--events-per-day", synth.events_per_day);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--inject", synth.inject, "random, scanner_burst or exploit_probe")
      ->check(CLI::IsMember({"random", "scanner_burst", "exploit_probe"}));
  synth_cmd->add_option("--inject-rate", synth.inject_rate)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--inject-from-day", synth.inject_from_day);

  std::string ingest_out;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse a log, report the day split, write canonical JSONL");
  add_common(ingest_cmd, common);
  ingest_cmd->add_option("-o,--output", ingest_out, "Canonical JSONL path (default: run directory)");

  auto* extract_cmd = app.add_subcommand("extract", "Fit the extractor and vocabulary, encode every split");
  add_common(extract_cmd, common);

  CellArgs cell;
  auto* train_cmd = app.add_subcommand("train", "Train one model and write its checkpoint");
  add_common(train_cmd, common);
  train_cmd->add_option("-m,--model", cell.model, "markov, ngram, bilstm, lstm_attn or self_attn")
      ->check(CLI::IsMember({"markov", "ngram", "bilstm", "lstm_attn", "self_attn"}));
  train_cmd->add_flag("--pretrain,!--no-pretrain", cell.pretrain, "Masked pre-training before fine-tuning");
  train_cmd->add_option("-w,--window", cell.window);
  train_cmd->add_flag("--centered", cell.centered, "Predict the middle event instead of the last");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Run the ablation matrix and write reports");
  add_common(eval_cmd, common);
  eval_cmd->add_flag("--centered", eval.centered, "Only centered-target cells");
  eval_cmd->add_flag("--last", eval.last, "Only last-target cells");
  eval_cmd->add_option("--model", eval.models, "Restrict to these models");
  eval_cmd->add_option("--window", eval.windows, "Restrict to these windows");
  eval_cmd->add_flag("--keep-models", eval.keep_models, "Save every cell's checkpoint");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score a log with a checkpoint, one JSON record per event");
  add_common(score_cmd, common);
  score_cmd->add_option("--checkpoint", score.checkpoint)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--stream", score.stream, "Log to score (default: the config input)");
  score_cmd->add_option("-o,--output", score.output, "Write records here instead of stdout");
  score_cmd->add_option("--labels", score.labels, "labels.tsv; prints mean s for labeled vs unlabeled");
  score_cmd->add_option("-k,--k", score.k, "Alarm when tau >= K")->check(CLI::PositiveNumber);
  score_cmd->add_option("--stride", score.stride)->check(CLI::PositiveNumber);

  std::string reports_dir;
  bool all_cells = false;
  auto* report_cmd = app.add_subcommand("report", "Print the evaluation tables");
  add_common(report_cmd, common);
  report_cmd->add_option("--dir", reports_dir, "Reports directory (default: the run's)");
  report_cmd->add_flag("--all", all_cells, "Include every cell");

  auto* config_cmd = app.add_subcommand("config", "Print the resolved config and run directory");
  add_common(config_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  if (*synth_cmd) return cmd_synth(synth);
  if (*ingest_cmd) return cmd_ingest(common, ingest_out);
  if (*extract_cmd) return cmd_extract(common);
  if (*train_cmd) return cmd_train(common, cell);
  if (*eval_cmd) return cmd_evaluate(common, eval);
  if (*score_cmd) return cmd_score(common, score);
  if (*report_cmd) return cmd_report(common, reports_dir, all_cells);
  if (*config_cmd) return cmd_config(common);
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "webseq: config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "webseq: " << e.category() << " error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "webseq: " << e.what() << '\n';
    return kExitData;
  }
}
