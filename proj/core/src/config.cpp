// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "webseq/errors.hpp"
#include "webseq/hash.hpp"

namespace webseq {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::string_view section, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw ConfigError(std::string(section) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto k : keys) known = known || key == k;
    if (!known) throw ConfigError("unknown key \"" + key + "\" in " + std::string(section));
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key \"") + key + "\" has the wrong type");
  }
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  T value{};
  read(j, key, value);
  out = value;
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json model_json(const nn::ModelConfig& m) {
  return {{"kind", std::string(nn::model_kind_name(m.kind))},
          {"d_model", m.d_model},
          {"max_window", m.max_window},
          {"layers", m.layers},
          {"heads", m.heads},
          {"head_width", m.head_width},
          {"ff_width", m.ff_width},
          {"lstm_layers", m.lstm_layers},
          {"hidden", m.hidden},
          {"dropout", m.dropout},
          {"attention_width", m.attention_width}};
}

void read_model(const json& j, nn::ModelConfig& m) {
  check_keys(j, "model", {"kind", "d_model", "max_window", "layers", "heads", "head_width",
                          "ff_width", "lstm_layers", "hidden", "dropout", "attention_width"});
  if (j.contains("kind")) m.kind = nn::parse_model_kind(j.at("kind").get<std::string>());
  read(j, "d_model", m.d_model);
  read(j, "max_window", m.max_window);
  read(j, "layers", m.layers);
  read(j, "heads", m.heads);
  read(j, "head_width", m.head_width);
  read(j, "ff_width", m.ff_width);
  read(j, "lstm_layers", m.lstm_layers);
  read(j, "hidden", m.hidden);
  read(j, "dropout", m.dropout);
  read(j, "attention_width", m.attention_width);
}

json train_json(const nn::TrainConfig& t) {
  return {{"batch_size", t.batch_size},
          {"epochs", t.epochs},
          {"patience", t.patience},
          {"pretrain_epochs", opt(t.pretrain_epochs)},
          {"pretrain_lr", t.pretrain_lr},
          {"finetune_lr", opt(t.finetune_lr)},
          {"weight_decay", t.weight_decay},
          {"beta1", t.beta1},
          {"beta2", t.beta2},
          {"epsilon", t.epsilon}};
}

void read_train(const json& j, nn::TrainConfig& t) {
  check_keys(j, "train", {"batch_size", "epochs", "patience", "pretrain_epochs", "pretrain_lr",
                          "finetune_lr", "weight_decay", "beta1", "beta2", "epsilon"});
  read(j, "batch_size", t.batch_size);
  read(j, "epochs", t.epochs);
  read(j, "patience", t.patience);
  read(j, "pretrain_epochs", t.pretrain_epochs);
  read(j, "pretrain_lr", t.pretrain_lr);
  read(j, "finetune_lr", t.finetune_lr);
  read(j, "weight_decay", t.weight_decay);
  read(j, "beta1", t.beta1);
  read(j, "beta2", t.beta2);
  read(j, "epsilon", t.epsilon);
}

json evaluate_json(const EvaluateConfig& e) {
  std::vector<std::string> modes;
  for (auto m : e.target_modes) modes.emplace_back(target_mode_name(m));
  const auto& a = e.acceptance;
  return {{"models", e.models},
          {"windows", e.windows},
          {"pretraining", e.pretraining},
          {"target_modes", modes},
          {"top_n", e.top_n},
          {"fpr_thresholds", e.fpr_thresholds},
          {"inject", e.inject},
          {"inject_rate", e.inject_rate},
          {"eval_stride", e.eval_stride},
          {"acceptance",
           {{"model", a.model},
            {"min_top1", opt(a.min_top1)},
            {"min_top10", opt(a.min_top10)},
            {"max_mean_normal_score", opt(a.max_mean_normal_score)},
            {"min_mean_injected_score", opt(a.min_mean_injected_score)},
            {"min_auc", opt(a.min_auc)}}}};
}

void read_evaluate(const json& j, EvaluateConfig& e) {
  check_keys(j, "evaluate", {"models", "windows", "pretraining", "target_modes", "top_n",
                             "fpr_thresholds", "inject", "inject_rate", "eval_stride", "acceptance"});
  read(j, "models", e.models);
  read(j, "windows", e.windows);
  read(j, "pretraining", e.pretraining);
  if (j.contains("target_modes")) {
    e.target_modes.clear();
    for (const auto& m : j.at("target_modes")) e.target_modes.push_back(parse_target_mode(m.get<std::string>()));
  }
  read(j, "top_n", e.top_n);
  read(j, "fpr_thresholds", e.fpr_thresholds);
  read(j, "inject", e.inject);
  read(j, "inject_rate", e.inject_rate);
  read(j, "eval_stride", e.eval_stride);
  if (j.contains("acceptance")) {
    const json& a = j.at("acceptance");
    check_keys(a, "evaluate.acceptance", {"model", "min_top1", "min_top10", "max_mean_normal_score",
                                          "min_mean_injected_score", "min_auc"});
    auto& t = e.acceptance;
    read(a, "model", t.model);
    read(a, "min_top1", t.min_top1);
    read(a, "min_top10", t.min_top10);
    read(a, "max_mean_normal_score", t.max_mean_normal_score);
    read(a, "min_mean_injected_score", t.min_mean_injected_score);
    read(a, "min_auc", t.min_auc);
  }
}

json to_json_object(const RunConfig& c) {
  return {{"seed", c.seed},
          {"input", {{"path", c.input_path},
                     {"format", c.input_format == LogFormat::kJsonl ? "jsonl" : "clf"},
                     {"default_app", c.default_app},
                     {"strict", c.strict}}},
          {"run_root", c.run_root},
          {"split", {{"train_days", c.split.train_days},
                     {"valid_days", c.split.valid_days},
                     {"test_days", c.split.test_days}}},
          {"group_by", std::string(group_by_name(c.group_by))},
          {"filter", {{"allow_actors", c.filter.allow_actors},
                      {"deny_actors", c.filter.deny_actors},
                      {"deny_path_prefixes", c.filter.deny_path_prefixes}}},
          {"extractor", {{"rare_threshold", c.extractor.rare_threshold},
                         {"theta", opt(c.extractor.theta)},
                         {"use_word_list", c.extractor.use_word_list}}},
          {"window", {{"size", c.window_size},
                      {"train_stride", c.train_stride},
                      {"target_mode", std::string(target_mode_name(c.target_mode))},
                      {"mask_rate", c.mask_rate}}},
          {"model", model_json(c.model)},
          {"train", train_json(c.train)},
          {"evaluate", evaluate_json(c.evaluate)},
          {"synth", {{"days", c.synth.days}, {"events_per_day", c.synth.events_per_day}}}};
}

}  // namespace

std::string_view group_by_name(GroupBy group_by) {
  return group_by == GroupBy::kApp ? "app" : "actor";
}

void RunConfig::validate() const {
  if (split.train_days == 0 || split.valid_days == 0 || split.test_days == 0) {
    throw ConfigError("every split needs at least one day");
  }
  if (extractor.rare_threshold == 0) throw ConfigError("rare_threshold must be at least 1");
  window_config(window_size, target_mode, train_stride).validate();
  if (evaluate.eval_stride == 0) throw ConfigError("eval_stride must be positive");
  for (std::size_t w : evaluate.windows) {
    if (w < 2) throw ConfigError("evaluation windows must hold at least two events");
  }
  for (std::size_t n : evaluate.top_n) {
    if (n == 0) throw ConfigError("top_n cutoffs must be positive");
  }
  if (evaluate.inject && !(evaluate.inject_rate > 0.0 && evaluate.inject_rate < 1.0)) {
    throw ConfigError("inject_rate must lie in (0, 1)");
  }
  for (const auto& m : evaluate.models) {
    if (m != "markov" && m != "ngram") nn::parse_model_kind(m);
  }
  nn::ModelConfig probe = model;
  probe.vocab_size = 1;
  probe.validate();
  train.validate();
}

std::string RunConfig::to_json() const { return to_json_object(*this).dump(2); }

std::string RunConfig::fingerprint() const {
  json j = to_json_object(*this);
  j.erase("run_root");
  return hex64(fnv1a64(j.dump()));
}

WindowConfig RunConfig::window_config(std::size_t window, TargetMode mode, std::size_t stride) const {
  WindowConfig w;
  w.window_size = window;
  w.stride = stride;
  w.target_mode = mode;
  w.mask_rate = mask_rate;
  w.rng_seed = seed;
  return w;
}

namespace {

RunConfig parse_run_config_json(const json& j);

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return parse_run_config_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has a mistyped value: ") + e.what());
  }
}

namespace {

RunConfig parse_run_config_json(const json& j) {
  check_keys(j, "config", {"seed", "input", "run_root", "split", "group_by", "filter", "extractor",
                           "window", "model", "train", "evaluate", "synth"});
  RunConfig c;
  read(j, "seed", c.seed);
  if (j.contains("input")) {
    const json& in = j.at("input");
    check_keys(in, "input", {"path", "format", "default_app", "strict"});
    read(in, "path", c.input_path);
    if (in.contains("format")) {
      try {
        c.input_format = parse_log_format(in.at("format").get<std::string>());
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
    read(in, "default_app", c.default_app);
    read(in, "strict", c.strict);
  }
  read(j, "run_root", c.run_root);
  if (j.contains("split")) {
    const json& s = j.at("split");
    check_keys(s, "split", {"train_days", "valid_days", "test_days"});
    read(s, "train_days", c.split.train_days);
    read(s, "valid_days", c.split.valid_days);
    read(s, "test_days", c.split.test_days);
  }
  if (j.contains("group_by")) {
    const auto g = j.at("group_by").get<std::string>();
    if (g == "app") {
      c.group_by = GroupBy::kApp;
    } else if (g == "actor") {
      c.group_by = GroupBy::kActor;
    } else {
      throw ConfigError("group_by must be \"app\" or \"actor\"");
    }
  }
  if (j.contains("filter")) {
    const json& f = j.at("filter");
    check_keys(f, "filter", {"allow_actors", "deny_actors", "deny_path_prefixes"});
    read(f, "allow_actors", c.filter.allow_actors);
    read(f, "deny_actors", c.filter.deny_actors);
    read(f, "deny_path_prefixes", c.filter.deny_path_prefixes);
  }
  if (j.contains("extractor")) {
    const json& e = j.at("extractor");
    check_keys(e, "extractor", {"rare_threshold", "theta", "use_word_list"});
    read(e, "rare_threshold", c.extractor.rare_threshold);
    read(e, "theta", c.extractor.theta);
    read(e, "use_word_list", c.extractor.use_word_list);
  }
  if (j.contains("window")) {
    const json& w = j.at("window");
    check_keys(w, "window", {"size", "train_stride", "target_mode", "mask_rate"});
    read(w, "size", c.window_size);
    read(w, "train_stride", c.train_stride);
    if (w.contains("target_mode")) c.target_mode = parse_target_mode(w.at("target_mode").get<std::string>());
    read(w, "mask_rate", c.mask_rate);
  }
  if (j.contains("model")) read_model(j.at("model"), c.model);
  if (j.contains("train")) read_train(j.at("train"), c.train);
  if (j.contains("evaluate")) read_evaluate(j.at("evaluate"), c.evaluate);
  if (j.contains("synth")) {
    const json& s = j.at("synth");
    check_keys(s, "synth", {"days", "events_per_day"});
    read(s, "days", c.synth.days);
    read(s, "events_per_day", c.synth.events_per_day);
  }
  c.model.seed = c.seed;
  c.train.seed = c.seed;
  c.validate();
  return c;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::filesystem::path run_directory(const RunConfig& config) {
  std::filesystem::path root = config.run_root;
  if (root.empty()) {
    const char* env = std::getenv("WEBSEQ_RUN_ROOT");
    root = env && *env ? env : "runs";
  }
  return root / config.fingerprint();
}

}  // namespace webseq
