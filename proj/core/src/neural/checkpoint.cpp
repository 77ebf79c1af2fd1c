// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/neural/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "webseq/errors.hpp"
#include "webseq/hash.hpp"

namespace webseq::nn {

namespace {

using nlohmann::json;

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_string(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void read_exact(std::istream& in, char* dst, std::size_t n) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw IoError("checkpoint is truncated");
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  read_exact(in, reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  read_exact(in, reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::string get_string(std::istream& in, std::uint64_t limit = 1ull << 32) {
  const std::uint64_t n = get_u64(in);
  if (n > limit) throw IoError("checkpoint string length out of range");
  std::string s(n, '\0');
  if (n) read_exact(in, s.data(), n);
  return s;
}

json config_to_json(const ModelConfig& c) {
  return json{{"kind", std::string(model_kind_name(c.kind))},
              {"vocab_size", c.vocab_size},
              {"d_model", c.d_model},
              {"max_window", c.max_window},
              {"layers", c.layers},
              {"heads", c.heads},
              {"head_width", c.head_width},
              {"ff_width", c.ff_width},
              {"lstm_layers", c.lstm_layers},
              {"hidden", c.hidden},
              {"dropout", c.dropout},
              {"attention_width", c.attention_width},
              {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.kind = parse_model_kind(j.at("kind").get<std::string>());
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.d_model = j.at("d_model").get<std::size_t>();
  c.max_window = j.at("max_window").get<std::size_t>();
  c.layers = j.at("layers").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.head_width = j.at("head_width").get<std::size_t>();
  c.ff_width = j.at("ff_width").get<std::size_t>();
  c.lstm_layers = j.at("lstm_layers").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.attention_width = j.at("attention_width").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

std::string metadata_to_json(const CheckpointMetadata& m) {
  json j{{"model", m.model},
         {"vocab_fingerprint", hex64(m.vocab_fingerprint)},
         {"seed", m.seed},
         {"window_size", m.window_size},
         {"target_mode", std::string(target_mode_name(m.target_mode))},
         {"pretrained", m.pretrained},
         {"train_loss", m.train_loss},
         {"valid_loss", m.valid_loss}};
  if (m.config) j["config"] = config_to_json(*m.config);
  return j.dump();
}

CheckpointMetadata metadata_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    CheckpointMetadata m;
    m.model = j.at("model").get<std::string>();
    m.vocab_fingerprint = std::stoull(j.at("vocab_fingerprint").get<std::string>(), nullptr, 16);
    m.seed = j.at("seed").get<std::uint64_t>();
    m.window_size = j.at("window_size").get<std::size_t>();
    m.target_mode = parse_target_mode(j.at("target_mode").get<std::string>());
    m.pretrained = j.at("pretrained").get<bool>();
    m.train_loss = j.at("train_loss").get<std::vector<double>>();
    m.valid_loss = j.at("valid_loss").get<std::vector<double>>();
    if (j.contains("config")) m.config = config_from_json(j.at("config"));
    return m;
  } catch (const json::exception& e) {
    throw IoError(std::string("checkpoint metadata is malformed: ") + e.what());
  }
}

void check_vocab(const CheckpointMetadata& m, std::optional<std::uint64_t> expected) {
  if (expected && *expected != m.vocab_fingerprint) {
    throw CompatibilityError("checkpoint was trained on vocabulary " + hex64(m.vocab_fingerprint) +
                             " but the current vocabulary is " + hex64(*expected));
  }
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  put_string(out, metadata_to_json(ck.metadata));
  put_u32(out, static_cast<std::uint32_t>(ck.tensors.size()));
  for (std::size_t s = 0; s < ck.tensors.size(); ++s) {
    const Matrix& m = ck.tensors[s];
    put_string(out, ck.tensors.name(s));
    put_u32(out, ck.tensors.decays(s) ? 1 : 0);
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(m.data()[i])));
    }
  }
  put_u32(out, static_cast<std::uint32_t>(ck.blobs.size()));
  for (const auto& [name, text] : ck.blobs) {
    put_string(out, name);
    put_string(out, text);
  }
  if (!out) throw IoError("failed to write checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[sizeof kCheckpointMagic];
  read_exact(in, magic, sizeof magic);
  if (std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw IoError("not a webseq checkpoint");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kCheckpointVersion) {
    throw CompatibilityError("checkpoint version " + std::to_string(version) +
                             " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  Checkpoint ck;
  ck.metadata = metadata_from_json(get_string(in));
  const std::uint32_t tensors = get_u32(in);
  for (std::uint32_t t = 0; t < tensors; ++t) {
    std::string name = get_string(in, 4096);
    const bool decay = get_u32(in) != 0;
    const std::uint64_t rows = get_u64(in);
    const std::uint64_t cols = get_u64(in);
    if (rows > (1u << 24) || cols > (1u << 24) || rows * cols > (1ull << 32)) {
      throw IoError("checkpoint tensor " + name + " has implausible shape");
    }
    const std::size_t slot = ck.tensors.add(std::move(name), static_cast<Eigen::Index>(rows),
                                            static_cast<Eigen::Index>(cols), decay);
    Matrix& m = ck.tensors[slot];
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = static_cast<double>(std::bit_cast<float>(get_u32(in)));
    }
  }
  const std::uint32_t blobs = get_u32(in);
  for (std::uint32_t b = 0; b < blobs; ++b) {
    std::string name = get_string(in, 4096);
    ck.blobs[std::move(name)] = get_string(in);
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    write_checkpoint(out, checkpoint);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

Checkpoint make_checkpoint(const SequenceModel& model, CheckpointMetadata metadata) {
  Checkpoint ck;
  metadata.model = std::string(model_kind_name(model.kind()));
  metadata.config = model.config();
  metadata.pretrained = model.pretrained;
  ck.metadata = std::move(metadata);
  ck.tensors = model.parameters();
  return ck;
}

Checkpoint make_checkpoint(const TransitionTable& table, CheckpointMetadata metadata) {
  Checkpoint ck;
  metadata.config.reset();
  ck.metadata = std::move(metadata);
  std::ostringstream text;
  table.save(text);
  ck.blobs["transition_table"] = text.str();
  return ck;
}

std::unique_ptr<SequenceModel> restore_model(const Checkpoint& ck,
                                             std::optional<std::uint64_t> expected_vocab) {
  check_vocab(ck.metadata, expected_vocab);
  if (!ck.metadata.config) throw CompatibilityError("checkpoint does not hold a neural model");
  auto model = make_model(*ck.metadata.config);
  if (!model->parameters().same_layout(ck.tensors)) {
    throw CompatibilityError("checkpoint tensors do not match the " + ck.metadata.model +
                             " architecture");
  }
  for (std::size_t s = 0; s < ck.tensors.size(); ++s) model->parameters()[s] = ck.tensors[s];
  model->pretrained = ck.metadata.pretrained;
  return model;
}

TransitionTable restore_table(const Checkpoint& ck, std::optional<std::uint64_t> expected_vocab) {
  check_vocab(ck.metadata, expected_vocab);
  const auto it = ck.blobs.find("transition_table");
  if (it == ck.blobs.end()) throw CompatibilityError("checkpoint does not hold a transition table");
  std::istringstream in(it->second);
  return TransitionTable::load(in);
}

}  // namespace webseq::nn
