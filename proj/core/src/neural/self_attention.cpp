// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/neural/self_attention.hpp"

#include <cmath>
#include <string>

#include "webseq/errors.hpp"
#include "webseq/neural/ops.hpp"

namespace webseq::nn {

namespace {

constexpr double kEmbeddingStddev = 0.5;
constexpr double kRowSumTolerance = 1e-6;

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

void add_bias(Matrix& m, const Matrix& bias) { m.rowwise() += bias.row(0); }

}  // namespace

struct SelfAttentionModel::BlockCache {
  Matrix input;
  Matrix q, k, v;
  std::vector<Matrix> probs;  // one per head
  Matrix heads;               // concatenated head outputs
  Matrix drop1;
  LayerNormCache ln1;
  Matrix x1;
  Matrix ff_pre, ff_act;
  Matrix drop2;
  LayerNormCache ln2;
};

struct SelfAttentionModel::Pass {
  Matrix drop0;
  std::vector<BlockCache> blocks;
  Matrix output;
};

SelfAttentionModel::SelfAttentionModel(const ModelConfig& config) : SequenceModel(config) {
  const auto d = idx(config_.d_model);
  const auto hw = idx(config_.resolved_head_width() * config_.heads);
  const auto ff = idx(config_.resolved_ff_width());
  const auto vocab = idx(config_.vocab_size);

  event_table_ = params_.add("embed.event", vocab, d, false);
  position_table_ = params_.add("embed.position", idx(config_.max_window), d, false);
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const std::string p = "block" + std::to_string(l) + ".";
    Block b{};
    b.wq = params_.add(p + "wq", d, hw, true);
    b.bq = params_.add(p + "bq", 1, hw, false);
    b.wk = params_.add(p + "wk", d, hw, true);
    b.bk = params_.add(p + "bk", 1, hw, false);
    b.wv = params_.add(p + "wv", d, hw, true);
    b.bv = params_.add(p + "bv", 1, hw, false);
    b.wo = params_.add(p + "wo", hw, d, true);
    b.bo = params_.add(p + "bo", 1, d, false);
    b.ln1_g = params_.add(p + "ln1.gamma", 1, d, false);
    b.ln1_b = params_.add(p + "ln1.beta", 1, d, false);
    b.w1 = params_.add(p + "ff.w1", d, ff, true);
    b.b1 = params_.add(p + "ff.b1", 1, ff, false);
    b.w2 = params_.add(p + "ff.w2", ff, d, true);
    b.b2 = params_.add(p + "ff.b2", 1, d, false);
    b.ln2_g = params_.add(p + "ln2.gamma", 1, d, false);
    b.ln2_b = params_.add(p + "ln2.beta", 1, d, false);
    blocks_.push_back(b);
  }
  out_w_ = params_.add("out.w", d, vocab, true);
  out_b_ = params_.add("out.b", 1, vocab, false);

  Rng rng(Rng::derive(config_.seed, 0xa77e));
  fill_normal(params_[event_table_], kEmbeddingStddev, rng);
  fill_normal(params_[position_table_], kEmbeddingStddev, rng);
  for (const Block& b : blocks_) {
    for (std::size_t slot : {b.wq, b.wk, b.wv, b.wo, b.w1, b.w2}) fill_xavier(params_[slot], rng);
    params_[b.ln1_g].setOnes();
    params_[b.ln2_g].setOnes();
  }
  fill_xavier(params_[out_w_], rng);
  params_.round_to_float();
}

std::unique_ptr<SequenceModel> SelfAttentionModel::clone() const {
  return std::make_unique<SelfAttentionModel>(*this);
}

Matrix SelfAttentionModel::embed(std::span<const EventId> ids) const {
  check_input(ids, {});
  const Matrix& events = params_[event_table_];
  const Matrix& positions = params_[position_table_];
  Matrix out(idx(ids.size()), events.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.row(idx(i)) = events.row(idx(ids[i])) + positions.row(idx(i));
  }
  return out;
}

void SelfAttentionModel::encode(std::span<const EventId> ids, Rng* dropout_rng, Pass& pass) const {
  const double rate = dropout_rng ? config_.dropout : 0.0;
  const std::size_t heads = config_.heads;
  const auto dk = idx(config_.resolved_head_width());
  const double scale = std::sqrt(static_cast<double>(dk));

  Matrix x = embed(ids);
  if (rate > 0.0) {
    pass.drop0 = dropout_mask(x.rows(), x.cols(), rate, *dropout_rng);
    x = x.cwiseProduct(pass.drop0);
  }
  pass.blocks.resize(blocks_.size());
  for (std::size_t l = 0; l < blocks_.size(); ++l) {
    const Block& b = blocks_[l];
    BlockCache& c = pass.blocks[l];
    c.input = x;
    c.q = x * params_[b.wq];
    add_bias(c.q, params_[b.bq]);
    c.k = x * params_[b.wk];
    add_bias(c.k, params_[b.bk]);
    c.v = x * params_[b.wv];
    add_bias(c.v, params_[b.bv]);
    c.heads.resize(x.rows(), c.q.cols());
    c.probs.resize(heads);
    for (std::size_t h = 0; h < heads; ++h) {
      const auto col = idx(h) * dk;
      c.probs[h] = softmax_rows((c.q.middleCols(col, dk) * c.k.middleCols(col, dk).transpose()) / scale);
      if (max_row_sum_deviation(c.probs[h]) > kRowSumTolerance) {
        throw ContractError("attention weights in block " + std::to_string(l) +
                            " do not sum to one");
      }
      c.heads.middleCols(col, dk) = c.probs[h] * c.v.middleCols(col, dk);
    }
    Matrix attn = c.heads * params_[b.wo];
    add_bias(attn, params_[b.bo]);
    if (rate > 0.0) {
      c.drop1 = dropout_mask(attn.rows(), attn.cols(), rate, *dropout_rng);
      attn = attn.cwiseProduct(c.drop1);
    }
    c.x1 = layer_norm(x + attn, params_[b.ln1_g], params_[b.ln1_b], c.ln1);

    c.ff_pre = c.x1 * params_[b.w1];
    add_bias(c.ff_pre, params_[b.b1]);
    c.ff_act = gelu(c.ff_pre);
    Matrix ff = c.ff_act * params_[b.w2];
    add_bias(ff, params_[b.b2]);
    if (rate > 0.0) {
      c.drop2 = dropout_mask(ff.rows(), ff.cols(), rate, *dropout_rng);
      ff = ff.cwiseProduct(c.drop2);
    }
    x = layer_norm(c.x1 + ff, params_[b.ln2_g], params_[b.ln2_b], c.ln2);
  }
  pass.output = std::move(x);
}

Matrix SelfAttentionModel::logits(std::span<const EventId> ids,
                                  std::span<const std::size_t> queries) const {
  check_input(ids, queries);
  Pass pass;
  encode(ids, nullptr, pass);
  Matrix rows(idx(queries.size()), pass.output.cols());
  for (std::size_t i = 0; i < queries.size(); ++i) rows.row(idx(i)) = pass.output.row(idx(queries[i]));
  Matrix out = rows * params_[out_w_];
  add_bias(out, params_[out_b_]);
  return out;
}

std::vector<Matrix> SelfAttentionModel::attention_maps(std::span<const EventId> ids) const {
  Pass pass;
  encode(ids, nullptr, pass);
  std::vector<Matrix> maps;
  for (auto& block : pass.blocks) {
    for (auto& p : block.probs) maps.push_back(std::move(p));
  }
  return maps;
}

double SelfAttentionModel::loss(std::span<const EventId> ids, std::span<const std::size_t> queries,
                                std::span<const EventId> targets, Rng* dropout_rng,
                                TensorSet* grads, double weight) const {
  check_input(ids, queries);
  if (targets.size() != queries.size()) throw ShapeError("one target per query expected");
  Pass pass;
  encode(ids, dropout_rng, pass);

  Matrix rows(idx(queries.size()), pass.output.cols());
  for (std::size_t i = 0; i < queries.size(); ++i) rows.row(idx(i)) = pass.output.row(idx(queries[i]));
  Matrix z = rows * params_[out_w_];
  add_bias(z, params_[out_b_]);
  const std::vector<std::size_t> tgt(targets.begin(), targets.end());
  Matrix dz;
  const double total = cross_entropy(z, tgt, grads ? &dz : nullptr);
  if (!grads) return total;

  TensorSet& g = *grads;
  dz *= weight;
  g[out_w_] += rows.transpose() * dz;
  g[out_b_] += dz.colwise().sum();
  const Matrix drows = dz * params_[out_w_].transpose();
  Matrix dx = Matrix::Zero(pass.output.rows(), pass.output.cols());
  for (std::size_t i = 0; i < queries.size(); ++i) dx.row(idx(queries[i])) += drows.row(idx(i));

  const std::size_t heads = config_.heads;
  const auto dk = idx(config_.resolved_head_width());
  const double scale = std::sqrt(static_cast<double>(dk));
  const bool dropped = dropout_rng && config_.dropout > 0.0;

  for (std::size_t l = blocks_.size(); l-- > 0;) {
    const Block& b = blocks_[l];
    const BlockCache& c = pass.blocks[l];

    // Feed-forward sublayer.
    const Matrix dy2 = layer_norm_backward(dx, params_[b.ln2_g], c.ln2, g[b.ln2_g], g[b.ln2_b]);
    Matrix dx1 = dy2;
    const Matrix dff = dropped ? Matrix(dy2.cwiseProduct(c.drop2)) : dy2;
    g[b.w2] += c.ff_act.transpose() * dff;
    g[b.b2] += dff.colwise().sum();
    const Matrix dpre = (dff * params_[b.w2].transpose()).cwiseProduct(gelu_derivative(c.ff_pre));
    g[b.w1] += c.x1.transpose() * dpre;
    g[b.b1] += dpre.colwise().sum();
    dx1 += dpre * params_[b.w1].transpose();

    // Attention sublayer.
    const Matrix dy1 = layer_norm_backward(dx1, params_[b.ln1_g], c.ln1, g[b.ln1_g], g[b.ln1_b]);
    dx = dy1;
    const Matrix dattn = dropped ? Matrix(dy1.cwiseProduct(c.drop1)) : dy1;
    g[b.wo] += c.heads.transpose() * dattn;
    g[b.bo] += dattn.colwise().sum();
    const Matrix dheads = dattn * params_[b.wo].transpose();
    Matrix dq(c.q.rows(), c.q.cols());
    Matrix dk_(c.k.rows(), c.k.cols());
    Matrix dv(c.v.rows(), c.v.cols());
    for (std::size_t h = 0; h < heads; ++h) {
      const auto col = idx(h) * dk;
      const auto dout = dheads.middleCols(col, dk);
      const Matrix dprobs = dout * c.v.middleCols(col, dk).transpose();
      dv.middleCols(col, dk) = c.probs[h].transpose() * dout;
      const Matrix dscore = softmax_rows_backward(c.probs[h], dprobs) / scale;
      dq.middleCols(col, dk) = dscore * c.k.middleCols(col, dk);
      dk_.middleCols(col, dk) = dscore.transpose() * c.q.middleCols(col, dk);
    }
    g[b.wq] += c.input.transpose() * dq;
    g[b.bq] += dq.colwise().sum();
    g[b.wk] += c.input.transpose() * dk_;
    g[b.bk] += dk_.colwise().sum();
    g[b.wv] += c.input.transpose() * dv;
    g[b.bv] += dv.colwise().sum();
    dx += dq * params_[b.wq].transpose() + dk_ * params_[b.wk].transpose() +
          dv * params_[b.wv].transpose();
  }

  if (dropped) dx = dx.cwiseProduct(pass.drop0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    g[event_table_].row(idx(ids[i])) += dx.row(idx(i));
    g[position_table_].row(idx(i)) += dx.row(idx(i));
  }
  return total;
}

}  // namespace webseq::nn
