// Copyright 2026 The webseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "webseq/neural/recurrent.hpp"

#include <cmath>
#include <string>

#include "webseq/errors.hpp"
#include "webseq/neural/ops.hpp"

namespace webseq::nn {

namespace {

constexpr double kEmbeddingStddev = 0.5;

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

struct RecurrentModel::Pass {
  std::vector<Matrix> inputs;  // input to each layer
  std::vector<DirectionCache> fwd, bwd;
  std::vector<Matrix> drops;
  Matrix output;  // n x 2h after the last layer (and its dropout)
  Matrix att_pre;  // tanh(H Wa + ba)
  RowVector alpha;
  RowVector context;
};

RecurrentModel::RecurrentModel(const ModelConfig& config) : SequenceModel(config) {
  const auto d = idx(config_.d_model);
  const auto h = idx(config_.hidden);
  const auto vocab = idx(config_.vocab_size);

  embedding_ = params_.add("embed.event", vocab, d, false);
  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    const auto in = l == 0 ? d : 2 * h;
    for (const char* dir : {"fwd", "bwd"}) {
      const std::string p = "lstm" + std::to_string(l) + "." + dir + ".";
      Direction D{};
      D.wx = params_.add(p + "wx", in, 4 * h, true);
      D.wh = params_.add(p + "wh", h, 4 * h, true);
      D.b = params_.add(p + "b", 1, 4 * h, false);
      (std::string(dir) == "fwd" ? forward_ : backward_).push_back(D);
    }
  }
  Eigen::Index readout_width = 2 * h;
  if (attentive()) {
    const auto a = idx(config_.resolved_attention_width());
    att_w_ = params_.add("attn.w", 2 * h, a, true);
    att_b_ = params_.add("attn.b", 1, a, false);
    att_v_ = params_.add("attn.v", a, 1, true);
    readout_width = 4 * h;
  }
  out_w_ = params_.add("out.w", readout_width, vocab, true);
  out_b_ = params_.add("out.b", 1, vocab, false);

  Rng rng(Rng::derive(config_.seed, 0x1517));
  fill_normal(params_[embedding_], kEmbeddingStddev, rng);
  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    for (const Direction* D : {&forward_[l], &backward_[l]}) {
      fill_xavier(params_[D->wx], rng);
      fill_xavier(params_[D->wh], rng);
      params_[D->b].middleCols(h, h).setOnes();  // forget gate
    }
  }
  if (attentive()) {
    fill_xavier(params_[att_w_], rng);
    fill_xavier(params_[att_v_], rng);
  }
  fill_xavier(params_[out_w_], rng);
  params_.round_to_float();
}

std::unique_ptr<SequenceModel> RecurrentModel::clone() const {
  return std::make_unique<RecurrentModel>(*this);
}

RecurrentModel::DirectionCache RecurrentModel::run_direction(const Matrix& input, const Direction& dir,
                                                             bool reverse) const {
  const auto n = input.rows();
  const auto h = idx(config_.hidden);
  const Matrix pre = input * params_[dir.wx];
  const Matrix& wh = params_[dir.wh];
  const Matrix& bias = params_[dir.b];
  DirectionCache c;
  c.gates.resize(n, 4 * h);
  c.cells.resize(n, h);
  c.hidden.resize(n, h);
  RowVector hprev = RowVector::Zero(h);
  RowVector cprev = RowVector::Zero(h);
  for (Eigen::Index s = 0; s < n; ++s) {
    const Eigen::Index t = reverse ? n - 1 - s : s;
    RowVector z = pre.row(t) + hprev * wh + bias.row(0);
    for (Eigen::Index j = 0; j < h; ++j) {
      z(j) = sigmoid(z(j));
      z(h + j) = sigmoid(z(h + j));
      z(2 * h + j) = std::tanh(z(2 * h + j));
      z(3 * h + j) = sigmoid(z(3 * h + j));
    }
    const RowVector cell = z.segment(h, h).cwiseProduct(cprev) +
                           z.segment(0, h).cwiseProduct(z.segment(2 * h, h));
    const RowVector hid = z.segment(3 * h, h).cwiseProduct(cell.array().tanh().matrix());
    c.gates.row(t) = z;
    c.cells.row(t) = cell;
    c.hidden.row(t) = hid;
    hprev = hid;
    cprev = cell;
  }
  return c;
}

Matrix RecurrentModel::backward_direction(const Matrix& input, const Direction& dir, bool reverse,
                                          const DirectionCache& c, const Matrix& dhidden,
                                          TensorSet& g) const {
  const auto n = input.rows();
  const auto h = idx(config_.hidden);
  const Matrix& wh = params_[dir.wh];
  Matrix dz(n, 4 * h);
  RowVector dh_next = RowVector::Zero(h);
  RowVector dc_next = RowVector::Zero(h);
  for (Eigen::Index s = n; s-- > 0;) {
    const Eigen::Index t = reverse ? n - 1 - s : s;
    const Eigen::Index prev = reverse ? t + 1 : t - 1;
    const bool has_prev = s > 0;
    const auto gates = c.gates.row(t);
    const RowVector tanh_c = c.cells.row(t).array().tanh().matrix();
    const RowVector dh = dhidden.row(t) + dh_next;
    const RowVector dc = dc_next + dh.cwiseProduct(gates.segment(3 * h, h))
                                       .cwiseProduct((1.0 - tanh_c.array().square()).matrix());
    const RowVector cprev = has_prev ? RowVector(c.cells.row(prev)) : RowVector::Zero(h);
    for (Eigen::Index j = 0; j < h; ++j) {
      const double i = gates(j), f = gates(h + j), gg = gates(2 * h + j), o = gates(3 * h + j);
      dz(t, j) = dc(j) * gg * i * (1.0 - i);
      dz(t, h + j) = dc(j) * cprev(j) * f * (1.0 - f);
      dz(t, 2 * h + j) = dc(j) * i * (1.0 - gg * gg);
      dz(t, 3 * h + j) = dh(j) * tanh_c(j) * o * (1.0 - o);
    }
    dc_next = dc.cwiseProduct(gates.segment(h, h));
    dh_next = dz.row(t) * wh.transpose();
    if (has_prev) g[dir.wh] += c.hidden.row(prev).transpose() * dz.row(t);
  }
  g[dir.wx] += input.transpose() * dz;
  g[dir.b] += dz.colwise().sum();
  return dz * params_[dir.wx].transpose();
}

void RecurrentModel::encode(std::span<const EventId> ids, Rng* dropout_rng, Pass& pass) const {
  const double rate = dropout_rng ? config_.dropout : 0.0;
  const auto h = idx(config_.hidden);
  Matrix x(idx(ids.size()), idx(config_.d_model));
  for (std::size_t i = 0; i < ids.size(); ++i) x.row(idx(i)) = params_[embedding_].row(idx(ids[i]));

  const std::size_t layers = config_.lstm_layers;
  pass.inputs.resize(layers);
  pass.fwd.resize(layers);
  pass.bwd.resize(layers);
  pass.drops.assign(layers, Matrix());
  for (std::size_t l = 0; l < layers; ++l) {
    pass.inputs[l] = x;
    pass.fwd[l] = run_direction(x, forward_[l], false);
    pass.bwd[l] = run_direction(x, backward_[l], true);
    x.resize(x.rows(), 2 * h);
    x.leftCols(h) = pass.fwd[l].hidden;
    x.rightCols(h) = pass.bwd[l].hidden;
    if (rate > 0.0) {
      pass.drops[l] = dropout_mask(x.rows(), x.cols(), rate, *dropout_rng);
      x = x.cwiseProduct(pass.drops[l]);
    }
  }
  pass.output = std::move(x);

  if (attentive()) {
    Matrix pre = pass.output * params_[att_w_];
    pre.rowwise() += params_[att_b_].row(0);
    pass.att_pre = pre.array().tanh().matrix();
    const Matrix scores = (pass.att_pre * params_[att_v_]).transpose();  // 1 x n
    pass.alpha = softmax_rows(scores).row(0);
    pass.context = pass.alpha * pass.output;
  }
}

Matrix RecurrentModel::readout(const Pass& pass, std::span<const std::size_t> queries) const {
  const auto width = pass.output.cols();
  Matrix rows(idx(queries.size()), attentive() ? 2 * width : width);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (attentive()) {
      rows.row(idx(i)).head(width) = pass.context;
      rows.row(idx(i)).tail(width) = pass.output.row(idx(queries[i]));
    } else {
      rows.row(idx(i)) = pass.output.row(idx(queries[i]));
    }
  }
  return rows;
}

Matrix RecurrentModel::logits(std::span<const EventId> ids, std::span<const std::size_t> queries) const {
  check_input(ids, queries);
  Pass pass;
  encode(ids, nullptr, pass);
  Matrix out = readout(pass, queries) * params_[out_w_];
  out.rowwise() += params_[out_b_].row(0);
  return out;
}

RowVector RecurrentModel::attention_weights(std::span<const EventId> ids) const {
  if (!attentive()) return RowVector();
  check_input(ids, {});
  Pass pass;
  encode(ids, nullptr, pass);
  return pass.alpha;
}

double RecurrentModel::loss(std::span<const EventId> ids, std::span<const std::size_t> queries,
                            std::span<const EventId> targets, Rng* dropout_rng, TensorSet* grads,
                            double weight) const {
  check_input(ids, queries);
  if (targets.size() != queries.size()) throw ShapeError("one target per query expected");
  Pass pass;
  encode(ids, dropout_rng, pass);
  const Matrix rows = readout(pass, queries);
  Matrix z = rows * params_[out_w_];
  z.rowwise() += params_[out_b_].row(0);
  const std::vector<std::size_t> tgt(targets.begin(), targets.end());
  Matrix dz;
  const double total = cross_entropy(z, tgt, grads ? &dz : nullptr);
  if (!grads) return total;

  TensorSet& g = *grads;
  dz *= weight;
  g[out_w_] += rows.transpose() * dz;
  g[out_b_] += dz.colwise().sum();
  const Matrix drows = dz * params_[out_w_].transpose();
  const auto width = pass.output.cols();
  Matrix dout = Matrix::Zero(pass.output.rows(), width);
  if (attentive()) {
    const RowVector dcontext = drows.leftCols(width).colwise().sum();
    for (std::size_t i = 0; i < queries.size(); ++i) {
      dout.row(idx(queries[i])) += drows.row(idx(i)).tail(width);
    }
    // context = alpha * H
    dout += pass.alpha.transpose() * dcontext;
    const Matrix dalpha = dcontext * pass.output.transpose();  // 1 x n
    const Matrix alpha = pass.alpha;
    const Matrix dscores = softmax_rows_backward(alpha, dalpha);  // 1 x n
    g[att_v_] += pass.att_pre.transpose() * dscores.transpose();
    const Matrix dpre = (dscores.transpose() * params_[att_v_].transpose())
                            .cwiseProduct((1.0 - pass.att_pre.array().square()).matrix());
    g[att_w_] += pass.output.transpose() * dpre;
    g[att_b_] += dpre.colwise().sum();
    dout += dpre * params_[att_w_].transpose();
  } else {
    for (std::size_t i = 0; i < queries.size(); ++i) dout.row(idx(queries[i])) += drows.row(idx(i));
  }

  const auto h = idx(config_.hidden);
  const bool dropped = dropout_rng && config_.dropout > 0.0;
  for (std::size_t l = config_.lstm_layers; l-- > 0;) {
    if (dropped) dout = dout.cwiseProduct(pass.drops[l]);
    const Matrix dfh = dout.leftCols(h);
    const Matrix dbh = dout.rightCols(h);
    Matrix din = backward_direction(pass.inputs[l], forward_[l], false, pass.fwd[l], dfh, g);
    din += backward_direction(pass.inputs[l], backward_[l], true, pass.bwd[l], dbh, g);
    dout = std::move(din);
  }
  for (std::size_t i = 0; i < ids.size(); ++i) g[embedding_].row(idx(ids[i])) += dout.row(idx(i));
  return total;
}

}  // namespace webseq::nn
