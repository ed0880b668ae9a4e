/*
 * Copyright 2026 The erpvis Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "erpvis/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "erpvis/error.hpp"
#include "erpvis/random.hpp"

namespace erpvis {
namespace {

using Eigen::ArrayXXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

ArrayXXd Sigmoid(const ArrayXXd& x) { return 1.0 / (1.0 + (-x).exp()); }

void FillUniform(MatrixView m, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  // Column-major fill order is part of the seeded layout.
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
  }
}

void CheckTarget(int target, Eigen::Index classes) {
  if (target < 0 || target >= classes) {
    throw DomainError("target class " + std::to_string(target) + " outside [0, " +
                      std::to_string(classes) + ")");
  }
}

}  // namespace

void LstmHyper::Validate() const {
  if (input_size < 1 || hidden_size < 1 || num_layers < 1 || repr_dim < 1) {
    throw ParameterError("LSTM sizes must be >= 1");
  }
  if (num_classes < 2) throw ParameterError("LSTM head needs at least 2 classes");
}

ParameterLayout::ParameterLayout(const LstmHyper& hyper) {
  hyper.Validate();
  const int h = hyper.hidden_size;
  std::size_t offset = 0;
  auto take = [&offset](int rows, int cols) {
    ParamBlock block{offset, rows, cols};
    offset += block.size();
    return block;
  };
  for (int l = 0; l < hyper.num_layers; ++l) {
    const int in = l == 0 ? hyper.input_size : h;
    Layer layer;
    layer.wx = take(4 * h, in);
    layer.wh = take(4 * h, h);
    layer.b = take(4 * h, 1);
    layers_.push_back(layer);
  }
  wp_ = take(hyper.repr_dim, h);
  bp_ = take(hyper.repr_dim, 1);
  wy_ = take(hyper.num_classes, hyper.repr_dim);
  by_ = take(hyper.num_classes, 1);
  size_ = offset;
}

ParameterSet::ParameterSet(const LstmHyper& hyper)
    : hyper_(hyper), layout_(hyper), values_(VectorXd::Zero(static_cast<Eigen::Index>(layout_.size()))) {}

MatrixView ParameterSet::View(const ParamBlock& block) {
  return {values_.data() + block.offset, block.rows, block.cols};
}

ConstMatrixView ParameterSet::View(const ParamBlock& block) const {
  return {values_.data() + block.offset, block.rows, block.cols};
}

LstmModel LstmModel::Zeros(const LstmHyper& hyper) { return LstmModel(hyper); }

LstmModel LstmModel::Initialize(const LstmHyper& hyper, std::uint64_t seed) {
  LstmModel model(hyper);
  auto rng = MakeEngine(seed, {kTagInit});
  const int h = hyper.hidden_size;
  const double bound = 1.0 / std::sqrt(static_cast<double>(h));
  for (int l = 0; l < hyper.num_layers; ++l) {
    FillUniform(model.Wx(l), bound, rng);
    FillUniform(model.Wh(l), bound, rng);
    auto b = model.Bias(l);
    b.setZero();
    b.block(h, 0, h, 1).setConstant(1.0);
  }
  FillUniform(model.Wp(), bound, rng);
  model.Bp().setZero();
  FillUniform(model.Wy(), 1.0 / std::sqrt(static_cast<double>(hyper.repr_dim)), rng);
  model.By().setZero();
  return model;
}

std::uint64_t LstmModel::Fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  const int dims[] = {hyper_.input_size, hyper_.hidden_size, hyper_.num_layers, hyper_.repr_dim,
                      hyper_.num_classes};
  mix(dims, sizeof dims);
  mix(values_.data(), sizeof(double) * static_cast<std::size_t>(values_.size()));
  return h;
}

Eigen::VectorXd ForwardTrace::Hidden(int layer, int t, int b) const {
  return layers.at(static_cast<std::size_t>(layer)).hidden.col((t + 1) * batch + b);
}

Eigen::VectorXd ForwardTrace::Cell(int layer, int t, int b) const {
  return layers.at(static_cast<std::size_t>(layer)).cells.col((t + 1) * batch + b);
}

Eigen::MatrixXd PackBatch(std::span<const SignalMatrix* const> inputs) {
  if (inputs.empty()) throw DimensionError("empty batch");
  const auto C = inputs.front()->rows();
  const auto T = inputs.front()->cols();
  const auto B = static_cast<Eigen::Index>(inputs.size());
  MatrixXd packed(C, T * B);
  for (Eigen::Index b = 0; b < B; ++b) {
    const SignalMatrix& x = *inputs[static_cast<std::size_t>(b)];
    if (x.rows() != C || x.cols() != T) throw DimensionError("batch inputs differ in shape");
    for (Eigen::Index t = 0; t < T; ++t) packed.col(t * B + b) = x.col(t).cast<double>();
  }
  return packed;
}

Eigen::MatrixXd PackBatch(std::span<const Eigen::MatrixXd> inputs) {
  if (inputs.empty()) throw DimensionError("empty batch");
  const auto C = inputs.front().rows();
  const auto T = inputs.front().cols();
  const auto B = static_cast<Eigen::Index>(inputs.size());
  MatrixXd packed(C, T * B);
  for (Eigen::Index b = 0; b < B; ++b) {
    const MatrixXd& x = inputs[static_cast<std::size_t>(b)];
    if (x.rows() != C || x.cols() != T) throw DimensionError("batch inputs differ in shape");
    for (Eigen::Index t = 0; t < T; ++t) packed.col(t * B + b) = x.col(t);
  }
  return packed;
}

ForwardTrace ForwardPacked(const LstmModel& model, Eigen::MatrixXd packed, int batch, int steps) {
  const auto& hp = model.hyper();
  if (batch < 1 || steps < 1) throw DimensionError("batch and steps must be >= 1");
  if (packed.rows() != hp.input_size) {
    throw DimensionError("input has " + std::to_string(packed.rows()) + " channels, model expects " +
                         std::to_string(hp.input_size));
  }
  if (packed.cols() != static_cast<Eigen::Index>(batch) * steps) {
    throw DimensionError("packed input width does not equal steps * batch");
  }
  if (!packed.allFinite()) throw DomainError("input contains non-finite values");

  const int h = hp.hidden_size;
  const int B = batch;
  const int T = steps;
  ForwardTrace tr;
  tr.batch = B;
  tr.steps = T;
  tr.input = std::move(packed);
  tr.model_fingerprint = model.Fingerprint();
  tr.layers.resize(static_cast<std::size_t>(hp.num_layers));

  for (int l = 0; l < hp.num_layers; ++l) {
    LayerTrace& lt = tr.layers[static_cast<std::size_t>(l)];
    const auto Wx = model.Wx(l);
    const auto Wh = model.Wh(l);
    const auto bias = model.Bias(l);
    const auto in = l == 0 ? tr.input.middleCols(0, T * B)
                           : tr.layers[static_cast<std::size_t>(l - 1)].hidden.middleCols(B, T * B);

    lt.gates.noalias() = Wx * in;
    lt.gates.colwise() += bias.col(0);
    lt.cells = MatrixXd::Zero(h, (T + 1) * B);
    lt.hidden = MatrixXd::Zero(h, (T + 1) * B);

    for (int t = 0; t < T; ++t) {
      auto pre = lt.gates.middleCols(t * B, B);
      pre.noalias() += Wh * lt.hidden.middleCols(t * B, B);
      pre.topRows(3 * h) = Sigmoid(pre.topRows(3 * h).array()).matrix();
      pre.bottomRows(h) = pre.bottomRows(h).array().tanh().matrix();
      const auto i = pre.topRows(h).array();
      const auto f = pre.middleRows(h, h).array();
      const auto o = pre.middleRows(2 * h, h).array();
      const auto g = pre.bottomRows(h).array();
      lt.cells.middleCols((t + 1) * B, B) =
          (f * lt.cells.middleCols(t * B, B).array() + i * g).matrix();
      lt.hidden.middleCols((t + 1) * B, B) =
          (o * lt.cells.middleCols((t + 1) * B, B).array().tanh()).matrix();
    }
  }

  const auto top = tr.layers.back().hidden.middleCols(T * B, B);
  tr.repr_pre.noalias() = model.Wp() * top;
  tr.repr_pre.colwise() += model.Bp().col(0);
  tr.repr = tr.repr_pre.cwiseMax(0.0);
  tr.logits.noalias() = model.Wy() * tr.repr;
  tr.logits.colwise() += model.By().col(0);
  tr.probs.resize(tr.logits.rows(), B);
  for (int b = 0; b < B; ++b) tr.probs.col(b) = Softmax(tr.logits.col(b));
  return tr;
}

ForwardTrace Forward(const LstmModel& model, const Eigen::MatrixXd& x) {
  return ForwardPacked(model, x, 1, static_cast<int>(x.cols()));
}

Eigen::VectorXd Softmax(const Eigen::VectorXd& logits) {
  const double shift = logits.maxCoeff();
  VectorXd e = (logits.array() - shift).exp().matrix();
  return e / e.sum();
}

const char* ToString(LossVariant v) {
  return v == LossVariant::kPerClassBinary ? "eq2" : "categorical";
}

LossVariant ParseLossVariant(const std::string& token) {
  if (token == "categorical") return LossVariant::kCategorical;
  if (token == "eq2") return LossVariant::kPerClassBinary;
  throw ParameterError("unknown loss variant '" + token + "' (expected categorical or eq2)");
}

double Loss(const Eigen::VectorXd& p, const Eigen::VectorXd& q, LossVariant variant) {
  if (p.size() != q.size() || q.size() == 0) throw DomainError("p and q must have equal, non-zero length");
  if (!q.allFinite() || q.minCoeff() < 0.0 || q.maxCoeff() > 1.0) {
    throw DomainError("q entries must lie in [0, 1]");
  }
  if (std::abs(q.sum() - 1.0) > 1e-9) throw DomainError("q must sum to 1");
  int hot = -1;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p(k) == 1.0) {
      if (hot >= 0) throw DomainError("p must be one-hot");
      hot = static_cast<int>(k);
    } else if (p(k) != 0.0) {
      throw DomainError("p must be one-hot");
    }
  }
  if (hot < 0) throw DomainError("p must be one-hot");
  return Loss(hot, q, variant);
}

double Loss(int target, const Eigen::VectorXd& q, LossVariant variant) {
  CheckTarget(target, q.size());
  auto clip = [](double v) { return std::clamp(v, kLogClip, 1.0 - kLogClip); };
  if (variant == LossVariant::kCategorical) return -std::log(clip(q(target)));
  double total = 0.0;
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    // 0 * log(0) terms are dropped rather than evaluated.
    total -= k == target ? std::log(clip(q(k))) : std::log(1.0 - clip(q(k)));
  }
  return total;
}

Eigen::VectorXd LogitGradient(int target, const Eigen::VectorXd& q, LossVariant variant) {
  CheckTarget(target, q.size());
  if (variant == LossVariant::kCategorical) {
    VectorXd d = q;
    d(target) -= 1.0;
    return d;
  }
  // dL/dq, then through the softmax Jacobian: dz_k = q_k (g_k - q . g).
  VectorXd g(q.size());
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    const bool clipped = q(k) < kLogClip || q(k) > 1.0 - kLogClip;
    if (clipped) {
      g(k) = 0.0;
    } else {
      g(k) = k == target ? -1.0 / q(k) : 1.0 / (1.0 - q(k));
    }
  }
  const double dot = q.dot(g);
  return (q.array() * (g.array() - dot)).matrix();
}

Gradients Backward(const LstmModel& model, const ForwardTrace& tr, std::span<const int> targets,
                   LossVariant variant) {
  if (tr.model_fingerprint != model.Fingerprint()) {
    throw ConsistencyError("forward trace was produced by a different model state");
  }
  if (static_cast<int>(targets.size()) != tr.batch) {
    throw ConsistencyError("got " + std::to_string(targets.size()) + " targets for a batch of " +
                           std::to_string(tr.batch));
  }
  const auto& hp = model.hyper();
  if (static_cast<int>(tr.layers.size()) != hp.num_layers || tr.probs.rows() != hp.num_classes) {
    throw ConsistencyError("trace shape does not match the model");
  }

  const int h = hp.hidden_size;
  const int B = tr.batch;
  const int T = tr.steps;
  Gradients grad(hp);

  MatrixXd dz(hp.num_classes, B);
  for (int b = 0; b < B; ++b) {
    dz.col(b) = LogitGradient(targets[static_cast<std::size_t>(b)], tr.probs.col(b), variant);
  }
  grad.Wy().noalias() += dz * tr.repr.transpose();
  grad.By().col(0) += dz.rowwise().sum();
  MatrixXd da = (model.Wy().transpose() * dz).array() * (tr.repr_pre.array() > 0.0).cast<double>();
  const auto top = tr.layers.back().hidden.middleCols(T * B, B);
  grad.Wp().noalias() += da * top.transpose();
  grad.Bp().col(0) += da.rowwise().sum();
  const MatrixXd dh_top = model.Wp().transpose() * da;

  // Gradient arriving at each layer's hidden outputs from above, h x (T * B).
  MatrixXd dh_external;
  for (int l = hp.num_layers - 1; l >= 0; --l) {
    const LayerTrace& lt = tr.layers[static_cast<std::size_t>(l)];
    const auto Wh = model.Wh(l);
    MatrixXd dgates(4 * h, T * B);
    MatrixXd dh_next = MatrixXd::Zero(h, B);
    MatrixXd dc_next = MatrixXd::Zero(h, B);

    for (int t = T - 1; t >= 0; --t) {
      MatrixXd dh = dh_next;
      if (l == hp.num_layers - 1) {
        if (t == T - 1) dh += dh_top;
      } else {
        dh += dh_external.middleCols(t * B, B);
      }
      const auto gates = lt.gates.middleCols(t * B, B);
      const auto i = gates.topRows(h).array();
      const auto f = gates.middleRows(h, h).array();
      const auto o = gates.middleRows(2 * h, h).array();
      const auto g = gates.bottomRows(h).array();
      const auto c_prev = lt.cells.middleCols(t * B, B).array();
      const Eigen::ArrayXXd tc = lt.cells.middleCols((t + 1) * B, B).array().tanh();

      const Eigen::ArrayXXd dc = dc_next.array() + dh.array() * o * (1.0 - tc.square());
      auto dg_block = dgates.middleCols(t * B, B);
      dg_block.topRows(h) = (dc * g * i * (1.0 - i)).matrix();
      dg_block.middleRows(h, h) = (dc * c_prev * f * (1.0 - f)).matrix();
      dg_block.middleRows(2 * h, h) = (dh.array() * tc * o * (1.0 - o)).matrix();
      dg_block.bottomRows(h) = (dc * i * (1.0 - g.square())).matrix();
      dc_next = (dc * f).matrix();
      dh_next.noalias() = Wh.transpose() * dg_block;
    }

    const auto in = l == 0 ? tr.input.middleCols(0, T * B)
                           : tr.layers[static_cast<std::size_t>(l - 1)].hidden.middleCols(B, T * B);
    grad.Wx(l).noalias() += dgates * in.transpose();
    grad.Wh(l).noalias() += dgates * lt.hidden.middleCols(0, T * B).transpose();
    grad.Bias(l).col(0) += dgates.rowwise().sum();
    if (l > 0) dh_external = model.Wx(l).transpose() * dgates;
  }
  return grad;
}

double ExampleLoss(const LstmModel& model, const Eigen::MatrixXd& x, int target, LossVariant variant) {
  const ForwardTrace tr = Forward(model, x);
  return Loss(target, tr.probs.col(0), variant);
}

Eigen::VectorXd NumericGradient(const LstmModel& model, const Eigen::MatrixXd& x, int target,
                                double eps, LossVariant variant) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("finite-difference step must be positive");
  LstmModel probe = model;
  VectorXd numeric(static_cast<Eigen::Index>(model.size()));
  for (Eigen::Index k = 0; k < numeric.size(); ++k) {
    const double saved = probe.values()(k);
    probe.values()(k) = saved + eps;
    const double plus = ExampleLoss(probe, x, target, variant);
    probe.values()(k) = saved - eps;
    const double minus = ExampleLoss(probe, x, target, variant);
    probe.values()(k) = saved;
    numeric(k) = (plus - minus) / (2.0 * eps);
  }
  return numeric;
}

double MaxRelativeError(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric) {
  if (analytic.size() != numeric.size()) throw DimensionError("gradient sizes differ");
  double worst = 0.0;
  for (Eigen::Index k = 0; k < analytic.size(); ++k) {
    const double a = analytic(k);
    const double n = numeric(k);
    const double denom = std::max({std::abs(a), std::abs(n), 1e-8});
    worst = std::max(worst, std::abs(a - n) / denom);
  }
  return worst;
}

double GradCheck(const LstmModel& model, const Eigen::MatrixXd& x, int target, double eps,
                 LossVariant variant) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("finite-difference step must be positive");
  const ForwardTrace tr = Forward(model, x);
  const int targets[] = {target};
  const Gradients analytic = Backward(model, tr, targets, variant);
  return MaxRelativeError(analytic.values(), NumericGradient(model, x, target, eps, variant));
}

}  // namespace erpvis
