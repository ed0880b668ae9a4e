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

#include "erpvis/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "erpvis/error.hpp"
#include "erpvis/log.hpp"
#include "erpvis/parallel.hpp"
#include "erpvis/random.hpp"

namespace erpvis {
namespace {

// Gradient reduction granularity. Fixed so that the summation order, and
// therefore every bit of the result, is independent of the thread count.
constexpr std::size_t kChunk = 16;
constexpr std::size_t kPredictChunk = 64;

struct ChunkResult {
  Eigen::VectorXd grad;
  double loss = 0.0;
};

ChunkResult RunChunk(const LstmModel& model, const ERPSpace& set, std::span<const std::size_t> idx,
                     const TrainConfig& cfg) {
  std::vector<const SignalMatrix*> inputs;
  std::vector<int> targets;
  inputs.reserve(idx.size());
  targets.reserve(idx.size());
  for (auto i : idx) {
    inputs.push_back(&set.sequences[i].data);
    targets.push_back(LabelOf(set.sequences[i], cfg.label_kind));
  }
  const int B = static_cast<int>(idx.size());
  const ForwardTrace tr = ForwardPacked(model, PackBatch(inputs), B, set.sample_count);
  ChunkResult out;
  for (int b = 0; b < B; ++b) out.loss += Loss(targets[static_cast<std::size_t>(b)], tr.probs.col(b), cfg.loss);
  out.grad = std::move(Backward(model, tr, targets, cfg.loss).values());
  return out;
}

}  // namespace

const char* ToString(LabelKind kind) { return kind == LabelKind::kExemplar ? "exemplar" : "category"; }
const char* ToString(InputKind kind) { return kind == InputKind::kRawTrial ? "raw" : "erp"; }

LabelKind ParseLabelKind(const std::string& token) {
  if (token == "category") return LabelKind::kCategory;
  if (token == "exemplar") return LabelKind::kExemplar;
  throw ParameterError("unknown label kind '" + token + "' (expected category or exemplar)");
}

InputKind ParseInputKind(const std::string& token) {
  if (token == "erp") return InputKind::kErp;
  if (token == "raw") return InputKind::kRawTrial;
  throw ParameterError("unknown input kind '" + token + "' (expected erp or raw)");
}

int LabelOf(const ERPSequence& seq, LabelKind kind) {
  return kind == LabelKind::kExemplar ? seq.exemplar_id : seq.category_id;
}

int NumClasses(const ERPSpace& space, LabelKind kind) {
  return kind == LabelKind::kExemplar ? space.n_exemplars() : space.n_categories();
}

void TrainConfig::Validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be > 0");
  if (grad_clip_norm && !(*grad_clip_norm > 0.0)) throw ConfigError("grad_clip_norm must be > 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"epochs", epochs},
          {"batch_size", batch_size},
          {"learning_rate", learning_rate},
          {"adam_beta1", adam_beta1},
          {"adam_beta2", adam_beta2},
          {"adam_eps", adam_eps},
          {"grad_clip_norm", grad_clip_norm ? nlohmann::json(*grad_clip_norm) : nlohmann::json()},
          {"label_kind", ToString(label_kind)},
          {"input_kind", ToString(input_kind)},
          {"loss", ToString(loss)},
          {"seed", seed}};
}

AdamOptimizer::AdamOptimizer(std::size_t size, double learning_rate, double beta1, double beta2,
                             double eps)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))),
      v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size))) {}

void AdamOptimizer::Step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

double ClipGlobalNorm(Eigen::VectorXd& grad, double max_norm) {
  const double norm = grad.norm();
  if (norm > max_norm) grad *= max_norm / norm;
  return norm;
}

TrainResult Train(LstmModel model, const ERPSpace& train_set, const TrainConfig& cfg) {
  cfg.Validate();
  if (train_set.sequences.empty()) throw TrainingError("training set is empty");
  const auto& hp = model.hyper();
  if (hp.input_size != train_set.channel_count) {
    throw TrainingError("model expects " + std::to_string(hp.input_size) + " channels, data has " +
                        std::to_string(train_set.channel_count));
  }
  for (const auto& s : train_set.sequences) {
    const int label = LabelOf(s, cfg.label_kind);
    if (label >= hp.num_classes) {
      throw TrainingError(std::string(ToString(cfg.label_kind)) + " label " + std::to_string(label) +
                          " exceeds the model's " + std::to_string(hp.num_classes) + " classes");
    }
  }

  const std::size_t n = train_set.sequences.size();
  AdamOptimizer adam(model.size(), cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  TrainResult result{std::move(model), {}};
  LstmModel& m = result.model;
  std::vector<std::size_t> order(n);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    auto rng = MakeEngine(cfg.seed, {kTagShuffle, static_cast<std::uint64_t>(epoch)});
    SeededShuffle(order, rng);

    double epoch_loss = 0.0;
    int batch_index = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      const std::span<const std::size_t> batch(order.data() + start, stop - start);
      const std::size_t n_chunks = (batch.size() + kChunk - 1) / kChunk;
      std::vector<ChunkResult> chunks(n_chunks);
      try {
        ParallelFor(n_chunks, cfg.threads, [&](std::size_t c) {
          const std::size_t lo = c * kChunk;
          chunks[c] = RunChunk(m, train_set, batch.subspan(lo, std::min(kChunk, batch.size() - lo)), cfg);
        });
      } catch (const DomainError& e) {
        throw TrainingError(std::string(e.what()) + " at epoch " + std::to_string(epoch + 1) + ", batch " +
                            std::to_string(batch_index + 1));
      }

      Eigen::VectorXd grad = std::move(chunks.front().grad);
      double loss = chunks.front().loss;
      for (std::size_t c = 1; c < n_chunks; ++c) {
        grad += chunks[c].grad;
        loss += chunks[c].loss;
      }
      grad /= static_cast<double>(batch.size());
      if (!std::isfinite(loss) || !grad.allFinite()) {
        throw TrainingError("training diverged: non-finite loss or gradient at epoch " +
                            std::to_string(epoch + 1) + ", batch " + std::to_string(batch_index + 1));
      }
      if (cfg.grad_clip_norm) ClipGlobalNorm(grad, *cfg.grad_clip_norm);
      adam.Step(m.values(), grad);
      epoch_loss += loss;
    }
    result.loss_curve.push_back(epoch_loss / static_cast<double>(n));
    std::ostringstream msg;
    msg << "epoch " << (epoch + 1) << "/" << cfg.epochs << " loss " << result.loss_curve.back();
    log::Debug(msg.str());
  }
  return result;
}

int ArgmaxLowestIndex(const Eigen::VectorXd& v) {
  int best = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    if (v(k) > v(best)) best = static_cast<int>(k);
  }
  return best;
}

std::vector<Eigen::VectorXd> PredictProbabilities(const LstmModel& model, const ERPSpace& set,
                                                  int threads) {
  const std::size_t n = set.sequences.size();
  std::vector<Eigen::VectorXd> probs(n);
  const std::size_t n_chunks = (n + kPredictChunk - 1) / kPredictChunk;
  ParallelFor(n_chunks, threads, [&](std::size_t c) {
    const std::size_t lo = c * kPredictChunk;
    const std::size_t hi = std::min(n, lo + kPredictChunk);
    std::vector<const SignalMatrix*> inputs;
    for (std::size_t i = lo; i < hi; ++i) inputs.push_back(&set.sequences[i].data);
    const ForwardTrace tr =
        ForwardPacked(model, PackBatch(inputs), static_cast<int>(hi - lo), set.sample_count);
    for (std::size_t i = lo; i < hi; ++i) probs[i] = tr.probs.col(static_cast<Eigen::Index>(i - lo));
  });
  return probs;
}

EvalReport Evaluate(const LstmModel& model, const ERPSpace& test_set, LabelKind label_kind,
                    int threads) {
  if (test_set.sequences.empty()) throw EvaluationError("test set is empty");
  const auto& hp = model.hyper();
  if (hp.input_size != test_set.channel_count) {
    throw EvaluationError("model expects " + std::to_string(hp.input_size) + " channels, data has " +
                          std::to_string(test_set.channel_count));
  }
  const int K = hp.num_classes;
  const int space_classes = NumClasses(test_set, label_kind);
  if (space_classes != K) {
    throw EvaluationError("label space has " + std::to_string(space_classes) + " " +
                          ToString(label_kind) + " classes but the model has " + std::to_string(K));
  }

  EvalReport report;
  report.label_kind = label_kind;
  report.confusion = Eigen::MatrixXi::Zero(K, K);
  const auto probs = PredictProbabilities(model, test_set, threads);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const int truth = LabelOf(test_set.sequences[i], label_kind);
    if (truth < 0 || truth >= K) throw EvaluationError("label outside the model's classes");
    ++report.confusion(truth, ArgmaxLowestIndex(probs[i]));
  }
  report.n_test = static_cast<int>(probs.size());
  report.accuracy = static_cast<double>(report.confusion.trace()) / report.n_test;
  return report;
}

nlohmann::json ToJson(const EvalReport& report) {
  nlohmann::json confusion = nlohmann::json::array();
  for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
    std::vector<int> row(static_cast<std::size_t>(report.confusion.cols()));
    for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) row[static_cast<std::size_t>(c)] = report.confusion(r, c);
    confusion.push_back(row);
  }
  nlohmann::json out = {{"protocol", report.protocol},
                        {"label_kind", ToString(report.label_kind)},
                        {"input_kind", ToString(report.input_kind)},
                        {"accuracy", report.accuracy},
                        {"n_train", report.n_train},
                        {"n_test", report.n_test},
                        {"confusion", confusion},
                        {"config", report.config}};
  if (report.subject_id) out["subject_id"] = *report.subject_id;
  return out;
}

}  // namespace erpvis
