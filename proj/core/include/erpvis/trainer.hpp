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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "erpvis/erp.hpp"
#include "erpvis/lstm.hpp"

namespace erpvis {

enum class LabelKind { kCategory, kExemplar };
enum class InputKind { kErp, kRawTrial };

const char* ToString(LabelKind kind);
const char* ToString(InputKind kind);
LabelKind ParseLabelKind(const std::string& token);  // "category" | "exemplar"
InputKind ParseInputKind(const std::string& token);  // "erp" | "raw"

int LabelOf(const ERPSequence& seq, LabelKind kind);
int NumClasses(const ERPSpace& space, LabelKind kind);

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::optional<double> grad_clip_norm = 5.0;
  LabelKind label_kind = LabelKind::kCategory;
  InputKind input_kind = InputKind::kErp;
  LossVariant loss = LossVariant::kCategorical;
  std::uint64_t seed = 1;
  int threads = 1;

  void Validate() const;  // ConfigError
  nlohmann::json ToJson() const;
};

// Adam with bias correction over a flat parameter vector.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t size, double learning_rate, double beta1, double beta2, double eps);
  void Step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

// Scales grad in place so its L2 norm is at most max_norm; returns the norm
// before clipping.
double ClipGlobalNorm(Eigen::VectorXd& grad, double max_norm);

struct TrainResult {
  LstmModel model;
  std::vector<double> loss_curve;  // mean per-example loss of each epoch
};

// Mini-batch Adam. Every epoch reshuffles with a stream derived from
// (seed, epoch). Batches are split into fixed-size chunks whose gradients are
// summed in chunk order, so results do not depend on cfg.threads. Throws
// TrainingError on a non-finite loss or gradient.
TrainResult Train(LstmModel model, const ERPSpace& train_set, const TrainConfig& cfg);

// Index of the largest entry; ties go to the lowest index.
int ArgmaxLowestIndex(const Eigen::VectorXd& v);

std::vector<Eigen::VectorXd> PredictProbabilities(const LstmModel& model, const ERPSpace& set,
                                                  int threads = 1);

struct EvalReport {
  std::string protocol = "cross_subject";  // or "within_subject"
  std::optional<int> subject_id;
  LabelKind label_kind = LabelKind::kCategory;
  InputKind input_kind = InputKind::kErp;
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;  // rows: true class, columns: predicted class
  int n_train = 0;
  int n_test = 0;
  nlohmann::json config = nlohmann::json::object();
};

// Argmax prediction over the softmax output. Throws EvaluationError for an
// empty set, a shape mismatch or labels outside the model's classes.
EvalReport Evaluate(const LstmModel& model, const ERPSpace& test_set, LabelKind label_kind,
                    int threads = 1);

nlohmann::json ToJson(const EvalReport& report);

}  // namespace erpvis
