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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "erpvis/eeg_data.hpp"

namespace erpvis {

struct LstmHyper {
  int input_size = 124;   // channels
  int hidden_size = 128;
  int num_layers = 1;
  int repr_dim = 128;
  int num_classes = 6;

  // Throws ParameterError for non-positive sizes or fewer than 2 classes.
  void Validate() const;
  bool operator==(const LstmHyper&) const = default;
};

// Where each parameter tensor lives inside the flat parameter vector. Per
// layer: Wx (4h x in), Wh (4h x h), b (4h), gate rows ordered
// [input; forget; output; candidate]. Then the projection Wp (repr x h), bp,
// and the head Wy (K x repr), by. Matrices are column-major.
struct ParamBlock {
  std::size_t offset = 0;
  int rows = 0;
  int cols = 1;
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

class ParameterLayout {
 public:
  ParameterLayout() = default;
  explicit ParameterLayout(const LstmHyper& hyper);

  const ParamBlock& wx(int layer) const { return layers_.at(static_cast<std::size_t>(layer)).wx; }
  const ParamBlock& wh(int layer) const { return layers_.at(static_cast<std::size_t>(layer)).wh; }
  const ParamBlock& bias(int layer) const { return layers_.at(static_cast<std::size_t>(layer)).b; }
  const ParamBlock& wp() const { return wp_; }
  const ParamBlock& bp() const { return bp_; }
  const ParamBlock& wy() const { return wy_; }
  const ParamBlock& by() const { return by_; }
  std::size_t size() const { return size_; }

 private:
  struct Layer {
    ParamBlock wx, wh, b;
  };
  std::vector<Layer> layers_;
  ParamBlock wp_, bp_, wy_, by_;
  std::size_t size_ = 0;
};

using MatrixView = Eigen::Map<Eigen::MatrixXd>;
using ConstMatrixView = Eigen::Map<const Eigen::MatrixXd>;

// Flat parameter (or gradient) storage with named tensor views.
class ParameterSet {
 public:
  ParameterSet() = default;
  explicit ParameterSet(const LstmHyper& hyper);

  const LstmHyper& hyper() const { return hyper_; }
  const ParameterLayout& layout() const { return layout_; }
  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  MatrixView View(const ParamBlock& block);
  ConstMatrixView View(const ParamBlock& block) const;

  MatrixView Wx(int layer) { return View(layout_.wx(layer)); }
  MatrixView Wh(int layer) { return View(layout_.wh(layer)); }
  MatrixView Bias(int layer) { return View(layout_.bias(layer)); }
  MatrixView Wp() { return View(layout_.wp()); }
  MatrixView Bp() { return View(layout_.bp()); }
  MatrixView Wy() { return View(layout_.wy()); }
  MatrixView By() { return View(layout_.by()); }
  ConstMatrixView Wx(int layer) const { return View(layout_.wx(layer)); }
  ConstMatrixView Wh(int layer) const { return View(layout_.wh(layer)); }
  ConstMatrixView Bias(int layer) const { return View(layout_.bias(layer)); }
  ConstMatrixView Wp() const { return View(layout_.wp()); }
  ConstMatrixView Bp() const { return View(layout_.bp()); }
  ConstMatrixView Wy() const { return View(layout_.wy()); }
  ConstMatrixView By() const { return View(layout_.by()); }

 protected:
  LstmHyper hyper_;
  ParameterLayout layout_;
  Eigen::VectorXd values_;
};

// Stacked LSTM encoder, ReLU projection and softmax head.
class LstmModel : public ParameterSet {
 public:
  using ParameterSet::ParameterSet;

  // Weights uniform in [-1/sqrt(h), 1/sqrt(h)] (head: 1/sqrt(repr_dim)),
  // biases zero except the forget gate at 1.0.
  static LstmModel Initialize(const LstmHyper& hyper, std::uint64_t seed);
  static LstmModel Zeros(const LstmHyper& hyper);

  // Digest of hyperparameters and parameter bits; used to detect stale traces.
  std::uint64_t Fingerprint() const;
};

class Gradients : public ParameterSet {
 public:
  using ParameterSet::ParameterSet;
};

// Activations kept for backpropagation. Columns are time-major within a
// batch: column t * batch + b holds example b at step t.
struct LayerTrace {
  Eigen::MatrixXd gates;   // 4h x (T * B), post-activation [i; f; o; g]
  Eigen::MatrixXd cells;   // h x ((T + 1) * B); block 0 is the zero initial state
  Eigen::MatrixXd hidden;  // h x ((T + 1) * B)
};

struct ForwardTrace {
  int batch = 0;
  int steps = 0;
  Eigen::MatrixXd input;  // in x (T * B)
  std::vector<LayerTrace> layers;
  Eigen::MatrixXd repr_pre;  // repr x B, before ReLU
  Eigen::MatrixXd repr;      // repr x B
  Eigen::MatrixXd logits;    // K x B
  Eigen::MatrixXd probs;     // K x B
  std::uint64_t model_fingerprint = 0;

  // Hidden state of `layer` after step t (0-based) for example b.
  Eigen::VectorXd Hidden(int layer, int t, int b) const;
  Eigen::VectorXd Cell(int layer, int t, int b) const;
};

// Packs c x T inputs into the time-major c x (T * B) layout. All inputs must
// share one shape (DimensionError otherwise).
Eigen::MatrixXd PackBatch(std::span<const SignalMatrix* const> inputs);
Eigen::MatrixXd PackBatch(std::span<const Eigen::MatrixXd> inputs);

// Runs the network on `batch` packed sequences of length `steps`. Initial
// hidden and cell states are zero; the top layer's final hidden state feeds
// the projection. Throws DimensionError on shape mismatch and DomainError for
// non-finite input.
ForwardTrace ForwardPacked(const LstmModel& model, Eigen::MatrixXd packed, int batch, int steps);
ForwardTrace Forward(const LstmModel& model, const Eigen::MatrixXd& x);

// Shift-invariant (max-subtracted) exponential normalisation.
Eigen::VectorXd Softmax(const Eigen::VectorXd& logits);

enum class LossVariant {
  // -sum_x p(x) log q(x)
  kCategorical,
  // -sum_x [p(x) log q(x) + (1 - p(x)) log(1 - q(x))], a per-class binary
  // cross-entropy summed over classes. CLI token "eq2".
  kPerClassBinary,
};

const char* ToString(LossVariant v);
LossVariant ParseLossVariant(const std::string& token);  // ParameterError

inline constexpr double kLogClip = 1e-12;

// Loss against a one-hot target; q is clipped to [1e-12, 1 - 1e-12] inside
// the logarithms. Throws DomainError if q is not a probability vector or p is
// not one-hot.
double Loss(const Eigen::VectorXd& p, const Eigen::VectorXd& q, LossVariant variant);
double Loss(int target, const Eigen::VectorXd& q, LossVariant variant);

// d loss / d logits for one example.
Eigen::VectorXd LogitGradient(int target, const Eigen::VectorXd& q, LossVariant variant);

// Exact gradients of the summed per-example loss over the batch in `trace`,
// by backpropagation through time. Throws ConsistencyError if the trace was
// produced by a different model or the targets do not match the batch.
Gradients Backward(const LstmModel& model, const ForwardTrace& trace,
                   std::span<const int> targets, LossVariant variant);

double ExampleLoss(const LstmModel& model, const Eigen::MatrixXd& x, int target,
                   LossVariant variant);

// Central differences (f(theta + eps) - f(theta - eps)) / 2 eps for every
// parameter.
Eigen::VectorXd NumericGradient(const LstmModel& model, const Eigen::MatrixXd& x, int target,
                                double eps, LossVariant variant);

// max_i |a_i - n_i| / max(|a_i|, |n_i|, 1e-8)
double MaxRelativeError(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric);

// Compares Backward against NumericGradient. Throws ParameterError unless eps
// is positive and finite.
double GradCheck(const LstmModel& model, const Eigen::MatrixXd& x, int target, double eps,
                 LossVariant variant = LossVariant::kCategorical);

}  // namespace erpvis
