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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "erpvis/erp.hpp"
#include "erpvis/error.hpp"
#include "erpvis/trainer.hpp"
#include "support.hpp"

using namespace erpvis;
using erpvis::testing::TinyConfig;
using Eigen::VectorXd;

namespace {

ERPSpace TinySpace(std::uint64_t seed = 3, bool noiseless = false) {
  SynthConfig cfg = TinyConfig(seed);
  cfg.disable_noise = noiseless;
  return BuildErpSpace(GenerateSyntheticDataset(cfg), 4, 1);
}

TrainConfig QuickConfig(int epochs = 3) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 8;
  cfg.learning_rate = 1e-2;
  return cfg;
}

LstmHyper HyperFor(const ERPSpace& s, LabelKind kind) {
  return {s.channel_count, 6, 1, 5, NumClasses(s, kind)};
}

double Mean(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  return std::accumulate(v.begin() + static_cast<long>(lo), v.begin() + static_cast<long>(hi), 0.0) /
         static_cast<double>(hi - lo);
}

}  // namespace

TEST_CASE("training is deterministic for a fixed seed and any thread count") {
  const ERPSpace space = TinySpace();
  const LstmModel init = LstmModel::Initialize(HyperFor(space, LabelKind::kCategory), 2);
  TrainConfig cfg = QuickConfig();
  cfg.batch_size = 24;  // two gradient chunks per batch
  const TrainResult a = Train(init, space, cfg);
  const TrainResult b = Train(init, space, cfg);
  cfg.threads = 3;
  const TrainResult c = Train(init, space, cfg);
  CHECK(a.loss_curve == b.loss_curve);
  CHECK(a.model.values() == b.model.values());
  CHECK(a.loss_curve == c.loss_curve);
  CHECK(a.model.values() == c.model.values());
  REQUIRE(a.loss_curve.size() == 3u);

  cfg.threads = 1;
  cfg.seed = 2;
  CHECK(Train(init, space, cfg).model.values() != a.model.values());
}

TEST_CASE("a single example is memorised") {
  ERPSpace one = TinySpace();
  one.sequences.resize(1);
  one.exemplar_to_category = BlockedCategoryMap(6, 1);
  one.sequences[0].category_id = 4;
  one.sequences[0].exemplar_id = 4;
  const LstmModel init = LstmModel::Initialize({one.channel_count, 8, 1, 8, 6}, 1);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 1;
  cfg.learning_rate = 1e-2;
  const TrainResult r = Train(init, one, cfg);
  CHECK(r.loss_curve.back() < 0.01);
  const EvalReport rep = Evaluate(r.model, one, LabelKind::kCategory);
  CHECK(rep.accuracy == 1.0);
}

TEST_CASE("loss trends down on noiseless data") {
  const ERPSpace space = TinySpace(4, true);
  const LstmModel init = LstmModel::Initialize(HyperFor(space, LabelKind::kCategory), 1);
  const TrainResult r = Train(init, space, QuickConfig(30));
  const auto& c = r.loss_curve;
  CHECK(c.front() >= c.back());
  for (std::size_t w = 5; w + 5 <= c.size(); w += 5) CHECK(Mean(c, w, w + 5) <= Mean(c, w - 5, w));
}

TEST_CASE("training errors") {
  const ERPSpace space = TinySpace();
  const LstmModel init = LstmModel::Initialize(HyperFor(space, LabelKind::kCategory), 1);

  SUBCASE("non-finite input reports the epoch") {
    ERPSpace bad = space;
    bad.sequences[5].data(0, 0) = std::numeric_limits<float>::quiet_NaN();
    try {
      Train(init, bad, QuickConfig());
      FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
      CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
    }
  }
  SUBCASE("empty training set") {
    CHECK_THROWS_AS(Train(init, space.EmptyLike(), QuickConfig()), TrainingError);
  }
  SUBCASE("labels beyond the model") {
    TrainConfig cfg = QuickConfig();
    cfg.label_kind = LabelKind::kExemplar;
    CHECK_THROWS_AS(Train(init, space, cfg), TrainingError);
  }
  SUBCASE("channel mismatch") {
    const LstmModel wide = LstmModel::Initialize({space.channel_count + 1, 6, 1, 5, 2}, 1);
    CHECK_THROWS_AS(Train(wide, space, QuickConfig()), TrainingError);
  }
  SUBCASE("invalid configuration") {
    TrainConfig cfg = QuickConfig();
    cfg.epochs = 0;
    CHECK_THROWS_AS(Train(init, space, cfg), ConfigError);
    cfg = QuickConfig();
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.Validate(), ConfigError);
    cfg = QuickConfig();
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.Validate(), ConfigError);
    cfg = QuickConfig();
    cfg.grad_clip_norm = -1.0;
    CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  }
}

TEST_CASE("Adam first step moves each parameter by the learning rate") {
  VectorXd params(3);
  params << 1.0, -2.0, 0.5;
  VectorXd grad(3);
  grad << 0.3, -4.0, 0.0;
  AdamOptimizer adam(3, 0.01, 0.9, 0.999, 1e-8);
  adam.Step(params, grad);
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  CHECK(params(0) == doctest::Approx(1.0 - 0.01 * 0.3 / (0.3 + 1e-8)).epsilon(1e-14));
  CHECK(params(1) == doctest::Approx(-2.0 + 0.01 * 4.0 / (4.0 + 1e-8)).epsilon(1e-14));
  CHECK(params(2) == 0.5);
  CHECK(adam.steps() == 1);

  // Second step with the same gradient: bias corrections cancel again.
  adam.Step(params, grad);
  CHECK(params(0) == doctest::Approx(1.0 - 2 * 0.01 * 0.3 / (0.3 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("global norm clipping") {
  VectorXd g(2);
  g << 3.0, 4.0;
  CHECK(ClipGlobalNorm(g, 10.0) == 5.0);
  CHECK(g(0) == 3.0);
  CHECK(ClipGlobalNorm(g, 1.0) == 5.0);
  CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g(1) / g(0) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("uniform outputs tie-break to class 0") {
  CHECK(ArgmaxLowestIndex(VectorXd::Constant(6, 1.0 / 6.0)) == 0);
  VectorXd v(4);
  v << 0.1, 0.4, 0.4, 0.1;
  CHECK(ArgmaxLowestIndex(v) == 1);

  ERPSpace space = BuildErpSpace(GenerateSyntheticDataset(TinyConfig()), 4, 1);
  space.exemplar_to_category = BlockedCategoryMap(6, 1);
  for (auto& s : space.sequences) s.category_id = s.exemplar_id;
  const LstmModel zero = LstmModel::Zeros({space.channel_count, 4, 1, 4, 6});
  const EvalReport rep = Evaluate(zero, space, LabelKind::kCategory);
  CHECK(rep.accuracy == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(rep.confusion.col(0).sum() == rep.n_test);
  CHECK(rep.confusion.sum() == rep.n_test);
  CHECK(rep.n_test == static_cast<int>(space.sequences.size()));
  for (int k = 0; k < 6; ++k) CHECK(rep.confusion.row(k).sum() == rep.n_test / 6);
  CHECK(rep.accuracy == static_cast<double>(rep.confusion.trace()) / rep.n_test);
}

TEST_CASE("perturbed uniform predictions sit at the chance floor") {
  SynthConfig cfg = TinyConfig();
  cfg.n_subjects = 1;
  cfg.n_categories = 6;
  cfg.n_exemplars_per_category = 12;
  cfg.trials_per_image = 8;
  const ERPSpace space = BuildErpSpace(GenerateSyntheticDataset(cfg), 1, 1);
  REQUIRE(space.sequences.size() >= 500u);
  const LstmModel zero = LstmModel::Zeros({space.channel_count, 4, 1, 4, 6});
  const auto probs = PredictProbabilities(zero, space, 2);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1e-9);
  int correct = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    VectorXd p = probs[i];
    for (Eigen::Index k = 0; k < p.size(); ++k) p(k) += u(rng);
    correct += ArgmaxLowestIndex(p) == space.sequences[i].category_id;
  }
  const double acc = static_cast<double>(correct) / static_cast<double>(probs.size());
  CHECK(std::abs(acc - 1.0 / 6.0) <= 0.05);
}

TEST_CASE("evaluation errors") {
  const ERPSpace space = TinySpace();
  const LstmModel m = LstmModel::Initialize(HyperFor(space, LabelKind::kCategory), 1);
  CHECK_THROWS_AS(Evaluate(m, space.EmptyLike(), LabelKind::kCategory), EvaluationError);
  CHECK_THROWS_AS(Evaluate(m, space, LabelKind::kExemplar), EvaluationError);
  const LstmModel wide = LstmModel::Initialize({space.channel_count + 2, 6, 1, 5, 2}, 1);
  CHECK_THROWS_AS(Evaluate(wide, space, LabelKind::kCategory), EvaluationError);
}

TEST_CASE("evaluation report JSON") {
  const ERPSpace space = TinySpace();
  const LstmModel m = LstmModel::Initialize(HyperFor(space, LabelKind::kCategory), 1);
  EvalReport rep = Evaluate(m, space, LabelKind::kCategory, 2);
  CHECK(ToJson(rep) == ToJson(Evaluate(m, space, LabelKind::kCategory, 1)));
  const auto j = ToJson(rep);
  CHECK(j.at("label_kind") == "category");
  CHECK(j.at("n_test") == rep.n_test);
  CHECK(j.at("confusion").size() == 2u);
  CHECK(ParseLabelKind("exemplar") == LabelKind::kExemplar);
  CHECK(ParseInputKind("raw") == InputKind::kRawTrial);
  CHECK_THROWS_AS(ParseLabelKind("scene"), ParameterError);
}
