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

#include <set>

#include "erpvis/error.hpp"
#include "erpvis/protocol.hpp"
#include "support.hpp"

using namespace erpvis;
using erpvis::testing::TinyConfig;

namespace {

// 24 trials per image: n = 4 gives 6 ERPs per image, a clean 5:1 split.
Dataset TinyDataset(std::uint64_t seed = 3) {
  SynthConfig cfg = TinyConfig(seed);
  cfg.trials_per_image = 24;
  return GenerateSyntheticDataset(cfg);
}

PipelineConfig TinyPipeline() {
  PipelineConfig p;
  p.n_average = 4;
  p.hidden_size = 5;
  p.repr_dim = 4;
  p.train.epochs = 2;
  p.train.batch_size = 16;
  p.train.learning_rate = 1e-2;
  p.seed = 7;
  return p;
}

}  // namespace

TEST_CASE("prepared splits have the expected sizes") {
  const Dataset ds = TinyDataset();
  const PipelineConfig cfg = TinyPipeline();
  const PreparedSplit erp = PrepareSplit(ds, InputKind::kErp, cfg, 1, 1);
  CHECK(erp.averaging == 4);
  CHECK(erp.train_per_image == 5);
  CHECK(erp.train.sequences.size() == 2u * 6u * 5u);
  CHECK(erp.test.sequences.size() == 2u * 6u * 1u);

  const PreparedSplit raw = PrepareSplit(ds, InputKind::kRawTrial, cfg, 1, 1);
  CHECK(raw.averaging == 1);
  CHECK(raw.train_per_image == 20);
  CHECK(raw.train.sequences.size() == 2u * 6u * 20u);
  CHECK(raw.test.sequences.size() == 2u * 6u * 4u);
  for (const auto& s : raw.train.sequences) CHECK(s.n_averaged == 1);
}

TEST_CASE("leakage is detected") {
  const PreparedSplit split = PrepareSplit(TinyDataset(), InputKind::kErp, TinyPipeline(), 1, 1);
  CHECK_NOTHROW(AssertNoLeakage(split.train, split.test));
  ERPSpace leaky = split.test;
  leaky.sequences.push_back(split.train.sequences[3]);
  CHECK_THROWS_AS(AssertNoLeakage(split.train, leaky), ConsistencyError);

  std::set<std::tuple<int, int, std::uint32_t>> train_keys;
  for (const auto& s : split.train.sequences) train_keys.insert({s.subject_id, s.exemplar_id, s.sequence_id});
  for (const auto& s : split.test.sequences) CHECK(train_keys.count({s.subject_id, s.exemplar_id, s.sequence_id}) == 0);
}

TEST_CASE("within-subject protocol gives one report per subject") {
  const Dataset ds = TinyDataset();
  PipelineConfig cfg = TinyPipeline();
  const ProtocolResult r = RunProtocol(ds, Protocol::kWithinSubject, LabelKind::kCategory, InputKind::kErp, cfg);
  REQUIRE(r.reports.size() == 2u);
  CHECK(*r.reports[0].subject_id == 1);
  CHECK(*r.reports[1].subject_id == 2);
  for (const auto& rep : r.reports) {
    CHECK(rep.protocol == "within_subject");
    CHECK(rep.n_train == 30);
    CHECK(rep.n_test == 6);
    CHECK(rep.accuracy >= 0.0);
    CHECK(rep.accuracy <= 1.0);
  }
  CHECK(r.mean_accuracy == doctest::Approx((r.reports[0].accuracy + r.reports[1].accuracy) / 2));

  cfg.threads = 2;
  const ProtocolResult par = RunProtocol(ds, Protocol::kWithinSubject, LabelKind::kCategory, InputKind::kErp, cfg);
  for (std::size_t i = 0; i < 2; ++i) CHECK(ToJson(par.reports[i]).dump() == ToJson(r.reports[i]).dump());
}

TEST_CASE("cross-subject on one subject equals within-subject") {
  const Dataset one = SelectSubject(TinyDataset(), 2);
  const PipelineConfig cfg = TinyPipeline();
  const ProtocolResult cross = RunProtocol(one, Protocol::kCrossSubject, LabelKind::kCategory, InputKind::kErp, cfg);
  const ProtocolResult within = RunProtocol(one, Protocol::kWithinSubject, LabelKind::kCategory, InputKind::kErp, cfg);
  REQUIRE(cross.reports.size() == 1u);
  REQUIRE(within.reports.size() == 1u);
  CHECK(cross.reports[0].accuracy == within.reports[0].accuracy);
  CHECK(cross.reports[0].confusion == within.reports[0].confusion);
  CHECK(cross.reports[0].config == within.reports[0].config);
}

TEST_CASE("protocol runs are byte-identical for a fixed seed") {
  const Dataset ds = TinyDataset();
  const PipelineConfig cfg = TinyPipeline();
  const auto a = RunProtocol(ds, Protocol::kCrossSubject, LabelKind::kExemplar, InputKind::kErp, cfg);
  const auto b = RunProtocol(ds, Protocol::kCrossSubject, LabelKind::kExemplar, InputKind::kErp, cfg);
  CHECK(ToJson(a.reports[0]).dump() == ToJson(b.reports[0]).dump());
  CHECK(a.reports[0].confusion.rows() == 6);
  CHECK(a.reports[0].config.at("run_seed") == 7);
}

TEST_CASE("framework comparison rows") {
  const Dataset ds = TinyDataset();
  const ComparisonTable t = CompareFrameworks(ds, {Protocol::kCrossSubject, Protocol::kWithinSubject},
                                              {LabelKind::kCategory}, TinyPipeline());
  // cross pair, two subject pairs and a mean pair
  REQUIRE(t.rows.size() == 8u);
  CHECK(t.rows[0].protocol == "cross_subject");
  CHECK(t.rows[0].framework == "EEG-LSTM");
  CHECK_FALSE(t.rows[0].improvement.has_value());
  CHECK(t.rows[1].framework == "ERP-LSTM");
  REQUIRE(t.rows[1].improvement.has_value());
  CHECK(*t.rows[1].improvement == doctest::Approx(t.rows[1].accuracy - t.rows[0].accuracy));
  CHECK(t.rows[2].protocol == "within_subject:1");
  CHECK(t.rows[6].protocol == "within_subject:mean");
  CHECK(t.rows[7].accuracy == doctest::Approx((t.rows[3].accuracy + t.rows[5].accuracy) / 2));

  const ProtocolResult cross_erp =
      RunProtocol(ds, Protocol::kCrossSubject, LabelKind::kCategory, InputKind::kErp, TinyPipeline());
  CHECK(t.rows[1].accuracy == cross_erp.reports[0].accuracy);

  REQUIRE(t.footnotes.size() == 7u);
  bool found = false;
  for (const auto& f : t.footnotes) found = found || f.find("ERP-LSTM 66.81%") != std::string::npos;
  CHECK(found);
}

TEST_CASE("default-shaped dataset counts") {
  SynthConfig cfg;
  cfg.channels = 2;
  cfg.samples_per_trial = 4;
  const Dataset ds = GenerateSyntheticDataset(cfg);
  REQUIRE(ds.trials.size() == 51840u);
  PipelineConfig p = TinyPipeline();
  p.n_average = 12;
  p.train.epochs = 1;
  p.train.batch_size = 256;

  const auto cross = RunProtocol(ds, Protocol::kCrossSubject, LabelKind::kCategory, InputKind::kErp, p);
  REQUIRE(cross.reports.size() == 1u);
  CHECK(cross.reports[0].n_train == 3600);
  CHECK(cross.reports[0].n_test == 720);

  const auto within = RunProtocol(ds, Protocol::kWithinSubject, LabelKind::kCategory, InputKind::kErp, p);
  REQUIRE(within.reports.size() == 10u);
  for (const auto& r : within.reports) {
    CHECK(r.n_train == 360);
    CHECK(r.n_test == 72);
  }
}

TEST_CASE("pipeline configuration errors") {
  PipelineConfig p = TinyPipeline();
  p.n_average = 0;
  CHECK_THROWS_AS(p.Validate(), ConfigError);
  p = TinyPipeline();
  p.train_parts = 0;
  CHECK_THROWS_AS(p.Validate(), ConfigError);
  CHECK(ParseProtocol("within") == Protocol::kWithinSubject);
  CHECK(std::string(ToString(Protocol::kCrossSubject)) == "cross_subject");
  CHECK_THROWS_AS(ParseProtocol("loso"), ParameterError);

  p = TinyPipeline();
  p.n_average = 5;  // 24 trials per image are not divisible by 5
  CHECK_THROWS_AS(RunProtocol(TinyDataset(), Protocol::kCrossSubject, LabelKind::kCategory, InputKind::kErp, p),
                  PartitionError);
}
