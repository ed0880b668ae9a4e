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

#include <json.hpp>

#include "erpvis/eeg_data.hpp"
#include "erpvis/erp.hpp"
#include "erpvis/trainer.hpp"

namespace erpvis {

enum class Protocol { kCrossSubject, kWithinSubject };

const char* ToString(Protocol protocol);
Protocol ParseProtocol(const std::string& token);  // "cross" | "within"

// Everything needed to go from a trial dataset to a trained, evaluated
// model. The run seed drives partitioning, splitting, initialisation and
// shuffling through separate streams.
struct PipelineConfig {
  int n_average = 12;  // forced to 1 for raw-trial input
  int train_parts = 5;
  int test_parts = 1;
  int hidden_size = 128;
  int num_layers = 1;
  int repr_dim = 128;
  TrainConfig train;  // label_kind / input_kind / seed are set per run
  std::uint64_t seed = 1;
  int threads = 1;

  void Validate() const;
  nlohmann::json ToJson() const;
};

// A prepared split ready for training.
struct PreparedSplit {
  ERPSpace train;
  ERPSpace test;
  int averaging = 1;
  int train_per_image = 0;
};

// Builds the ERP space (n = n_average, or 1 for raw input) and splits it
// train_parts:test_parts per image. Asserts that no (subject, exemplar,
// sequence) appears on both sides (ConsistencyError otherwise).
PreparedSplit PrepareSplit(const Dataset& ds, InputKind input_kind, const PipelineConfig& cfg,
                           std::uint64_t seed, int threads);

// Fails with ConsistencyError when train and test share a sequence.
void AssertNoLeakage(const ERPSpace& train, const ERPSpace& test);

// Trains one model on `split.train` and evaluates on `split.test`.
EvalReport TrainAndEvaluate(const PreparedSplit& split, LabelKind label_kind, InputKind input_kind,
                            const PipelineConfig& cfg, std::uint64_t seed, int threads);

struct ProtocolResult {
  Protocol protocol = Protocol::kCrossSubject;
  LabelKind label_kind = LabelKind::kCategory;
  InputKind input_kind = InputKind::kErp;
  std::vector<EvalReport> reports;  // one, or one per subject
  double mean_accuracy = 0.0;
};

// cross_subject: one ERP space over all subjects (averaged within subject,
// then pooled), one model, one report. within_subject: an independent space,
// split and model per subject with seed + subject_id; subjects run in
// parallel when cfg.threads > 1.
ProtocolResult RunProtocol(const Dataset& ds, Protocol protocol, LabelKind label_kind,
                           InputKind input_kind, const PipelineConfig& cfg);

struct ComparisonRow {
  std::string protocol;  // "cross_subject", "within_subject:<id>", "within_subject:mean"
  LabelKind label_kind = LabelKind::kCategory;
  std::string framework;  // "EEG-LSTM" (raw trials) or "ERP-LSTM"
  double accuracy = 0.0;
  std::optional<double> improvement;  // ERP-LSTM minus EEG-LSTM, same protocol
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::vector<std::string> footnotes;
  nlohmann::json config = nlohmann::json::object();
};

// Runs the raw-trial baseline and the ERP pipeline with identical
// hyperparameters and seeds for each (protocol, label kind).
ComparisonTable CompareFrameworks(const Dataset& ds, const std::vector<Protocol>& protocols,
                                  const std::vector<LabelKind>& label_kinds,
                                  const PipelineConfig& cfg);

}  // namespace erpvis
