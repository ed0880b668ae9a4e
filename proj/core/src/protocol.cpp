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

#include "erpvis/protocol.hpp"

#include <set>
#include <tuple>

#include "erpvis/error.hpp"
#include "erpvis/log.hpp"
#include "erpvis/parallel.hpp"
#include "erpvis/report.hpp"

namespace erpvis {
namespace {

constexpr const char* kBaselineName = "EEG-LSTM";
constexpr const char* kErpName = "ERP-LSTM";

double MeanAccuracy(const std::vector<EvalReport>& reports) {
  double sum = 0.0;
  for (const auto& r : reports) sum += r.accuracy;
  return reports.empty() ? 0.0 : sum / static_cast<double>(reports.size());
}

}  // namespace

const char* ToString(Protocol protocol) {
  return protocol == Protocol::kWithinSubject ? "within_subject" : "cross_subject";
}

Protocol ParseProtocol(const std::string& token) {
  if (token == "cross" || token == "cross_subject") return Protocol::kCrossSubject;
  if (token == "within" || token == "within_subject") return Protocol::kWithinSubject;
  throw ParameterError("unknown protocol '" + token + "' (expected cross or within)");
}

void PipelineConfig::Validate() const {
  if (n_average < 1) throw ConfigError("averaging factor n must be >= 1");
  if (train_parts < 1 || test_parts < 1) throw ConfigError("split ratio parts must be >= 1");
  if (hidden_size < 1 || num_layers < 1 || repr_dim < 1) throw ConfigError("model sizes must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  train.Validate();
}

nlohmann::json PipelineConfig::ToJson() const {
  nlohmann::json t = train.ToJson();
  t.erase("label_kind");
  t.erase("input_kind");
  t.erase("seed");
  return {{"n_average", n_average},
          {"split_ratio", {train_parts, test_parts}},
          {"hidden_size", hidden_size},
          {"num_layers", num_layers},
          {"repr_dim", repr_dim},
          {"train", t},
          {"seed", seed}};
}

void AssertNoLeakage(const ERPSpace& train, const ERPSpace& test) {
  std::set<std::tuple<int, int, std::uint32_t>> seen;
  for (const auto& s : train.sequences) seen.insert({s.subject_id, s.exemplar_id, s.sequence_id});
  for (const auto& s : test.sequences) {
    if (seen.contains({s.subject_id, s.exemplar_id, s.sequence_id})) {
      throw ConsistencyError("test leakage: subject " + std::to_string(s.subject_id) + ", exemplar " +
                             std::to_string(s.exemplar_id) + ", sequence " +
                             std::to_string(s.sequence_id) + " is in both train and test");
    }
  }
}

PreparedSplit PrepareSplit(const Dataset& ds, InputKind input_kind, const PipelineConfig& cfg,
                           std::uint64_t seed, int threads) {
  PreparedSplit out;
  out.averaging = input_kind == InputKind::kRawTrial ? 1 : cfg.n_average;
  const ERPSpace space = BuildErpSpace(ds, out.averaging, seed, threads);
  out.train_per_image = TrainPerImage(UniformGroupSize(space), cfg.train_parts, cfg.test_parts);
  auto [train, test] = SplitErpSpace(space, out.train_per_image, seed);
  AssertNoLeakage(train, test);
  out.train = std::move(train);
  out.test = std::move(test);
  return out;
}

EvalReport TrainAndEvaluate(const PreparedSplit& split, LabelKind label_kind, InputKind input_kind,
                            const PipelineConfig& cfg, std::uint64_t seed, int threads) {
  LstmHyper hyper;
  hyper.input_size = split.train.channel_count;
  hyper.hidden_size = cfg.hidden_size;
  hyper.num_layers = cfg.num_layers;
  hyper.repr_dim = cfg.repr_dim;
  hyper.num_classes = NumClasses(split.train, label_kind);

  TrainConfig tc = cfg.train;
  tc.label_kind = label_kind;
  tc.input_kind = input_kind;
  tc.seed = seed;
  tc.threads = threads;
  TrainResult trained = Train(LstmModel::Initialize(hyper, seed), split.train, tc);

  EvalReport report = Evaluate(trained.model, split.test, label_kind, threads);
  report.input_kind = input_kind;
  report.n_train = static_cast<int>(split.train.sequences.size());
  report.config = cfg.ToJson();
  report.config["run_seed"] = seed;
  report.config["averaging"] = split.averaging;
  report.config["train_per_image"] = split.train_per_image;
  report.config["final_train_loss"] = trained.loss_curve.back();
  return report;
}

ProtocolResult RunProtocol(const Dataset& ds, Protocol protocol, LabelKind label_kind,
                           InputKind input_kind, const PipelineConfig& cfg) {
  cfg.Validate();
  const std::vector<int> subjects = ds.Subjects();
  if (subjects.empty()) throw ConfigError("dataset has no subjects");

  ProtocolResult result;
  result.protocol = protocol;
  result.label_kind = label_kind;
  result.input_kind = input_kind;

  if (protocol == Protocol::kCrossSubject) {
    // A one-subject pool is seeded exactly like that subject's within-subject run.
    const std::uint64_t seed =
        subjects.size() == 1 ? cfg.seed + static_cast<std::uint64_t>(subjects.front()) : cfg.seed;
    const PreparedSplit split = PrepareSplit(ds, input_kind, cfg, seed, cfg.threads);
    EvalReport report = TrainAndEvaluate(split, label_kind, input_kind, cfg, seed, cfg.threads);
    report.protocol = ToString(protocol);
    log::Info(std::string("cross_subject ") + ToString(label_kind) + "/" + ToString(input_kind) +
              " accuracy " + std::to_string(report.accuracy));
    result.reports.push_back(std::move(report));
  } else {
    result.reports.resize(subjects.size());
    const bool outer_parallel = cfg.threads > 1 && subjects.size() > 1;
    const int inner_threads = outer_parallel ? 1 : cfg.threads;
    ParallelFor(subjects.size(), outer_parallel ? cfg.threads : 1, [&](std::size_t i) {
      const int subject = subjects[i];
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(subject);
      const Dataset single = SelectSubject(ds, subject);
      const PreparedSplit split = PrepareSplit(single, input_kind, cfg, seed, inner_threads);
      EvalReport report = TrainAndEvaluate(split, label_kind, input_kind, cfg, seed, inner_threads);
      report.protocol = ToString(protocol);
      report.subject_id = subject;
      result.reports[i] = std::move(report);
    });
    for (const auto& r : result.reports) {
      log::Info(std::string("within_subject ") + std::to_string(*r.subject_id) + " " +
                ToString(label_kind) + "/" + ToString(input_kind) + " accuracy " +
                std::to_string(r.accuracy));
    }
  }
  result.mean_accuracy = MeanAccuracy(result.reports);
  return result;
}

ComparisonTable CompareFrameworks(const Dataset& ds, const std::vector<Protocol>& protocols,
                                  const std::vector<LabelKind>& label_kinds,
                                  const PipelineConfig& cfg) {
  cfg.Validate();
  ComparisonTable table;
  table.config = cfg.ToJson();

  auto add_pair = [&table](const std::string& protocol, LabelKind kind, double raw, double erp) {
    table.rows.push_back({protocol, kind, kBaselineName, raw, std::nullopt});
    table.rows.push_back({protocol, kind, kErpName, erp, erp - raw});
  };

  for (const Protocol protocol : protocols) {
    if (protocol == Protocol::kCrossSubject) {
      // Splits do not depend on the label kind, so they are built once per input kind.
      const auto subjects = ds.Subjects();
      const std::uint64_t seed =
          subjects.size() == 1 ? cfg.seed + static_cast<std::uint64_t>(subjects.front()) : cfg.seed;
      std::vector<double> raw_acc;
      {
        const PreparedSplit raw = PrepareSplit(ds, InputKind::kRawTrial, cfg, seed, cfg.threads);
        for (const LabelKind kind : label_kinds) {
          raw_acc.push_back(TrainAndEvaluate(raw, kind, InputKind::kRawTrial, cfg, seed, cfg.threads).accuracy);
          log::Info(std::string("cross_subject ") + ToString(kind) + " " + kBaselineName + " accuracy " +
                    std::to_string(raw_acc.back()));
        }
      }
      const PreparedSplit erp = PrepareSplit(ds, InputKind::kErp, cfg, seed, cfg.threads);
      for (std::size_t k = 0; k < label_kinds.size(); ++k) {
        const double acc = TrainAndEvaluate(erp, label_kinds[k], InputKind::kErp, cfg, seed, cfg.threads).accuracy;
        log::Info(std::string("cross_subject ") + ToString(label_kinds[k]) + " " + kErpName + " accuracy " +
                  std::to_string(acc));
        add_pair(ToString(protocol), label_kinds[k], raw_acc[k], acc);
      }
    } else {
      for (const LabelKind kind : label_kinds) {
        const ProtocolResult raw = RunProtocol(ds, protocol, kind, InputKind::kRawTrial, cfg);
        const ProtocolResult erp = RunProtocol(ds, protocol, kind, InputKind::kErp, cfg);
        for (std::size_t i = 0; i < erp.reports.size(); ++i) {
          add_pair(std::string(ToString(protocol)) + ":" + std::to_string(*erp.reports[i].subject_id), kind,
                   raw.reports[i].accuracy, erp.reports[i].accuracy);
        }
        add_pair(std::string(ToString(protocol)) + ":mean", kind, raw.mean_accuracy, erp.mean_accuracy);
      }
    }
  }

  table.footnotes.push_back(
      "EEG-LSTM: single raw trials (n = 1); ERP-LSTM: averages of n trials; identical model, "
      "optimiser and seeds. Improvement is in absolute accuracy.");
  for (const auto& ref : PublishedCrossSubjectAccuracies()) {
    char line[160];
    std::snprintf(line, sizeof line, "published reference (original recordings, cross-subject, %s): %s %.2f%%",
                  ref.label_kind, ref.framework, 100.0 * ref.accuracy);
    table.footnotes.emplace_back(line);
  }
  return table;
}

}  // namespace erpvis
