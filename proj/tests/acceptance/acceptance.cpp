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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any gated criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "erpvis/checkpoint.hpp"
#include "erpvis/dataset_io.hpp"
#include "erpvis/erp.hpp"
#include "erpvis/log.hpp"
#include "erpvis/lstm.hpp"
#include "erpvis/parallel.hpp"
#include "erpvis/protocol.hpp"
#include "erpvis/report.hpp"
#include "erpvis/trainer.hpp"
#include "../support.hpp"

using namespace erpvis;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void Report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

Eigen::MatrixXd RandomInput(int c, int T, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd x(c, T);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  return x;
}

void GradientCorrectness() {
  const auto start = Clock::now();
  const LstmHyper hp{3, 4, 1, 4, 3};
  double worst = 0.0;
  int models = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    LstmModel m = LstmModel::Initialize(hp, seed);
    // Positive projection bias keeps the ReLU units active.
    m.Bp().setConstant(0.2);
    for (LossVariant v : {LossVariant::kCategorical, LossVariant::kPerClassBinary}) {
      worst = std::max(worst, GradCheck(m, RandomInput(3, 5, 100 + seed), static_cast<int>(seed % 3), 1e-5, v));
    }
    ++models;
  }
  const double secs = Seconds(start);
  Report(1, "gradient check", worst < 1e-4 && secs < 30.0,
         Format("%d models, max relative error %.3e (< 1e-4), %.2f s (< 30 s)", models, worst, secs));
}

void AveragingOracle() {
  SynthConfig cfg;
  cfg.n_subjects = 2;
  cfg.channels = 32;
  cfg.latency_jitter_samples = 0;
  const SyntheticSource src(cfg);
  const ERPSpace space = BuildErpSpace(src.Generate(DefaultThreads()), 12, 5, DefaultThreads());
  double residual = 0.0;
  double expected = 0.0;
  for (const auto& s : space.sequences) {
    const Eigen::MatrixXd tmpl = src.Template(s.subject_id, s.exemplar_id);
    const double sigma = src.NoiseSigma(s.subject_id, s.exemplar_id);
    residual += (s.data.cast<double>() - tmpl).squaredNorm();
    expected += sigma * sigma / 12.0 * static_cast<double>(tmpl.size());
  }
  const double ratio = residual / expected;

  SynthConfig quiet = erpvis::testing::TinyConfig();
  quiet.disable_noise = true;
  quiet.latency_jitter_samples = 0;
  const Dataset clean = GenerateSyntheticDataset(quiet);
  bool exact = true;
  for (const auto& s : BuildErpSpace(clean, 4, 1).sequences) {
    for (const auto& t : clean.trials) {
      if (t.subject_id == s.subject_id && t.exemplar_id == s.exemplar_id) {
        exact = exact && t.data == s.data;
        break;
      }
    }
  }
  const bool ok = space.sequences.size() >= 500 && std::abs(ratio - 1.0) < 0.10 && exact;
  Report(2, "averaging oracle", ok,
         Format("%zu ERPs, residual / (sigma^2/12) = %.4f (within 10%%), identical trials exact: %s",
                space.sequences.size(), ratio, exact ? "yes" : "no"));
}

void Cardinalities() {
  const Dataset ds = GenerateSyntheticDataset(SynthConfig{}, DefaultThreads());
  const ERPSpace space = BuildErpSpace(ds, 12, 1, DefaultThreads());
  const int per_image = TrainPerImage(UniformGroupSize(space));
  const auto [train, test] = SplitErpSpace(space, per_image, 1);
  const bool ok = ds.trials.size() == 51840 && space.sequences.size() == 4320 && per_image == 5 &&
                  UniformGroupSize(space) == 6 && train.sequences.size() == 3600 && test.sequences.size() == 720;
  Report(3, "pipeline cardinalities", ok,
         Format("%zu trials, %zu ERPs, %d train + %d test per image, %zu/%zu split", ds.trials.size(),
                space.sequences.size(), per_image, UniformGroupSize(space) - per_image, train.sequences.size(),
                test.sequences.size()));
}

PipelineConfig DeskConfig(std::uint64_t seed) {
  PipelineConfig p;
  p.n_average = 12;
  p.hidden_size = 32;
  p.repr_dim = 32;
  p.train.epochs = 10;
  p.train.batch_size = 32;
  p.seed = seed;
  p.threads = DefaultThreads();
  return p;
}

void DirectionalReproduction() {
  const auto start = Clock::now();
  bool table1 = true;
  bool table2 = true;
  std::string detail1;
  std::string detail2;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto seed_start = Clock::now();
    SynthConfig gen;
    gen.seed = seed;
    const PipelineConfig cfg = DeskConfig(seed);
    const Dataset ds = GenerateSyntheticDataset(gen, cfg.threads);

    const PreparedSplit raw = PrepareSplit(ds, InputKind::kRawTrial, cfg, seed, cfg.threads);
    const double raw_cat = TrainAndEvaluate(raw, LabelKind::kCategory, InputKind::kRawTrial, cfg, seed, cfg.threads).accuracy;
    const PreparedSplit erp = PrepareSplit(ds, InputKind::kErp, cfg, seed, cfg.threads);
    const double erp_cat = TrainAndEvaluate(erp, LabelKind::kCategory, InputKind::kErp, cfg, seed, cfg.threads).accuracy;
    const double erp_ex = TrainAndEvaluate(erp, LabelKind::kExemplar, InputKind::kErp, cfg, seed, cfg.threads).accuracy;

    table1 = table1 && erp_cat - raw_cat >= 0.10 && erp_cat - 1.0 / 6.0 >= 0.20;
    table2 = table2 && erp_ex > 1.0 / 72.0 && erp_ex < erp_cat;
    detail1 += Format("seed %d: ERP %.2f%% vs raw %.2f%% (%+.2f pp); ", static_cast<int>(seed), 100 * erp_cat,
                      100 * raw_cat, 100 * (erp_cat - raw_cat));
    detail2 += Format("seed %d: exemplar %.2f%% vs category %.2f%%; ", static_cast<int>(seed), 100 * erp_ex,
                      100 * erp_cat);
    std::printf("  seed %d done in %.1f s\n", static_cast<int>(seed), Seconds(seed_start));
    std::fflush(stdout);
  }
  const double secs = Seconds(start);
  detail1 += Format("total %.1f s on %d thread(s)", secs, DefaultThreads());
  Report(4, "ERP beats raw trials, cross-subject categories", table1 && secs < 600.0, detail1);
  Report(5, "exemplar accuracy above chance and below category", table2, detail2.substr(0, detail2.size() - 2));
}

std::string ReadBytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void Determinism() {
  erpvis::testing::TempDir tmp;
  SynthConfig gen = erpvis::testing::TinyConfig(9);
  gen.trials_per_image = 24;
  PipelineConfig cfg;
  cfg.n_average = 4;
  cfg.hidden_size = 8;
  cfg.repr_dim = 8;
  cfg.train.epochs = 3;
  cfg.train.batch_size = 8;
  cfg.seed = 4;
  std::vector<std::string> ckpts;
  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    const Dataset ds = GenerateSyntheticDataset(gen);
    const PreparedSplit split = PrepareSplit(ds, InputKind::kErp, cfg, cfg.seed, 1);
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    const TrainResult trained =
        Train(LstmModel::Initialize({split.train.channel_count, 8, 1, 8, 2}, cfg.seed), split.train, tc);
    const auto path = tmp / ("run" + std::to_string(run) + ".erpl");
    SaveCheckpoint({trained.model, {{"seed", std::to_string(cfg.seed)}}}, path);
    ckpts.push_back(ReadBytes(path));
    const ComparisonTable table = CompareFrameworks(ds, {Protocol::kCrossSubject, Protocol::kWithinSubject},
                                                    {LabelKind::kCategory}, cfg);
    reports.push_back(Render(table, ReportFormat::kJson) + RenderCsv(table));
  }
  const bool ok = ckpts[0] == ckpts[1] && reports[0] == reports[1] && !ckpts[0].empty();
  Report(6, "determinism", ok,
         Format("checkpoints %zu bytes %s, reports %zu bytes %s", ckpts[0].size(),
                ckpts[0] == ckpts[1] ? "identical" : "differ", reports[0].size(),
                reports[0] == reports[1] ? "identical" : "differ"));
}

void Overfit() {
  ERPSpace one = BuildErpSpace(GenerateSyntheticDataset(erpvis::testing::TinyConfig()), 4, 1);
  one.sequences.resize(1);
  one.exemplar_to_category = BlockedCategoryMap(6, 1);
  one.sequences[0].category_id = 4;
  one.sequences[0].exemplar_id = 4;
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 1;
  cfg.learning_rate = 1e-2;
  const TrainResult r = Train(LstmModel::Initialize({one.channel_count, 8, 1, 8, 6}, 1), one, cfg);
  const double acc = Evaluate(r.model, one, LabelKind::kCategory).accuracy;
  Report(7, "single-example overfit", r.loss_curve.back() < 0.01 && acc == 1.0,
         Format("final loss %.3e (< 0.01) after %zu epochs, accuracy %.0f%%", r.loss_curve.back(),
                r.loss_curve.size(), 100 * acc));
}

void RealData() {
  const char* path = std::getenv("ERPVIS_REAL_DATA");
  if (path == nullptr || *path == '\0') {
    std::printf("SKIP criterion 8 (real recordings): ERPVIS_REAL_DATA not set, informational only\n");
    return;
  }
  try {
    const Dataset ds = LoadDataset(path);
    PipelineConfig cfg = DeskConfig(1);
    const ComparisonTable table =
        CompareFrameworks(ds, {Protocol::kCrossSubject}, {LabelKind::kCategory, LabelKind::kExemplar}, cfg);
    std::printf("INFO criterion 8 (real recordings, not gated):\n%s", RenderText(table).c_str());
  } catch (const std::exception& e) {
    std::printf("INFO criterion 8 (real recordings, not gated): could not run: %s\n", e.what());
  }
}

}  // namespace

int main() {
  log::SetLevel(log::Level::kError);
  const auto start = Clock::now();
  const auto guard = [](const char* name, auto fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      std::printf("FAIL %s: %s\n", name, e.what());
      ++g_failures;
    }
  };
  guard("criterion 1", GradientCorrectness);
  guard("criterion 2", AveragingOracle);
  guard("criterion 3", Cardinalities);
  guard("criterion 6", Determinism);
  guard("criterion 7", Overfit);
  guard("criteria 4-5", DirectionalReproduction);
  RealData();
  std::printf("%d gated criteria failed, %.1f s\n", g_failures, Seconds(start));
  return g_failures == 0 ? 0 : 1;
}
