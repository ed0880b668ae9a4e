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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "erpvis/eeg_data.hpp"
#include "erpvis/erp.hpp"
#include "erpvis/lstm.hpp"
#include "erpvis/signal.hpp"

using namespace erpvis;

namespace {

Eigen::MatrixXd RandomBatch(int c, int T, int B) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd x(c, T * B);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  return x;
}

void BM_LstmForward(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  const int B = static_cast<int>(state.range(1));
  const LstmModel m = LstmModel::Initialize({124, h, 1, h, 6}, 1);
  const Eigen::MatrixXd x = RandomBatch(124, 31, B);
  for (auto _ : state) benchmark::DoNotOptimize(ForwardPacked(m, x, B, 31).probs);
  state.SetItemsProcessed(state.iterations() * B);
}
BENCHMARK(BM_LstmForward)->Args({32, 16})->Args({128, 16})->Unit(benchmark::kMicrosecond);

void BM_LstmBackward(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  const int B = static_cast<int>(state.range(1));
  const LstmModel m = LstmModel::Initialize({124, h, 1, h, 6}, 1);
  const ForwardTrace tr = ForwardPacked(m, RandomBatch(124, 31, B), B, 31);
  std::vector<int> targets(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) targets[static_cast<std::size_t>(b)] = b % 6;
  for (auto _ : state) benchmark::DoNotOptimize(Backward(m, tr, targets, LossVariant::kCategorical).values());
  state.SetItemsProcessed(state.iterations() * B);
}
BENCHMARK(BM_LstmBackward)->Args({32, 16})->Args({128, 16})->Unit(benchmark::kMicrosecond);

void BM_BuildErpSpace(benchmark::State& state) {
  SynthConfig cfg;
  cfg.n_subjects = 1;
  const Dataset ds = GenerateSyntheticDataset(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(BuildErpSpace(ds, 12, 1).sequences.size());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ds.trials.size()));
}
BENCHMARK(BM_BuildErpSpace)->Unit(benchmark::kMillisecond);

void BM_BandpassTrial(benchmark::State& state) {
  EEGTrial trial;
  trial.data = SignalMatrix::Random(124, static_cast<int>(state.range(0)));
  const double fs = state.range(0) == 31 ? 62.5 : 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(BandpassFilter(trial, 1.0, 25.0, 4, fs).data);
}
BENCHMARK(BM_BandpassTrial)->Arg(31)->Arg(496)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
