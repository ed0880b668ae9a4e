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

#include "erpvis/erp.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "erpvis/error.hpp"
#include "erpvis/parallel.hpp"
#include "erpvis/random.hpp"

namespace erpvis {
namespace {

using StimulusKey = std::pair<int, int>;  // (subject, exemplar)

std::string Describe(const StimulusKey& key) {
  return "subject " + std::to_string(key.first) + ", exemplar " + std::to_string(key.second);
}

template <typename Item>
std::vector<std::pair<StimulusKey, std::vector<std::size_t>>> GroupByStimulus(
    const std::vector<Item>& items) {
  std::map<StimulusKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < items.size(); ++i) {
    groups[{items[i].subject_id, items[i].exemplar_id}].push_back(i);
  }
  return {groups.begin(), groups.end()};
}

}  // namespace

int ERPSpace::n_categories() const {
  if (exemplar_to_category.empty()) return 0;
  return *std::max_element(exemplar_to_category.begin(), exemplar_to_category.end()) + 1;
}

std::vector<int> ERPSpace::Subjects() const {
  std::set<int> ids;
  for (const auto& s : sequences) ids.insert(s.subject_id);
  return {ids.begin(), ids.end()};
}

ERPSpace ERPSpace::EmptyLike() const {
  ERPSpace out;
  out.provenance = provenance;
  out.sampling_rate_hz = sampling_rate_hz;
  out.channel_count = channel_count;
  out.sample_count = sample_count;
  out.exemplar_to_category = exemplar_to_category;
  return out;
}

std::vector<TrialSubset> PartitionTrials(
    const std::vector<std::reference_wrapper<const EEGTrial>>& trials, int n,
    std::uint64_t seed) {
  if (n < 1) throw PartitionError("averaging factor n must be >= 1");
  if (trials.empty()) throw PartitionError("cannot partition an empty trial list");
  const EEGTrial& first = trials.front();
  const StimulusKey key{first.subject_id, first.exemplar_id};
  for (const EEGTrial& t : trials) {
    if (t.subject_id != first.subject_id || t.exemplar_id != first.exemplar_id) {
      throw PartitionError("trials of different stimuli passed to one partition (" +
                           Describe(key) + ")");
    }
  }
  const std::size_t N = trials.size();
  if (N % static_cast<std::size_t>(n) != 0) {
    throw PartitionError(Describe(key) + ": " + std::to_string(N) +
                         " trials not divisible by n = " + std::to_string(n));
  }

  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  auto rng = MakeEngine(seed, {kTagPartition, static_cast<std::uint64_t>(key.first),
                               static_cast<std::uint64_t>(key.second)});
  SeededShuffle(order, rng);

  std::vector<TrialSubset> subsets(N / static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    subsets[i].subset_index = static_cast<int>(i);
    subsets[i].trials.reserve(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
      subsets[i].trials.push_back(trials[order[i * static_cast<std::size_t>(n) + k]]);
    }
  }
  return subsets;
}

ERPSequence AverageTrials(const TrialSubset& subset) {
  if (subset.trials.empty()) throw DomainError("cannot average an empty trial subset");
  const EEGTrial& first = subset.trials.front();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(first.channels(), first.samples());
  for (const EEGTrial& t : subset.trials) {
    if (t.channels() != first.channels() || t.samples() != first.samples()) {
      throw DimensionError("trial shapes differ within subset");
    }
    if (t.subject_id != first.subject_id || t.exemplar_id != first.exemplar_id) {
      throw DomainError("subset mixes stimuli");
    }
    sum += t.data.cast<double>();
  }
  ERPSequence out;
  out.data = (sum / static_cast<double>(subset.trials.size())).cast<float>();
  out.subject_id = first.subject_id;
  out.exemplar_id = first.exemplar_id;
  out.category_id = first.category_id;
  out.n_averaged = static_cast<std::uint16_t>(subset.trials.size());
  out.sequence_id = static_cast<std::uint32_t>(subset.subset_index);
  return out;
}

ERPSpace BuildErpSpace(const Dataset& ds, int n, std::uint64_t seed, int threads) {
  if (n < 1) throw PartitionError("averaging factor n must be >= 1");
  if (n > 65535) throw PartitionError("averaging factor n must fit in 16 bits");

  ERPSpace space;
  space.sampling_rate_hz = ds.sampling_rate_hz;
  space.channel_count = ds.channel_count;
  space.sample_count = ds.sample_count;
  space.exemplar_to_category = ds.exemplar_to_category;
  space.provenance.n_averaged = n;
  space.provenance.partition_seed = seed;
  if (auto it = ds.metadata.find("source"); it != ds.metadata.end()) {
    space.provenance.source_id = it->second;
  }
  if (auto it = ds.metadata.find("generator_seed"); it != ds.metadata.end()) {
    space.provenance.source_id += ":seed=" + it->second;
  }

  const auto groups = GroupByStimulus(ds.trials);
  std::vector<std::vector<ERPSequence>> per_group(groups.size());
  ParallelFor(groups.size(), threads, [&](std::size_t g) {
    std::vector<std::reference_wrapper<const EEGTrial>> trials;
    trials.reserve(groups[g].second.size());
    for (auto idx : groups[g].second) trials.emplace_back(ds.trials[idx]);
    const auto subsets = PartitionTrials(trials, n, seed);
    per_group[g].reserve(subsets.size());
    for (const auto& subset : subsets) per_group[g].push_back(AverageTrials(subset));
  });

  std::size_t total = 0;
  for (const auto& g : per_group) total += g.size();
  space.sequences.reserve(total);
  for (auto& g : per_group) {
    for (auto& s : g) space.sequences.push_back(std::move(s));
  }
  return space;
}

std::pair<ERPSpace, ERPSpace> SplitErpSpace(const ERPSpace& space, int train_per_image,
                                            std::uint64_t seed) {
  if (train_per_image < 1) throw SplitError("train_per_image must be >= 1");
  ERPSpace train = space.EmptyLike();
  ERPSpace test = space.EmptyLike();

  for (const auto& [key, members] : GroupByStimulus(space.sequences)) {
    if (members.size() <= static_cast<std::size_t>(train_per_image)) {
      throw SplitError(Describe(key) + ": " + std::to_string(members.size()) +
                       " sequences cannot give " + std::to_string(train_per_image) +
                       " train and at least 1 test");
    }
    std::vector<std::size_t> order = members;
    auto rng = MakeEngine(seed, {kTagSplit, static_cast<std::uint64_t>(key.first),
                                 static_cast<std::uint64_t>(key.second)});
    SeededShuffle(order, rng);
    std::vector<std::size_t> train_idx(order.begin(), order.begin() + train_per_image);
    std::vector<std::size_t> test_idx(order.begin() + train_per_image, order.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    for (auto i : train_idx) train.sequences.push_back(space.sequences[i]);
    for (auto i : test_idx) test.sequences.push_back(space.sequences[i]);
  }
  return {std::move(train), std::move(test)};
}

int TrainPerImage(int group_size, int train_parts, int test_parts) {
  if (train_parts < 1 || test_parts < 1) throw SplitError("split ratio parts must be >= 1");
  return group_size * train_parts / (train_parts + test_parts);
}

int UniformGroupSize(const ERPSpace& space) {
  const auto groups = GroupByStimulus(space.sequences);
  if (groups.empty()) throw SplitError("ERP space is empty");
  const std::size_t size = groups.front().second.size();
  for (const auto& [key, members] : groups) {
    if (members.size() != size) {
      std::ostringstream msg;
      msg << Describe(key) << " has " << members.size() << " sequences, expected " << size;
      throw SplitError(msg.str());
    }
  }
  return static_cast<int>(size);
}

ERPSpace SelectSubject(const ERPSpace& space, int subject_id) {
  ERPSpace out = space.EmptyLike();
  for (const auto& s : space.sequences) {
    if (s.subject_id == subject_id) out.sequences.push_back(s);
  }
  return out;
}

}  // namespace erpvis
