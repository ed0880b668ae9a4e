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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "erpvis/eeg_data.hpp"

namespace erpvis {

// A block of same-stimulus trials that will be averaged together.
struct TrialSubset {
  std::vector<std::reference_wrapper<const EEGTrial>> trials;
  int subset_index = 0;
};

struct ERPSequence {
  SignalMatrix data;  // channels x samples
  std::uint16_t subject_id = 1;
  std::uint16_t exemplar_id = 0;
  std::uint16_t category_id = 0;
  std::uint16_t n_averaged = 1;
  // Position of the sequence among those of its (subject, exemplar) group.
  std::uint32_t sequence_id = 0;

  int channels() const { return static_cast<int>(data.rows()); }
  int samples() const { return static_cast<int>(data.cols()); }
};

struct ERPProvenance {
  std::string source_id;
  int n_averaged = 1;
  std::uint64_t partition_seed = 0;
};

// The collection of labelled ERP sequences fed to the encoder.
struct ERPSpace {
  std::vector<ERPSequence> sequences;
  ERPProvenance provenance;
  double sampling_rate_hz = 62.5;
  int channel_count = 0;
  int sample_count = 0;
  std::vector<int> exemplar_to_category;

  int n_exemplars() const { return static_cast<int>(exemplar_to_category.size()); }
  int n_categories() const;
  std::vector<int> Subjects() const;
  ERPSpace EmptyLike() const;
};

// Seeded random permutation of one stimulus' trials, chunked into
// consecutive blocks of n. The permutation depends only on (seed, subject,
// exemplar). Throws PartitionError when n < 1, the trials are empty or mixed,
// or their count is not divisible by n.
std::vector<TrialSubset> PartitionTrials(const std::vector<std::reference_wrapper<const EEGTrial>>& trials,
                                         int n, std::uint64_t seed);

// Element-wise mean with 64-bit accumulation. Throws DomainError for an empty
// subset and DimensionError for mixed shapes.
ERPSequence AverageTrials(const TrialSubset& subset);

// Partition + average for every (subject, exemplar) group. Output is ordered by
// subject, exemplar, subset index.
ERPSpace BuildErpSpace(const Dataset& ds, int n, std::uint64_t seed, int threads = 1);

// Per (subject, exemplar) group, a seeded shuffle puts train_per_image
// sequences in the training set and the rest in the test set. Throws
// SplitError naming the group when it has <= train_per_image sequences or when
// train_per_image < 1.
std::pair<ERPSpace, ERPSpace> SplitErpSpace(const ERPSpace& space, int train_per_image,
                                            std::uint64_t seed);

// Training share for a train:test ratio over `group_size` sequences, e.g.
// 5:1 over 6 gives 5 and over 72 gives 60.
int TrainPerImage(int group_size, int train_parts = 5, int test_parts = 1);

// Number of sequences in every (subject, exemplar) group; throws SplitError if
// groups are unequal or the space is empty.
int UniformGroupSize(const ERPSpace& space);

ERPSpace SelectSubject(const ERPSpace& space, int subject_id);

}  // namespace erpvis
