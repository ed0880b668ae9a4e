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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace erpvis {

// Amplitudes are stored as 32-bit floats, channel-major (one row per
// channel, one column per time sample). Arithmetic on them is done in 64-bit.
using SignalMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One stimulus presentation.
struct EEGTrial {
  SignalMatrix data;  // channels x samples, microvolts
  std::uint16_t subject_id = 1;
  std::uint16_t exemplar_id = 0;
  std::uint16_t category_id = 0;
  std::optional<int> session;
  std::optional<int> block;

  int channels() const { return static_cast<int>(data.rows()); }
  int samples() const { return static_cast<int>(data.cols()); }
};

struct Dataset {
  std::vector<EEGTrial> trials;
  double sampling_rate_hz = 62.5;
  int channel_count = 0;
  int sample_count = 0;
  // Index = exemplar id, value = category id.
  std::vector<int> exemplar_to_category;
  std::map<std::string, std::string> metadata;

  int n_exemplars() const { return static_cast<int>(exemplar_to_category.size()); }
  int n_categories() const;
  // Sorted, unique subject ids present in `trials`.
  std::vector<int> Subjects() const;

  // Checks shape, label and finiteness invariants, and that every exemplar of
  // a subject has the same number of trials. Throws FormatError.
  void Validate() const;
};

// Keeps only the trials of one subject; metadata is copied.
Dataset SelectSubject(const Dataset& ds, int subject_id);

// Order-sensitive FNV-1a digest over labels and amplitude bits.
std::uint64_t Checksum(const Dataset& ds);

// Standard 12-exemplars-per-category layout: exemplar e belongs to e / 12.
std::vector<int> BlockedCategoryMap(int n_categories, int exemplars_per_category);

enum class NoiseModel {
  // Ongoing "background" activity: band-limited (3-13 Hz) sources projected
  // through the same spatial patterns as the evoked response, plus a white
  // sensor floor. Entries have variance sigma^2 on average over channels;
  // trials are independent.
  kBackground,
  // Independent Gaussian noise on every channel and sample.
  kWhite,
};

struct SynthConfig {
  int n_subjects = 10;
  int n_categories = 6;
  int n_exemplars_per_category = 12;
  int trials_per_image = 72;
  int channels = 124;
  int samples_per_trial = 31;
  double sampling_rate_hz = 62.5;
  double single_trial_snr_db = -10.0;
  bool disable_noise = false;  // the SNR -> +inf limit
  std::uint64_t seed = 0;
  int latency_jitter_samples = 1;
  double subject_gain_spread = 0.2;
  NoiseModel noise_model = NoiseModel::kBackground;
  double background_white_fraction = 0.05;

  // Throws ConfigError.
  void Validate() const;
};

const char* ToString(NoiseModel model);

// Seeded evoked-potential simulator. Each stimulus has a deterministic
// template built from damped sinusoids (three per category, one per
// exemplar at half amplitude) mixed into channels by a c x 4 matrix and
// scaled by a per-subject gain. A trial is the template, circularly shifted
// by a per-trial latency jitter, plus noise. Every trial draws from its own
// random stream derived from (seed, trial index), so generation order does
// not affect the result.
class SyntheticSource {
 public:
  explicit SyntheticSource(SynthConfig cfg);

  const SynthConfig& config() const { return cfg_; }

  // Noise-free, unshifted template for a stimulus; subject ids start at 1.
  Eigen::MatrixXd Template(int subject_id, int exemplar_id) const;
  // Standard deviation of the per-entry noise for a stimulus (0 when noise is
  // disabled).
  double NoiseSigma(int subject_id, int exemplar_id) const;
  // Circular latency shift applied to a trial, in samples.
  int LatencyShift(int subject_id, int exemplar_id, int repetition) const;
  EEGTrial Trial(int subject_id, int exemplar_id, int repetition) const;

  double SubjectGain(int subject_id) const;

  Dataset Generate(int threads = 1) const;

 private:
  std::uint64_t TrialIndex(int subject_id, int exemplar_id, int repetition) const;

  SynthConfig cfg_;
  Eigen::MatrixXd mixing_;           // channels x 4
  Eigen::MatrixXd noise_mixing_;     // mixing_ scaled to unit mean row power
  Eigen::MatrixXd category_sources_; // (3 * n_categories) x samples
  Eigen::MatrixXd exemplar_sources_; // n_exemplars x samples
  Eigen::MatrixXd background_basis_; // (2 * n_freqs) x samples
  std::vector<double> gains_;
};

Dataset GenerateSyntheticDataset(const SynthConfig& cfg, int threads = 1);

}  // namespace erpvis
