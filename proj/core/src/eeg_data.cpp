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

#include "erpvis/eeg_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <set>
#include <sstream>

#include "erpvis/error.hpp"
#include "erpvis/parallel.hpp"
#include "erpvis/random.hpp"

namespace erpvis {
namespace {

constexpr int kCategoryComponents = 3;
constexpr int kSources = kCategoryComponents + 1;
constexpr double kExemplarAmplitude = 0.5;
constexpr double kMinFreqHz = 4.0;
constexpr double kMaxFreqHz = 12.0;
constexpr double kMinDecayS = 0.1;
constexpr double kMaxDecayS = 0.4;
constexpr double kBackgroundLowHz = 3.0;
constexpr double kBackgroundHighHz = 13.0;

Eigen::VectorXd DampedSinusoid(int samples, double fs, double freq, double decay,
                               double phase, double amplitude) {
  Eigen::VectorXd out(samples);
  for (int t = 0; t < samples; ++t) {
    const double sec = t / fs;
    out(t) = amplitude * std::exp(-sec / decay) *
             std::sin(2.0 * std::numbers::pi * freq * sec + phase);
  }
  return out;
}

Eigen::VectorXd RandomDampedSinusoid(std::mt19937_64& rng, int samples, double fs,
                                     double amplitude) {
  std::uniform_real_distribution<double> freq(kMinFreqHz, kMaxFreqHz);
  std::uniform_real_distribution<double> decay(kMinDecayS, kMaxDecayS);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double f = freq(rng);
  const double d = decay(rng);
  const double p = phase(rng);
  return DampedSinusoid(samples, fs, f, d, p, amplitude);
}

void Fnv(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

int Dataset::n_categories() const {
  if (exemplar_to_category.empty()) return 0;
  return *std::max_element(exemplar_to_category.begin(), exemplar_to_category.end()) + 1;
}

std::vector<int> Dataset::Subjects() const {
  std::set<int> ids;
  for (const auto& t : trials) ids.insert(t.subject_id);
  return {ids.begin(), ids.end()};
}

void Dataset::Validate() const {
  if (!(sampling_rate_hz > 0.0) || !std::isfinite(sampling_rate_hz)) {
    throw FormatError("sampling_rate_hz: must be positive and finite");
  }
  if (!trials.empty() && (channel_count <= 0 || sample_count <= 0)) {
    throw FormatError("channels/samples: must be positive for a non-empty dataset");
  }
  std::map<int, std::map<int, int>> counts;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    if (t.channels() != channel_count || t.samples() != sample_count) {
      std::ostringstream msg;
      msg << "trial " << i << ": shape " << t.channels() << "x" << t.samples()
          << " differs from dataset shape " << channel_count << "x" << sample_count;
      throw FormatError(msg.str());
    }
    if (t.subject_id < 1) {
      throw FormatError("trial " + std::to_string(i) + ": subject_id must be >= 1");
    }
    if (t.exemplar_id >= exemplar_to_category.size()) {
      throw FormatError("trial " + std::to_string(i) + ": exemplar_id " +
                        std::to_string(t.exemplar_id) + " outside exemplar_to_category");
    }
    if (t.category_id != exemplar_to_category[t.exemplar_id]) {
      throw FormatError("trial " + std::to_string(i) +
                        ": category_id disagrees with exemplar_to_category");
    }
    if (!t.data.allFinite()) {
      throw FormatError("trial " + std::to_string(i) + ": non-finite amplitude");
    }
    ++counts[t.subject_id][t.exemplar_id];
  }
  for (const auto& [subject, per_exemplar] : counts) {
    const int expected = per_exemplar.begin()->second;
    for (const auto& [exemplar, count] : per_exemplar) {
      if (count != expected) {
        std::ostringstream msg;
        msg << "subject " << subject << ": exemplar " << exemplar << " has " << count
            << " trials, expected " << expected;
        throw FormatError(msg.str());
      }
    }
  }
}

Dataset SelectSubject(const Dataset& ds, int subject_id) {
  Dataset out;
  out.sampling_rate_hz = ds.sampling_rate_hz;
  out.channel_count = ds.channel_count;
  out.sample_count = ds.sample_count;
  out.exemplar_to_category = ds.exemplar_to_category;
  out.metadata = ds.metadata;
  for (const auto& t : ds.trials) {
    if (t.subject_id == subject_id) out.trials.push_back(t);
  }
  return out;
}

std::uint64_t Checksum(const Dataset& ds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::uint64_t n = ds.trials.size();
  Fnv(h, &n, sizeof n);
  for (const auto& t : ds.trials) {
    Fnv(h, &t.subject_id, sizeof t.subject_id);
    Fnv(h, &t.exemplar_id, sizeof t.exemplar_id);
    Fnv(h, t.data.data(), sizeof(float) * static_cast<std::size_t>(t.data.size()));
  }
  return h;
}

std::vector<int> BlockedCategoryMap(int n_categories, int exemplars_per_category) {
  std::vector<int> map(static_cast<std::size_t>(n_categories * exemplars_per_category));
  for (std::size_t e = 0; e < map.size(); ++e) {
    map[e] = static_cast<int>(e) / exemplars_per_category;
  }
  return map;
}

const char* ToString(NoiseModel model) {
  return model == NoiseModel::kWhite ? "white" : "background";
}

void SynthConfig::Validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw ConfigError(std::string(name) + " must be >= 1");
  };
  positive(n_subjects, "n_subjects");
  positive(n_categories, "n_categories");
  positive(n_exemplars_per_category, "n_exemplars_per_category");
  positive(trials_per_image, "trials_per_image");
  positive(channels, "channels");
  positive(samples_per_trial, "samples_per_trial");
  if (n_subjects > 65535 || n_categories * n_exemplars_per_category > 65535) {
    throw ConfigError("subject and exemplar ids must fit in 16 bits");
  }
  if (!std::isfinite(sampling_rate_hz) || sampling_rate_hz <= 0.0) {
    throw ConfigError("sampling_rate_hz must be positive and finite");
  }
  if (!std::isfinite(single_trial_snr_db)) {
    throw ConfigError("single_trial_snr_db must be finite (use disable_noise for the noiseless limit)");
  }
  if (latency_jitter_samples < 0) throw ConfigError("latency_jitter_samples must be >= 0");
  if (!std::isfinite(subject_gain_spread) || subject_gain_spread < 0.0) {
    throw ConfigError("subject_gain_spread must be >= 0");
  }
  if (!(background_white_fraction >= 0.0 && background_white_fraction <= 1.0)) {
    throw ConfigError("background_white_fraction must lie in [0, 1]");
  }
}

SyntheticSource::SyntheticSource(SynthConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.Validate();
  const int T = cfg_.samples_per_trial;
  const double fs = cfg_.sampling_rate_hz;
  const int n_exemplars = cfg_.n_categories * cfg_.n_exemplars_per_category;

  auto rng = MakeEngine(cfg_.seed, {kTagTemplates});
  category_sources_.resize(kCategoryComponents * cfg_.n_categories, T);
  for (int k = 0; k < cfg_.n_categories; ++k) {
    for (int j = 0; j < kCategoryComponents; ++j) {
      category_sources_.row(k * kCategoryComponents + j) =
          RandomDampedSinusoid(rng, T, fs, 1.0).transpose();
    }
  }
  exemplar_sources_.resize(n_exemplars, T);
  for (int e = 0; e < n_exemplars; ++e) {
    exemplar_sources_.row(e) = RandomDampedSinusoid(rng, T, fs, kExemplarAmplitude).transpose();
  }

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  mixing_.resize(cfg_.channels, kSources);
  for (int c = 0; c < cfg_.channels; ++c) {
    for (int s = 0; s < kSources; ++s) mixing_(c, s) = unit(rng);
  }
  // Same column space as the evoked patterns, scaled to unit mean row power.
  noise_mixing_ = mixing_ * std::sqrt(static_cast<double>(cfg_.channels) / mixing_.squaredNorm());

  gains_.resize(static_cast<std::size_t>(cfg_.n_subjects));
  for (auto& g : gains_) g = std::exp(cfg_.subject_gain_spread * unit(rng));

  // Cosine/sine pairs at integer frequencies; a Gaussian combination of them
  // has unit variance at every sample.
  std::vector<double> freqs;
  const double nyquist_guard = 0.45 * fs;
  for (double f = kBackgroundLowHz; f <= kBackgroundHighHz && f < nyquist_guard; f += 1.0) {
    freqs.push_back(f);
  }
  if (freqs.empty()) freqs.push_back(0.25 * fs);
  background_basis_.resize(2 * static_cast<Eigen::Index>(freqs.size()), T);
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    for (int t = 0; t < T; ++t) {
      const double w = 2.0 * std::numbers::pi * freqs[i] * t / fs;
      background_basis_(2 * i, t) = std::cos(w);
      background_basis_(2 * i + 1, t) = std::sin(w);
    }
  }
  background_basis_ /= std::sqrt(static_cast<double>(freqs.size()));
}

double SyntheticSource::SubjectGain(int subject_id) const {
  return gains_.at(static_cast<std::size_t>(subject_id - 1));
}

Eigen::MatrixXd SyntheticSource::Template(int subject_id, int exemplar_id) const {
  const int category = exemplar_id / cfg_.n_exemplars_per_category;
  Eigen::MatrixXd sources(kSources, cfg_.samples_per_trial);
  sources.topRows(kCategoryComponents) =
      category_sources_.middleRows(category * kCategoryComponents, kCategoryComponents);
  sources.row(kCategoryComponents) = exemplar_sources_.row(exemplar_id);
  return SubjectGain(subject_id) * (mixing_ * sources);
}

double SyntheticSource::NoiseSigma(int subject_id, int exemplar_id) const {
  if (cfg_.disable_noise) return 0.0;
  const Eigen::MatrixXd tmpl = Template(subject_id, exemplar_id);
  const double power = tmpl.squaredNorm() / static_cast<double>(tmpl.size());
  return std::sqrt(power / std::pow(10.0, cfg_.single_trial_snr_db / 10.0));
}

std::uint64_t SyntheticSource::TrialIndex(int subject_id, int exemplar_id,
                                          int repetition) const {
  const std::uint64_t n_exemplars =
      static_cast<std::uint64_t>(cfg_.n_categories) * cfg_.n_exemplars_per_category;
  return ((static_cast<std::uint64_t>(subject_id - 1) * n_exemplars + exemplar_id) *
          cfg_.trials_per_image) +
         static_cast<std::uint64_t>(repetition);
}

int SyntheticSource::LatencyShift(int subject_id, int exemplar_id, int repetition) const {
  if (cfg_.latency_jitter_samples == 0) return 0;
  auto rng = MakeEngine(cfg_.seed, {kTagTrialNoise, TrialIndex(subject_id, exemplar_id, repetition)});
  std::uniform_int_distribution<int> jitter(-cfg_.latency_jitter_samples,
                                            cfg_.latency_jitter_samples);
  return jitter(rng);
}

EEGTrial SyntheticSource::Trial(int subject_id, int exemplar_id, int repetition) const {
  const int C = cfg_.channels;
  const int T = cfg_.samples_per_trial;
  auto rng = MakeEngine(cfg_.seed, {kTagTrialNoise, TrialIndex(subject_id, exemplar_id, repetition)});

  int shift = 0;
  if (cfg_.latency_jitter_samples > 0) {
    std::uniform_int_distribution<int> jitter(-cfg_.latency_jitter_samples,
                                              cfg_.latency_jitter_samples);
    shift = jitter(rng);
  }

  const Eigen::MatrixXd tmpl = Template(subject_id, exemplar_id);
  Eigen::MatrixXd signal(C, T);
  for (int t = 0; t < T; ++t) {
    const int src = ((t - shift) % T + T) % T;
    signal.col(t) = tmpl.col(src);
  }

  const double sigma = NoiseSigma(subject_id, exemplar_id);
  if (sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd noise(C, T);
    if (cfg_.noise_model == NoiseModel::kWhite) {
      for (int c = 0; c < C; ++c) {
        for (int t = 0; t < T; ++t) noise(c, t) = normal(rng);
      }
    } else {
      Eigen::MatrixXd coef(kSources, background_basis_.rows());
      for (Eigen::Index r = 0; r < coef.rows(); ++r) {
        for (Eigen::Index k = 0; k < coef.cols(); ++k) coef(r, k) = normal(rng);
      }
      const double w = cfg_.background_white_fraction;
      noise = std::sqrt(1.0 - w) * (noise_mixing_ * (coef * background_basis_));
      if (w > 0.0) {
        const double floor = std::sqrt(w);
        for (int c = 0; c < C; ++c) {
          for (int t = 0; t < T; ++t) noise(c, t) += floor * normal(rng);
        }
      }
    }
    signal += sigma * noise;
  }

  EEGTrial trial;
  trial.data = signal.cast<float>();
  trial.subject_id = static_cast<std::uint16_t>(subject_id);
  trial.exemplar_id = static_cast<std::uint16_t>(exemplar_id);
  trial.category_id = static_cast<std::uint16_t>(exemplar_id / cfg_.n_exemplars_per_category);
  return trial;
}

Dataset SyntheticSource::Generate(int threads) const {
  Dataset ds;
  ds.sampling_rate_hz = cfg_.sampling_rate_hz;
  ds.channel_count = cfg_.channels;
  ds.sample_count = cfg_.samples_per_trial;
  ds.exemplar_to_category = BlockedCategoryMap(cfg_.n_categories, cfg_.n_exemplars_per_category);

  const int n_exemplars = cfg_.n_categories * cfg_.n_exemplars_per_category;
  const std::size_t n_trials = static_cast<std::size_t>(cfg_.n_subjects) * n_exemplars *
                               static_cast<std::size_t>(cfg_.trials_per_image);
  ds.trials.resize(n_trials);
  // Trials are ordered (subject, exemplar, repetition), i.e. by TrialIndex.
  ParallelFor(n_trials, threads, [&](std::size_t i) {
    const int repetition = static_cast<int>(i % cfg_.trials_per_image);
    const std::size_t stimulus = i / cfg_.trials_per_image;
    const int exemplar = static_cast<int>(stimulus % n_exemplars);
    const int subject = static_cast<int>(stimulus / n_exemplars) + 1;
    ds.trials[i] = Trial(subject, exemplar, repetition);
  });

  auto fmt_double = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  ds.metadata["source"] = "synthetic";
  ds.metadata["generator_seed"] = std::to_string(cfg_.seed);
  ds.metadata["single_trial_snr_db"] =
      cfg_.disable_noise ? std::string("inf") : fmt_double(cfg_.single_trial_snr_db);
  ds.metadata["noise_model"] = ToString(cfg_.noise_model);
  ds.metadata["background_white_fraction"] = fmt_double(cfg_.background_white_fraction);
  ds.metadata["latency_jitter_samples"] = std::to_string(cfg_.latency_jitter_samples);
  ds.metadata["subject_gain_spread"] = fmt_double(cfg_.subject_gain_spread);
  return ds;
}

Dataset GenerateSyntheticDataset(const SynthConfig& cfg, int threads) {
  return SyntheticSource(cfg).Generate(threads);
}

}  // namespace erpvis
