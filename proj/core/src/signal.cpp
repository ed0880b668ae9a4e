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

#include "erpvis/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "erpvis/error.hpp"
#include "erpvis/log.hpp"

namespace erpvis {
namespace {

using Complex = std::complex<double>;

struct SectionState {
  double z0 = 0.0;
  double z1 = 0.0;
};

double DcGain(const SecondOrderSection& s) {
  const double den = s.a[0] + s.a[1] + s.a[2];
  return (s.b[0] + s.b[1] + s.b[2]) / den;
}

// Steady-state states of each section for a constant unit input.
std::vector<SectionState> UnitStepStates(const SosFilter& sos) {
  std::vector<SectionState> zi(sos.size());
  double u = 1.0;
  for (std::size_t k = 0; k < sos.size(); ++k) {
    const auto& s = sos[k];
    const double y = DcGain(s) * u;
    zi[k].z0 = y - s.b[0] * u;
    zi[k].z1 = s.b[2] * u - s.a[2] * y;
    u = y;
  }
  return zi;
}

void RunCascade(const SosFilter& sos, std::vector<SectionState> state, std::vector<double>& x) {
  for (std::size_t k = 0; k < sos.size(); ++k) {
    const auto& s = sos[k];
    auto& z = state[k];
    for (double& v : x) {
      const double in = v;
      const double y = s.b[0] * in + z.z0;
      z.z0 = s.b[1] * in - s.a[1] * y + z.z1;
      z.z1 = s.b[2] * in - s.a[2] * y;
      v = y;
    }
  }
}

std::vector<SectionState> Scaled(std::vector<SectionState> zi, double factor) {
  for (auto& z : zi) {
    z.z0 *= factor;
    z.z1 *= factor;
  }
  return zi;
}

void WarnIfTruncated(int samples, int factor) {
  if (samples % factor != 0) {
    log::Warn("downsample: " + std::to_string(samples) + " samples not divisible by " +
              std::to_string(factor) + "; truncating " + std::to_string(samples % factor) +
              " trailing samples");
  }
}

EEGTrial Decimate(const EEGTrial& trial, int factor) {
  const int kept = trial.samples() / factor;
  EEGTrial out = trial;
  out.data.resize(trial.channels(), kept);
  for (int t = 0; t < kept; ++t) out.data.col(t) = trial.data.col(t * factor);
  return out;
}

EEGTrial FilterTrial(const EEGTrial& trial, const SosFilter& sos) {
  EEGTrial out = trial;
  std::vector<double> row(static_cast<std::size_t>(trial.samples()));
  for (int c = 0; c < trial.channels(); ++c) {
    for (int t = 0; t < trial.samples(); ++t) row[static_cast<std::size_t>(t)] = trial.data(c, t);
    const auto filtered = SosFiltFilt(sos, row);
    for (int t = 0; t < trial.samples(); ++t) {
      out.data(c, t) = static_cast<float>(filtered[static_cast<std::size_t>(t)]);
    }
  }
  return out;
}

}  // namespace

SosFilter DesignButterworthBandpass(double low_hz, double high_hz, int order, double fs) {
  if (!(fs > 0.0) || !std::isfinite(fs)) throw ParameterError("fs must be positive");
  const double nyquist = fs / 2.0;
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < nyquist)) {
    throw ParameterError("band-pass cutoffs must satisfy 0 < low < high < fs/2 (got " +
                         std::to_string(low_hz) + ", " + std::to_string(high_hz) +
                         ", fs/2 = " + std::to_string(nyquist) + ")");
  }
  if (order < 2 || order % 2 != 0) {
    throw ParameterError("band-pass order must be even and >= 2");
  }

  const int proto_order = order / 2;
  const double fs2 = 2.0 * fs;
  const double w1 = fs2 * std::tan(std::numbers::pi * low_hz / fs);
  const double w2 = fs2 * std::tan(std::numbers::pi * high_hz / fs);
  const double bw = w2 - w1;
  const double w0 = std::sqrt(w1 * w2);

  std::vector<Complex> poles;
  for (int k = 0; k < proto_order; ++k) {
    const double theta =
        std::numbers::pi * (2.0 * k + proto_order + 1.0) / (2.0 * proto_order);
    const Complex p = std::polar(1.0, theta);
    const Complex half = p * bw / 2.0;
    const Complex root = std::sqrt(half * half - w0 * w0);
    for (const Complex s : {half + root, half - root}) {
      poles.push_back((fs2 + s) / (fs2 - s));
    }
  }

  constexpr double kImagTol = 1e-12;
  std::vector<Complex> complex_upper;
  std::vector<double> reals;
  for (const auto& z : poles) {
    if (z.imag() > kImagTol) {
      complex_upper.push_back(z);
    } else if (std::abs(z.imag()) <= kImagTol) {
      reals.push_back(z.real());
    }
  }
  std::sort(reals.begin(), reals.end());

  SosFilter sos;
  for (const auto& z : complex_upper) {
    SecondOrderSection s;
    s.b = {1.0, 0.0, -1.0};
    s.a = {1.0, -2.0 * z.real(), std::norm(z)};
    sos.push_back(s);
  }
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) {
    SecondOrderSection s;
    s.b = {1.0, 0.0, -1.0};
    s.a = {1.0, -(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]};
    sos.push_back(s);
  }
  if (static_cast<int>(sos.size()) != proto_order) {
    throw ParameterError("band-pass design produced an unexpected pole layout");
  }

  const double center_hz = std::atan(w0 / fs2) * fs / std::numbers::pi;
  const double gain = std::abs(FrequencyResponse(sos, center_hz, fs));
  for (double& b : sos.front().b) b /= gain;
  return sos;
}

std::complex<double> FrequencyResponse(const SosFilter& sos, double freq_hz, double fs) {
  const Complex zinv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / fs);
  Complex h = 1.0;
  for (const auto& s : sos) {
    const Complex num = s.b[0] + zinv * (s.b[1] + zinv * s.b[2]);
    const Complex den = s.a[0] + zinv * (s.a[1] + zinv * s.a[2]);
    h *= num / den;
  }
  return h;
}

std::vector<double> SosFilterForward(const SosFilter& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  RunCascade(sos, std::vector<SectionState>(sos.size()), y);
  return y;
}

std::vector<double> SosFiltFilt(const SosFilter& sos, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t padlen = std::min<std::size_t>(3 * (2 * sos.size() + 1), n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * padlen);
  for (std::size_t i = padlen; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= padlen; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = UnitStepStates(sos);
  RunCascade(sos, Scaled(zi, ext.front()), ext);
  std::reverse(ext.begin(), ext.end());
  RunCascade(sos, Scaled(zi, ext.front()), ext);
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(padlen),
          ext.begin() + static_cast<std::ptrdiff_t>(padlen + n)};
}

EEGTrial BandpassFilter(const EEGTrial& trial, double low_hz, double high_hz, int order,
                        double fs) {
  return FilterTrial(trial, DesignButterworthBandpass(low_hz, high_hz, order, fs));
}

EEGTrial Downsample(const EEGTrial& trial, int factor) {
  if (factor < 1) throw ParameterError("downsample factor must be >= 1");
  WarnIfTruncated(trial.samples(), factor);
  return Decimate(trial, factor);
}

Dataset BandpassFilter(const Dataset& ds, double low_hz, double high_hz, int order) {
  const SosFilter sos = DesignButterworthBandpass(low_hz, high_hz, order, ds.sampling_rate_hz);
  Dataset out = ds;
  for (auto& t : out.trials) t = FilterTrial(t, sos);
  out.metadata["bandpass_hz"] = std::to_string(low_hz) + "-" + std::to_string(high_hz);
  out.metadata["bandpass_order"] = std::to_string(order);
  return out;
}

Dataset Downsample(const Dataset& ds, int factor) {
  if (factor < 1) throw ParameterError("downsample factor must be >= 1");
  WarnIfTruncated(ds.sample_count, factor);
  Dataset out = ds;
  for (auto& t : out.trials) t = Decimate(t, factor);
  out.sample_count = ds.sample_count / factor;
  out.sampling_rate_hz = ds.sampling_rate_hz / factor;
  out.metadata["downsample_factor"] = std::to_string(factor);
  return out;
}

}  // namespace erpvis
