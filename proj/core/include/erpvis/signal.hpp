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

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "erpvis/eeg_data.hpp"

namespace erpvis {

// Biquad in transposed direct form II; a[0] is always 1.
struct SecondOrderSection {
  std::array<double, 3> b{};
  std::array<double, 3> a{1.0, 0.0, 0.0};
};

using SosFilter = std::vector<SecondOrderSection>;

// Digital Butterworth band-pass of total order `order` (even, >= 2), designed
// by bilinear transform with pre-warped edges and normalised to unit gain at
// the geometric centre frequency. Throws ParameterError unless
// 0 < low_hz < high_hz < fs / 2.
SosFilter DesignButterworthBandpass(double low_hz, double high_hz, int order, double fs);

// Complex response of the cascade at `freq_hz`.
std::complex<double> FrequencyResponse(const SosFilter& sos, double freq_hz, double fs);

// Single forward pass with zero initial state.
std::vector<double> SosFilterForward(const SosFilter& sos, std::span<const double> x);

// Zero-phase forward-backward filtering with odd-reflection padding and
// steady-state initial conditions. Output has the same length as the input.
std::vector<double> SosFiltFilt(const SosFilter& sos, std::span<const double> x);

// Per-channel zero-phase band-pass; labels and shape are preserved.
EEGTrial BandpassFilter(const EEGTrial& trial, double low_hz, double high_hz, int order,
                        double fs);

// Keeps every factor-th sample starting at 0. The caller is responsible for
// band-limiting first. A sample count not divisible by `factor` is truncated
// from the tail (with a warning). Throws ParameterError if factor < 1.
EEGTrial Downsample(const EEGTrial& trial, int factor);

Dataset BandpassFilter(const Dataset& ds, double low_hz, double high_hz, int order);
Dataset Downsample(const Dataset& ds, int factor);

}  // namespace erpvis
