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

#include <filesystem>
#include <string>

#include "erpvis/eeg_data.hpp"
#include "erpvis/erp.hpp"

namespace erpvis {

// On-disk container: a directory holding
//
//   manifest.json  {version, kind, n_trials, channels, samples,
//                   sampling_rate_hz, subjects, exemplar_to_category,
//                   metadata, [provenance]}
//   trials.bin     "EEGT", u32 version = 1, u32 n_trials, u32 channels,
//                  u32 samples, then per record: u16 subject_id,
//                  u16 exemplar_id, [u16 n_averaged when kind == "erp"],
//                  channels * samples float32, channel-major.
//
// All integers and floats are little-endian. Load errors are FormatError and
// name the offending field.
inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kTrialsFile = "trials.bin";

void SaveDataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset LoadDataset(const std::filesystem::path& dir);

void SaveErpSpace(const ERPSpace& space, const std::filesystem::path& dir);
ERPSpace LoadErpSpace(const std::filesystem::path& dir);

// "eeg" or "erp", read from the manifest (a missing kind means "eeg").
std::string ContainerKind(const std::filesystem::path& dir);

}  // namespace erpvis
