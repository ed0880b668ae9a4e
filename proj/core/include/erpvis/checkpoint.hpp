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
#include <map>
#include <string>

#include "erpvis/lstm.hpp"

namespace erpvis {

// Model checkpoint:
//
//   "ERPL"            magic
//   u32               version (1)
//   u32               header length in bytes
//   header            UTF-8 "key=value\n" lines, keys sorted; always holds
//                     input_size, hidden_size, num_layers, repr_dim,
//                     num_classes
//   u64               parameter count
//   f64 * count       parameters, little-endian, in this order:
//                       per layer: for gate in (input, forget, output,
//                       candidate): W_gate input block (h x in), W_gate
//                       recurrent block (h x h); then b_input, b_forget,
//                       b_output, b_candidate (h each);
//                       projection W (repr x h), projection b (repr);
//                       head W (K x repr), head b (K).
//                     Matrices are written row-major.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  LstmModel model;
  // Extra key/value pairs (label kind, seeds, split settings, ...).
  std::map<std::string, std::string> info;
};

void SaveCheckpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
// Throws FormatError on a bad magic, version, header or truncated payload.
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace erpvis
