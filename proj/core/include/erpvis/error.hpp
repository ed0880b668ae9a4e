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

#include <stdexcept>
#include <string>

namespace erpvis {

// Base for every error raised by the library. The CLI maps any Error to
// exit code 2 (data/format failure).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ERPVIS_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

ERPVIS_DEFINE_ERROR(ConfigError);
ERPVIS_DEFINE_ERROR(ParameterError);
ERPVIS_DEFINE_ERROR(FormatError);
ERPVIS_DEFINE_ERROR(PartitionError);
ERPVIS_DEFINE_ERROR(SplitError);
ERPVIS_DEFINE_ERROR(DomainError);
ERPVIS_DEFINE_ERROR(DimensionError);
ERPVIS_DEFINE_ERROR(ConsistencyError);
ERPVIS_DEFINE_ERROR(TrainingError);
ERPVIS_DEFINE_ERROR(EvaluationError);

#undef ERPVIS_DEFINE_ERROR

}  // namespace erpvis
