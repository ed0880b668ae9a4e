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

#include <string>

#include <json.hpp>

#include "erpvis/protocol.hpp"

namespace erpvis {

enum class ReportFormat { kJson, kCsv, kText };
ReportFormat ParseReportFormat(const std::string& token);  // "json" | "csv" | "text"

// Published accuracies on the original 10-subject recordings, printed beside
// synthetic or converted-data results for orientation only.
struct PublishedAccuracy {
  const char* label_kind;
  const char* framework;
  double accuracy;  // fraction
};
const std::vector<PublishedAccuracy>& PublishedCrossSubjectAccuracies();

nlohmann::json ToJson(const ComparisonTable& table);
ComparisonTable ComparisonFromJson(const nlohmann::json& doc);  // FormatError

// CSV columns: protocol,label_kind,framework,accuracy,improvement
std::string RenderCsv(const ComparisonTable& table);
// Aligned plain-text table followed by footnotes.
std::string RenderText(const ComparisonTable& table);
std::string Render(const ComparisonTable& table, ReportFormat format);

// Evaluation reports rendered the same way (one row per report).
std::string RenderText(const EvalReport& report);
std::string RenderCsv(const EvalReport& report);

}  // namespace erpvis
