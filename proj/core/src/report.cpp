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

#include "erpvis/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "erpvis/error.hpp"

namespace erpvis {
namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string Percent(double v) { return Fixed(100.0 * v, 2) + "%"; }

std::string SignedPoints(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.2f pp", 100.0 * v);
  return buf;
}

std::string Table(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      if (c) out << "  ";
      out << cells[r][c];
      if (c + 1 < cells[r].size()) out << std::string(width[c] - cells[r][c].size(), ' ');
    }
    out << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    }
  }
  return out.str();
}

}  // namespace

ReportFormat ParseReportFormat(const std::string& token) {
  if (token == "json") return ReportFormat::kJson;
  if (token == "csv") return ReportFormat::kCsv;
  if (token == "text") return ReportFormat::kText;
  throw ParameterError("unknown format '" + token + "' (expected json, csv or text)");
}

const std::vector<PublishedAccuracy>& PublishedCrossSubjectAccuracies() {
  static const std::vector<PublishedAccuracy> kValues = {
      {"category", "linear (Kaneshiro et al.)", 0.4068},
      {"category", "EEG-LSTM", 0.3672},
      {"category", "ERP-LSTM", 0.6681},
      {"exemplar", "linear (Kaneshiro et al.)", 0.1446},
      {"exemplar", "EEG-LSTM", 0.0797},
      {"exemplar", "ERP-LSTM", 0.2708},
  };
  return kValues;
}

nlohmann::json ToJson(const ComparisonTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"protocol", r.protocol},
                    {"label_kind", ToString(r.label_kind)},
                    {"framework", r.framework},
                    {"accuracy", r.accuracy},
                    {"improvement", r.improvement ? nlohmann::json(*r.improvement) : nlohmann::json()}});
  }
  return {{"rows", rows}, {"footnotes", table.footnotes}, {"config", table.config}};
}

ComparisonTable ComparisonFromJson(const nlohmann::json& doc) {
  ComparisonTable table;
  try {
    if (!doc.is_object() || !doc.contains("rows")) throw FormatError("comparison document has no 'rows' array");
    for (const auto& r : doc.at("rows")) {
      ComparisonRow row;
      row.protocol = r.at("protocol").get<std::string>();
      row.label_kind = ParseLabelKind(r.at("label_kind").get<std::string>());
      row.framework = r.at("framework").get<std::string>();
      row.accuracy = r.at("accuracy").get<double>();
      if (r.contains("improvement") && !r.at("improvement").is_null()) {
        row.improvement = r.at("improvement").get<double>();
      }
      table.rows.push_back(std::move(row));
    }
    if (doc.contains("footnotes")) table.footnotes = doc.at("footnotes").get<std::vector<std::string>>();
    if (doc.contains("config")) table.config = doc.at("config");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed comparison document: ") + e.what());
  } catch (const ParameterError& e) {
    throw FormatError(std::string("malformed comparison document: ") + e.what());
  }
  return table;
}

std::string RenderCsv(const ComparisonTable& table) {
  std::ostringstream out;
  out << "protocol,label_kind,framework,accuracy,improvement\n";
  for (const auto& r : table.rows) {
    out << r.protocol << ',' << ToString(r.label_kind) << ',' << r.framework << ',' << Fixed(r.accuracy, 6)
        << ',' << (r.improvement ? Fixed(*r.improvement, 6) : std::string()) << '\n';
  }
  return out.str();
}

std::string RenderText(const ComparisonTable& table) {
  std::vector<std::vector<std::string>> cells = {{"protocol", "labels", "framework", "accuracy", "improvement"}};
  for (const auto& r : table.rows) {
    cells.push_back({r.protocol, ToString(r.label_kind), r.framework, Percent(r.accuracy),
                     r.improvement ? SignedPoints(*r.improvement) : std::string()});
  }
  std::string out = Table(cells);
  if (!table.footnotes.empty()) {
    out += '\n';
    for (const auto& f : table.footnotes) out += "* " + f + '\n';
  }
  return out;
}

std::string Render(const ComparisonTable& table, ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson: return ToJson(table).dump(2) + '\n';
    case ReportFormat::kCsv: return RenderCsv(table);
    case ReportFormat::kText: break;
  }
  return RenderText(table);
}

std::string RenderText(const EvalReport& report) {
  std::ostringstream out;
  out << "protocol   " << report.protocol;
  if (report.subject_id) out << " (subject " << *report.subject_id << ")";
  out << "\nlabels     " << ToString(report.label_kind) << "\ninput      " << ToString(report.input_kind)
      << "\naccuracy   " << Percent(report.accuracy) << "  (" << report.confusion.trace() << "/"
      << report.n_test << ")\ntrain/test " << report.n_train << "/" << report.n_test << "\n\nconfusion (rows: true, columns: predicted)\n";
  std::vector<std::vector<std::string>> cells(1, {""});
  for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) cells[0].push_back(std::to_string(c));
  for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
    std::vector<std::string> row = {std::to_string(r)};
    for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) row.push_back(std::to_string(report.confusion(r, c)));
    cells.push_back(std::move(row));
  }
  out << Table(cells);
  return out.str();
}

std::string RenderCsv(const EvalReport& report) {
  std::ostringstream out;
  out << "protocol,subject_id,label_kind,input_kind,accuracy,n_train,n_test\n"
      << report.protocol << ',' << (report.subject_id ? std::to_string(*report.subject_id) : std::string()) << ','
      << ToString(report.label_kind) << ',' << ToString(report.input_kind) << ',' << Fixed(report.accuracy, 6)
      << ',' << report.n_train << ',' << report.n_test << '\n';
  return out.str();
}

}  // namespace erpvis
