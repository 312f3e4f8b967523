// Copyright 2026 The apkscan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef APKSCAN_REPORT_HPP_
#define APKSCAN_REPORT_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "apkscan/knowledge_base.hpp"
#include "apkscan/rules.hpp"

namespace apkscan {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kMatrixSchemaVersion = 1;

// One finding rendered with the six report fields.
struct ReportSection {
  RuleId rule = RuleId::kImplicitIntentService;
  std::string title;                      // title of vector
  std::vector<std::string> source_paths;  // evidence locations
  Severity severity = Severity::kInfo;
  std::string category;
  std::string background;
  std::string recommendation;
  bool operator==(const ReportSection&) const = default;
};

struct Report {
  int schema_version = kReportSchemaVersion;
  std::string apk_name;
  std::string generated_at;  // ISO-8601 UTC
  std::vector<ReportSection> sections;
  std::vector<std::string> appendix;  // user countermeasures
  bool operator==(const Report&) const = default;
};

// Sections are ordered critical first, then by rule, keeping the engine's
// order for findings of the same rule.
Report render_report(const ScanResult& result, const KnowledgeBase& kb,
                     std::string generated_at);

struct FleetMatrix {
  int schema_version = kMatrixSchemaVersion;
  std::vector<std::string> apps;
  std::vector<std::array<bool, kRuleCount>> cells;
  std::vector<int> totals;
  // Percentage of the 14 rules, in hundredths of a percent (2143 = 21.43%).
  std::vector<std::int64_t> percentage_hundredths;
  bool operator==(const FleetMatrix&) const = default;
};

FleetMatrix build_fleet_matrix(std::span<const ScanResult> results);

// round(100 * count / of, 2 decimals, half-up), in hundredths.
std::int64_t percentage_hundredths(std::int64_t count,
                                   std::int64_t of = kRuleCount);

// "21.43" style rendering of a hundredths value.
std::string format_hundredths(std::int64_t hundredths);

enum class OutputFormat { kText, kJson, kCsv };

std::string_view to_string(OutputFormat format);
std::optional<OutputFormat> parse_output_format(std::string_view text);

std::string serialize(const Report& report, OutputFormat format);
std::string serialize(const FleetMatrix& matrix, OutputFormat format);
std::string serialize(const ScanResult& result, OutputFormat format);

// Several reports as one document: a JSON array, a single CSV table with a
// leading "apk" column, or text reports separated by rules.
std::string serialize_reports(std::span<const Report> reports, OutputFormat format);

// Inverses of the JSON serializations. Raise ErrorCode::kMalformedDocument.
Report report_from_json(std::string_view text);
FleetMatrix fleet_matrix_from_json(std::string_view text);
ScanResult scan_result_from_json(std::string_view text);

}  // namespace apkscan

#endif  // APKSCAN_REPORT_HPP_
