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

#include "apkscan/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

#include "apkscan/error.hpp"

namespace apkscan {
namespace {

using Json = nlohmann::ordered_json;

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(text);
  }
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostringstream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_field(fields[i]);
  }
  out << "\r\n";
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedDocument, what);
}

Json parse_object(std::string_view text) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) malformed("not a JSON object");
  return doc;
}

template <typename T>
T field(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    malformed(std::string("field '") + key + "' has the wrong type");
  }
}

RuleId rule_field(const Json& obj) {
  const auto code = field<std::string>(obj, "rule");
  const auto rule = parse_rule_id(code);
  if (!rule) malformed("unknown rule '" + code + "'");
  return *rule;
}

Severity severity_field(const Json& obj) {
  const auto text = field<std::string>(obj, "severity");
  const auto severity = parse_severity(text);
  if (!severity) malformed("unknown severity '" + text + "'");
  return *severity;
}

const Json& array_field(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) {
    malformed(std::string("missing array '") + key + "'");
  }
  return *it;
}

void check_schema(const Json& doc, int expected) {
  if (field<int>(doc, "schema_version") != expected) {
    malformed("unsupported schema_version");
  }
}

std::string indent_wrap(std::string_view label, std::string_view text) {
  return "    " + std::string(label) + ": " + std::string(text) + "\n";
}

}  // namespace

Report render_report(const ScanResult& result, const KnowledgeBase& kb,
                     std::string generated_at) {
  Report report;
  report.apk_name = result.apk_name;
  report.generated_at = std::move(generated_at);
  std::vector<const Finding*> ordered;
  for (const Finding& f : result.findings) ordered.push_back(&f);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Finding* a, const Finding* b) {
                     if (a->severity != b->severity) return a->severity > b->severity;
                     return a->rule < b->rule;
                   });
  for (const Finding* f : ordered) {
    const ThreatEntry& threat = kb.threat_for(f->rule);
    ReportSection section;
    section.rule = f->rule;
    section.title = f->title;
    for (const Evidence& e : f->evidence) section.source_paths.push_back(e.location);
    section.severity = f->severity;
    section.category = f->category;
    section.background = kb.background_for(f->rule) + " Threat: " +
                         threat.threat_name + ". " + threat.description;
    section.recommendation = kb.countermeasure_for(f->rule).developer_action;
    report.sections.push_back(std::move(section));
  }
  for (const UserCountermeasure& u : kb.user_countermeasures()) {
    report.appendix.push_back(u.text);
  }
  return report;
}

std::int64_t percentage_hundredths(std::int64_t count, std::int64_t of) {
  // floor(10000 * count / of + 1/2), exact in integers.
  return (20000 * count + of) / (2 * of);
}

std::string format_hundredths(std::int64_t hundredths) {
  std::string cents = std::to_string(hundredths % 100);
  if (cents.size() < 2) cents.insert(0, "0");
  return std::to_string(hundredths / 100) + "." + cents;
}

FleetMatrix build_fleet_matrix(std::span<const ScanResult> results) {
  if (results.empty()) {
    throw Error(ErrorCode::kEmptyFleet, "a fleet matrix needs at least one app");
  }
  FleetMatrix matrix;
  std::set<std::string_view> names;
  for (const ScanResult& r : results) {
    if (!names.insert(r.apk_name).second) {
      throw Error(ErrorCode::kDuplicateAppName,
                  "app '" + r.apk_name + "' appears more than once");
    }
    matrix.apps.push_back(r.apk_name);
    matrix.cells.push_back(r.rule_vector);
    const int total = static_cast<int>(
        std::count(r.rule_vector.begin(), r.rule_vector.end(), true));
    matrix.totals.push_back(total);
    matrix.percentage_hundredths.push_back(percentage_hundredths(total));
  }
  return matrix;
}

std::string_view to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::kText: return "text";
    case OutputFormat::kJson: return "json";
    case OutputFormat::kCsv: return "csv";
  }
  return "text";
}

std::optional<OutputFormat> parse_output_format(std::string_view text) {
  for (const auto f : {OutputFormat::kText, OutputFormat::kJson, OutputFormat::kCsv}) {
    if (to_string(f) == text) return f;
  }
  return std::nullopt;
}

std::string serialize(const Report& report, OutputFormat format) {
  std::ostringstream out;
  switch (format) {
    case OutputFormat::kJson: {
      Json doc;
      doc["schema_version"] = report.schema_version;
      doc["apk_name"] = report.apk_name;
      doc["generated_at"] = report.generated_at;
      doc["sections"] = Json::array();
      for (const ReportSection& s : report.sections) {
        doc["sections"].push_back({
            {"rule", rule_info(s.rule).code},
            {"title", s.title},
            {"source_paths", s.source_paths},
            {"severity", to_string(s.severity)},
            {"category", s.category},
            {"background", s.background},
            {"recommendation", s.recommendation},
        });
      }
      doc["appendix"] = report.appendix;
      out << doc.dump(2) << "\n";
      break;
    }
    case OutputFormat::kCsv: {
      write_csv_row(out, {"rule", "title", "severity", "category", "source_paths",
                          "background", "recommendation"});
      for (const ReportSection& s : report.sections) {
        std::string paths;
        for (const auto& p : s.source_paths) paths += (paths.empty() ? "" : " | ") + p;
        write_csv_row(out, {std::string(rule_info(s.rule).code), s.title,
                            std::string(to_string(s.severity)), s.category, paths,
                            s.background, s.recommendation});
      }
      break;
    }
    case OutputFormat::kText: {
      out << "apkscan report (schema " << report.schema_version << ")\n"
          << "APK:       " << report.apk_name << "\n"
          << "Generated: " << report.generated_at << "\n"
          << "Findings:  " << report.sections.size() << "\n";
      for (std::size_t i = 0; i < report.sections.size(); ++i) {
        const ReportSection& s = report.sections[i];
        out << "\n[" << i + 1 << "] " << rule_info(s.rule).code << " " << s.title << "\n"
            << indent_wrap("Severity", to_string(s.severity))
            << indent_wrap("Category", s.category) << "    Source paths:\n";
        for (const auto& p : s.source_paths) out << "      - " << p << "\n";
        out << indent_wrap("Background", s.background)
            << indent_wrap("Recommendation", s.recommendation);
      }
      out << "\nUser countermeasures:\n";
      for (std::size_t i = 0; i < report.appendix.size(); ++i) {
        out << "  " << i + 1 << ". " << report.appendix[i] << "\n";
      }
      break;
    }
  }
  return out.str();
}

std::string serialize(const FleetMatrix& matrix, OutputFormat format) {
  std::ostringstream out;
  switch (format) {
    case OutputFormat::kJson: {
      Json doc;
      doc["schema_version"] = matrix.schema_version;
      doc["rules"] = Json::array();
      for (const RuleId rule : kAllRules) {
        doc["rules"].push_back({{"id", rule_info(rule).code},
                                {"title", rule_info(rule).title}});
      }
      doc["apps"] = Json::array();
      for (std::size_t a = 0; a < matrix.apps.size(); ++a) {
        doc["apps"].push_back({
            {"name", matrix.apps[a]},
            {"cells", matrix.cells[a]},
            {"total", matrix.totals[a]},
            {"percentage", format_hundredths(matrix.percentage_hundredths[a])},
        });
      }
      out << doc.dump(2) << "\n";
      break;
    }
    case OutputFormat::kCsv: {
      std::vector<std::string> header = {"App"};
      for (const RuleId rule : kAllRules) header.emplace_back(rule_info(rule).title);
      header.emplace_back("Total");
      header.emplace_back("Percentage");
      write_csv_row(out, header);
      for (std::size_t a = 0; a < matrix.apps.size(); ++a) {
        std::vector<std::string> row = {matrix.apps[a]};
        for (const bool cell : matrix.cells[a]) row.emplace_back(cell ? "YES" : "no");
        row.push_back(std::to_string(matrix.totals[a]));
        row.push_back(format_hundredths(matrix.percentage_hundredths[a]));
        write_csv_row(out, row);
      }
      break;
    }
    case OutputFormat::kText: {
      // Rules as rows and apps as columns; YES marks a vulnerable cell.
      std::size_t label_width = std::string_view("Percentage").size();
      for (const RuleId rule : kAllRules) {
        label_width = std::max(label_width, rule_info(rule).title.size() + 4);
      }
      std::vector<std::size_t> widths;
      for (const auto& app : matrix.apps) widths.push_back(std::max<std::size_t>(app.size(), 7));
      auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
      };
      out << pad("Rule", label_width);
      for (std::size_t a = 0; a < matrix.apps.size(); ++a) out << "  " << pad(matrix.apps[a], widths[a]);
      out << "\n";
      for (const RuleId rule : kAllRules) {
        out << pad(std::string(rule_info(rule).code) + " " + std::string(rule_info(rule).title),
                   label_width);
        for (std::size_t a = 0; a < matrix.apps.size(); ++a) {
          out << "  " << pad(matrix.cells[a][index_of(rule)] ? "YES" : "no", widths[a]);
        }
        out << "\n";
      }
      out << pad("Total", label_width);
      for (std::size_t a = 0; a < matrix.apps.size(); ++a) {
        out << "  " << pad(std::to_string(matrix.totals[a]), widths[a]);
      }
      out << "\n" << pad("Percentage", label_width);
      for (std::size_t a = 0; a < matrix.apps.size(); ++a) {
        out << "  " << pad(format_hundredths(matrix.percentage_hundredths[a]) + "%", widths[a]);
      }
      out << "\n";
      break;
    }
  }
  return out.str();
}

std::string serialize(const ScanResult& result, OutputFormat format) {
  if (format == OutputFormat::kJson) {
    Json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["apk_name"] = result.apk_name;
    doc["rule_vector"] = result.rule_vector;
    doc["findings"] = Json::array();
    for (const Finding& f : result.findings) {
      Json evidence = Json::array();
      for (const Evidence& e : f.evidence) {
        evidence.push_back({{"kind", to_string(e.kind)}, {"location", e.location}});
      }
      doc["findings"].push_back({{"rule", rule_info(f.rule).code},
                                 {"severity", to_string(f.severity)},
                                 {"title", f.title},
                                 {"category", f.category},
                                 {"evidence", evidence}});
    }
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  if (format == OutputFormat::kCsv) {
    write_csv_row(out, {"rule", "severity", "title", "evidence_kind", "location"});
    for (const Finding& f : result.findings) {
      for (const Evidence& e : f.evidence) {
        write_csv_row(out, {std::string(rule_info(f.rule).code),
                            std::string(to_string(f.severity)), f.title,
                            std::string(to_string(e.kind)), e.location});
      }
    }
    return out.str();
  }
  out << result.apk_name << ": " << result.vulnerable_count() << "/" << kRuleCount
      << " rules vulnerable\n";
  for (const RuleId rule : kAllRules) {
    out << "  " << rule_info(rule).code << " "
        << (result.rule_vector[index_of(rule)] ? "YES" : "no ") << "  "
        << rule_info(rule).title << "\n";
  }
  return out.str();
}

std::string serialize_reports(std::span<const Report> reports,
                              OutputFormat format) {
  std::string out;
  switch (format) {
    case OutputFormat::kJson:
      out = "[\n";
      for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i) out += ",\n";
        std::string doc = serialize(reports[i], OutputFormat::kJson);
        doc.pop_back();  // trailing newline
        out += doc;
      }
      out += "\n]\n";
      break;
    case OutputFormat::kCsv: {
      std::ostringstream csv;
      write_csv_row(csv, {"apk", "rule", "title", "severity", "category",
                          "source_paths", "background", "recommendation"});
      for (const Report& r : reports) {
        for (const ReportSection& s : r.sections) {
          std::string paths;
          for (const auto& p : s.source_paths) paths += (paths.empty() ? "" : " | ") + p;
          write_csv_row(csv, {r.apk_name, std::string(rule_info(s.rule).code), s.title,
                              std::string(to_string(s.severity)), s.category, paths,
                              s.background, s.recommendation});
        }
      }
      out = csv.str();
      break;
    }
    case OutputFormat::kText:
      for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i) out += "\n" + std::string(72, '=') + "\n\n";
        out += serialize(reports[i], OutputFormat::kText);
      }
      break;
  }
  return out;
}

Report report_from_json(std::string_view text) {
  const Json doc = parse_object(text);
  check_schema(doc, kReportSchemaVersion);
  Report report;
  report.apk_name = field<std::string>(doc, "apk_name");
  report.generated_at = field<std::string>(doc, "generated_at");
  for (const Json& s : array_field(doc, "sections")) {
    ReportSection section;
    section.rule = rule_field(s);
    section.title = field<std::string>(s, "title");
    section.source_paths = field<std::vector<std::string>>(s, "source_paths");
    section.severity = severity_field(s);
    section.category = field<std::string>(s, "category");
    section.background = field<std::string>(s, "background");
    section.recommendation = field<std::string>(s, "recommendation");
    report.sections.push_back(std::move(section));
  }
  report.appendix = field<std::vector<std::string>>(doc, "appendix");
  return report;
}

FleetMatrix fleet_matrix_from_json(std::string_view text) {
  const Json doc = parse_object(text);
  check_schema(doc, kMatrixSchemaVersion);
  FleetMatrix matrix;
  for (const Json& app : array_field(doc, "apps")) {
    const auto cells = field<std::vector<bool>>(app, "cells");
    if (cells.size() != kRuleCount) malformed("app row must have 14 cells");
    std::array<bool, kRuleCount> row{};
    std::copy(cells.begin(), cells.end(), row.begin());
    const int total = field<int>(app, "total");
    if (total != std::count(row.begin(), row.end(), true)) {
      malformed("total disagrees with cells");
    }
    const auto percentage = field<std::string>(app, "percentage");
    if (percentage != format_hundredths(percentage_hundredths(total))) {
      malformed("percentage disagrees with total");
    }
    matrix.apps.push_back(field<std::string>(app, "name"));
    matrix.cells.push_back(row);
    matrix.totals.push_back(total);
    matrix.percentage_hundredths.push_back(percentage_hundredths(total));
  }
  return matrix;
}

ScanResult scan_result_from_json(std::string_view text) {
  const Json doc = parse_object(text);
  check_schema(doc, kReportSchemaVersion);
  ScanResult result;
  result.apk_name = field<std::string>(doc, "apk_name");
  const auto vector = field<std::vector<bool>>(doc, "rule_vector");
  if (vector.size() != kRuleCount) malformed("rule_vector must have 14 entries");
  std::copy(vector.begin(), vector.end(), result.rule_vector.begin());
  for (const Json& f : array_field(doc, "findings")) {
    Finding finding;
    finding.rule = rule_field(f);
    finding.severity = severity_field(f);
    finding.title = field<std::string>(f, "title");
    finding.category = field<std::string>(f, "category");
    for (const Json& e : array_field(f, "evidence")) {
      const auto kind_text = field<std::string>(e, "kind");
      const auto kind = parse_evidence_kind(kind_text);
      if (!kind) malformed("unknown evidence kind '" + kind_text + "'");
      finding.evidence.push_back({*kind, field<std::string>(e, "location")});
    }
    result.findings.push_back(std::move(finding));
  }
  return result;
}

}  // namespace apkscan
