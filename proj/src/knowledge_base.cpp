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

#include "apkscan/knowledge_base.hpp"

#include <nlohmann/json.hpp>

#include <bitset>

#include "apkscan/apk_archive.hpp"
#include "apkscan/error.hpp"

namespace apkscan {
namespace {

#include "knowledge_base_data.inc"

std::string required_string(const nlohmann::json& record, const char* key,
                            std::string_view rule) {
  const auto it = record.find(key);
  if (it == record.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw Error(ErrorCode::kKnowledgeBaseInvalid,
                "record " + std::string(rule) + " lacks a non-empty '" + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

std::string_view embedded_knowledge_base_json() { return kEmbeddedKnowledgeBase; }

const KnowledgeBase& KnowledgeBase::embedded() {
  static const KnowledgeBase kb = from_json(kEmbeddedKnowledgeBase);
  return kb;
}

KnowledgeBase KnowledgeBase::from_json(std::string_view text) {
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kKnowledgeBaseInvalid, "not a JSON object");
  }
  const auto rules = doc.find("rules");
  const auto users = doc.find("user_countermeasures");
  if (rules == doc.end() || !rules->is_array() || users == doc.end() ||
      !users->is_array()) {
    throw Error(ErrorCode::kKnowledgeBaseInvalid,
                "expected 'rules' and 'user_countermeasures' arrays");
  }

  KnowledgeBase kb;
  std::bitset<kRuleCount> seen;
  for (const auto& record : *rules) {
    if (!record.is_object()) {
      throw Error(ErrorCode::kKnowledgeBaseInvalid, "rule record is not an object");
    }
    const std::string code = required_string(record, "rule_id", "?");
    const auto rule = parse_rule_id(code);
    if (!rule) {
      throw Error(ErrorCode::kKnowledgeBaseInvalid, "unknown rule_id '" + code + "'");
    }
    const std::size_t i = index_of(*rule);
    if (seen.test(i)) {
      throw Error(ErrorCode::kKnowledgeBaseInvalid, "duplicate record for " + code);
    }
    seen.set(i);
    // Read every field before building the entries; a throw from inside an
    // aggregate initializer leaks its finished members on GCC 11.
    std::string threat_name = required_string(record, "threat_name", code);
    std::string description = required_string(record, "threat_description", code);
    std::string action = required_string(record, "developer_countermeasure", code);
    kb.backgrounds_[i] = required_string(record, "background", code);
    kb.threats_[i] = {*rule, std::move(threat_name), std::move(description)};
    kb.countermeasures_[i] = {*rule, std::move(action)};
  }
  if (!seen.all()) {
    throw Error(ErrorCode::kKnowledgeBaseInvalid,
                "expected one record per rule, found " + std::to_string(seen.count()));
  }
  for (const auto& item : *users) {
    if (!item.is_string() || item.get<std::string>().empty()) {
      throw Error(ErrorCode::kKnowledgeBaseInvalid,
                  "user countermeasure is not a non-empty string");
    }
    kb.user_countermeasures_.push_back({item.get<std::string>()});
  }
  if (kb.user_countermeasures_.size() != kUserCountermeasureCount) {
    throw Error(ErrorCode::kKnowledgeBaseInvalid,
                "expected 6 user countermeasures, found " +
                    std::to_string(kb.user_countermeasures_.size()));
  }
  return kb;
}

KnowledgeBase KnowledgeBase::from_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return from_json(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                    bytes.size()));
}

const ThreatEntry& KnowledgeBase::threat_for(RuleId rule) const {
  return threats_.at(index_of(rule));
}

const CountermeasureEntry& KnowledgeBase::countermeasure_for(RuleId rule) const {
  return countermeasures_.at(index_of(rule));
}

const std::string& KnowledgeBase::background_for(RuleId rule) const {
  return backgrounds_.at(index_of(rule));
}

}  // namespace apkscan
