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

#ifndef APKSCAN_KNOWLEDGE_BASE_HPP_
#define APKSCAN_KNOWLEDGE_BASE_HPP_

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "apkscan/rules.hpp"

namespace apkscan {

struct ThreatEntry {
  RuleId rule;
  std::string threat_name;
  std::string description;
};

struct CountermeasureEntry {
  RuleId rule;
  std::string developer_action;
};

struct UserCountermeasure {
  std::string text;
};

inline constexpr std::size_t kUserCountermeasureCount = 6;

// Threats, countermeasures and background text for each rule. Loaded from a
// JSON document; the default document is compiled into the library.
class KnowledgeBase {
 public:
  static const KnowledgeBase& embedded();
  static KnowledgeBase from_json(std::string_view text);
  static KnowledgeBase from_file(const std::filesystem::path& path);

  const ThreatEntry& threat_for(RuleId rule) const;
  const CountermeasureEntry& countermeasure_for(RuleId rule) const;
  const std::string& background_for(RuleId rule) const;
  const std::vector<UserCountermeasure>& user_countermeasures() const {
    return user_countermeasures_;
  }

 private:
  KnowledgeBase() = default;

  std::array<ThreatEntry, kRuleCount> threats_{};
  std::array<CountermeasureEntry, kRuleCount> countermeasures_{};
  std::array<std::string, kRuleCount> backgrounds_{};
  std::vector<UserCountermeasure> user_countermeasures_;
};

// The raw embedded document.
std::string_view embedded_knowledge_base_json();

}  // namespace apkscan

#endif  // APKSCAN_KNOWLEDGE_BASE_HPP_
