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

#ifndef APKSCAN_RULES_HPP_
#define APKSCAN_RULES_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apkscan/apk_archive.hpp"
#include "apkscan/dex.hpp"
#include "apkscan/manifest.hpp"

namespace apkscan {

// The fourteen banking-app checks, in report/matrix row order.
enum class RuleId : std::uint8_t {
  kImplicitIntentService,
  kIntentFilterMisconfiguration,
  kProviderExposure,
  kRemoteCodeExecution,
  kDeviceIdAccess,
  kNormalProtectionLevel,
  kLocalFileAccess,
  kWebViewJavaScript,
  kNoRootCheck,
  kAdbBackup,
  kFileUnsafeDelete,
  kNoSignatureCheck,
  kScreenshotAllowed,
  kNoInstallerCheck,
};

inline constexpr std::size_t kRuleCount = 14;

inline constexpr std::array<RuleId, kRuleCount> kAllRules = {
    RuleId::kImplicitIntentService,  RuleId::kIntentFilterMisconfiguration,
    RuleId::kProviderExposure,       RuleId::kRemoteCodeExecution,
    RuleId::kDeviceIdAccess,         RuleId::kNormalProtectionLevel,
    RuleId::kLocalFileAccess,        RuleId::kWebViewJavaScript,
    RuleId::kNoRootCheck,            RuleId::kAdbBackup,
    RuleId::kFileUnsafeDelete,       RuleId::kNoSignatureCheck,
    RuleId::kScreenshotAllowed,      RuleId::kNoInstallerCheck,
};

constexpr std::size_t index_of(RuleId rule) {
  return static_cast<std::size_t>(rule);
}

// Ordered so that a larger value is more severe.
enum class Severity : std::uint8_t { kInfo, kNotice, kWarning, kCritical };

std::string_view to_string(Severity severity);
std::optional<Severity> parse_severity(std::string_view text);

struct RuleInfo {
  RuleId id;
  std::string_view code;   // "R01"
  std::string_view slug;   // "implicit-intent-service"
  std::string_view title;  // matrix row / report heading
  Severity severity;
  std::string_view category;
  bool absence;  // flags a missing defence rather than a present construct
};

const RuleInfo& rule_info(RuleId rule);

// Accepts the code ("R04") or the slug.
std::optional<RuleId> parse_rule_id(std::string_view text);

enum class EvidenceKind { kManifest, kInvocation, kTypeReference, kAbsence };

std::string_view to_string(EvidenceKind kind);
std::optional<EvidenceKind> parse_evidence_kind(std::string_view text);

struct Evidence {
  EvidenceKind kind = EvidenceKind::kManifest;
  std::string location;
  auto operator<=>(const Evidence&) const = default;
};

struct Finding {
  RuleId rule = RuleId::kImplicitIntentService;
  Severity severity = Severity::kInfo;
  std::string title;
  std::vector<Evidence> evidence;
  std::string category;
  bool operator==(const Finding&) const = default;
};

struct ScanInput {
  ManifestModel manifest;
  std::vector<DexImage> dexes;
  std::string apk_name;
};

struct ScanResult {
  std::string apk_name;
  std::vector<Finding> findings;
  std::array<bool, kRuleCount> rule_vector{};
  bool operator==(const ScanResult&) const = default;

  std::size_t vulnerable_count() const;
  std::optional<Severity> highest_severity() const;
};

std::vector<Finding> evaluate_rule(RuleId rule, const ScanInput& input);

ScanResult run_all_rules(const ScanInput& input);

// Decodes the manifest and every loadable DEX entry of an archive.
ScanInput load_scan_input(const ApkArchive& archive, std::string apk_name);

inline ScanResult scan_archive(const ApkArchive& archive, std::string apk_name) {
  return run_all_rules(load_scan_input(archive, std::move(apk_name)));
}

}  // namespace apkscan

#endif  // APKSCAN_RULES_HPP_
