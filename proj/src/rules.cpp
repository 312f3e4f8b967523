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

#include "apkscan/rules.hpp"

#include <algorithm>
#include <cstdio>

#include "apkscan/error.hpp"

namespace apkscan {
namespace {

constexpr std::array<RuleInfo, kRuleCount> kRuleTable = {{
    {RuleId::kImplicitIntentService, "R01", "implicit-intent-service",
     "Implicit intent for service", Severity::kCritical, "Intent", false},
    {RuleId::kIntentFilterMisconfiguration, "R02", "intent-filter-misconfiguration",
     "Misconfiguration of intent-filters", Severity::kCritical, "Manifest", false},
    {RuleId::kProviderExposure, "R03", "provider-exposure",
     "Content Provider access from other apps on the device", Severity::kCritical,
     "Manifest", false},
    {RuleId::kRemoteCodeExecution, "R04", "remote-code-execution",
     "Remote code execution", Severity::kCritical, "WebView", false},
    {RuleId::kDeviceIdAccess, "R05", "device-id-access",
     "Getting IMEI and Device ID", Severity::kWarning, "Sensitive API", false},
    {RuleId::kNormalProtectionLevel, "R06", "normal-protection-level",
     "Normal protection-level of permission", Severity::kCritical, "Manifest", false},
    {RuleId::kLocalFileAccess, "R07", "local-file-access",
     "Local file system access", Severity::kWarning, "WebView", false},
    {RuleId::kWebViewJavaScript, "R08", "webview-javascript-enabled",
     "Webview JavaScript enabled", Severity::kWarning, "WebView", false},
    {RuleId::kNoRootCheck, "R09", "no-root-check",
     "Not executing 'root' or system privilege checks", Severity::kNotice,
     "Hacker Prevention", true},
    {RuleId::kAdbBackup, "R10", "adb-backup", "ADB backup", Severity::kWarning,
     "Manifest", false},
    {RuleId::kFileUnsafeDelete, "R11", "file-unsafe-delete",
     "File unsafe deleting", Severity::kNotice, "Data Storage", false},
    {RuleId::kNoSignatureCheck, "R12", "no-signature-check",
     "Not checking Package signature code", Severity::kNotice,
     "Hacker Prevention", true},
    {RuleId::kScreenshotAllowed, "R13", "screenshot-allowed",
     "Allowing screenshot capturing", Severity::kNotice, "Hacker Prevention", true},
    {RuleId::kNoInstallerCheck, "R14", "no-apk-installer-check",
     "Not checking APK installer sources", Severity::kNotice,
     "Hacker Prevention", true},
}};

constexpr std::string_view kWebView = "Landroid/webkit/WebView;";
constexpr std::string_view kWebSettings = "Landroid/webkit/WebSettings;";
constexpr std::int64_t kFlagSecure = 0x2000;

// A matched call together with the image it was found in.
struct Hit {
  const DexImage* dex;
  InvocationSite site;
};

std::vector<Hit> find_calls(const ScanInput& input, std::string_view owner,
                            std::string_view name) {
  std::vector<Hit> hits;
  for (const DexImage& dex : input.dexes) {
    for (auto& site : invocations_of(dex, owner, name)) {
      hits.push_back({&dex, std::move(site)});
    }
  }
  return hits;
}

std::optional<std::int64_t> literal_of(const Hit& hit) {
  return literal_reaching(hit.site, body_of(*hit.dex, hit.site));
}

std::string dex_label(const DexImage& dex) {
  return dex.entry_name.empty() ? std::string("<dex>") : dex.entry_name;
}

Evidence invocation_evidence(const Hit& hit) {
  char offset[16];
  std::snprintf(offset, sizeof offset, "0x%04x", hit.site.offset);
  return {EvidenceKind::kInvocation,
          dex_label(*hit.dex) + ":" + hit.site.caller_class + "->" +
              hit.site.caller_method + "@" + offset + " calls " +
              hit.site.callee.signature()};
}

std::string component_path(const ComponentDecl& c) {
  return "manifest/application/" + std::string(to_string(c.kind)) +
         "[@android:name='" + c.name + "']";
}

Finding make_finding(RuleId rule, std::vector<Evidence> evidence) {
  const RuleInfo& info = rule_info(rule);
  return {rule, info.severity, std::string(info.title), std::move(evidence),
          std::string(info.category)};
}

std::vector<Finding> one_per_call(RuleId rule, const std::vector<Hit>& hits) {
  std::vector<Finding> out;
  for (const Hit& hit : hits) {
    out.push_back(make_finding(rule, {invocation_evidence(hit)}));
  }
  return out;
}

std::string dex_list(const ScanInput& input) {
  std::string names;
  for (const DexImage& dex : input.dexes) {
    if (!names.empty()) names += ", ";
    names += dex_label(dex);
  }
  return names;
}

std::vector<Finding> absence(RuleId rule, const ScanInput& input,
                             std::string_view searched) {
  return {make_finding(rule, {{EvidenceKind::kAbsence,
                               "absence: " + std::string(searched) + " in " +
                                   dex_list(input)}})};
}

bool is_string_intent_ctor(const MethodRef& ref) {
  return ref.owner == "Landroid/content/Intent;" && ref.name == "<init>" &&
         !ref.parameters.empty() && ref.parameters.front() == "Ljava/lang/String;";
}

std::vector<Finding> implicit_intent_service(const ScanInput& input) {
  std::vector<Finding> out;
  for (const DexImage& dex : input.dexes) {
    for (std::size_t c = 0; c < dex.classes.size(); ++c) {
      for (std::size_t m = 0; m < dex.classes[c].methods.size(); ++m) {
        const MethodBody& body = dex.classes[c].methods[m];
        std::vector<Evidence> ctors;
        std::vector<Evidence> starts;
        for (const Instruction& insn : body.instructions) {
          if (!insn.is_invoke()) continue;
          const MethodRef& callee = dex.method_refs[insn.method_index];
          const Hit hit{&dex, {body.owner, body.name, callee, insn.offset, c, m}};
          if (is_string_intent_ctor(callee)) {
            ctors.push_back(invocation_evidence(hit));
          } else if (callee.name == "startService" || callee.name == "bindService") {
            starts.push_back(invocation_evidence(hit));
          }
        }
        if (ctors.empty() || starts.empty()) continue;
        ctors.insert(ctors.end(), starts.begin(), starts.end());
        out.push_back(make_finding(RuleId::kImplicitIntentService, std::move(ctors)));
      }
    }
  }
  return out;
}

std::vector<Finding> intent_filter_misconfiguration(const ScanInput& input) {
  std::vector<Finding> out;
  for (const ComponentDecl& c : input.manifest.components) {
    for (std::size_t f = 0; f < c.intent_filters.size(); ++f) {
      if (!c.intent_filters[f].actions.empty()) continue;
      out.push_back(make_finding(
          RuleId::kIntentFilterMisconfiguration,
          {{EvidenceKind::kManifest,
            component_path(c) + "/intent-filter[" + std::to_string(f) +
                "] declares no <action>"}}));
    }
  }
  return out;
}

std::vector<Finding> provider_exposure(const ScanInput& input) {
  std::vector<Finding> out;
  for (const ComponentDecl& c : input.manifest.components) {
    if (c.kind != ComponentKind::kProvider || c.permission ||
        !effective_exported(c, input.manifest.target_sdk)) {
      continue;
    }
    out.push_back(make_finding(
        RuleId::kProviderExposure,
        {{EvidenceKind::kManifest,
          component_path(c) + " exported=" + std::string(to_string(c.exported)) +
              " without android:permission"}}));
  }
  return out;
}

std::vector<Finding> normal_protection_level(const ScanInput& input) {
  std::vector<Finding> out;
  for (const PermissionDecl& p : input.manifest.declared_permissions) {
    if (p.protection_level != ProtectionLevel::kNormal &&
        p.protection_level != ProtectionLevel::kUnset) {
      continue;
    }
    out.push_back(make_finding(
        RuleId::kNormalProtectionLevel,
        {{EvidenceKind::kManifest,
          "manifest/permission[@android:name='" + p.name +
              "'] protectionLevel=" + std::string(to_string(p.protection_level))}}));
  }
  return out;
}

std::vector<Finding> local_file_access(const ScanInput& input) {
  const auto calls = find_calls(input, kWebSettings, "setAllowFileAccess");
  std::vector<Finding> out;
  bool disabled_somewhere = false;
  for (const Hit& hit : calls) {
    const auto literal = literal_of(hit);
    if (literal == 1) {
      out.push_back(make_finding(RuleId::kLocalFileAccess, {invocation_evidence(hit)}));
    } else if (literal == 0) {
      disabled_somewhere = true;
    }
  }
  if (!disabled_somewhere) {
    // File access defaults to enabled for any WebView the app uses.
    for (const DexImage& dex : input.dexes) {
      if (!references_type(dex, kWebView)) continue;
      out.push_back(make_finding(
          RuleId::kLocalFileAccess,
          {{EvidenceKind::kTypeReference,
            dex_label(dex) + ": references " + std::string(kWebView) +
                " and never calls setAllowFileAccess(false)"}}));
      break;
    }
  }
  return out;
}

std::vector<Finding> webview_javascript(const ScanInput& input) {
  std::vector<Finding> out;
  for (const Hit& hit : find_calls(input, kWebSettings, "setJavaScriptEnabled")) {
    if (literal_of(hit) == 1) {
      out.push_back(make_finding(RuleId::kWebViewJavaScript, {invocation_evidence(hit)}));
    }
  }
  return out;
}

std::vector<Finding> no_root_check(const ScanInput& input) {
  static const std::vector<std::string> kSubstringMarkers = {
      "/system/xbin/su", "/system/bin/su", "test-keys", "superuser"};
  static const std::vector<std::string> kExactMarkers = {"su"};
  for (const DexImage& dex : input.dexes) {
    if (!string_pool_matches(dex, kSubstringMarkers, MatchMode::kSubstring).empty() ||
        !string_pool_matches(dex, kExactMarkers, MatchMode::kExact).empty()) {
      return {};
    }
  }
  if (!find_calls(input, "Ljava/lang/Runtime;", "exec").empty()) return {};
  return absence(RuleId::kNoRootCheck, input,
                 "no root marker string (\"su\", \"/system/xbin/su\", "
                 "\"/system/bin/su\", \"test-keys\", \"superuser\") and no "
                 "Ljava/lang/Runtime;->exec call");
}

std::vector<Finding> adb_backup(const ScanInput& input) {
  const TriState allow = input.manifest.application.allow_backup;
  if (allow == TriState::kFalse) return {};
  return {make_finding(RuleId::kAdbBackup,
                       {{EvidenceKind::kManifest,
                         "manifest/application@android:allowBackup=" +
                             std::string(to_string(allow))}})};
}

std::vector<Finding> no_signature_check(const ScanInput& input) {
  for (const DexImage& dex : input.dexes) {
    if (references_type(dex, "Landroid/content/pm/Signature;")) return {};
  }
  if (!find_calls(input, "*", "getPackageInfo").empty()) return {};
  return absence(RuleId::kNoSignatureCheck, input,
                 "no reference to Landroid/content/pm/Signature; and no "
                 "getPackageInfo call");
}

std::vector<Finding> screenshot_allowed(const ScanInput& input) {
  for (const std::string_view name : {"setFlags", "addFlags"}) {
    for (const Hit& hit : find_calls(input, "Landroid/view/Window;", name)) {
      if (literal_of(hit) == kFlagSecure) return {};
    }
  }
  return absence(RuleId::kScreenshotAllowed, input,
                 "no Landroid/view/Window;->setFlags/addFlags call with "
                 "FLAG_SECURE (8192)");
}

std::vector<Finding> no_installer_check(const ScanInput& input) {
  if (!find_calls(input, "Landroid/content/pm/PackageManager;",
                  "getInstallerPackageName")
           .empty()) {
    return {};
  }
  return absence(RuleId::kNoInstallerCheck, input,
                 "no Landroid/content/pm/PackageManager;->"
                 "getInstallerPackageName call");
}

}  // namespace

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::kCritical: return "critical";
    case Severity::kWarning: return "warning";
    case Severity::kNotice: return "notice";
    case Severity::kInfo: return "info";
  }
  return "info";
}

std::optional<Severity> parse_severity(std::string_view text) {
  for (const Severity s : {Severity::kCritical, Severity::kWarning,
                           Severity::kNotice, Severity::kInfo}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

const RuleInfo& rule_info(RuleId rule) { return kRuleTable.at(index_of(rule)); }

std::optional<RuleId> parse_rule_id(std::string_view text) {
  for (const RuleInfo& info : kRuleTable) {
    if (info.code == text || info.slug == text) return info.id;
  }
  return std::nullopt;
}

std::string_view to_string(EvidenceKind kind) {
  switch (kind) {
    case EvidenceKind::kManifest: return "manifest";
    case EvidenceKind::kInvocation: return "invocation";
    case EvidenceKind::kTypeReference: return "type-reference";
    case EvidenceKind::kAbsence: return "absence";
  }
  return "manifest";
}

std::optional<EvidenceKind> parse_evidence_kind(std::string_view text) {
  for (const EvidenceKind k : {EvidenceKind::kManifest, EvidenceKind::kInvocation,
                               EvidenceKind::kTypeReference, EvidenceKind::kAbsence}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::size_t ScanResult::vulnerable_count() const {
  return static_cast<std::size_t>(
      std::count(rule_vector.begin(), rule_vector.end(), true));
}

std::optional<Severity> ScanResult::highest_severity() const {
  std::optional<Severity> highest;
  for (const Finding& f : findings) {
    if (!highest || f.severity > *highest) highest = f.severity;
  }
  return highest;
}

std::vector<Finding> evaluate_rule(RuleId rule, const ScanInput& input) {
  switch (rule) {
    case RuleId::kImplicitIntentService: return implicit_intent_service(input);
    case RuleId::kIntentFilterMisconfiguration: return intent_filter_misconfiguration(input);
    case RuleId::kProviderExposure: return provider_exposure(input);
    case RuleId::kRemoteCodeExecution:
      return one_per_call(rule, find_calls(input, kWebView, "addJavascriptInterface"));
    case RuleId::kDeviceIdAccess:
      return one_per_call(rule, find_calls(input, "Landroid/telephony/TelephonyManager;",
                                           "getDeviceId"));
    case RuleId::kNormalProtectionLevel: return normal_protection_level(input);
    case RuleId::kLocalFileAccess: return local_file_access(input);
    case RuleId::kWebViewJavaScript: return webview_javascript(input);
    case RuleId::kNoRootCheck: return no_root_check(input);
    case RuleId::kAdbBackup: return adb_backup(input);
    case RuleId::kFileUnsafeDelete:
      return one_per_call(rule, find_calls(input, "Ljava/io/File;", "delete"));
    case RuleId::kNoSignatureCheck: return no_signature_check(input);
    case RuleId::kScreenshotAllowed: return screenshot_allowed(input);
    case RuleId::kNoInstallerCheck: return no_installer_check(input);
  }
  return {};
}

ScanResult run_all_rules(const ScanInput& input) {
  ScanResult result;
  result.apk_name = input.apk_name;
  for (const RuleId rule : kAllRules) {
    auto findings = evaluate_rule(rule, input);
    result.rule_vector[index_of(rule)] = !findings.empty();
    std::move(findings.begin(), findings.end(), std::back_inserter(result.findings));
  }
  return result;
}

ScanInput load_scan_input(const ApkArchive& archive, std::string apk_name) {
  ScanInput input;
  input.apk_name = std::move(apk_name);
  input.manifest = decode_manifest(archive.read_entry(kManifestEntryName));
  for (const std::string& name : archive.dex_entry_names()) {
    input.dexes.push_back(parse_dex(archive.read_entry(name), name));
  }
  return input;
}

}  // namespace apkscan
