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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "apkscan/dex.hpp"
#include "apkscan/fixtures.hpp"
#include "apkscan/manifest.hpp"
#include "apkscan/rules.hpp"
#include "test_support.hpp"

namespace apkscan {
namespace {

using fixtures::CodeBuilder;
using fixtures::DexClass;
using fixtures::DexMethod;
using fixtures::InvokeKind;
using fixtures::MethodSpec;
using R = RuleId;

const std::string kString = "Ljava/lang/String;";
const std::string kIntent = "Landroid/content/Intent;";
const std::string kContext = "Landroid/content/Context;";
const std::string kWebView = "Landroid/webkit/WebView;";
const std::string kWebSettings = "Landroid/webkit/WebSettings;";
const std::string kWindow = "Landroid/view/Window;";

const MethodSpec kIntentFromAction{kIntent, "<init>", "V", {kString}};
const MethodSpec kIntentExplicit{kIntent, "<init>", "V", {kContext, "Ljava/lang/Class;"}};
const MethodSpec kStartService{kContext, "startService", "Landroid/content/ComponentName;", {kIntent}};
const MethodSpec kBindService{kContext, "bindService", "Z", {kIntent, "Landroid/content/ServiceConnection;", "I"}};
const MethodSpec kSetAllowFileAccess{kWebSettings, "setAllowFileAccess", "V", {"Z"}};
const MethodSpec kSetJs{kWebSettings, "setJavaScriptEnabled", "V", {"Z"}};
const MethodSpec kAddFlags{kWindow, "addFlags", "V", {"I"}};
const MethodSpec kSetFlags{kWindow, "setFlags", "V", {"I", "I"}};
const MethodSpec kLoadUrl{kWebView, "loadUrl", "V", {kString}};

// A single-method class; `code` gets a trailing return-void.
DexClass cls(CodeBuilder code, std::string name = "Lcom/example/A;", std::string method = "m") {
  code.return_void();
  return DexClass{std::move(name), {DexMethod{std::move(method), std::move(code), true}}};
}

DexImage image(const std::vector<DexClass>& classes, std::string entry = "classes.dex",
               const std::vector<std::string>& extra_types = {}) {
  return parse_dex(fixtures::encode_dex(classes, extra_types).bytes, std::move(entry));
}

ManifestModel hardened_manifest() {
  ManifestModel m;
  m.package_name = "com.example";
  m.target_sdk = 30;
  m.application.allow_backup = TriState::kFalse;
  return m;
}

ScanInput input_with(std::vector<DexImage> dexes, ManifestModel manifest = hardened_manifest()) {
  return ScanInput{std::move(manifest), std::move(dexes), "unit"};
}

ScanInput code_input(CodeBuilder code) { return input_with({image({cls(std::move(code))})}); }

std::size_t count(R rule, const ScanInput& in) { return evaluate_rule(rule, in).size(); }

// ---------------------------------------------------------------------------
// Catalogue

TEST(RuleCatalogue, FourteenRulesInOrder) {
  ASSERT_EQ(kAllRules.size(), 14u);
  for (std::size_t i = 0; i < kAllRules.size(); ++i) {
    EXPECT_EQ(index_of(kAllRules[i]), i);
    char code[4];
    std::snprintf(code, sizeof code, "R%02zu", i + 1);
    EXPECT_EQ(rule_info(kAllRules[i]).code, code);
    EXPECT_EQ(parse_rule_id(code), kAllRules[i]);
    EXPECT_EQ(parse_rule_id(rule_info(kAllRules[i]).slug), kAllRules[i]);
  }
  EXPECT_EQ(parse_rule_id("R15"), std::nullopt);
  EXPECT_EQ(parse_rule_id(""), std::nullopt);
}

TEST(RuleCatalogue, FixedSeverities) {
  const std::vector<std::pair<R, Severity>> expected = {
      {R::kImplicitIntentService, Severity::kCritical},
      {R::kIntentFilterMisconfiguration, Severity::kCritical},
      {R::kProviderExposure, Severity::kCritical},
      {R::kRemoteCodeExecution, Severity::kCritical},
      {R::kDeviceIdAccess, Severity::kWarning},
      {R::kNormalProtectionLevel, Severity::kCritical},
      {R::kLocalFileAccess, Severity::kWarning},
      {R::kWebViewJavaScript, Severity::kWarning},
      {R::kNoRootCheck, Severity::kNotice},
      {R::kAdbBackup, Severity::kWarning},
      {R::kFileUnsafeDelete, Severity::kNotice},
      {R::kNoSignatureCheck, Severity::kNotice},
      {R::kScreenshotAllowed, Severity::kNotice},
      {R::kNoInstallerCheck, Severity::kNotice},
  };
  for (const auto& [rule, severity] : expected) {
    EXPECT_EQ(rule_info(rule).severity, severity) << rule_info(rule).code;
  }
  const std::set<R> absence = {R::kNoRootCheck, R::kNoSignatureCheck, R::kScreenshotAllowed,
                               R::kNoInstallerCheck};
  for (R rule : kAllRules) EXPECT_EQ(rule_info(rule).absence, absence.contains(rule));
}

TEST(RuleCatalogue, SeverityOrderAndParsing) {
  EXPECT_GT(Severity::kCritical, Severity::kWarning);
  EXPECT_GT(Severity::kWarning, Severity::kNotice);
  EXPECT_GT(Severity::kNotice, Severity::kInfo);
  for (Severity s : {Severity::kInfo, Severity::kNotice, Severity::kWarning, Severity::kCritical}) {
    EXPECT_EQ(parse_severity(to_string(s)), s);
  }
  EXPECT_EQ(parse_severity("severe"), std::nullopt);
}

// ---------------------------------------------------------------------------
// R01

TEST(R01, ActionIntentAndStartServiceInSameMethod) {
  for (const MethodSpec& start : {kStartService, kBindService}) {
    CodeBuilder b;
    b.new_instance(0, kIntent)
        .const_string(1, "com.example.SYNC")
        .invoke(InvokeKind::kDirect, kIntentFromAction, {0, 1})
        .invoke(InvokeKind::kVirtual, start, {2, 0});
    const auto findings = evaluate_rule(R::kImplicitIntentService, code_input(std::move(b)));
    ASSERT_EQ(findings.size(), 1u);
    EXPECT_EQ(findings[0].severity, Severity::kCritical);
    EXPECT_EQ(findings[0].evidence.size(), 2u);
  }
}

TEST(R01, ExplicitIntentIsClean) {
  CodeBuilder b;
  b.invoke(InvokeKind::kDirect, kIntentExplicit, {0, 2, 1})
      .invoke(InvokeKind::kVirtual, kStartService, {2, 0});
  EXPECT_EQ(count(R::kImplicitIntentService, code_input(std::move(b))), 0u);
}

TEST(R01, CoOccurrenceIsMethodLocal) {
  CodeBuilder make;
  make.invoke(InvokeKind::kDirect, kIntentFromAction, {0, 1});
  CodeBuilder start;
  start.invoke(InvokeKind::kVirtual, kStartService, {2, 0});
  make.return_void();
  start.return_void();
  const DexClass c{"Lcom/A;", {DexMethod{"make", make, true}, DexMethod{"start", start, true}}};
  EXPECT_EQ(count(R::kImplicitIntentService, input_with({image({c})})), 0u);
}

TEST(R01, ActionIntentForActivityIsClean) {
  CodeBuilder b;
  b.invoke(InvokeKind::kDirect, kIntentFromAction, {0, 1})
      .invoke(InvokeKind::kVirtual, {"Landroid/app/Activity;", "startActivity", "V", {kIntent}}, {2, 0});
  EXPECT_EQ(count(R::kImplicitIntentService, code_input(std::move(b))), 0u);
}

// ---------------------------------------------------------------------------
// Manifest rules

ComponentDecl component(ComponentKind kind, std::string name) {
  ComponentDecl c;
  c.kind = kind;
  c.name = std::move(name);
  return c;
}

ScanInput manifest_input(ManifestModel m) {
  CodeBuilder b;
  b.nop();
  return input_with({image({cls(std::move(b))})}, std::move(m));
}

TEST(R02, EmptyActionListIsFlaggedPerFilter) {
  ManifestModel m = hardened_manifest();
  auto service = component(ComponentKind::kService, ".S");
  service.intent_filters.push_back({});
  service.intent_filters.push_back({{"a.B"}, {}, {}});
  service.intent_filters.push_back({{}, {"android.intent.category.DEFAULT"}, {}});
  m.components.push_back(service);
  const auto findings = evaluate_rule(R::kIntentFilterMisconfiguration, manifest_input(m));
  ASSERT_EQ(findings.size(), 2u);
  EXPECT_EQ(findings[0].evidence[0].kind, EvidenceKind::kManifest);
  EXPECT_NE(findings[0].evidence[0].location.find("intent-filter[0]"), std::string::npos);
  EXPECT_NE(findings[1].evidence[0].location.find("intent-filter[2]"), std::string::npos);
}

TEST(R02, FilterWithOneActionIsClean) {
  ManifestModel m = hardened_manifest();
  auto activity = component(ComponentKind::kActivity, ".A");
  activity.intent_filters.push_back({{"android.intent.action.MAIN"}, {}, {}});
  m.components.push_back(activity);
  EXPECT_EQ(count(R::kIntentFilterMisconfiguration, manifest_input(m)), 0u);
}

TEST(R03, ProviderExposureTable) {
  struct Case {
    TriState exported;
    bool permission;
    std::optional<int> target;
    bool flagged;
  };
  const std::vector<Case> cases = {
      {TriState::kTrue, false, 30, true},    {TriState::kTrue, true, 30, false},
      {TriState::kFalse, false, 30, false},  {TriState::kUnset, false, 30, false},
      {TriState::kUnset, false, 17, false},  {TriState::kUnset, false, 16, true},
      {TriState::kUnset, false, std::nullopt, true}, {TriState::kUnset, true, 16, false},
      {TriState::kFalse, false, 16, false},
  };
  for (const Case& c : cases) {
    ManifestModel m = hardened_manifest();
    m.target_sdk = c.target;
    auto provider = component(ComponentKind::kProvider, ".P");
    provider.exported = c.exported;
    if (c.permission) provider.permission = "p.READ";
    m.components.push_back(provider);
    // A non-provider exported without permission never counts.
    auto activity = component(ComponentKind::kActivity, ".A");
    activity.exported = TriState::kTrue;
    m.components.push_back(activity);
    EXPECT_EQ(count(R::kProviderExposure, manifest_input(m)), c.flagged ? 1u : 0u)
        << to_string(c.exported) << " perm=" << c.permission << " sdk=" << c.target.value_or(-1);
  }
}

TEST(R06, ProtectionLevels) {
  const std::vector<std::pair<ProtectionLevel, bool>> cases = {
      {ProtectionLevel::kNormal, true},      {ProtectionLevel::kUnset, true},
      {ProtectionLevel::kDangerous, false},  {ProtectionLevel::kSignature, false},
      {ProtectionLevel::kSignatureOrSystem, false}};
  for (const auto& [level, flagged] : cases) {
    ManifestModel m = hardened_manifest();
    m.declared_permissions.push_back({"p.X", level});
    EXPECT_EQ(count(R::kNormalProtectionLevel, manifest_input(m)), flagged ? 1u : 0u)
        << to_string(level);
  }
  EXPECT_EQ(count(R::kNormalProtectionLevel, manifest_input(hardened_manifest())), 0u);
}

TEST(R10, AllowBackupTriState) {
  for (const auto& [value, flagged] : std::vector<std::pair<TriState, bool>>{
           {TriState::kTrue, true}, {TriState::kUnset, true}, {TriState::kFalse, false}}) {
    ManifestModel m = hardened_manifest();
    m.application.allow_backup = value;
    EXPECT_EQ(count(R::kAdbBackup, manifest_input(m)), flagged ? 1u : 0u);
  }
}

// ---------------------------------------------------------------------------
// Code presence rules

TEST(R04, EachAddJavascriptInterfaceCall) {
  const MethodSpec add_js{kWebView, "addJavascriptInterface", "V",
                          {"Ljava/lang/Object;", kString}};
  CodeBuilder b;
  b.invoke(InvokeKind::kVirtual, add_js, {0, 1, 2}).invoke(InvokeKind::kVirtual, add_js, {0, 1, 2});
  const auto findings = evaluate_rule(R::kRemoteCodeExecution, code_input(std::move(b)));
  ASSERT_EQ(findings.size(), 2u);
  for (const Finding& f : findings) {
    EXPECT_EQ(f.severity, Severity::kCritical);
    ASSERT_EQ(f.evidence.size(), 1u);
    EXPECT_EQ(f.evidence[0].kind, EvidenceKind::kInvocation);
  }
  EXPECT_EQ(findings[0].evidence[0].location,
            "classes.dex:Lcom/example/A;->m@0x0000 calls "
            "Landroid/webkit/WebView;->addJavascriptInterface(Ljava/lang/Object;Ljava/lang/String;)V");
}

TEST(R04, SameNameOnOtherOwnerIsClean) {
  CodeBuilder b;
  b.invoke(InvokeKind::kVirtual, {"Lorg/xwalk/XWalkView;", "addJavascriptInterface", "V", {}}, {0});
  EXPECT_EQ(count(R::kRemoteCodeExecution, code_input(std::move(b))), 0u);
}

TEST(R05, GetDeviceId) {
  CodeBuilder b;
  b.invoke(InvokeKind::kVirtual,
           {"Landroid/telephony/TelephonyManager;", "getDeviceId", kString, {}}, {0});
  const auto findings = evaluate_rule(R::kDeviceIdAccess, code_input(std::move(b)));
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].severity, Severity::kWarning);
  CodeBuilder other;
  other.invoke(InvokeKind::kVirtual,
               {"Landroid/telephony/TelephonyManager;", "getSimOperator", kString, {}}, {0});
  EXPECT_EQ(count(R::kDeviceIdAccess, code_input(std::move(other))), 0u);
}

TEST(R07, LiteralTrueIsFlagged) {
  CodeBuilder b;
  b.const4(1, 1).invoke(InvokeKind::kVirtual, kSetAllowFileAccess, {0, 1});
  const auto findings = evaluate_rule(R::kLocalFileAccess, code_input(std::move(b)));
  // The literal-1 call, plus the default (no setAllowFileAccess(false) anywhere)
  // since the WebSettings owner alone is not a WebView reference.
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].evidence[0].kind, EvidenceKind::kInvocation);
}

TEST(R07, DisabledAnywhereSuppressesDefault) {
  CodeBuilder b;
  b.invoke(InvokeKind::kVirtual, kLoadUrl, {0, 1})
      .const4(1, 0)
      .invoke(InvokeKind::kVirtual, kSetAllowFileAccess, {0, 1});
  EXPECT_EQ(count(R::kLocalFileAccess, code_input(std::move(b))), 0u);
}

TEST(R07, WebViewWithoutDisableIsFlaggedByDefault) {
  CodeBuilder b;
  b.invoke(InvokeKind::kVirtual, kLoadUrl, {0, 1});
  const auto findings = evaluate_rule(R::kLocalFileAccess, code_input(std::move(b)));
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].evidence[0].kind, EvidenceKind::kTypeReference);
}

TEST(R07, NoWebViewNoCallIsClean) {
  CodeBuilder b;
  b.nop();
  EXPECT_EQ(count(R::kLocalFileAccess, code_input(std::move(b))), 0u);
}

TEST(R07, EnabledAndDisabledFlagsOnlyTheEnabledCall) {
  CodeBuilder b;
  b.invoke(InvokeKind::kVirtual, kLoadUrl, {0, 1})
      .const4(1, 1)
      .invoke(InvokeKind::kVirtual, kSetAllowFileAccess, {0, 1})
      .const4(1, 0)
      .invoke(InvokeKind::kVirtual, kSetAllowFileAccess, {0, 1});
  const auto findings = evaluate_rule(R::kLocalFileAccess, code_input(std::move(b)));
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].evidence[0].kind, EvidenceKind::kInvocation);
}

TEST(R08, OnlyLiteralTrue) {
  for (const auto& [literal, flagged] :
       std::vector<std::pair<std::int8_t, bool>>{{1, true}, {0, false}}) {
    CodeBuilder b;
    b.const4(1, literal).invoke(InvokeKind::kVirtual, kSetJs, {0, 1});
    EXPECT_EQ(count(R::kWebViewJavaScript, code_input(std::move(b))), flagged ? 1u : 0u);
  }
  CodeBuilder unknown;
  unknown.invoke(InvokeKind::kVirtual, kSetJs, {0, 1});
  EXPECT_EQ(count(R::kWebViewJavaScript, code_input(std::move(unknown))), 0u);
}

TEST(R11, EachFileDelete) {
  CodeBuilder b;
  b.invoke(InvokeKind::kVirtual, {"Ljava/io/File;", "delete", "Z", {}}, {0})
      .invoke(InvokeKind::kVirtual, {"Ljava/io/File;", "deleteOnExit", "V", {}}, {0})
      .invoke(InvokeKind::kVirtual, {"Ljava/io/File;", "delete", "Z", {}}, {0});
  const auto findings = evaluate_rule(R::kFileUnsafeDelete, code_input(std::move(b)));
  ASSERT_EQ(findings.size(), 2u);
  EXPECT_NE(findings[0].evidence[0].location, findings[1].evidence[0].location);
  EXPECT_EQ(findings[0].severity, Severity::kNotice);
}

// ---------------------------------------------------------------------------
// Absence rules

ScanInput strings_input(const std::vector<std::string>& strings) {
  CodeBuilder b;
  std::uint8_t reg = 0;
  for (const auto& s : strings) b.const_string(reg++ % 8, s);
  return code_input(std::move(b));
}

TEST(R09, EachMarkerSuppresses) {
  for (const std::string marker :
       {"su", "/system/xbin/su", "/system/bin/su", "ro.build.tags=test-keys",
        "com.koushikdutta.superuser", "/sbin/su/../system/bin/su"}) {
    EXPECT_EQ(count(R::kNoRootCheck, strings_input({"hello", marker})), 0u) << marker;
  }
}

TEST(R09, SuIsExactOnly) {
  for (const std::string near_miss : {"sync success", "sudo", "Su", "su ", "/system/xbin/sux"}) {
    const bool suppressed = near_miss.find("/system/xbin/su") != std::string::npos;
    EXPECT_EQ(count(R::kNoRootCheck, strings_input({near_miss})), suppressed ? 0u : 1u)
        << near_miss;
  }
}

TEST(R09, RuntimeExecSuppresses) {
  CodeBuilder b;
  b.invoke(InvokeKind::kVirtual,
           {"Ljava/lang/Runtime;", "exec", "Ljava/lang/Process;", {kString}}, {0, 1});
  EXPECT_EQ(count(R::kNoRootCheck, code_input(std::move(b))), 0u);
}

TEST(R09, AbsenceEvidence) {
  const auto findings = evaluate_rule(R::kNoRootCheck, strings_input({"nothing"}));
  ASSERT_EQ(findings.size(), 1u);
  ASSERT_EQ(findings[0].evidence.size(), 1u);
  EXPECT_EQ(findings[0].evidence[0].kind, EvidenceKind::kAbsence);
  EXPECT_EQ(findings[0].evidence[0].location.rfind("absence: ", 0), 0u);
  EXPECT_NE(findings[0].evidence[0].location.find("classes.dex"), std::string::npos);
}

TEST(R09, MarkerInSecondaryDexSuppresses) {
  CodeBuilder main;
  main.nop();
  CodeBuilder secondary;
  secondary.const_string(0, "test-keys");
  const ScanInput in = input_with({image({cls(main)}, "classes.dex"),
                                   image({cls(secondary, "Lcom/B;")}, "classes2.dex")});
  EXPECT_EQ(count(R::kNoRootCheck, in), 0u);
  const ScanInput without = input_with({image({cls(main)}, "classes.dex"),
                                        image({cls(main, "Lcom/B;")}, "classes2.dex")});
  const auto findings = evaluate_rule(R::kNoRootCheck, without);
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_NE(findings[0].evidence[0].location.find("classes.dex, classes2.dex"), std::string::npos);
}

TEST(R12, SignatureTypeOrGetPackageInfoSuppresses) {
  CodeBuilder nothing;
  nothing.nop();
  EXPECT_EQ(count(R::kNoSignatureCheck, code_input(nothing)), 1u);

  const ScanInput type_only =
      input_with({image({cls(nothing)}, "classes.dex", {"Landroid/content/pm/Signature;"})});
  EXPECT_EQ(count(R::kNoSignatureCheck, type_only), 0u);

  for (const std::string owner :
       {"Landroid/content/pm/PackageManager;", "Landroid/app/ApplicationPackageManager;"}) {
    CodeBuilder b;
    b.invoke(InvokeKind::kVirtual,
             {owner, "getPackageInfo", "Landroid/content/pm/PackageInfo;", {kString, "I"}},
             {0, 1, 2});
    EXPECT_EQ(count(R::kNoSignatureCheck, code_input(std::move(b))), 0u) << owner;
  }
}

TEST(R13, FlagSecureLiteralRequired) {
  struct Case {
    const MethodSpec* call;
    std::int16_t literal;
    bool flagged;
  };
  for (const Case& c : {Case{&kAddFlags, 8192, false}, Case{&kSetFlags, 8192, false},
                        Case{&kAddFlags, 128, true}, Case{&kAddFlags, 8193, true}}) {
    CodeBuilder b;
    b.invoke(InvokeKind::kVirtual, {"Landroid/app/Activity;", "getWindow", kWindow, {}}, {2})
        .move_result_object(0)
        .const16(1, c.literal)
        .invoke(InvokeKind::kVirtual, *c.call, {0, 1, 1});
    EXPECT_EQ(count(R::kScreenshotAllowed, code_input(std::move(b))), c.flagged ? 1u : 0u)
        << c.call->name << " " << c.literal;
  }
  CodeBuilder wrong_owner;
  wrong_owner.const16(1, 8192).invoke(InvokeKind::kVirtual,
                                      {"Lcom/example/Window;", "addFlags", "V", {"I"}}, {0, 1});
  EXPECT_EQ(count(R::kScreenshotAllowed, code_input(std::move(wrong_owner))), 1u);
  CodeBuilder no_literal;
  no_literal.invoke(InvokeKind::kVirtual, kAddFlags, {0, 1});
  EXPECT_EQ(count(R::kScreenshotAllowed, code_input(std::move(no_literal))), 1u);
}

TEST(R14, InstallerCheck) {
  CodeBuilder b;
  b.invoke(InvokeKind::kVirtual,
           {"Landroid/content/pm/PackageManager;", "getInstallerPackageName", kString, {kString}},
           {0, 1});
  EXPECT_EQ(count(R::kNoInstallerCheck, code_input(std::move(b))), 0u);
  CodeBuilder nothing;
  nothing.nop();
  const auto findings = evaluate_rule(R::kNoInstallerCheck, code_input(std::move(nothing)));
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].evidence.size(), 1u);
  EXPECT_EQ(findings[0].evidence[0].kind, EvidenceKind::kAbsence);
}

// ---------------------------------------------------------------------------
// Whole-app behaviour over fixtures

TEST(RunAllRules, StarlingLike) {
  const auto fleet = fixtures::banking_fleet();
  const ScanResult r = testing::scan_profile(fleet[0]);
  EXPECT_EQ(testing::positive_set(r),
            (std::set<R>{R::kAdbBackup, R::kFileUnsafeDelete, R::kScreenshotAllowed}));
}

TEST(RunAllRules, RevolutLikeHasTen) {
  const auto fleet = fixtures::banking_fleet();
  const ScanResult r = testing::scan_profile(fleet[5]);
  EXPECT_EQ(r.vulnerable_count(), 10u);
  EXPECT_FALSE(r.rule_vector[index_of(R::kRemoteCodeExecution)]);
  EXPECT_FALSE(r.rule_vector[index_of(R::kDeviceIdAccess)]);
  EXPECT_FALSE(r.rule_vector[index_of(R::kWebViewJavaScript)]);
  EXPECT_FALSE(r.rule_vector[index_of(R::kAdbBackup)]);
}

TEST(RunAllRules, HardenedBaselineIsClean) {
  const ScanResult r = testing::scan_profile(fixtures::make_profile("clean", {}));
  EXPECT_EQ(r.vulnerable_count(), 0u);
  EXPECT_TRUE(r.findings.empty());
  EXPECT_EQ(r.highest_severity(), std::nullopt);
}

TEST(RunAllRules, OracleCorpusAgrees) {
  for (const auto& profile : fixtures::oracle_corpus()) {
    EXPECT_EQ(testing::positive_set(testing::scan_profile(profile)), profile.positive_rules)
        << profile.name;
  }
}

TEST(RunAllRules, VectorConsistentWithFindings) {
  auto profiles = fixtures::oracle_corpus();
  const auto fleet = fixtures::banking_fleet();
  profiles.insert(profiles.end(), fleet.begin(), fleet.end());
  for (const auto& profile : profiles) {
    const ScanResult r = testing::scan_profile(profile);
    std::set<R> distinct;
    for (const Finding& f : r.findings) {
      distinct.insert(f.rule);
      EXPECT_EQ(f.severity, rule_info(f.rule).severity);
      EXPECT_EQ(f.title, rule_info(f.rule).title);
      EXPECT_EQ(f.category, rule_info(f.rule).category);
      ASSERT_FALSE(f.evidence.empty());
      if (rule_info(f.rule).absence) {
        ASSERT_EQ(f.evidence.size(), 1u);
        EXPECT_EQ(f.evidence[0].kind, EvidenceKind::kAbsence);
      } else {
        for (const Evidence& e : f.evidence) {
          EXPECT_NE(e.kind, EvidenceKind::kAbsence);
          EXPECT_FALSE(e.location.empty());
        }
      }
    }
    EXPECT_EQ(distinct.size(), r.vulnerable_count()) << profile.name;
    for (R rule : kAllRules) {
      EXPECT_EQ(r.rule_vector[index_of(rule)], distinct.contains(rule));
    }
    // Findings are grouped in rule order.
    EXPECT_TRUE(std::is_sorted(r.findings.begin(), r.findings.end(),
                               [](const Finding& a, const Finding& b) { return a.rule < b.rule; }));
  }
}

TEST(RunAllRules, Deterministic) {
  const auto profile = fixtures::banking_fleet()[1];
  const auto apk = fixtures::build_fixture(profile).apk;
  EXPECT_EQ(testing::scan_bytes(apk, "x"), testing::scan_bytes(apk, "x"));
}

TEST(RunAllRules, PresenceRulesAreMonotonic) {
  // Extra code with every flagged presence call added to each corpus app.
  CodeBuilder extra;
  extra.new_instance(0, kIntent)
      .invoke(InvokeKind::kDirect, kIntentFromAction, {0, 1})
      .invoke(InvokeKind::kVirtual, kStartService, {2, 0})
      .invoke(InvokeKind::kVirtual,
              {kWebView, "addJavascriptInterface", "V", {"Ljava/lang/Object;", kString}}, {0, 1, 2})
      .invoke(InvokeKind::kVirtual,
              {"Landroid/telephony/TelephonyManager;", "getDeviceId", kString, {}}, {0})
      .const4(1, 1)
      .invoke(InvokeKind::kVirtual, kSetAllowFileAccess, {0, 1})
      .const4(1, 1)
      .invoke(InvokeKind::kVirtual, kSetJs, {0, 1})
      .invoke(InvokeKind::kVirtual, {"Ljava/io/File;", "delete", "Z", {}}, {0});
  const std::set<R> presence = {R::kImplicitIntentService, R::kRemoteCodeExecution,
                                R::kDeviceIdAccess,        R::kLocalFileAccess,
                                R::kWebViewJavaScript,     R::kFileUnsafeDelete};
  for (const auto& profile : fixtures::oracle_corpus()) {
    const auto built = fixtures::build_fixture(profile);
    const auto archive = ApkArchive::from_bytes(built.apk);
    ScanInput base = load_scan_input(archive, profile.name);
    ScanInput grown = base;
    grown.dexes.push_back(image({cls(extra, "Lcom/extra/Added;")}, "classes9.dex"));
    for (R rule : presence) {
      const auto before = evaluate_rule(rule, base);
      const auto after = evaluate_rule(rule, grown);
      for (const Finding& f : before) {
        EXPECT_NE(std::find(after.begin(), after.end(), f), after.end())
            << profile.name << " " << rule_info(rule).code;
      }
      EXPECT_FALSE(after.empty()) << profile.name << " " << rule_info(rule).code;
    }
  }
}

TEST(LoadScanInput, MultidexFixture) {
  auto fleet = fixtures::banking_fleet();
  const auto& profile = fleet[3];
  ASSERT_TRUE(profile.code.split_dex);
  const auto archive = ApkArchive::from_bytes(fixtures::build_fixture(profile).apk);
  const ScanInput in = load_scan_input(archive, "tw");
  ASSERT_EQ(in.dexes.size(), 2u);
  EXPECT_EQ(in.dexes[0].entry_name, "classes.dex");
  EXPECT_EQ(in.dexes[1].entry_name, "classes2.dex");
  EXPECT_EQ(in.manifest.package_name, "fixture.transferwise-like");
  EXPECT_EQ(in.apk_name, "tw");
}

}  // namespace
}  // namespace apkscan
