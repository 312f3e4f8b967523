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

#include <algorithm>

#include "apkscan/apk_archive.hpp"
#include "apkscan/error.hpp"
#include "apkscan/fixtures.hpp"

namespace apkscan::fixtures {
namespace {

const std::string kString = "Ljava/lang/String;";
const std::string kObjectType = "Ljava/lang/Object;";
const std::string kIntent = "Landroid/content/Intent;";
const std::string kContext = "Landroid/content/Context;";
const std::string kActivity = "Landroid/app/Activity;";
const std::string kWindow = "Landroid/view/Window;";
const std::string kWebView = "Landroid/webkit/WebView;";
const std::string kWebSettings = "Landroid/webkit/WebSettings;";
const std::string kPackageManager = "Landroid/content/pm/PackageManager;";
const std::string kFile = "Ljava/io/File;";

constexpr std::int16_t kFlagKeepScreenOn = 0x80;
constexpr std::int16_t kFlagSecure = 0x2000;
constexpr std::int16_t kGetSignatures = 0x40;

std::string class_path(const std::string& profile_name) {
  std::string path = profile_name;
  std::replace(path.begin(), path.end(), '-', '_');
  return "Lfixture/" + path + "/";
}

bool webview_referenced(const CodeKnobs& c) {
  // getSettings() is a WebView call, so any settings knob references the type.
  return c.webview_reference || c.add_javascript_interface ||
         c.javascript != WebSetting::kNone || c.file_access != WebSetting::kNone;
}

DexMethod method(std::string name, CodeBuilder code) {
  code.return_void();
  return DexMethod{std::move(name), std::move(code), true};
}

CodeBuilder& get_window(CodeBuilder& b) {
  return b.invoke(InvokeKind::kVirtual, {kActivity, "getWindow", kWindow, {}}, {2})
      .move_result_object(0);
}

CodeBuilder& get_package_manager(CodeBuilder& b) {
  return b
      .invoke(InvokeKind::kVirtual, {kContext, "getPackageManager", kPackageManager, {}}, {3})
      .move_result_object(0);
}

DexClass main_activity(const std::string& base, const CodeKnobs& k) {
  DexClass cls{base + "MainActivity;", {}};
  {
    CodeBuilder b;
    b.const_string(0, "sync success")
        .const_string(1, "MainActivity")
        .invoke(InvokeKind::kStatic, {"Landroid/util/Log;", "d", "I", {kString, kString}}, {1, 0});
    cls.methods.push_back(method("onCreate", std::move(b)));
  }
  {
    CodeBuilder b;
    get_window(b).const16(1, kFlagKeepScreenOn)
        .invoke(InvokeKind::kVirtual, {kWindow, "addFlags", "V", {"I"}}, {0, 1});
    cls.methods.push_back(method("keepScreenOn", std::move(b)));
  }
  if (k.flag_secure) {
    CodeBuilder b;
    get_window(b).const16(1, kFlagSecure)
        .invoke(InvokeKind::kVirtual, {kWindow, "addFlags", "V", {"I"}}, {0, 1});
    cls.methods.push_back(method("secureWindow", std::move(b)));
  }
  {
    // An action-string Intent that starts an activity, not a service.
    CodeBuilder b;
    b.new_instance(0, kIntent)
        .const_string(1, "android.settings.SETTINGS")
        .invoke(InvokeKind::kDirect, {kIntent, "<init>", "V", {kString}}, {0, 1})
        .invoke(InvokeKind::kVirtual, {kActivity, "startActivity", "V", {kIntent}}, {2, 0});
    cls.methods.push_back(method("openSettings", std::move(b)));
  }
  return cls;
}

std::optional<DexClass> web_screen(const std::string& base, const CodeKnobs& k) {
  DexClass cls{base + "WebScreen;", {}};
  if (k.webview_reference) {
    CodeBuilder b;
    b.const_string(1, "https://bank.example/")
        .invoke(InvokeKind::kVirtual, {kWebView, "loadUrl", "V", {kString}}, {0, 1});
    cls.methods.push_back(method("loadPage", std::move(b)));
  }
  if (k.javascript != WebSetting::kNone || k.file_access != WebSetting::kNone) {
    CodeBuilder b;
    b.invoke(InvokeKind::kVirtual, {kWebView, "getSettings", kWebSettings, {}}, {0})
        .move_result_object(1);
    if (k.javascript != WebSetting::kNone) {
      b.const4(2, k.javascript == WebSetting::kEnabled ? 1 : 0)
          .invoke(InvokeKind::kVirtual, {kWebSettings, "setJavaScriptEnabled", "V", {"Z"}}, {1, 2});
    }
    if (k.file_access != WebSetting::kNone) {
      b.const4(2, k.file_access == WebSetting::kEnabled ? 1 : 0)
          .invoke(InvokeKind::kVirtual, {kWebSettings, "setAllowFileAccess", "V", {"Z"}}, {1, 2});
    }
    cls.methods.push_back(method("configureSettings", std::move(b)));
  }
  if (k.add_javascript_interface) {
    CodeBuilder b;
    b.new_instance(1, base + "JsBridge;")
        .const_string(2, "Android")
        .invoke(InvokeKind::kVirtual,
                {kWebView, "addJavascriptInterface", "V", {kObjectType, kString}}, {0, 1, 2});
    cls.methods.push_back(method("installBridge", std::move(b)));
  }
  if (cls.methods.empty()) return std::nullopt;
  return cls;
}

DexClass device_info(const std::string& base, const CodeKnobs& k) {
  const std::string telephony = "Landroid/telephony/TelephonyManager;";
  DexClass cls{base + "DeviceInfo;", {}};
  {
    CodeBuilder b;
    b.invoke(InvokeKind::kVirtual, {telephony, "getNetworkOperatorName", kString, {}}, {0})
        .move_result_object(1);
    cls.methods.push_back(method("carrier", std::move(b)));
  }
  if (k.get_device_id) {
    CodeBuilder b;
    b.invoke(InvokeKind::kVirtual, {telephony, "getDeviceId", kString, {}}, {0})
        .move_result_object(1);
    cls.methods.push_back(method("deviceId", std::move(b)));
  }
  return cls;
}

std::optional<DexClass> security_checks(const std::string& base,
                                        const std::string& package,
                                        const CodeKnobs& k) {
  DexClass cls{base + "SecurityChecks;", {}};
  if (k.root_check_strings) {
    CodeBuilder b;
    b.const_string(0, "/system/xbin/su")
        .const_string(1, "/system/bin/su")
        .const_string(2, "test-keys")
        .const_string(3, "com.noshufou.android.superuser");
    cls.methods.push_back(method("rootMarkers", std::move(b)));
  }
  if (k.root_check_exec) {
    const std::string runtime = "Ljava/lang/Runtime;";
    CodeBuilder b;
    b.invoke(InvokeKind::kStatic, {runtime, "getRuntime", runtime, {}}, {})
        .move_result_object(0)
        .const_string(1, "which")
        .invoke(InvokeKind::kVirtual, {runtime, "exec", "Ljava/lang/Process;", {kString}}, {0, 1})
        .move_result_object(0);
    cls.methods.push_back(method("probeShell", std::move(b)));
  }
  if (k.signature_check) {
    const std::string info = "Landroid/content/pm/PackageInfo;";
    CodeBuilder b;
    get_package_manager(b)
        .const_string(1, package)
        .const16(2, kGetSignatures)
        .invoke(InvokeKind::kVirtual, {kPackageManager, "getPackageInfo", info, {kString, "I"}},
                {0, 1, 2})
        .move_result_object(0)
        .invoke(InvokeKind::kVirtual,
                {"Landroid/content/pm/Signature;", "toCharsString", kString, {}}, {1})
        .move_result_object(1);
    cls.methods.push_back(method("verifySignature", std::move(b)));
  }
  if (k.installer_check) {
    CodeBuilder b;
    get_package_manager(b)
        .const_string(1, package)
        .invoke(InvokeKind::kVirtual,
                {kPackageManager, "getInstallerPackageName", kString, {kString}}, {0, 1})
        .move_result_object(0);
    cls.methods.push_back(method("verifyInstaller", std::move(b)));
  }
  if (cls.methods.empty()) return std::nullopt;
  return cls;
}

DexClass storage(const std::string& base, const CodeKnobs& k) {
  DexClass cls{base + "Storage;", {}};
  {
    CodeBuilder b;
    b.new_instance(0, kFile)
        .const_string(1, "cache/session")
        .invoke(InvokeKind::kDirect, {kFile, "<init>", "V", {kString}}, {0, 1})
        .invoke(InvokeKind::kVirtual, {kFile, "exists", "Z", {}}, {0});
    cls.methods.push_back(method("hasSession", std::move(b)));
  }
  if (k.file_delete_calls > 0) {
    CodeBuilder b;
    for (int i = 0; i < k.file_delete_calls; ++i) {
      b.new_instance(0, kFile)
          .const_string(1, "cache/tmp" + std::to_string(i))
          .invoke(InvokeKind::kDirect, {kFile, "<init>", "V", {kString}}, {0, 1})
          .invoke(InvokeKind::kVirtual, {kFile, "delete", "Z", {}}, {0});
    }
    cls.methods.push_back(method("clearCache", std::move(b)));
  }
  return cls;
}

std::optional<DexClass> sync_starter(const std::string& base, const std::string& package,
                                     const CodeKnobs& k) {
  if (k.service_intent == ServiceIntent::kNone) return std::nullopt;
  DexClass cls{base + "SyncStarter;", {}};
  CodeBuilder b;
  b.new_instance(0, kIntent);
  if (k.service_intent == ServiceIntent::kImplicit) {
    b.const_string(1, package + ".action.SYNC")
        .invoke(InvokeKind::kDirect, {kIntent, "<init>", "V", {kString}}, {0, 1});
  } else {
    b.invoke(InvokeKind::kDirect, {kIntent, "<init>", "V", {kContext, "Ljava/lang/Class;"}},
             {0, 2, 1});
  }
  b.invoke(InvokeKind::kVirtual,
           {kContext, "startService", "Landroid/content/ComponentName;", {kIntent}}, {2, 0});
  cls.methods.push_back(method("startSync", std::move(b)));
  return cls;
}

XmlAttr attr(std::string name, std::variant<std::string, std::int32_t, bool> value) {
  return XmlAttr{true, std::move(name), std::move(value), false};
}

XmlNode element(std::string name, std::vector<XmlAttr> attrs = {}) {
  return XmlNode{std::move(name), std::move(attrs), {}};
}

XmlNode build_manifest(const std::string& name, const std::string& package,
                       const ManifestKnobs& m) {
  XmlNode root = element("manifest", {XmlAttr{false, "package", package, false},
                                      attr("versionCode", 1), attr("versionName", "1.0")});
  XmlNode sdk = element("uses-sdk");
  if (m.target_sdk) {
    sdk.attrs.push_back(attr("minSdkVersion", std::min(21, *m.target_sdk)));
    sdk.attrs.push_back(attr("targetSdkVersion", *m.target_sdk));
  } else {
    sdk.attrs.push_back(attr("minSdkVersion", 14));
  }
  root.add(std::move(sdk));

  const std::string permission = package + ".permission.SYNC";
  if (m.permission) {
    XmlNode perm = element("permission", {attr("name", permission)});
    if (*m.permission != ProtectionLevel::kUnset) {
      std::int32_t level = 0;
      switch (*m.permission) {
        case ProtectionLevel::kNormal: level = 0; break;
        case ProtectionLevel::kDangerous: level = 1; break;
        case ProtectionLevel::kSignature: level = 2; break;
        case ProtectionLevel::kSignatureOrSystem: level = 3; break;
        case ProtectionLevel::kUnset: break;
      }
      perm.attrs.push_back(attr("protectionLevel", level));
    }
    root.add(std::move(perm));
  }

  XmlNode app = element("application", {attr("label", name)});
  if (m.allow_backup != TriState::kUnset) {
    app.attrs.push_back(attr("allowBackup", m.allow_backup == TriState::kTrue));
  }

  XmlNode activity = element("activity", {attr("name", ".MainActivity"), attr("exported", true)});
  XmlNode launcher = element("intent-filter");
  launcher.add(element("action", {attr("name", "android.intent.action.MAIN")}));
  launcher.add(element("category", {attr("name", "android.intent.category.LAUNCHER")}));
  activity.add(std::move(launcher));
  app.add(std::move(activity));

  XmlNode service = element("service", {attr("name", ".SyncService"), attr("exported", false)});
  XmlNode sync_filter = element("intent-filter");
  if (!m.empty_intent_filter) {
    sync_filter.add(element("action", {attr("name", package + ".action.SYNC")}));
  }
  service.add(std::move(sync_filter));
  app.add(std::move(service));

  if (m.provider != ProviderExport::kNone) {
    XmlNode provider = element("provider", {attr("name", ".DataProvider"),
                                            attr("authorities", package + ".data")});
    switch (m.provider) {
      case ProviderExport::kExportedNoPermission:
        provider.attrs.push_back(attr("exported", true));
        break;
      case ProviderExport::kExportedWithPermission:
        provider.attrs.push_back(attr("exported", true));
        provider.attrs.push_back(attr("permission", permission));
        break;
      case ProviderExport::kNotExported:
        provider.attrs.push_back(attr("exported", false));
        break;
      case ProviderExport::kDefault:
      case ProviderExport::kNone:
        break;
    }
    app.add(std::move(provider));
  }
  root.add(std::move(app));
  return root;
}

}  // namespace

std::set<RuleId> implied_positive_rules(const ManifestKnobs& m, const CodeKnobs& c) {
  std::set<RuleId> out;
  if (c.service_intent == ServiceIntent::kImplicit) out.insert(RuleId::kImplicitIntentService);
  if (m.empty_intent_filter) out.insert(RuleId::kIntentFilterMisconfiguration);
  if (m.provider == ProviderExport::kExportedNoPermission ||
      (m.provider == ProviderExport::kDefault && (!m.target_sdk || *m.target_sdk < 17))) {
    out.insert(RuleId::kProviderExposure);
  }
  if (c.add_javascript_interface) out.insert(RuleId::kRemoteCodeExecution);
  if (c.get_device_id) out.insert(RuleId::kDeviceIdAccess);
  if (m.permission &&
      (*m.permission == ProtectionLevel::kNormal || *m.permission == ProtectionLevel::kUnset)) {
    out.insert(RuleId::kNormalProtectionLevel);
  }
  if (c.file_access == WebSetting::kEnabled ||
      (c.file_access == WebSetting::kNone && webview_referenced(c))) {
    out.insert(RuleId::kLocalFileAccess);
  }
  if (c.javascript == WebSetting::kEnabled) out.insert(RuleId::kWebViewJavaScript);
  if (!c.root_check_strings && !c.root_check_exec) out.insert(RuleId::kNoRootCheck);
  if (m.allow_backup != TriState::kFalse) out.insert(RuleId::kAdbBackup);
  if (c.file_delete_calls > 0) out.insert(RuleId::kFileUnsafeDelete);
  if (!c.signature_check) out.insert(RuleId::kNoSignatureCheck);
  if (!c.flag_secure) out.insert(RuleId::kScreenshotAllowed);
  if (!c.installer_check) out.insert(RuleId::kNoInstallerCheck);
  return out;
}

FixtureProfile make_profile(std::string name, const std::set<RuleId>& positive) {
  FixtureProfile p;
  p.name = std::move(name);
  p.positive_rules = positive;
  ManifestKnobs& m = p.manifest;
  CodeKnobs& c = p.code;
  for (const RuleId rule : positive) {
    switch (rule) {
      case RuleId::kImplicitIntentService: c.service_intent = ServiceIntent::kImplicit; break;
      case RuleId::kIntentFilterMisconfiguration: m.empty_intent_filter = true; break;
      case RuleId::kProviderExposure: m.provider = ProviderExport::kExportedNoPermission; break;
      case RuleId::kRemoteCodeExecution: c.add_javascript_interface = true; break;
      case RuleId::kDeviceIdAccess: c.get_device_id = true; break;
      case RuleId::kNormalProtectionLevel: m.permission = ProtectionLevel::kNormal; break;
      case RuleId::kLocalFileAccess: c.file_access = WebSetting::kEnabled; break;
      case RuleId::kWebViewJavaScript: c.javascript = WebSetting::kEnabled; break;
      case RuleId::kNoRootCheck: c.root_check_strings = false; break;
      case RuleId::kAdbBackup: m.allow_backup = TriState::kTrue; break;
      case RuleId::kFileUnsafeDelete: c.file_delete_calls = 1; break;
      case RuleId::kNoSignatureCheck: c.signature_check = false; break;
      case RuleId::kScreenshotAllowed: c.flag_secure = false; break;
      case RuleId::kNoInstallerCheck: c.installer_check = false; break;
    }
  }
  return p;
}

BuiltFixture build_fixture(const FixtureProfile& profile) {
  const auto implied = implied_positive_rules(profile.manifest, profile.code);
  if (implied != profile.positive_rules) {
    throw Error(ErrorCode::kInconsistentProfile,
                "profile '" + profile.name + "' knobs do not match its positive rules");
  }
  BuiltFixture out;
  out.package_name = "fixture." + profile.name;
  out.manifest = encode_axml(build_manifest(profile.name, out.package_name, profile.manifest));

  const std::string base = class_path(profile.name);
  const CodeKnobs& k = profile.code;
  std::vector<DexClass> primary;
  std::vector<DexClass> secondary;
  primary.push_back(main_activity(base, k));
  if (auto c = web_screen(base, k)) primary.push_back(std::move(*c));
  auto& rest = k.split_dex ? secondary : primary;
  rest.push_back(device_info(base, k));
  if (auto c = security_checks(base, out.package_name, k)) rest.push_back(std::move(*c));
  rest.push_back(storage(base, k));
  if (auto c = sync_starter(base, out.package_name, k)) rest.push_back(std::move(*c));

  std::vector<std::vector<DexClass>> images = {std::move(primary)};
  if (!secondary.empty()) images.push_back(std::move(secondary));
  ZipWriter zip;
  zip.add(std::string(kManifestEntryName), out.manifest, false);
  for (std::size_t i = 0; i < images.size(); ++i) {
    DexBuild dex = encode_dex(images[i]);
    const std::string entry = i == 0 ? "classes.dex" : "classes" + std::to_string(i + 1) + ".dex";
    zip.add(entry, dex.bytes, true);
    out.invocation_targets.insert(dex.invocation_targets.begin(), dex.invocation_targets.end());
    for (const auto& [target, count] : dex.invocation_counts) out.invocation_counts[target] += count;
    out.dexes.emplace_back(entry, std::move(dex.bytes));
  }
  static const std::vector<std::uint8_t> kResources = {'r', 'e', 's'};
  zip.add("res/raw/placeholder.txt", kResources, false);
  out.apk = zip.finish();
  return out;
}

std::vector<FixtureProfile> banking_fleet() {
  using R = RuleId;
  std::vector<FixtureProfile> fleet;

  auto starling = make_profile("starling-like", {R::kAdbBackup, R::kFileUnsafeDelete,
                                                 R::kScreenshotAllowed});
  starling.manifest.allow_backup = TriState::kUnset;
  starling.code.file_delete_calls = 2;
  fleet.push_back(std::move(starling));

  auto monese = make_profile(
      "monese-like", {R::kImplicitIntentService, R::kRemoteCodeExecution, R::kDeviceIdAccess,
                      R::kLocalFileAccess, R::kWebViewJavaScript, R::kFileUnsafeDelete,
                      R::kScreenshotAllowed});
  monese.code.root_check_strings = false;
  monese.code.root_check_exec = true;
  fleet.push_back(std::move(monese));

  auto atom = make_profile("atom-like", {R::kLocalFileAccess, R::kWebViewJavaScript,
                                         R::kNoRootCheck, R::kFileUnsafeDelete,
                                         R::kNoInstallerCheck});
  atom.code.file_access = WebSetting::kNone;
  fleet.push_back(std::move(atom));

  auto transferwise = make_profile("transferwise-like",
                                   {R::kDeviceIdAccess, R::kLocalFileAccess,
                                    R::kWebViewJavaScript, R::kNoRootCheck,
                                    R::kFileUnsafeDelete});
  transferwise.code.split_dex = true;
  fleet.push_back(std::move(transferwise));

  auto monzo = make_profile("monzo-like", {R::kLocalFileAccess, R::kNoRootCheck,
                                           R::kFileUnsafeDelete, R::kScreenshotAllowed,
                                           R::kNoInstallerCheck});
  monzo.code.file_access = WebSetting::kNone;
  monzo.code.javascript = WebSetting::kNone;
  monzo.code.file_delete_calls = 3;
  fleet.push_back(std::move(monzo));

  auto revolut = make_profile(
      "revolut-like",
      {R::kImplicitIntentService, R::kIntentFilterMisconfiguration, R::kProviderExposure,
       R::kNormalProtectionLevel, R::kLocalFileAccess, R::kNoRootCheck, R::kFileUnsafeDelete,
       R::kNoSignatureCheck, R::kScreenshotAllowed, R::kNoInstallerCheck});
  revolut.manifest.provider = ProviderExport::kDefault;
  revolut.manifest.target_sdk = 16;
  revolut.manifest.permission = ProtectionLevel::kUnset;
  revolut.code.split_dex = true;
  fleet.push_back(std::move(revolut));

  return fleet;
}

std::vector<FixtureProfile> oracle_corpus() {
  std::vector<FixtureProfile> corpus;
  const std::set<RuleId> all(kAllRules.begin(), kAllRules.end());
  for (const RuleId rule : kAllRules) {
    std::string code(rule_info(rule).code);
    std::transform(code.begin(), code.end(), code.begin(), ::tolower);
    corpus.push_back(make_profile("only-" + code, {rule}));
    std::set<RuleId> others = all;
    others.erase(rule);
    corpus.push_back(make_profile("all-but-" + code, others));
  }
  return corpus;
}

std::vector<std::set<RuleId>> expected_fleet_vectors() {
  using R = RuleId;
  return {
      {R::kAdbBackup, R::kFileUnsafeDelete, R::kScreenshotAllowed},
      {R::kImplicitIntentService, R::kRemoteCodeExecution, R::kDeviceIdAccess,
       R::kLocalFileAccess, R::kWebViewJavaScript, R::kFileUnsafeDelete,
       R::kScreenshotAllowed},
      {R::kLocalFileAccess, R::kWebViewJavaScript, R::kNoRootCheck, R::kFileUnsafeDelete,
       R::kNoInstallerCheck},
      {R::kDeviceIdAccess, R::kLocalFileAccess, R::kWebViewJavaScript, R::kNoRootCheck,
       R::kFileUnsafeDelete},
      {R::kLocalFileAccess, R::kNoRootCheck, R::kFileUnsafeDelete, R::kScreenshotAllowed,
       R::kNoInstallerCheck},
      {R::kImplicitIntentService, R::kIntentFilterMisconfiguration, R::kProviderExposure,
       R::kNormalProtectionLevel, R::kLocalFileAccess, R::kNoRootCheck, R::kFileUnsafeDelete,
       R::kNoSignatureCheck, R::kScreenshotAllowed, R::kNoInstallerCheck},
  };
}

}  // namespace apkscan::fixtures
