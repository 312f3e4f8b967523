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

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "apkscan/knowledge_base.hpp"
#include "test_support.hpp"

namespace apkscan {
namespace {

using R = RuleId;

struct Row {
  R rule;
  const char* threat;
  const char* countermeasure;
};

// The threat and developer-countermeasure columns, transcribed by hand.
const std::vector<Row>& reference_rows() {
  static const std::vector<Row> rows = {
      {R::kImplicitIntentService, "Lack of user awareness",
       "Always use explicit intent when starting a service."},
      {R::kIntentFilterMisconfiguration, "Application malfunction",
       "Config \"intent-filter\" should have at least one \"action.\""},
      {R::kProviderExposure, "Third-party application threat",
       "Set at least \"signature\" protectional Level permission or make it \"false.\""},
      {R::kRemoteCodeExecution, "Unauthorized access",
       "Modify code to disallow remote code execution."},
      {R::kDeviceIdAccess, "Information leakage",
       "If the device ID is needed, use the \"Installation\" framework instead."},
      {R::kNormalProtectionLevel, "Third-party application threat",
       "The app should declare the permission with the \"android:protectionLevel\" of "
       "\"signature\" or \"signatureOrSystem\" so that other apps cannot register and receive "
       "messages for this app. android:protectionLevel=\"signature\" ensures that apps with "
       "request permission must be signed with the same certificate as the application that "
       "declared the permission."},
      {R::kLocalFileAccess, "Malware (malicious code)",
       "This can be mitigated or prevented by disabling local file system access. (It is "
       "enabled by default)."},
      {R::kWebViewJavaScript, "Cross-site Scripting threat", "Disable Webview Javascript."},
      {R::kNoRootCheck, "Platform manipulation",
       "There should be a code for checking for \"root\" or system privilege in the device."},
      {R::kAdbBackup, "Improper disposal of the device", "Disable ADB backup in an application."},
      {R::kFileUnsafeDelete, "Improper disposal of the device",
       "Do not use \"file.delete()\" to delete essential files."},
      {R::kNoSignatureCheck, "Hacking",
       "There should be a code in the application for checking package signature."},
      {R::kScreenshotAllowed, "Improper disposal of the device",
       "This application should have a code for preventing screenshot capturing."},
      {R::kNoInstallerCheck, "Phishing through fake applications",
       "The application should have a code for checking APK installer sources."},
  };
  return rows;
}

const std::vector<std::string> kUserRows = {
    "Do not use mobile banking applications for jailbreak or rooted mobile devices",
    "Download mobile banking applications from trusted app stores",
    "Use mobile anti-virus applications",
    "Physically protect the mobile device",
    "Update mobile banking applications regularly",
    "Update mobile device's operating system",
};

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(KnowledgeBase, TotalOverRules) {
  const auto& kb = KnowledgeBase::embedded();
  for (R rule : kAllRules) {
    EXPECT_EQ(kb.threat_for(rule).rule, rule);
    EXPECT_EQ(kb.countermeasure_for(rule).rule, rule);
    EXPECT_FALSE(kb.threat_for(rule).threat_name.empty());
    EXPECT_FALSE(kb.threat_for(rule).description.empty());
    EXPECT_FALSE(kb.countermeasure_for(rule).developer_action.empty());
    EXPECT_FALSE(kb.background_for(rule).empty());
  }
  EXPECT_EQ(kb.user_countermeasures().size(), kUserCountermeasureCount);
}

TEST(KnowledgeBase, MatchesReferenceTable) {
  const auto& kb = KnowledgeBase::embedded();
  ASSERT_EQ(reference_rows().size(), kRuleCount);
  for (const Row& row : reference_rows()) {
    EXPECT_EQ(kb.threat_for(row.rule).threat_name, row.threat) << rule_info(row.rule).code;
    EXPECT_EQ(kb.countermeasure_for(row.rule).developer_action, row.countermeasure)
        << rule_info(row.rule).code;
  }
  ASSERT_EQ(kb.user_countermeasures().size(), kUserRows.size());
  for (std::size_t i = 0; i < kUserRows.size(); ++i) {
    EXPECT_EQ(kb.user_countermeasures()[i].text, kUserRows[i]);
  }
}

TEST(KnowledgeBase, Examples) {
  const auto& kb = KnowledgeBase::embedded();
  EXPECT_EQ(kb.threat_for(R::kRemoteCodeExecution).threat_name, "Unauthorized access");
  EXPECT_EQ(kb.threat_for(R::kWebViewJavaScript).threat_name, "Cross-site Scripting threat");
  EXPECT_NE(kb.countermeasure_for(R::kNoInstallerCheck).developer_action.find("installer"),
            std::string::npos);
  EXPECT_NE(kb.countermeasure_for(R::kImplicitIntentService).developer_action.find("explicit"),
            std::string::npos);
  EXPECT_NE(kb.countermeasure_for(R::kFileUnsafeDelete).developer_action.find("file.delete()"),
            std::string::npos);
  EXPECT_NE(kb.countermeasure_for(R::kNormalProtectionLevel).developer_action.find("signature"),
            std::string::npos);
  const auto& users = kb.user_countermeasures();
  EXPECT_NE(users.front().text.find("rooted"), std::string::npos);
  EXPECT_NE(users.back().text.find("operating system"), std::string::npos);
}

TEST(KnowledgeBase, EmbeddedEqualsShippedFile) {
  const char* path = APKSCAN_KB_SOURCE_FILE;
  EXPECT_EQ(read_text(path), std::string(embedded_knowledge_base_json()));
  const auto from_file = KnowledgeBase::from_file(path);
  const auto& embedded = KnowledgeBase::embedded();
  for (R rule : kAllRules) {
    EXPECT_EQ(from_file.threat_for(rule).description, embedded.threat_for(rule).description);
    EXPECT_EQ(from_file.background_for(rule), embedded.background_for(rule));
  }
}

nlohmann::json embedded_doc() { return nlohmann::json::parse(embedded_knowledge_base_json()); }

TEST(KnowledgeBase, InvalidDocuments) {
  EXPECT_APKSCAN_ERROR(KnowledgeBase::from_json("{not json"), ErrorCode::kKnowledgeBaseInvalid);
  EXPECT_APKSCAN_ERROR(KnowledgeBase::from_json("[]"), ErrorCode::kKnowledgeBaseInvalid);
  EXPECT_APKSCAN_ERROR(KnowledgeBase::from_json("{}"), ErrorCode::kKnowledgeBaseInvalid);

  auto missing_rule = embedded_doc();
  missing_rule["rules"].erase(3);
  EXPECT_APKSCAN_ERROR(KnowledgeBase::from_json(missing_rule.dump()),
                       ErrorCode::kKnowledgeBaseInvalid);

  auto duplicate = embedded_doc();
  duplicate["rules"][1]["rule_id"] = "R01";
  EXPECT_APKSCAN_ERROR(KnowledgeBase::from_json(duplicate.dump()),
                       ErrorCode::kKnowledgeBaseInvalid);

  auto unknown = embedded_doc();
  unknown["rules"][0]["rule_id"] = "R99";
  EXPECT_APKSCAN_ERROR(KnowledgeBase::from_json(unknown.dump()),
                       ErrorCode::kKnowledgeBaseInvalid);

  for (const char* field : {"threat_name", "threat_description", "developer_countermeasure",
                            "background"}) {
    auto blank = embedded_doc();
    blank["rules"][5][field] = "";
    EXPECT_APKSCAN_ERROR(KnowledgeBase::from_json(blank.dump()),
                         ErrorCode::kKnowledgeBaseInvalid);
    auto absent = embedded_doc();
    absent["rules"][5].erase(field);
    EXPECT_APKSCAN_ERROR(KnowledgeBase::from_json(absent.dump()),
                         ErrorCode::kKnowledgeBaseInvalid);
  }

  auto five_users = embedded_doc();
  five_users["user_countermeasures"].erase(0);
  EXPECT_APKSCAN_ERROR(KnowledgeBase::from_json(five_users.dump()),
                       ErrorCode::kKnowledgeBaseInvalid);
}

TEST(KnowledgeBase, CustomDocumentLoads) {
  auto doc = embedded_doc();
  doc["rules"][0]["threat_name"] = "Custom";
  const auto kb = KnowledgeBase::from_json(doc.dump());
  EXPECT_EQ(kb.threat_for(R::kImplicitIntentService).threat_name, "Custom");

  testing::TempDir dir;
  const std::string text = doc.dump(2);
  const auto path = dir.write("kb.json", std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                                   text.size()));
  EXPECT_EQ(KnowledgeBase::from_file(path).threat_for(R::kImplicitIntentService).threat_name,
            "Custom");
  EXPECT_APKSCAN_ERROR(KnowledgeBase::from_file(dir.path() / "missing.json"), ErrorCode::kIo);
}

}  // namespace
}  // namespace apkscan
