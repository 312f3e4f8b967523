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

#ifndef APKSCAN_FIXTURES_HPP_
#define APKSCAN_FIXTURES_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "apkscan/manifest.hpp"
#include "apkscan/rules.hpp"

// Programmatic construction of small, valid APKs: a ZIP writer, a binary
// XML encoder, a DEX assembler, and vulnerability profiles on top of them.
// Used as the oracle for the parsers and the rule engine.
namespace apkscan::fixtures {

// ---------------------------------------------------------------------------
// ZIP

class ZipWriter {
 public:
  void add(std::string name, std::span<const std::uint8_t> data,
           bool deflate = false);
  // Bytes placed before the first local header (e.g. a stub loader).
  void set_prefix(std::vector<std::uint8_t> prefix) { prefix_ = std::move(prefix); }
  std::vector<std::uint8_t> finish() const;

 private:
  struct Entry {
    std::string name;
    std::uint16_t method;
    std::uint32_t crc32;
    std::uint32_t uncompressed_size;
    std::vector<std::uint8_t> stored;
  };
  std::vector<std::uint8_t> prefix_;
  std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Binary XML

struct XmlAttr {
  bool android_ns = true;
  std::string name;
  std::variant<std::string, std::int32_t, bool> value;
  // Emit a boolean as a resource reference instead of a literal.
  bool as_reference = false;
};

struct XmlNode {
  std::string name;
  std::vector<XmlAttr> attrs;
  std::vector<XmlNode> children;

  XmlNode& add(XmlNode child) {
    children.push_back(std::move(child));
    return children.back();
  }
};

// UTF-16 string pool, resource map, android namespace, element tree.
std::vector<std::uint8_t> encode_axml(const XmlNode& root, bool utf8_pool = false);

// ---------------------------------------------------------------------------
// DEX

struct MethodSpec {
  std::string owner;
  std::string name;
  std::string return_type = "V";
  std::vector<std::string> parameters;
};

enum class InvokeKind : std::uint8_t {
  kVirtual = 0x6e,
  kSuper = 0x6f,
  kDirect = 0x70,
  kStatic = 0x71,
  kInterface = 0x72,
};

class CodeBuilder {
 public:
  CodeBuilder& const4(std::uint8_t reg, std::int8_t value);
  CodeBuilder& const16(std::uint8_t reg, std::int16_t value);
  CodeBuilder& const32(std::uint8_t reg, std::int32_t value);
  CodeBuilder& const_string(std::uint8_t reg, std::string value);
  CodeBuilder& new_instance(std::uint8_t reg, std::string type);
  CodeBuilder& invoke(InvokeKind kind, MethodSpec method,
                      std::vector<std::uint8_t> regs);
  CodeBuilder& invoke_range(InvokeKind kind, MethodSpec method,
                            std::uint16_t first_reg, std::uint8_t count);
  CodeBuilder& move_result_object(std::uint8_t reg);
  CodeBuilder& return_void();
  CodeBuilder& nop();
  // Pre-encoded code units, for payloads and opcodes without a helper.
  CodeBuilder& raw(std::vector<std::uint16_t> units);

  struct Op {
    enum class Kind { kUnits, kConstString, kNewInstance, kInvoke, kInvokeRange };
    Kind kind = Kind::kUnits;
    std::vector<std::uint16_t> units;  // kUnits
    std::uint8_t opcode = 0;
    std::uint8_t reg = 0;
    std::string symbol;  // string value or type descriptor
    MethodSpec method;
    std::vector<std::uint8_t> regs;
    std::uint16_t first_reg = 0;
    std::uint8_t count = 0;
  };
  const std::vector<Op>& ops() const { return ops_; }

 private:
  std::vector<Op> ops_;
};

struct DexMethod {
  std::string name;
  CodeBuilder code;
  bool has_code = true;
};

struct DexClass {
  std::string type;
  std::vector<DexMethod> methods;
};

struct DexBuild {
  std::vector<std::uint8_t> bytes;
  // (owner, name) of every emitted invoke.
  std::set<std::pair<std::string, std::string>> invocation_targets;
  // Number of emitted invokes per (owner, name).
  std::map<std::pair<std::string, std::string>, int> invocation_counts;
};

// Emits a complete DEX 035 image: sorted id sections, class data, code
// items, map list, SHA-1 signature and Adler-32 checksum.
DexBuild encode_dex(const std::vector<DexClass>& classes,
                    const std::vector<std::string>& extra_types = {});

// ---------------------------------------------------------------------------
// Profiles

enum class ServiceIntent { kNone, kImplicit, kExplicit };
enum class WebSetting { kNone, kEnabled, kDisabled };
enum class ProviderExport {
  kNone,
  kExportedNoPermission,
  kExportedWithPermission,
  kNotExported,
  kDefault,  // no android:exported; depends on target SDK
};

struct ManifestKnobs {
  TriState allow_backup = TriState::kFalse;
  ProviderExport provider = ProviderExport::kExportedWithPermission;
  // nullopt: no <permission> element at all.
  std::optional<ProtectionLevel> permission = ProtectionLevel::kSignature;
  bool empty_intent_filter = false;
  std::optional<int> target_sdk = 30;
};

struct CodeKnobs {
  ServiceIntent service_intent = ServiceIntent::kExplicit;
  bool add_javascript_interface = false;
  bool get_device_id = false;
  WebSetting file_access = WebSetting::kDisabled;
  WebSetting javascript = WebSetting::kDisabled;
  bool webview_reference = true;  // a plain WebView.loadUrl call
  bool root_check_strings = true;
  bool root_check_exec = false;
  bool signature_check = true;
  bool flag_secure = true;
  bool installer_check = true;
  int file_delete_calls = 0;
  bool split_dex = false;  // spread classes over classes.dex + classes2.dex
};

struct FixtureProfile {
  std::string name;
  std::set<RuleId> positive_rules;
  ManifestKnobs manifest;
  CodeKnobs code;
};

// Which rules the knobs make vulnerable, derived from the producing side.
std::set<RuleId> implied_positive_rules(const ManifestKnobs& manifest,
                                        const CodeKnobs& code);

// Knobs with every rule in `positive` vulnerable and every other rule
// hardened; positive_rules is set accordingly.
FixtureProfile make_profile(std::string name, const std::set<RuleId>& positive);

struct BuiltFixture {
  std::string package_name;
  std::vector<std::uint8_t> apk;
  std::vector<std::uint8_t> manifest;
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> dexes;
  std::set<std::pair<std::string, std::string>> invocation_targets;
  std::map<std::pair<std::string, std::string>, int> invocation_counts;
};

// Throws ErrorCode::kInconsistentProfile when the knobs do not imply
// exactly profile.positive_rules.
BuiltFixture build_fixture(const FixtureProfile& profile);

// Six profiles reproducing the surveyed banking apps' rule vectors.
std::vector<FixtureProfile> banking_fleet();

// One single-positive and one single-negative profile per rule (28).
std::vector<FixtureProfile> oracle_corpus();

// Expected fleet vectors, in banking_fleet() order.
std::vector<std::set<RuleId>> expected_fleet_vectors();

}  // namespace apkscan::fixtures

#endif  // APKSCAN_FIXTURES_HPP_
