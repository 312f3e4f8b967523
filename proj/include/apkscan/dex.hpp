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

#ifndef APKSCAN_DEX_HPP_
#define APKSCAN_DEX_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace apkscan {

struct MethodRef {
  std::string owner;  // type descriptor, e.g. "Landroid/webkit/WebView;"
  std::string name;
  std::string shorty;
  std::string return_type;
  std::vector<std::string> parameters;

  // "Lowner;->name(params)ret"
  std::string signature() const;
  bool operator==(const MethodRef&) const = default;
};

// One decoded Dalvik instruction. Operands are materialized only for the
// const (0x12-0x14) and invoke (0x6e-0x72, 0x74-0x78) families.
struct Instruction {
  std::uint32_t offset = 0;  // byte offset within the method's insns
  std::uint16_t width = 0;   // in 16-bit code units
  std::uint8_t opcode = 0;
  std::int64_t literal = 0;
  std::uint32_t method_index = 0;

  bool is_const_literal() const { return opcode >= 0x12 && opcode <= 0x14; }
  bool is_invoke() const {
    return (opcode >= 0x6e && opcode <= 0x72) ||
           (opcode >= 0x74 && opcode <= 0x78);
  }
};

struct MethodBody {
  std::string owner;
  std::string name;
  std::uint32_t method_index = 0;
  std::vector<Instruction> instructions;  // empty for abstract/native
};

struct ClassDef {
  std::string type_name;
  std::vector<MethodBody> methods;
};

struct DexImage {
  std::string entry_name;  // archive entry this image came from, if any
  std::vector<std::string> strings;
  std::vector<std::string> type_names;
  std::vector<MethodRef> method_refs;
  std::vector<ClassDef> classes;
};

struct InvocationSite {
  std::string caller_class;
  std::string caller_method;
  MethodRef callee;
  std::uint32_t offset = 0;
  // Locates the calling body: dex.classes[class_index].methods[method_index].
  std::size_t class_index = 0;
  std::size_t method_index = 0;
};

enum class MatchMode { kExact, kSubstring };

struct StringMatch {
  std::string value;
  std::uint32_t index = 0;
  bool operator==(const StringMatch&) const = default;
};

inline constexpr std::size_t kDefaultLiteralLookback = 8;

DexImage parse_dex(std::span<const std::uint8_t> bytes,
                   std::string entry_name = {});

// Invoke instructions whose callee matches `method_name` and `owner_pattern`.
// The pattern is an exact descriptor, or a prefix ending in '*' ("*" alone
// matches every owner).
std::vector<InvocationSite> invocations_of(const DexImage& dex,
                                           std::string_view owner_pattern,
                                           std::string_view method_name);

std::vector<StringMatch> string_pool_matches(
    const DexImage& dex, std::span<const std::string> needles, MatchMode mode);

bool references_type(const DexImage& dex, std::string_view descriptor);

// Nearest const/4, const/16 or const literal within `max_lookback`
// instructions before the call. Registers are not tracked.
std::optional<std::int64_t> literal_reaching(
    const InvocationSite& site, const MethodBody& body,
    std::size_t max_lookback = kDefaultLiteralLookback);

const MethodBody& body_of(const DexImage& dex, const InvocationSite& site);

// Width in code units of the instruction starting at `units[0]`, honouring
// the switch and array-data payload pseudo-instructions. Returns 0 when the
// payload header itself is truncated.
std::size_t instruction_width(std::span<const std::uint16_t> units);

}  // namespace apkscan

#endif  // APKSCAN_DEX_HPP_
