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

#ifndef APKSCAN_AXML_HPP_
#define APKSCAN_AXML_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace apkscan {

inline constexpr std::string_view kAndroidNamespace =
    "http://schemas.android.com/apk/res/android";

// Res_value data types that the manifest layer interprets.
enum class ValueType : std::uint8_t {
  kNull = 0x00,
  kReference = 0x01,
  kAttribute = 0x02,
  kString = 0x03,
  kFloat = 0x04,
  kIntDec = 0x10,
  kIntHex = 0x11,
  kBoolean = 0x12,
};

struct TypedValue {
  std::uint8_t data_type = 0;
  std::uint32_t data = 0;
  // Resolved string for kString values.
  std::string string;

  ValueType type() const { return static_cast<ValueType>(data_type); }
  bool is_int() const {
    return type() == ValueType::kIntDec || type() == ValueType::kIntHex;
  }
};

struct AxmlAttribute {
  std::string namespace_uri;
  std::string name;
  std::optional<std::string> raw_value;
  TypedValue value;
};

struct AxmlElement {
  std::string namespace_uri;
  std::string name;
  std::vector<AxmlAttribute> attributes;
  std::vector<AxmlElement> children;

  const AxmlAttribute* attribute(std::string_view namespace_uri,
                                 std::string_view name) const;
  const AxmlAttribute* android_attribute(std::string_view name) const {
    return attribute(kAndroidNamespace, name);
  }
};

struct AxmlNamespace {
  std::string prefix;
  std::string uri;
};

struct AxmlDocument {
  std::vector<std::string> string_pool;
  std::vector<AxmlNamespace> namespaces;
  AxmlElement root;
};

// Decodes compiled (binary) XML. Supports the string pool, resource map,
// namespace, element and CDATA chunks; unknown chunk types are skipped by
// their declared size.
AxmlDocument decode_axml(std::span<const std::uint8_t> bytes);

}  // namespace apkscan

#endif  // APKSCAN_AXML_HPP_
