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
#include <map>

#include "apkscan/fixtures.hpp"

namespace apkscan::fixtures {
namespace {

constexpr std::string_view kAndroidUri = "http://schemas.android.com/apk/res/android";
constexpr std::uint32_t kNone = 0xFFFFFFFF;

// Framework attribute ids for the names the profiles use.
const std::map<std::string, std::uint32_t>& attribute_ids() {
  static const std::map<std::string, std::uint32_t> ids = {
      {"label", 0x01010001},           {"name", 0x01010003},
      {"permission", 0x01010006},      {"protectionLevel", 0x01010009},
      {"exported", 0x01010010},        {"authorities", 0x01010018},
      {"versionCode", 0x0101021b},     {"versionName", 0x0101021c},
      {"minSdkVersion", 0x0101020c},   {"targetSdkVersion", 0x01010270},
      {"allowBackup", 0x01010280},
  };
  return ids;
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  put16(out, static_cast<std::uint16_t>(v));
  put16(out, static_cast<std::uint16_t>(v >> 16));
}

void set32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void pad4(std::vector<std::uint8_t>& out) {
  while (out.size() % 4 != 0) out.push_back(0);
}

class Encoder {
 public:
  Encoder(const XmlNode& root, bool utf8) : utf8_(utf8) {
    // Resource-mapped attribute names come first so the map is a prefix.
    collect_attr_names(root);
    mapped_ = strings_.size();
    intern(std::string(kAndroidUri));
    intern("android");
    collect_rest(root);
  }

  std::vector<std::uint8_t> encode(const XmlNode& root) {
    std::vector<std::uint8_t> out;
    put16(out, 0x0003);
    put16(out, 8);
    put32(out, 0);
    write_pool(out);
    write_resource_map(out);
    write_namespace(out, 0x0100);
    write_element(out, root);
    write_namespace(out, 0x0101);
    set32(out, 4, static_cast<std::uint32_t>(out.size()));
    return out;
  }

 private:
  std::uint32_t intern(const std::string& s) {
    auto [it, inserted] = index_.emplace(s, static_cast<std::uint32_t>(strings_.size()));
    if (inserted) strings_.push_back(s);
    return it->second;
  }

  void collect_attr_names(const XmlNode& node) {
    for (const XmlAttr& a : node.attrs) {
      if (a.android_ns && attribute_ids().contains(a.name)) intern(a.name);
    }
    for (const XmlNode& c : node.children) collect_attr_names(c);
  }

  void collect_rest(const XmlNode& node) {
    intern(node.name);
    for (const XmlAttr& a : node.attrs) {
      intern(a.name);
      if (const auto* s = std::get_if<std::string>(&a.value)) intern(*s);
    }
    for (const XmlNode& c : node.children) collect_rest(c);
  }

  void write_pool(std::vector<std::uint8_t>& out) const {
    const std::size_t start = out.size();
    put16(out, 0x0001);
    put16(out, 28);
    put32(out, 0);
    put32(out, static_cast<std::uint32_t>(strings_.size()));
    put32(out, 0);
    put32(out, utf8_ ? (1u << 8) : 0u);
    put32(out, static_cast<std::uint32_t>(28 + 4 * strings_.size()));
    put32(out, 0);
    const std::size_t offsets_at = out.size();
    out.resize(out.size() + 4 * strings_.size());
    const std::size_t data_start = out.size();
    for (std::size_t i = 0; i < strings_.size(); ++i) {
      set32(out, offsets_at + 4 * i, static_cast<std::uint32_t>(out.size() - data_start));
      const std::string& s = strings_[i];
      if (utf8_) {
        // Profile strings are ASCII: char count equals byte count.
        append_utf8_length(out, s.size());
        append_utf8_length(out, s.size());
        out.insert(out.end(), s.begin(), s.end());
        out.push_back(0);
      } else {
        put16(out, static_cast<std::uint16_t>(s.size()));
        for (unsigned char c : s) put16(out, c);
        put16(out, 0);
      }
    }
    pad4(out);
    set32(out, start + 4, static_cast<std::uint32_t>(out.size() - start));
  }

  static void append_utf8_length(std::vector<std::uint8_t>& out, std::size_t n) {
    if (n > 0x7f) {
      out.push_back(static_cast<std::uint8_t>(0x80 | (n >> 8)));
    }
    out.push_back(static_cast<std::uint8_t>(n & 0xff));
  }

  void write_resource_map(std::vector<std::uint8_t>& out) const {
    if (mapped_ == 0) return;
    put16(out, 0x0180);
    put16(out, 8);
    put32(out, static_cast<std::uint32_t>(8 + 4 * mapped_));
    for (std::size_t i = 0; i < mapped_; ++i) put32(out, attribute_ids().at(strings_[i]));
  }

  void write_namespace(std::vector<std::uint8_t>& out, std::uint16_t type) {
    put16(out, type);
    put16(out, 16);
    put32(out, 24);
    put32(out, 1);
    put32(out, kNone);
    put32(out, index_.at("android"));
    put32(out, index_.at(std::string(kAndroidUri)));
  }

  void write_element(std::vector<std::uint8_t>& out, const XmlNode& node) {
    const std::uint32_t uri = index_.at(std::string(kAndroidUri));
    put16(out, 0x0102);
    put16(out, 16);
    put32(out, static_cast<std::uint32_t>(36 + 20 * node.attrs.size()));
    put32(out, ++line_);
    put32(out, kNone);
    put32(out, kNone);
    put32(out, index_.at(node.name));
    put16(out, 20);
    put16(out, 20);
    put16(out, static_cast<std::uint16_t>(node.attrs.size()));
    put16(out, 0);
    put16(out, 0);
    put16(out, 0);
    for (const XmlAttr& a : node.attrs) {
      put32(out, a.android_ns ? uri : kNone);
      put32(out, index_.at(a.name));
      std::uint8_t type = 0;
      std::uint32_t data = 0;
      std::uint32_t raw = kNone;
      if (const auto* s = std::get_if<std::string>(&a.value)) {
        type = 0x03;
        data = raw = index_.at(*s);
      } else if (const auto* i = std::get_if<std::int32_t>(&a.value)) {
        type = 0x10;
        data = static_cast<std::uint32_t>(*i);
      } else if (a.as_reference) {
        type = 0x01;
        data = 0x7f050001;
      } else {
        type = 0x12;
        data = std::get<bool>(a.value) ? 0xFFFFFFFF : 0;
      }
      put32(out, raw);
      put16(out, 8);
      out.push_back(0);
      out.push_back(type);
      put32(out, data);
    }
    for (const XmlNode& c : node.children) write_element(out, c);
    put16(out, 0x0103);
    put16(out, 16);
    put32(out, 24);
    put32(out, ++line_);
    put32(out, kNone);
    put32(out, kNone);
    put32(out, index_.at(node.name));
  }

  bool utf8_;
  std::vector<std::string> strings_;
  std::map<std::string, std::uint32_t> index_;
  std::size_t mapped_ = 0;
  std::uint32_t line_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_axml(const XmlNode& root, bool utf8_pool) {
  Encoder encoder(root, utf8_pool);
  return encoder.encode(root);
}

}  // namespace apkscan::fixtures
