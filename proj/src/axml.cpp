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

#include "apkscan/axml.hpp"

#include <algorithm>

#include "apkscan/byte_reader.hpp"
#include "apkscan/error.hpp"

namespace apkscan {
namespace {

constexpr std::uint16_t kChunkXml = 0x0003;
constexpr std::uint16_t kChunkStringPool = 0x0001;
constexpr std::uint16_t kChunkResourceMap = 0x0180;
constexpr std::uint16_t kChunkStartNamespace = 0x0100;
constexpr std::uint16_t kChunkEndNamespace = 0x0101;
constexpr std::uint16_t kChunkStartElement = 0x0102;
constexpr std::uint16_t kChunkEndElement = 0x0103;
constexpr std::uint16_t kChunkCdata = 0x0104;

constexpr std::uint32_t kNoIndex = 0xffffffff;
constexpr std::uint32_t kUtf8Flag = 1u << 8;
constexpr std::size_t kChunkHeaderSize = 8;
constexpr std::size_t kNodeHeaderSize = 16;
constexpr std::size_t kAttributeSize = 20;

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

std::string read_utf16_string(const detail::ByteReader& in, std::size_t pos) {
  std::uint32_t length = in.u16(pos);
  pos += 2;
  if (length & 0x8000) {
    length = ((length & 0x7fff) << 16) | in.u16(pos);
    pos += 2;
  }
  in.require(pos, 2ull * length, "utf-16 string");
  std::string out;
  out.reserve(length);
  for (std::uint32_t i = 0; i < length; ++i) {
    std::uint32_t unit = in.u16(pos + 2ull * i);
    if (unit >= 0xd800 && unit < 0xdc00 && i + 1 < length) {
      const std::uint32_t low = in.u16(pos + 2ull * (i + 1));
      if (low >= 0xdc00 && low < 0xe000) {
        unit = 0x10000 + ((unit - 0xd800) << 10) + (low - 0xdc00);
        ++i;
      }
    }
    if (unit >= 0xd800 && unit < 0xe000) unit = 0xfffd;
    append_utf8(out, unit);
  }
  return out;
}

std::string read_utf8_string(const detail::ByteReader& in, std::size_t pos) {
  // Two lengths precede the bytes: UTF-16 units, then UTF-8 bytes.
  auto read_length = [&](std::size_t& p) {
    std::uint32_t length = in.u8(p++);
    if (length & 0x80) length = ((length & 0x7f) << 8) | in.u8(p++);
    return length;
  };
  read_length(pos);
  const std::uint32_t byte_length = read_length(pos);
  const auto bytes = in.slice(pos, byte_length);
  return std::string(bytes.begin(), bytes.end());
}

std::vector<std::string> read_string_pool(const detail::ByteReader& in,
                                          std::size_t chunk,
                                          std::size_t header_size,
                                          std::size_t chunk_size) {
  if (header_size < 28) {
    throw Error(ErrorCode::kTruncatedChunk, "string pool header too small");
  }
  const std::uint32_t count = in.u32(chunk + 8);
  const std::uint32_t flags = in.u32(chunk + 16);
  const std::uint32_t strings_start = in.u32(chunk + 20);
  // Confine all reads to the chunk itself.
  const detail::ByteReader pool(in.slice(chunk, chunk_size),
                                ErrorCode::kTruncatedChunk);
  pool.require(header_size, 4ull * count, "string offsets");
  std::vector<std::string> strings;
  strings.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t offset =
        static_cast<std::uint64_t>(strings_start) + pool.u32(header_size + 4ull * i);
    pool.require(offset, 1, "string data");
    strings.push_back((flags & kUtf8Flag) ? read_utf8_string(pool, offset)
                                          : read_utf16_string(pool, offset));
  }
  return strings;
}

class Decoder {
 public:
  explicit Decoder(std::span<const std::uint8_t> bytes)
      : in_(bytes, ErrorCode::kTruncatedChunk) {}

  AxmlDocument run() {
    if (in_.size() < 2 || in_.u16(0) != kChunkXml) {
      throw Error(ErrorCode::kBadAxmlMagic, "missing XML chunk tag 0x0003");
    }
    if (in_.size() < kChunkHeaderSize) {
      throw Error(ErrorCode::kTruncatedChunk, "XML header truncated");
    }
    const std::uint16_t header_size = in_.u16(2);
    const std::uint32_t declared = in_.u32(4);
    if (declared != in_.size() || header_size < kChunkHeaderSize ||
        header_size > declared) {
      throw Error(ErrorCode::kTruncatedChunk,
                  "XML chunk declares " + std::to_string(declared) +
                      " bytes but input has " + std::to_string(in_.size()));
    }

    std::size_t pos = header_size;
    while (pos < in_.size()) {
      in_.require(pos, kChunkHeaderSize, "chunk header");
      const std::uint16_t type = in_.u16(pos);
      const std::uint16_t chunk_header = in_.u16(pos + 2);
      const std::uint32_t chunk_size = in_.u32(pos + 4);
      if (chunk_header < kChunkHeaderSize || chunk_size < chunk_header ||
          !in_.in_bounds(pos, chunk_size)) {
        throw Error(ErrorCode::kTruncatedChunk,
                    "malformed chunk at offset " + std::to_string(pos));
      }
      handle_chunk(type, pos, chunk_header, chunk_size);
      pos += chunk_size;
    }

    if (!stack_.empty()) {
      throw Error(ErrorCode::kUnbalancedTree,
                  "element <" + stack_.back().name + "> is never closed");
    }
    if (!have_root_) {
      throw Error(ErrorCode::kUnbalancedTree, "document has no root element");
    }
    return std::move(doc_);
  }

 private:
  const std::string& string_at(std::uint32_t index) const {
    if (index >= doc_.string_pool.size()) {
      throw Error(ErrorCode::kStringIndexOutOfRange,
                  "string index " + std::to_string(index) + " >= pool size " +
                      std::to_string(doc_.string_pool.size()));
    }
    return doc_.string_pool[index];
  }

  std::string optional_string(std::uint32_t index) const {
    return index == kNoIndex ? std::string() : string_at(index);
  }

  void require_node(std::size_t header, std::size_t size, std::size_t ext) const {
    if (header < kNodeHeaderSize || header + ext > size) {
      throw Error(ErrorCode::kTruncatedChunk, "XML node chunk too small");
    }
  }

  void handle_chunk(std::uint16_t type, std::size_t pos, std::size_t header,
                    std::size_t size) {
    switch (type) {
      case kChunkStringPool:
        if (!have_pool_) {
          doc_.string_pool = read_string_pool(in_, pos, header, size);
          have_pool_ = true;
        }
        break;
      case kChunkStartNamespace: {
        require_node(header, size, 8);
        // Both lookups may throw; evaluate them outside the aggregate
        // initializer, which leaks on GCC 11 when a later member throws.
        std::string prefix = optional_string(in_.u32(pos + header));
        std::string uri = optional_string(in_.u32(pos + header + 4));
        doc_.namespaces.push_back({std::move(prefix), std::move(uri)});
        break;
      }
      case kChunkStartElement:
        start_element(pos, header, size);
        break;
      case kChunkEndElement: {
        require_node(header, size, 8);
        const std::string name = optional_string(in_.u32(pos + header + 4));
        if (stack_.empty() || stack_.back().name != name) {
          throw Error(ErrorCode::kUnbalancedTree,
                      "unexpected end tag </" + name + ">");
        }
        AxmlElement done = std::move(stack_.back());
        stack_.pop_back();
        if (stack_.empty()) {
          doc_.root = std::move(done);
          have_root_ = true;
        } else {
          stack_.back().children.push_back(std::move(done));
        }
        break;
      }
      case kChunkResourceMap:
      case kChunkEndNamespace:
      case kChunkCdata:
      default:
        break;
    }
  }

  void start_element(std::size_t pos, std::size_t header, std::size_t size) {
    require_node(header, size, 20);
    if (have_root_ && stack_.empty()) {
      throw Error(ErrorCode::kUnbalancedTree, "second root element");
    }
    const std::size_t ext = pos + header;
    AxmlElement element;
    element.namespace_uri = optional_string(in_.u32(ext));
    element.name = optional_string(in_.u32(ext + 4));
    const std::uint16_t attr_start = in_.u16(ext + 8);
    const std::uint16_t attr_size = in_.u16(ext + 10);
    const std::uint16_t attr_count = in_.u16(ext + 12);
    if (attr_count > 0 && attr_size < kAttributeSize) {
      throw Error(ErrorCode::kTruncatedChunk, "attribute record too small");
    }
    const std::uint64_t attrs_begin = ext + attr_start;
    if (attrs_begin + static_cast<std::uint64_t>(attr_size) * attr_count >
        pos + size) {
      throw Error(ErrorCode::kTruncatedChunk,
                  "attributes overrun element chunk <" + element.name + ">");
    }
    element.attributes.reserve(attr_count);
    for (std::uint16_t i = 0; i < attr_count; ++i) {
      const std::uint64_t a = attrs_begin + static_cast<std::uint64_t>(i) * attr_size;
      AxmlAttribute attr;
      attr.namespace_uri = optional_string(in_.u32(a));
      attr.name = optional_string(in_.u32(a + 4));
      const std::uint32_t raw = in_.u32(a + 8);
      if (raw != kNoIndex) attr.raw_value = string_at(raw);
      attr.value.data_type = in_.u8(a + 15);
      attr.value.data = in_.u32(a + 16);
      if (attr.value.type() == ValueType::kString) {
        attr.value.string = string_at(attr.value.data);
      }
      element.attributes.push_back(std::move(attr));
    }
    stack_.push_back(std::move(element));
  }

  detail::ByteReader in_;
  AxmlDocument doc_;
  std::vector<AxmlElement> stack_;
  bool have_pool_ = false;
  bool have_root_ = false;
};

}  // namespace

const AxmlAttribute* AxmlElement::attribute(std::string_view ns,
                                            std::string_view attr_name) const {
  const auto it = std::find_if(
      attributes.begin(), attributes.end(), [&](const AxmlAttribute& a) {
        return a.name == attr_name && a.namespace_uri == ns;
      });
  return it == attributes.end() ? nullptr : &*it;
}

AxmlDocument decode_axml(std::span<const std::uint8_t> bytes) {
  return Decoder(bytes).run();
}

}  // namespace apkscan
