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

#include "apkscan/dex.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <limits>

#include "apkscan/byte_reader.hpp"
#include "apkscan/error.hpp"

namespace apkscan {
namespace {

constexpr std::size_t kHeaderSize = 0x70;
constexpr std::uint32_t kEndianConstant = 0x12345678;
constexpr std::uint32_t kNoIndex = 0xffffffff;

// Code-unit width of every opcode, by instruction format. Unused opcodes
// are format 10x (one unit).
constexpr std::array<std::uint8_t, 256> make_width_table() {
  std::array<std::uint8_t, 256> w{};
  w.fill(1);
  auto set = [&w](int first, int last, std::uint8_t width) {
    for (int op = first; op <= last; ++op) w[op] = width;
  };
  set(0x02, 0x02, 2);  // move/from16
  set(0x03, 0x03, 3);  // move/16
  set(0x05, 0x05, 2);  // move-wide/from16
  set(0x06, 0x06, 3);  // move-wide/16
  set(0x08, 0x08, 2);  // move-object/from16
  set(0x09, 0x09, 3);  // move-object/16
  set(0x13, 0x13, 2);  // const/16
  set(0x14, 0x14, 3);  // const
  set(0x15, 0x15, 2);  // const/high16
  set(0x16, 0x16, 2);  // const-wide/16
  set(0x17, 0x17, 3);  // const-wide/32
  set(0x18, 0x18, 5);  // const-wide
  set(0x19, 0x19, 2);  // const-wide/high16
  set(0x1a, 0x1a, 2);  // const-string
  set(0x1b, 0x1b, 3);  // const-string/jumbo
  set(0x1c, 0x1c, 2);  // const-class
  set(0x1f, 0x20, 2);  // check-cast, instance-of
  set(0x22, 0x23, 2);  // new-instance, new-array
  set(0x24, 0x26, 3);  // filled-new-array{,/range}, fill-array-data
  set(0x29, 0x29, 2);  // goto/16
  set(0x2a, 0x2c, 3);  // goto/32, packed-switch, sparse-switch
  set(0x2d, 0x3d, 2);  // cmp*, if-*
  set(0x44, 0x6d, 2);  // aget/aput, iget/iput, sget/sput
  set(0x6e, 0x72, 3);  // invoke-kind
  set(0x74, 0x78, 3);  // invoke-kind/range
  set(0x90, 0xaf, 2);  // binop
  set(0xd0, 0xe2, 2);  // binop/lit16, binop/lit8
  set(0xfa, 0xfb, 4);  // invoke-polymorphic{,/range}
  set(0xfc, 0xfd, 3);  // invoke-custom{,/range}
  set(0xfe, 0xff, 2);  // const-method-handle, const-method-type
  return w;
}

constexpr auto kWidths = make_width_table();

class DexReader {
 public:
  DexReader(std::span<const std::uint8_t> bytes, std::string entry_name)
      : in_(bytes, ErrorCode::kSectionOutOfBounds) {
    image_.entry_name = std::move(entry_name);
  }

  DexImage run() {
    check_header();
    read_strings();
    read_types();
    read_protos();
    check_fields();
    read_methods();
    read_classes();
    return std::move(image_);
  }

 private:
  struct Section {
    std::uint32_t size;
    std::uint32_t offset;
  };

  Section section(std::size_t header_field, std::size_t element_size,
                  const char* what) const {
    const Section s{in_.u32(header_field), in_.u32(header_field + 4)};
    if (s.size != 0 &&
        !in_.in_bounds(s.offset, static_cast<std::uint64_t>(s.size) * element_size)) {
      throw Error(ErrorCode::kSectionOutOfBounds,
                  std::string(what) + " section (" + std::to_string(s.size) +
                      " @ " + std::to_string(s.offset) + ") exceeds file");
    }
    return s;
  }

  void check_index(std::uint64_t index, std::size_t limit,
                   const char* what) const {
    if (index >= limit) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  std::string(what) + " index " + std::to_string(index) +
                      " >= " + std::to_string(limit));
    }
  }

  void require_offset(std::uint64_t pos, std::string_view what) const {
    if (pos >= in_.size()) {
      throw Error(ErrorCode::kSectionOutOfBounds,
                  std::string(what) + " offset " + std::to_string(pos) + " is past end of file");
    }
  }

  std::uint32_t uleb128(std::uint64_t& pos) const {
    std::uint32_t result = 0;
    for (int i = 0; i < 5; ++i) {
      if (!in_.in_bounds(pos, 1)) {
        throw Error(ErrorCode::kMalformedUleb128,
                    "uleb128 runs past end of file at " + std::to_string(pos));
      }
      const std::uint8_t byte = in_.u8(pos++);
      if (i == 4 && (byte & 0xf0) != 0) break;
      result |= static_cast<std::uint32_t>(byte & 0x7f) << (7 * i);
      if ((byte & 0x80) == 0) return result;
    }
    throw Error(ErrorCode::kMalformedUleb128,
                "uleb128 longer than 5 bytes ending at " + std::to_string(pos));
  }

  void check_header() {
    static constexpr std::array<const char*, 4> kVersions = {"035", "037",
                                                             "038", "039"};
    const auto bytes = in_.bytes();
    const bool magic_ok =
        bytes.size() >= 8 && std::memcmp(bytes.data(), "dex\n", 4) == 0 &&
        bytes[7] == 0 &&
        std::any_of(kVersions.begin(), kVersions.end(), [&](const char* v) {
          return std::memcmp(bytes.data() + 4, v, 3) == 0;
        });
    if (!magic_ok) {
      throw Error(ErrorCode::kBadDexMagic, "not a dex file (bad magic)");
    }
    in_.require(0, kHeaderSize, "dex header");
    if (in_.u32(0x28) != kEndianConstant) {
      throw Error(ErrorCode::kBadEndianTag,
                  "endian tag " + std::to_string(in_.u32(0x28)));
    }
    const std::uint32_t file_size = in_.u32(0x20);
    if (file_size > in_.size() || file_size < kHeaderSize) {
      throw Error(ErrorCode::kSectionOutOfBounds,
                  "header file_size " + std::to_string(file_size) +
                      " disagrees with " + std::to_string(in_.size()) +
                      " available bytes");
    }
    in_ = detail::ByteReader(in_.slice(0, file_size),
                             ErrorCode::kSectionOutOfBounds);
  }

  void read_strings() {
    const Section s = section(0x38, 4, "string_ids");
    image_.strings.reserve(s.size);
    for (std::uint32_t i = 0; i < s.size; ++i) {
      std::uint64_t pos = in_.u32(s.offset + 4ull * i);
      require_offset(pos, "string_data");
      uleb128(pos);  // UTF-16 length; the MUTF-8 bytes are NUL-terminated
      const auto rest = in_.slice(pos, in_.size() - std::min<std::uint64_t>(pos, in_.size()));
      const auto nul = std::find(rest.begin(), rest.end(), std::uint8_t{0});
      if (nul == rest.end()) {
        throw Error(ErrorCode::kSectionOutOfBounds,
                    "string_data " + std::to_string(i) + " is unterminated");
      }
      image_.strings.emplace_back(rest.begin(), nul);
    }
  }

  void read_types() {
    const Section s = section(0x40, 4, "type_ids");
    image_.type_names.reserve(s.size);
    for (std::uint32_t i = 0; i < s.size; ++i) {
      const std::uint32_t descriptor = in_.u32(s.offset + 4ull * i);
      check_index(descriptor, image_.strings.size(), "type descriptor");
      image_.type_names.push_back(image_.strings[descriptor]);
    }
  }

  void read_protos() {
    const Section s = section(0x48, 12, "proto_ids");
    protos_.reserve(s.size);
    for (std::uint32_t i = 0; i < s.size; ++i) {
      const std::uint64_t at = s.offset + 12ull * i;
      Proto proto;
      const std::uint32_t shorty = in_.u32(at);
      const std::uint32_t return_type = in_.u32(at + 4);
      const std::uint32_t params_off = in_.u32(at + 8);
      check_index(shorty, image_.strings.size(), "proto shorty");
      check_index(return_type, image_.type_names.size(), "proto return type");
      proto.shorty = image_.strings[shorty];
      proto.return_type = image_.type_names[return_type];
      if (params_off != 0) {
        const std::uint32_t count = in_.u32(params_off);
        in_.require(params_off + 4ull, 2ull * count, "proto type_list");
        proto.parameters.reserve(count);
        for (std::uint32_t p = 0; p < count; ++p) {
          const std::uint16_t type = in_.u16(params_off + 4ull + 2ull * p);
          check_index(type, image_.type_names.size(), "proto parameter");
          proto.parameters.push_back(image_.type_names[type]);
        }
      }
      protos_.push_back(std::move(proto));
    }
  }

  void check_fields() const {
    const Section s = section(0x50, 8, "field_ids");
    for (std::uint32_t i = 0; i < s.size; ++i) {
      const std::uint64_t at = s.offset + 8ull * i;
      check_index(in_.u16(at), image_.type_names.size(), "field class");
      check_index(in_.u16(at + 2), image_.type_names.size(), "field type");
      check_index(in_.u32(at + 4), image_.strings.size(), "field name");
    }
  }

  void read_methods() {
    const Section s = section(0x58, 8, "method_ids");
    image_.method_refs.reserve(s.size);
    for (std::uint32_t i = 0; i < s.size; ++i) {
      const std::uint64_t at = s.offset + 8ull * i;
      const std::uint16_t owner = in_.u16(at);
      const std::uint16_t proto = in_.u16(at + 2);
      const std::uint32_t name = in_.u32(at + 4);
      check_index(owner, image_.type_names.size(), "method class");
      check_index(proto, protos_.size(), "method proto");
      check_index(name, image_.strings.size(), "method name");
      MethodRef ref;
      ref.owner = image_.type_names[owner];
      ref.name = image_.strings[name];
      ref.shorty = protos_[proto].shorty;
      ref.return_type = protos_[proto].return_type;
      ref.parameters = protos_[proto].parameters;
      image_.method_refs.push_back(std::move(ref));
    }
  }

  void read_classes() {
    const Section s = section(0x60, 32, "class_defs");
    image_.classes.reserve(s.size);
    for (std::uint32_t i = 0; i < s.size; ++i) {
      const std::uint64_t at = s.offset + 32ull * i;
      const std::uint32_t class_idx = in_.u32(at);
      check_index(class_idx, image_.type_names.size(), "class_def class");
      const std::uint32_t superclass = in_.u32(at + 8);
      if (superclass != kNoIndex) {
        check_index(superclass, image_.type_names.size(), "class_def superclass");
      }
      ClassDef cls;
      cls.type_name = image_.type_names[class_idx];
      const std::uint32_t class_data = in_.u32(at + 24);
      if (class_data != 0) read_class_data(cls, class_data);
      image_.classes.push_back(std::move(cls));
    }
  }

  void read_class_data(ClassDef& cls, std::uint64_t pos) {
    require_offset(pos, "class_data");
    const std::uint32_t static_fields = uleb128(pos);
    const std::uint32_t instance_fields = uleb128(pos);
    const std::uint32_t direct_methods = uleb128(pos);
    const std::uint32_t virtual_methods = uleb128(pos);
    for (std::uint64_t f = 0;
         f < static_cast<std::uint64_t>(static_fields) + instance_fields; ++f) {
      uleb128(pos);
      uleb128(pos);
    }
    for (const std::uint32_t count : {direct_methods, virtual_methods}) {
      std::uint64_t method_idx = 0;
      for (std::uint32_t m = 0; m < count; ++m) {
        method_idx += uleb128(pos);
        uleb128(pos);  // access_flags
        const std::uint32_t code_off = uleb128(pos);
        check_index(method_idx, image_.method_refs.size(), "class_data method");
        MethodBody body;
        body.owner = cls.type_name;
        body.name = image_.method_refs[method_idx].name;
        body.method_index = static_cast<std::uint32_t>(method_idx);
        if (code_off != 0) decode_code(body, code_off);
        cls.methods.push_back(std::move(body));
      }
    }
  }

  void decode_code(MethodBody& body, std::uint64_t code_off) {
    const std::uint32_t insns_size = in_.u32(code_off + 12);
    const auto raw = in_.slice(code_off + 16, 2ull * insns_size);
    std::vector<std::uint16_t> units(insns_size);
    for (std::uint32_t i = 0; i < insns_size; ++i) {
      units[i] = static_cast<std::uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
    }
    std::size_t pc = 0;
    while (pc < units.size()) {
      const std::span<const std::uint16_t> rest(units.data() + pc,
                                                units.size() - pc);
      const std::size_t width = instruction_width(rest);
      if (width == 0 || width > rest.size()) {
        throw Error(ErrorCode::kSectionOutOfBounds,
                    "instruction at unit " + std::to_string(pc) + " of " +
                        body.owner + "->" + body.name +
                        " overruns its code item");
      }
      Instruction insn;
      insn.offset = static_cast<std::uint32_t>(2 * pc);
      insn.width = static_cast<std::uint16_t>(std::min<std::size_t>(width, 0xffff));
      insn.opcode = static_cast<std::uint8_t>(rest[0] & 0xff);
      if (insn.opcode == 0x12) {
        insn.literal = static_cast<std::int8_t>((rest[0] >> 8) & 0xf0) >> 4;
      } else if (insn.opcode == 0x13) {
        insn.literal = static_cast<std::int16_t>(rest[1]);
      } else if (insn.opcode == 0x14) {
        insn.literal = static_cast<std::int32_t>(
            static_cast<std::uint32_t>(rest[1]) |
            (static_cast<std::uint32_t>(rest[2]) << 16));
      } else if (insn.is_invoke()) {
        insn.method_index = rest[1];
        check_index(insn.method_index, image_.method_refs.size(),
                    "invoke method");
      }
      body.instructions.push_back(insn);
      pc += width;
    }
  }

  struct Proto {
    std::string shorty;
    std::string return_type;
    std::vector<std::string> parameters;
  };

  detail::ByteReader in_;
  DexImage image_;
  std::vector<Proto> protos_;
};

bool owner_matches(std::string_view owner, std::string_view pattern) {
  if (!pattern.empty() && pattern.back() == '*') {
    return owner.starts_with(pattern.substr(0, pattern.size() - 1));
  }
  return owner == pattern;
}

}  // namespace

std::string MethodRef::signature() const {
  std::string out = owner + "->" + name + "(";
  for (const auto& p : parameters) out += p;
  out += ")" + return_type;
  return out;
}

std::size_t instruction_width(std::span<const std::uint16_t> units) {
  if (units.empty()) return 0;
  const std::uint16_t first = units[0];
  if (first == 0x0100) {  // packed-switch-payload
    if (units.size() < 2) return 0;
    return 4 + 2 * static_cast<std::size_t>(units[1]);
  }
  if (first == 0x0200) {  // sparse-switch-payload
    if (units.size() < 2) return 0;
    return 2 + 4 * static_cast<std::size_t>(units[1]);
  }
  if (first == 0x0300) {  // fill-array-data-payload
    if (units.size() < 4) return 0;
    const std::uint64_t element_width = units[1];
    const std::uint64_t count = units[2] | (static_cast<std::uint64_t>(units[3]) << 16);
    const std::uint64_t total = 4 + (element_width * count + 1) / 2;
    return static_cast<std::size_t>(
        std::min<std::uint64_t>(total, std::numeric_limits<std::uint32_t>::max()));
  }
  return kWidths[first & 0xff];
}

DexImage parse_dex(std::span<const std::uint8_t> bytes, std::string entry_name) {
  return DexReader(bytes, std::move(entry_name)).run();
}

std::vector<InvocationSite> invocations_of(const DexImage& dex,
                                           std::string_view owner_pattern,
                                           std::string_view method_name) {
  std::vector<bool> wanted(dex.method_refs.size());
  bool any = false;
  for (std::size_t i = 0; i < dex.method_refs.size(); ++i) {
    const MethodRef& ref = dex.method_refs[i];
    wanted[i] = ref.name == method_name && owner_matches(ref.owner, owner_pattern);
    any = any || wanted[i];
  }
  std::vector<InvocationSite> sites;
  if (!any) return sites;
  for (std::size_t c = 0; c < dex.classes.size(); ++c) {
    const ClassDef& cls = dex.classes[c];
    for (std::size_t m = 0; m < cls.methods.size(); ++m) {
      const MethodBody& body = cls.methods[m];
      for (const Instruction& insn : body.instructions) {
        if (!insn.is_invoke() || !wanted[insn.method_index]) continue;
        sites.push_back({body.owner, body.name,
                         dex.method_refs[insn.method_index], insn.offset, c, m});
      }
    }
  }
  return sites;
}

std::vector<StringMatch> string_pool_matches(
    const DexImage& dex, std::span<const std::string> needles, MatchMode mode) {
  std::vector<StringMatch> matches;
  for (std::size_t i = 0; i < dex.strings.size(); ++i) {
    const std::string& s = dex.strings[i];
    const bool hit = std::any_of(needles.begin(), needles.end(),
                                 [&](const std::string& needle) {
                                   return mode == MatchMode::kExact
                                              ? s == needle
                                              : s.find(needle) != std::string::npos;
                                 });
    if (hit) matches.push_back({s, static_cast<std::uint32_t>(i)});
  }
  return matches;
}

bool references_type(const DexImage& dex, std::string_view descriptor) {
  return std::find(dex.type_names.begin(), dex.type_names.end(), descriptor) !=
         dex.type_names.end();
}

std::optional<std::int64_t> literal_reaching(const InvocationSite& site,
                                             const MethodBody& body,
                                             std::size_t max_lookback) {
  const auto& insns = body.instructions;
  const auto it = std::find_if(insns.begin(), insns.end(), [&](const Instruction& i) {
    return i.offset == site.offset;
  });
  if (it == insns.end()) return std::nullopt;
  auto idx = static_cast<std::size_t>(it - insns.begin());
  for (std::size_t steps = 0; steps < max_lookback && idx > 0; ++steps) {
    const Instruction& prev = insns[--idx];
    if (prev.is_const_literal()) return prev.literal;
  }
  return std::nullopt;
}

const MethodBody& body_of(const DexImage& dex, const InvocationSite& site) {
  return dex.classes.at(site.class_index).methods.at(site.method_index);
}

}  // namespace apkscan
