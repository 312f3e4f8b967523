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

#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <map>
#include <tuple>

#include "apkscan/error.hpp"
#include "apkscan/fixtures.hpp"

namespace apkscan::fixtures {

// ---------------------------------------------------------------------------
// CodeBuilder

CodeBuilder& CodeBuilder::const4(std::uint8_t reg, std::int8_t value) {
  return raw({static_cast<std::uint16_t>(0x12 | ((reg & 0xf) << 8) | ((value & 0xf) << 12))});
}

CodeBuilder& CodeBuilder::const16(std::uint8_t reg, std::int16_t value) {
  return raw({static_cast<std::uint16_t>(0x13 | (reg << 8)),
              static_cast<std::uint16_t>(value)});
}

CodeBuilder& CodeBuilder::const32(std::uint8_t reg, std::int32_t value) {
  const auto u = static_cast<std::uint32_t>(value);
  return raw({static_cast<std::uint16_t>(0x14 | (reg << 8)),
              static_cast<std::uint16_t>(u), static_cast<std::uint16_t>(u >> 16)});
}

CodeBuilder& CodeBuilder::const_string(std::uint8_t reg, std::string value) {
  Op op;
  op.kind = Op::Kind::kConstString;
  op.opcode = 0x1a;
  op.reg = reg;
  op.symbol = std::move(value);
  ops_.push_back(std::move(op));
  return *this;
}

CodeBuilder& CodeBuilder::new_instance(std::uint8_t reg, std::string type) {
  Op op;
  op.kind = Op::Kind::kNewInstance;
  op.opcode = 0x22;
  op.reg = reg;
  op.symbol = std::move(type);
  ops_.push_back(std::move(op));
  return *this;
}

CodeBuilder& CodeBuilder::invoke(InvokeKind kind, MethodSpec method,
                                 std::vector<std::uint8_t> regs) {
  Op op;
  op.kind = Op::Kind::kInvoke;
  op.opcode = static_cast<std::uint8_t>(kind);
  op.method = std::move(method);
  op.regs = std::move(regs);
  ops_.push_back(std::move(op));
  return *this;
}

CodeBuilder& CodeBuilder::invoke_range(InvokeKind kind, MethodSpec method,
                                       std::uint16_t first_reg, std::uint8_t count) {
  Op op;
  op.kind = Op::Kind::kInvokeRange;
  op.opcode = static_cast<std::uint8_t>(static_cast<std::uint8_t>(kind) + 6);
  op.method = std::move(method);
  op.first_reg = first_reg;
  op.count = count;
  ops_.push_back(std::move(op));
  return *this;
}

CodeBuilder& CodeBuilder::move_result_object(std::uint8_t reg) {
  return raw({static_cast<std::uint16_t>(0x0c | (reg << 8))});
}

CodeBuilder& CodeBuilder::return_void() { return raw({0x000e}); }

CodeBuilder& CodeBuilder::nop() { return raw({0x0000}); }

CodeBuilder& CodeBuilder::raw(std::vector<std::uint16_t> units) {
  Op op;
  op.kind = Op::Kind::kUnits;
  op.units = std::move(units);
  ops_.push_back(std::move(op));
  return *this;
}

// ---------------------------------------------------------------------------
// DEX image

namespace {

constexpr std::uint32_t kNoIndex = 0xFFFFFFFF;
constexpr std::uint32_t kAccPublic = 0x1;
constexpr std::uint32_t kAccStatic = 0x8;
constexpr std::uint32_t kAccAbstract = 0x400;
constexpr std::string_view kObject = "Ljava/lang/Object;";

using ProtoKey = std::pair<std::uint32_t, std::vector<std::uint32_t>>;
using MethodKey = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>;

class Out {
 public:
  std::vector<std::uint8_t> bytes;

  std::size_t size() const { return bytes.size(); }
  void u8(std::uint8_t v) { bytes.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v));
    u16(static_cast<std::uint16_t>(v >> 16));
  }
  void uleb(std::uint32_t v) {
    do {
      std::uint8_t b = v & 0x7f;
      v >>= 7;
      if (v != 0) b |= 0x80;
      u8(b);
    } while (v != 0);
  }
  void align4() {
    while (bytes.size() % 4 != 0) u8(0);
  }
  void set32(std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
  }
};

char shorty_char(const std::string& type) {
  return (type[0] == 'L' || type[0] == '[') ? 'L' : type[0];
}

std::string shorty_of(const MethodSpec& m) {
  std::string s(1, shorty_char(m.return_type));
  for (const auto& p : m.parameters) s += shorty_char(p);
  return s;
}

std::uint16_t index16(std::uint32_t index) {
  if (index > 0xFFFF) throw Error(ErrorCode::kIndexOutOfRange, "fixture index exceeds 16 bits");
  return static_cast<std::uint16_t>(index);
}

class Assembler {
 public:
  Assembler(const std::vector<DexClass>& classes,
            const std::vector<std::string>& extra_types)
      : classes_(classes) {
    add_type(std::string(kObject));
    for (const auto& t : extra_types) add_type(t);
    for (const DexClass& c : classes_) {
      add_type(c.type);
      for (const DexMethod& m : c.methods) {
        add_method(defined(c, m));
        for (const auto& op : m.code.ops()) collect(op);
      }
    }
    finalize_ids();
  }

  DexBuild build() {
    Out out;
    out.bytes.resize(0x70);
    const auto string_ids_off = static_cast<std::uint32_t>(out.size());
    out.bytes.resize(out.size() + 4 * strings_.size());
    const auto type_ids_off = static_cast<std::uint32_t>(out.size());
    for (const auto& t : types_) out.u32(string_index_.at(t));
    const auto proto_ids_off = static_cast<std::uint32_t>(out.size());
    std::vector<std::size_t> proto_param_slots;
    for (const auto& [key, shorty] : protos_) {
      out.u32(string_index_.at(shorty));
      out.u32(key.first);
      proto_param_slots.push_back(out.size());
      out.u32(0);
    }
    const auto method_ids_off = static_cast<std::uint32_t>(out.size());
    for (const auto& key : methods_) {
      out.u16(index16(std::get<0>(key)));
      out.u16(index16(std::get<2>(key)));
      out.u32(std::get<1>(key));
    }
    const auto class_defs_off = static_cast<std::uint32_t>(out.size());
    std::vector<std::size_t> class_data_slots;
    for (const DexClass& c : classes_) {
      out.u32(type_index_.at(c.type));
      out.u32(kAccPublic);
      out.u32(type_index_.at(std::string(kObject)));
      out.u32(0);
      out.u32(kNoIndex);
      out.u32(0);
      class_data_slots.push_back(out.size());
      out.u32(0);
      out.u32(0);
    }

    out.align4();
    const auto data_off = static_cast<std::uint32_t>(out.size());

    // code_items
    std::map<MethodKey, std::uint32_t> code_offsets;
    const auto code_off = static_cast<std::uint32_t>(out.size());
    std::uint32_t code_count = 0;
    for (const DexClass& c : classes_) {
      for (const DexMethod& m : c.methods) {
        if (!m.has_code) continue;
        out.align4();
        code_offsets[key_of(defined(c, m))] = static_cast<std::uint32_t>(out.size());
        write_code(out, m.code);
        ++code_count;
      }
    }

    // type_lists
    out.align4();
    const auto type_list_off = static_cast<std::uint32_t>(out.size());
    std::uint32_t type_list_count = 0;
    std::size_t slot = 0;
    for (const auto& [key, shorty] : protos_) {
      const auto& params = key.second;
      if (!params.empty()) {
        out.align4();
        out.set32(proto_param_slots[slot], static_cast<std::uint32_t>(out.size()));
        out.u32(static_cast<std::uint32_t>(params.size()));
        for (auto p : params) out.u16(index16(p));
        ++type_list_count;
      }
      ++slot;
    }

    // string_data
    const auto string_data_off = static_cast<std::uint32_t>(out.size());
    for (std::size_t i = 0; i < strings_.size(); ++i) {
      out.set32(string_ids_off + 4 * i, static_cast<std::uint32_t>(out.size()));
      // Profile strings are ASCII, so MUTF-8 is the bytes themselves.
      out.uleb(static_cast<std::uint32_t>(strings_[i].size()));
      for (char ch : strings_[i]) out.u8(static_cast<std::uint8_t>(ch));
      out.u8(0);
    }

    // class_data
    const auto class_data_off = static_cast<std::uint32_t>(out.size());
    for (std::size_t ci = 0; ci < classes_.size(); ++ci) {
      const DexClass& c = classes_[ci];
      out.set32(class_data_slots[ci], static_cast<std::uint32_t>(out.size()));
      std::vector<std::pair<std::uint32_t, const DexMethod*>> direct;
      for (const DexMethod& m : c.methods) {
        direct.emplace_back(method_index_.at(key_of(defined(c, m))), &m);
      }
      std::sort(direct.begin(), direct.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      out.uleb(0);
      out.uleb(0);
      out.uleb(static_cast<std::uint32_t>(direct.size()));
      out.uleb(0);
      std::uint32_t previous = 0;
      for (const auto& [index, method] : direct) {
        out.uleb(index - previous);
        previous = index;
        if (method->has_code) {
          out.uleb(kAccPublic | kAccStatic);
          out.uleb(code_offsets.at(key_of(defined(c, *method))));
        } else {
          out.uleb(kAccPublic | kAccAbstract);
          out.uleb(0);
        }
      }
    }

    // map_list
    out.align4();
    const auto map_off = static_cast<std::uint32_t>(out.size());
    struct Item {
      std::uint16_t type;
      std::uint32_t size;
      std::uint32_t offset;
    };
    std::vector<Item> items = {
        {0x0000, 1, 0},
        {0x0001, static_cast<std::uint32_t>(strings_.size()), string_ids_off},
        {0x0002, static_cast<std::uint32_t>(types_.size()), type_ids_off},
        {0x0003, static_cast<std::uint32_t>(protos_.size()), proto_ids_off},
        {0x0005, static_cast<std::uint32_t>(methods_.size()), method_ids_off},
        {0x0006, static_cast<std::uint32_t>(classes_.size()), class_defs_off},
        {0x2001, code_count, code_off},
        {0x1001, type_list_count, type_list_off},
        {0x2002, static_cast<std::uint32_t>(strings_.size()), string_data_off},
        {0x2000, static_cast<std::uint32_t>(classes_.size()), class_data_off},
        {0x1000, 1, map_off},
    };
    std::erase_if(items, [](const Item& i) { return i.size == 0; });
    out.u32(static_cast<std::uint32_t>(items.size()));
    for (const Item& i : items) {
      out.u16(i.type);
      out.u16(0);
      out.u32(i.size);
      out.u32(i.offset);
    }

    const auto file_size = static_cast<std::uint32_t>(out.size());
    static constexpr char kMagic[8] = {'d', 'e', 'x', '\n', '0', '3', '5', '\0'};
    std::copy(std::begin(kMagic), std::end(kMagic), out.bytes.begin());
    out.set32(32, file_size);
    out.set32(36, 0x70);
    out.set32(40, 0x12345678);
    out.set32(52, map_off);
    out.set32(56, static_cast<std::uint32_t>(strings_.size()));
    out.set32(60, string_ids_off);
    out.set32(64, static_cast<std::uint32_t>(types_.size()));
    out.set32(68, type_ids_off);
    out.set32(72, static_cast<std::uint32_t>(protos_.size()));
    out.set32(76, protos_.empty() ? 0 : proto_ids_off);
    out.set32(88, static_cast<std::uint32_t>(methods_.size()));
    out.set32(92, methods_.empty() ? 0 : method_ids_off);
    out.set32(96, static_cast<std::uint32_t>(classes_.size()));
    out.set32(100, classes_.empty() ? 0 : class_defs_off);
    out.set32(104, file_size - data_off);
    out.set32(108, data_off);

    unsigned int digest_len = 0;
    std::uint8_t digest[EVP_MAX_MD_SIZE];
    if (EVP_Digest(out.bytes.data() + 32, file_size - 32, digest, &digest_len,
                   EVP_sha1(), nullptr) != 1 ||
        digest_len != 20) {
      throw Error(ErrorCode::kIo, "SHA-1 failed");
    }
    std::copy(digest, digest + 20, out.bytes.begin() + 12);
    const auto checksum = static_cast<std::uint32_t>(
        ::adler32(::adler32(0L, Z_NULL, 0), out.bytes.data() + 12, file_size - 12));
    out.set32(8, checksum);

    DexBuild build;
    build.bytes = std::move(out.bytes);
    build.invocation_targets = std::move(targets_);
    build.invocation_counts = std::move(counts_);
    return build;
  }

 private:
  static MethodSpec defined(const DexClass& c, const DexMethod& m) {
    return MethodSpec{c.type, m.name, "V", {}};
  }

  void add_type(const std::string& t) {
    types_.insert(t);
    strings_set_.insert(t);
  }

  void add_method(const MethodSpec& m) {
    add_type(m.owner);
    add_type(m.return_type);
    for (const auto& p : m.parameters) add_type(p);
    strings_set_.insert(m.name);
    strings_set_.insert(shorty_of(m));
    method_specs_.push_back(m);
  }

  void collect(const CodeBuilder::Op& op) {
    using Kind = CodeBuilder::Op::Kind;
    switch (op.kind) {
      case Kind::kConstString:
        strings_set_.insert(op.symbol);
        break;
      case Kind::kNewInstance:
        add_type(op.symbol);
        break;
      case Kind::kInvoke:
      case Kind::kInvokeRange:
        add_method(op.method);
        targets_.emplace(op.method.owner, op.method.name);
        ++counts_[{op.method.owner, op.method.name}];
        break;
      case Kind::kUnits:
        break;
    }
  }

  void finalize_ids() {
    strings_.assign(strings_set_.begin(), strings_set_.end());
    for (std::uint32_t i = 0; i < strings_.size(); ++i) string_index_[strings_[i]] = i;
    // Sorting descriptors as strings matches sorting by string index.
    std::uint32_t ti = 0;
    for (const auto& t : types_) type_index_[t] = ti++;
    std::map<ProtoKey, std::string> proto_map;
    for (const auto& m : method_specs_) proto_map.emplace(proto_key(m), shorty_of(m));
    protos_.assign(proto_map.begin(), proto_map.end());
    for (std::uint32_t i = 0; i < protos_.size(); ++i) proto_index_[protos_[i].first] = i;
    std::set<MethodKey> keys;
    for (const auto& m : method_specs_) keys.insert(key_of(m));
    methods_.assign(keys.begin(), keys.end());
    for (std::uint32_t i = 0; i < methods_.size(); ++i) method_index_[methods_[i]] = i;
  }

  ProtoKey proto_key(const MethodSpec& m) const {
    ProtoKey key{type_index_.at(m.return_type), {}};
    for (const auto& p : m.parameters) key.second.push_back(type_index_.at(p));
    return key;
  }

  MethodKey key_of(const MethodSpec& m) const {
    return {type_index_.at(m.owner), string_index_.at(m.name), proto_index_.at(proto_key(m))};
  }

  void write_code(Out& out, const CodeBuilder& code) const {
    using Kind = CodeBuilder::Op::Kind;
    std::vector<std::uint16_t> insns;
    unsigned registers = 1;
    unsigned outs = 0;
    auto use = [&](unsigned reg) { registers = std::max(registers, reg + 1); };
    for (const auto& op : code.ops()) {
      switch (op.kind) {
        case Kind::kUnits:
          insns.insert(insns.end(), op.units.begin(), op.units.end());
          if (!op.units.empty()) {
            const std::uint8_t opcode = op.units[0] & 0xff;
            // Track destination registers of the const and move families.
            if (opcode == 0x12) use((op.units[0] >> 8) & 0xf);
            else if (opcode == 0x13 || opcode == 0x14 || opcode == 0x0c) use(op.units[0] >> 8);
          }
          break;
        case Kind::kConstString:
          use(op.reg);
          insns.push_back(static_cast<std::uint16_t>(op.opcode | (op.reg << 8)));
          insns.push_back(index16(string_index_.at(op.symbol)));
          break;
        case Kind::kNewInstance:
          use(op.reg);
          insns.push_back(static_cast<std::uint16_t>(op.opcode | (op.reg << 8)));
          insns.push_back(index16(type_index_.at(op.symbol)));
          break;
        case Kind::kInvoke: {
          if (op.regs.size() > 5) throw Error(ErrorCode::kInconsistentProfile, "invoke takes at most 5 registers");
          std::uint8_t r[5] = {0, 0, 0, 0, 0};
          for (std::size_t i = 0; i < op.regs.size(); ++i) {
            r[i] = op.regs[i] & 0xf;
            use(r[i]);
          }
          outs = std::max<unsigned>(outs, static_cast<unsigned>(op.regs.size()));
          insns.push_back(static_cast<std::uint16_t>(op.opcode | (r[4] << 8) | (op.regs.size() << 12)));
          insns.push_back(index16(method_index_.at(key_of(op.method))));
          insns.push_back(static_cast<std::uint16_t>(r[0] | (r[1] << 4) | (r[2] << 8) | (r[3] << 12)));
          break;
        }
        case Kind::kInvokeRange:
          if (op.count > 0) use(op.first_reg + op.count - 1u);
          outs = std::max<unsigned>(outs, op.count);
          insns.push_back(static_cast<std::uint16_t>(op.opcode | (op.count << 8)));
          insns.push_back(index16(method_index_.at(key_of(op.method))));
          insns.push_back(op.first_reg);
          break;
      }
    }
    out.u16(static_cast<std::uint16_t>(registers));
    out.u16(0);
    out.u16(static_cast<std::uint16_t>(outs));
    out.u16(0);
    out.u32(0);
    out.u32(static_cast<std::uint32_t>(insns.size()));
    for (auto u : insns) out.u16(u);
  }

  const std::vector<DexClass>& classes_;
  std::set<std::string> strings_set_;
  std::set<std::string> types_;
  std::vector<MethodSpec> method_specs_;
  std::vector<std::string> strings_;
  std::map<std::string, std::uint32_t> string_index_;
  std::map<std::string, std::uint32_t> type_index_;
  std::vector<std::pair<ProtoKey, std::string>> protos_;
  std::map<ProtoKey, std::uint32_t> proto_index_;
  std::vector<MethodKey> methods_;
  std::map<MethodKey, std::uint32_t> method_index_;
  std::set<std::pair<std::string, std::string>> targets_;
  std::map<std::pair<std::string, std::string>, int> counts_;
};

}  // namespace

DexBuild encode_dex(const std::vector<DexClass>& classes,
                    const std::vector<std::string>& extra_types) {
  Assembler assembler(classes, extra_types);
  return assembler.build();
}

}  // namespace apkscan::fixtures
