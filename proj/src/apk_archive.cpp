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

#include "apkscan/apk_archive.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <unordered_set>

#include "apkscan/byte_reader.hpp"
#include "apkscan/error.hpp"

namespace apkscan {
namespace {

constexpr std::uint32_t kLocalHeaderSignature = 0x04034b50;
constexpr std::uint32_t kCentralHeaderSignature = 0x02014b50;
constexpr std::uint32_t kEndOfCentralDirSignature = 0x06054b50;
constexpr std::size_t kEndOfCentralDirSize = 22;
constexpr std::size_t kCentralHeaderSize = 46;
constexpr std::size_t kLocalHeaderSize = 30;
constexpr std::size_t kMaxCommentLength = 0xffff;

constexpr std::uint16_t kMethodStored = 0;
constexpr std::uint16_t kMethodDeflate = 8;

// Deflate cannot expand beyond roughly 1032:1; anything claiming more is
// corrupt and must not drive an allocation.
constexpr std::uint64_t kMaxDeflateRatio = 1032;

std::optional<std::size_t> find_end_of_central_dir(
    const detail::ByteReader& in) {
  if (in.size() < kEndOfCentralDirSize) return std::nullopt;
  const std::size_t last = in.size() - kEndOfCentralDirSize;
  const std::size_t first =
      last > kMaxCommentLength ? last - kMaxCommentLength : 0;
  for (std::size_t pos = last + 1; pos-- > first;) {
    if (in.u32(pos) != kEndOfCentralDirSignature) continue;
    const std::uint16_t comment_length = in.u16(pos + 20);
    if (pos + kEndOfCentralDirSize + comment_length <= in.size()) return pos;
  }
  return std::nullopt;
}

// Returns N for "classesN.dex" (1 for "classes.dex"), nullopt otherwise.
std::optional<unsigned> dex_ordinal(std::string_view name) {
  constexpr std::string_view kPrefix = "classes";
  constexpr std::string_view kSuffix = ".dex";
  if (name.size() < kPrefix.size() + kSuffix.size() ||
      !name.starts_with(kPrefix) || !name.ends_with(kSuffix)) {
    return std::nullopt;
  }
  const std::string_view digits = name.substr(
      kPrefix.size(), name.size() - kPrefix.size() - kSuffix.size());
  if (digits.empty()) return 1u;
  if (digits.front() == '0') return std::nullopt;
  unsigned value = 0;
  const auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || value < 2) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> input,
                                      std::uint32_t expected_size,
                                      std::string_view name) {
  std::vector<std::uint8_t> out(expected_size);
  z_stream stream{};
  if (inflateInit2(&stream, -MAX_WBITS) != Z_OK) {
    throw Error(ErrorCode::kCorruptEntry, "inflateInit2 failed");
  }
  // zlib's API takes non-const input pointers but never writes through them.
  stream.next_in = const_cast<Bytef*>(input.data());
  stream.avail_in = static_cast<uInt>(input.size());
  stream.next_out = out.data();
  stream.avail_out = static_cast<uInt>(out.size());
  const int status = inflate(&stream, Z_FINISH);
  const std::size_t produced = stream.total_out;
  inflateEnd(&stream);
  if (status != Z_STREAM_END || produced != expected_size) {
    throw Error(ErrorCode::kCorruptEntry,
                "deflate stream of '" + std::string(name) +
                    "' did not decode to " + std::to_string(expected_size) +
                    " bytes (zlib status " + std::to_string(status) + ")");
  }
  return out;
}

}  // namespace

ApkArchive ApkArchive::from_bytes(std::vector<std::uint8_t> bytes,
                                  std::string source_path) {
  ApkArchive archive;
  archive.source_path_ = std::move(source_path);
  archive.data_ =
      std::make_shared<const std::vector<std::uint8_t>>(std::move(bytes));
  const detail::ByteReader in(*archive.data_, ErrorCode::kTruncatedArchive);

  const auto eocd = find_end_of_central_dir(in);
  if (!eocd) {
    throw Error(ErrorCode::kNotAZip,
                "no end-of-central-directory record in '" +
                    archive.source_path_ + "'");
  }
  const std::uint16_t disk_number = in.u16(*eocd + 4);
  const std::uint16_t cd_disk = in.u16(*eocd + 6);
  const std::uint16_t entry_count = in.u16(*eocd + 10);
  const std::uint32_t cd_size = in.u32(*eocd + 12);
  const std::uint32_t cd_offset = in.u32(*eocd + 16);
  if (disk_number != 0 || cd_disk != 0) {
    throw Error(ErrorCode::kNotAZip, "multi-disk archives are not APKs");
  }
  if (static_cast<std::uint64_t>(cd_offset) + cd_size > *eocd) {
    throw Error(ErrorCode::kTruncatedArchive,
                "central directory extends past its end record");
  }
  // Bytes prepended before the archive shift every recorded offset.
  const std::uint64_t shift = *eocd - (static_cast<std::uint64_t>(cd_offset) + cd_size);

  std::unordered_set<std::string_view> seen;
  archive.entries_.reserve(entry_count);
  std::uint64_t pos = shift + cd_offset;
  const std::uint64_t cd_end = pos + cd_size;
  for (std::uint16_t i = 0; i < entry_count; ++i) {
    if (pos + kCentralHeaderSize > cd_end) {
      throw Error(ErrorCode::kTruncatedArchive,
                  "central directory holds fewer entries than declared");
    }
    if (in.u32(pos) != kCentralHeaderSignature) {
      throw Error(ErrorCode::kNotAZip,
                  "bad central directory signature at offset " +
                      std::to_string(pos));
    }
    ApkEntry entry;
    entry.flags = in.u16(pos + 8);
    entry.compression_method = in.u16(pos + 10);
    entry.crc32 = in.u32(pos + 16);
    entry.compressed_size = in.u32(pos + 20);
    entry.uncompressed_size = in.u32(pos + 24);
    const std::uint16_t name_length = in.u16(pos + 28);
    const std::uint16_t extra_length = in.u16(pos + 30);
    const std::uint16_t comment_length = in.u16(pos + 32);
    entry.local_header_offset = shift + in.u32(pos + 42);
    const std::uint64_t record_size =
        kCentralHeaderSize + name_length + extra_length + comment_length;
    if (pos + record_size > cd_end) {
      throw Error(ErrorCode::kTruncatedArchive,
                  "central directory record overruns the directory");
    }
    if (entry.local_header_offset + kLocalHeaderSize + entry.compressed_size >
        shift + cd_offset) {
      throw Error(ErrorCode::kTruncatedArchive,
                  "entry data extends into the central directory");
    }
    const auto name_bytes = in.slice(pos + kCentralHeaderSize, name_length);
    entry.name.assign(name_bytes.begin(), name_bytes.end());
    archive.entries_.push_back(std::move(entry));
    pos += record_size;
  }

  for (const ApkEntry& entry : archive.entries_) {
    if (!seen.insert(entry.name).second) {
      throw Error(ErrorCode::kDuplicateEntry,
                  "entry '" + entry.name + "' appears more than once");
    }
  }
  if (!archive.find(kManifestEntryName)) {
    throw Error(ErrorCode::kMissingManifest,
                "'" + archive.source_path_ + "' has no AndroidManifest.xml");
  }
  if (!archive.find("classes.dex")) {
    throw Error(ErrorCode::kNoDexEntries,
                "'" + archive.source_path_ + "' has no classes.dex");
  }
  return archive;
}

const ApkEntry* ApkArchive::find(std::string_view name) const {
  const auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const ApkEntry& e) { return e.name == name; });
  return it == entries_.end() ? nullptr : &*it;
}

std::vector<std::uint8_t> ApkArchive::read_entry(std::string_view name) const {
  const ApkEntry* entry = find(name);
  if (!entry) {
    throw Error(ErrorCode::kEntryNotFound,
                "no entry named '" + std::string(name) + "'");
  }
  if (entry->flags & 0x1) {
    throw Error(ErrorCode::kUnsupportedCompressionMethod,
                "entry '" + entry->name + "' is encrypted");
  }
  const detail::ByteReader in(*data_, ErrorCode::kTruncatedArchive);
  const std::uint64_t local = entry->local_header_offset;
  if (in.u32(local) != kLocalHeaderSignature) {
    throw Error(ErrorCode::kTruncatedArchive,
                "bad local header signature for '" + entry->name + "'");
  }
  const std::uint64_t data_offset =
      local + kLocalHeaderSize + in.u16(local + 26) + in.u16(local + 28);
  const auto payload = in.slice(data_offset, entry->compressed_size);

  std::vector<std::uint8_t> out;
  switch (entry->compression_method) {
    case kMethodStored:
      if (entry->compressed_size != entry->uncompressed_size) {
        throw Error(ErrorCode::kCorruptEntry,
                    "stored entry '" + entry->name +
                        "' has differing compressed/uncompressed sizes");
      }
      out.assign(payload.begin(), payload.end());
      break;
    case kMethodDeflate:
      if (entry->uncompressed_size >
          kMaxDeflateRatio * entry->compressed_size + 64) {
        throw Error(ErrorCode::kCorruptEntry,
                    "implausible expansion ratio for '" + entry->name + "'");
      }
      out = inflate_raw(payload, entry->uncompressed_size, entry->name);
      break;
    default:
      throw Error(ErrorCode::kUnsupportedCompressionMethod,
                  "entry '" + entry->name + "' uses method " +
                      std::to_string(entry->compression_method));
  }

  const auto actual_crc = static_cast<std::uint32_t>(
      ::crc32(::crc32(0L, Z_NULL, 0), out.data(), static_cast<uInt>(out.size())));
  if (actual_crc != entry->crc32) {
    throw Error(ErrorCode::kCrcMismatch,
                "entry '" + entry->name + "' failed CRC-32 verification");
  }
  return out;
}

std::vector<std::string> ApkArchive::dex_entry_names() const {
  std::vector<unsigned> ordinals;
  for (const ApkEntry& entry : entries_) {
    if (const auto n = dex_ordinal(entry.name)) ordinals.push_back(*n);
  }
  std::sort(ordinals.begin(), ordinals.end());
  std::vector<std::string> names;
  for (unsigned expected = 1; const unsigned n : ordinals) {
    if (n != expected) break;
    names.push_back(n == 1 ? "classes.dex"
                           : "classes" + std::to_string(n) + ".dex");
    ++expected;
  }
  return names;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)),
                                  std::istreambuf_iterator<char>());
  if (file.bad()) {
    throw Error(ErrorCode::kIo, "failed reading '" + path.string() + "'");
  }
  return bytes;
}

ApkArchive open_apk(const std::filesystem::path& path) {
  return ApkArchive::from_bytes(read_file_bytes(path), path.string());
}

}  // namespace apkscan
