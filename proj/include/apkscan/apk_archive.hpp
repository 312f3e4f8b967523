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

#ifndef APKSCAN_APK_ARCHIVE_HPP_
#define APKSCAN_APK_ARCHIVE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace apkscan {

inline constexpr std::string_view kManifestEntryName = "AndroidManifest.xml";

// One central-directory record. Offsets are absolute within the archive
// bytes (already corrected for any data prepended before the ZIP).
struct ApkEntry {
  std::string name;
  std::uint16_t compression_method = 0;
  std::uint16_t flags = 0;
  std::uint32_t compressed_size = 0;
  std::uint32_t uncompressed_size = 0;
  std::uint32_t crc32 = 0;
  std::uint64_t local_header_offset = 0;
};

// An APK opened from its central directory. Payloads are decompressed on
// demand by read_entry(); the object is immutable and cheap to copy since
// the underlying bytes are shared.
class ApkArchive {
 public:
  // Parses `bytes` as an APK. `source_path` is informational only.
  static ApkArchive from_bytes(std::vector<std::uint8_t> bytes,
                               std::string source_path = "<memory>");

  const std::string& source_path() const { return source_path_; }
  std::span<const ApkEntry> entries() const { return entries_; }
  const ApkEntry* find(std::string_view name) const;

  // Decompresses and CRC-checks one entry.
  std::vector<std::uint8_t> read_entry(std::string_view name) const;

  // `classes.dex`, `classes2.dex`, ... up to the first gap in numbering,
  // which is the set the Android runtime loads.
  std::vector<std::string> dex_entry_names() const;

 private:
  ApkArchive() = default;

  std::string source_path_;
  std::shared_ptr<const std::vector<std::uint8_t>> data_;
  std::vector<ApkEntry> entries_;
};

// Reads the file at `path` and parses it; I/O failures raise ErrorCode::kIo.
ApkArchive open_apk(const std::filesystem::path& path);

// Reads a whole file into memory.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace apkscan

#endif  // APKSCAN_APK_ARCHIVE_HPP_
