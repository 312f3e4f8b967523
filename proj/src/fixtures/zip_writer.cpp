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

#include <zlib.h>

#include "apkscan/error.hpp"
#include "apkscan/fixtures.hpp"

namespace apkscan::fixtures {
namespace {

// 1980-01-01 00:00:00, so output is independent of wall-clock time.
constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = (1 << 5) | 1;

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  put16(out, static_cast<std::uint16_t>(v));
  put16(out, static_cast<std::uint16_t>(v >> 16));
}

std::vector<std::uint8_t> deflate_raw(std::span<const std::uint8_t> data) {
  z_stream stream{};
  if (deflateInit2(&stream, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::kIo, "deflateInit2 failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&stream, static_cast<uLong>(data.size())));
  stream.next_in = const_cast<Bytef*>(data.data());
  stream.avail_in = static_cast<uInt>(data.size());
  stream.next_out = out.data();
  stream.avail_out = static_cast<uInt>(out.size());
  const int status = deflate(&stream, Z_FINISH);
  out.resize(stream.total_out);
  deflateEnd(&stream);
  if (status != Z_STREAM_END) throw Error(ErrorCode::kIo, "deflate failed");
  return out;
}

}  // namespace

void ZipWriter::add(std::string name, std::span<const std::uint8_t> data,
                    bool deflate) {
  Entry entry;
  entry.name = std::move(name);
  entry.method = deflate ? 8 : 0;
  entry.crc32 = static_cast<std::uint32_t>(
      ::crc32(::crc32(0L, Z_NULL, 0), data.data(), static_cast<uInt>(data.size())));
  entry.uncompressed_size = static_cast<std::uint32_t>(data.size());
  entry.stored = deflate ? deflate_raw(data)
                         : std::vector<std::uint8_t>(data.begin(), data.end());
  entries_.push_back(std::move(entry));
}

std::vector<std::uint8_t> ZipWriter::finish() const {
  // Offsets are relative to the start of the ZIP proper, not the prefix.
  std::vector<std::uint8_t> zip;
  std::vector<std::uint32_t> offsets;
  for (const Entry& e : entries_) {
    offsets.push_back(static_cast<std::uint32_t>(zip.size()));
    put32(zip, 0x04034b50);
    put16(zip, 20);
    put16(zip, 0);
    put16(zip, e.method);
    put16(zip, kDosTime);
    put16(zip, kDosDate);
    put32(zip, e.crc32);
    put32(zip, static_cast<std::uint32_t>(e.stored.size()));
    put32(zip, e.uncompressed_size);
    put16(zip, static_cast<std::uint16_t>(e.name.size()));
    put16(zip, 0);
    zip.insert(zip.end(), e.name.begin(), e.name.end());
    zip.insert(zip.end(), e.stored.begin(), e.stored.end());
  }
  const auto cd_offset = static_cast<std::uint32_t>(zip.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    put32(zip, 0x02014b50);
    put16(zip, 20);
    put16(zip, 20);
    put16(zip, 0);
    put16(zip, e.method);
    put16(zip, kDosTime);
    put16(zip, kDosDate);
    put32(zip, e.crc32);
    put32(zip, static_cast<std::uint32_t>(e.stored.size()));
    put32(zip, e.uncompressed_size);
    put16(zip, static_cast<std::uint16_t>(e.name.size()));
    put16(zip, 0);
    put16(zip, 0);
    put16(zip, 0);
    put16(zip, 0);
    put32(zip, 0);
    put32(zip, offsets[i]);
    zip.insert(zip.end(), e.name.begin(), e.name.end());
  }
  const auto cd_size = static_cast<std::uint32_t>(zip.size() - cd_offset);
  put32(zip, 0x06054b50);
  put16(zip, 0);
  put16(zip, 0);
  put16(zip, static_cast<std::uint16_t>(entries_.size()));
  put16(zip, static_cast<std::uint16_t>(entries_.size()));
  put32(zip, cd_size);
  put32(zip, cd_offset);
  put16(zip, 0);

  std::vector<std::uint8_t> out = prefix_;
  out.insert(out.end(), zip.begin(), zip.end());
  return out;
}

}  // namespace apkscan::fixtures
