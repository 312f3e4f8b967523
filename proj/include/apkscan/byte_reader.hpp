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

#ifndef APKSCAN_DETAIL_BYTE_READER_HPP_
#define APKSCAN_DETAIL_BYTE_READER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "apkscan/error.hpp"

namespace apkscan::detail {

// Bounds-checked little-endian access into an immutable byte view. Every
// out-of-range access raises `Error` with the code supplied at construction,
// so each format reports truncation in its own vocabulary.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, ErrorCode bounds_error)
      : bytes_(bytes), bounds_error_(bounds_error) {}

  std::size_t size() const { return bytes_.size(); }
  std::span<const std::uint8_t> bytes() const { return bytes_; }

  bool in_bounds(std::uint64_t offset, std::uint64_t length) const {
    return offset <= bytes_.size() && length <= bytes_.size() - offset;
  }

  void require(std::uint64_t offset, std::uint64_t length,
               const char* what) const {
    if (!in_bounds(offset, length)) {
      throw Error(bounds_error_, std::string(what) + " at offset " +
                                     std::to_string(offset) + " (+" +
                                     std::to_string(length) + ") exceeds " +
                                     std::to_string(bytes_.size()) + " bytes");
    }
  }

  std::uint8_t u8(std::uint64_t offset) const {
    require(offset, 1, "u8");
    return bytes_[offset];
  }

  std::uint16_t u16(std::uint64_t offset) const {
    require(offset, 2, "u16");
    return static_cast<std::uint16_t>(bytes_[offset] |
                                      (bytes_[offset + 1] << 8));
  }

  std::uint32_t u32(std::uint64_t offset) const {
    require(offset, 4, "u32");
    return static_cast<std::uint32_t>(bytes_[offset]) |
           (static_cast<std::uint32_t>(bytes_[offset + 1]) << 8) |
           (static_cast<std::uint32_t>(bytes_[offset + 2]) << 16) |
           (static_cast<std::uint32_t>(bytes_[offset + 3]) << 24);
  }

  std::span<const std::uint8_t> slice(std::uint64_t offset,
                                      std::uint64_t length) const {
    require(offset, length, "slice");
    return bytes_.subspan(offset, length);
  }

 private:
  std::span<const std::uint8_t> bytes_;
  ErrorCode bounds_error_;
};

}  // namespace apkscan::detail

#endif  // APKSCAN_DETAIL_BYTE_READER_HPP_
