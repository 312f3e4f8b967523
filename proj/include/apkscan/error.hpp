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

#ifndef APKSCAN_ERROR_HPP_
#define APKSCAN_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace apkscan {

// Every structured failure raised by the parsers, the rule engine and the
// reporting layer carries one of these codes.
enum class ErrorCode {
  // apk-container
  kNotAZip,
  kTruncatedArchive,
  kMissingManifest,
  kNoDexEntries,
  kDuplicateEntry,
  kEntryNotFound,
  kCrcMismatch,
  kCorruptEntry,
  kUnsupportedCompressionMethod,
  // axml-manifest
  kBadAxmlMagic,
  kTruncatedChunk,
  kUnbalancedTree,
  kStringIndexOutOfRange,
  kNotAManifest,
  kMissingPackageName,
  // dex-parser
  kBadDexMagic,
  kBadEndianTag,
  kSectionOutOfBounds,
  kIndexOutOfRange,
  kMalformedUleb128,
  // reporting
  kEmptyFleet,
  kDuplicateAppName,
  kMalformedDocument,
  // knowledge-base
  kKnowledgeBaseInvalid,
  // fixture-builder
  kInconsistentProfile,
  // io
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace apkscan

#endif  // APKSCAN_ERROR_HPP_
