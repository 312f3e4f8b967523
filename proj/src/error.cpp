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

#include "apkscan/error.hpp"

namespace apkscan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotAZip: return "NotAZip";
    case ErrorCode::kTruncatedArchive: return "TruncatedArchive";
    case ErrorCode::kMissingManifest: return "MissingManifest";
    case ErrorCode::kNoDexEntries: return "NoDexEntries";
    case ErrorCode::kDuplicateEntry: return "DuplicateEntry";
    case ErrorCode::kEntryNotFound: return "EntryNotFound";
    case ErrorCode::kCrcMismatch: return "CrcMismatch";
    case ErrorCode::kCorruptEntry: return "CorruptEntry";
    case ErrorCode::kUnsupportedCompressionMethod: return "UnsupportedCompressionMethod";
    case ErrorCode::kBadAxmlMagic: return "BadMagic(axml)";
    case ErrorCode::kTruncatedChunk: return "TruncatedChunk";
    case ErrorCode::kUnbalancedTree: return "UnbalancedTree";
    case ErrorCode::kStringIndexOutOfRange: return "StringIndexOutOfRange";
    case ErrorCode::kNotAManifest: return "NotAManifest";
    case ErrorCode::kMissingPackageName: return "MissingPackageName";
    case ErrorCode::kBadDexMagic: return "BadMagic(dex)";
    case ErrorCode::kBadEndianTag: return "BadEndianTag";
    case ErrorCode::kSectionOutOfBounds: return "SectionOutOfBounds";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kMalformedUleb128: return "MalformedUleb128";
    case ErrorCode::kEmptyFleet: return "EmptyFleet";
    case ErrorCode::kDuplicateAppName: return "DuplicateAppName";
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kKnowledgeBaseInvalid: return "KnowledgeBaseInvalid";
    case ErrorCode::kInconsistentProfile: return "InconsistentProfile";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace apkscan
