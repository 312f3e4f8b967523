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

#ifndef APKSCAN_CLI_HPP_
#define APKSCAN_CLI_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "apkscan/report.hpp"
#include "apkscan/rules.hpp"

namespace apkscan::cli {

// Process exit codes; a stable contract for CI use.
inline constexpr int kExitOk = 0;
inline constexpr int kExitThresholdMet = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitScanError = 3;

inline constexpr const char* kFormatEnvVar = "APKSCAN_FORMAT";

enum class Mode { kScan, kBatch, kMatrix, kHelp };

struct Config {
  Mode mode = Mode::kHelp;
  std::vector<std::filesystem::path> inputs;  // files, in command-line order
  std::optional<std::filesystem::path> input_dir;
  std::optional<std::filesystem::path> output_path;
  std::optional<OutputFormat> format;  // unset: text, or csv for matrices
  std::optional<Severity> fail_threshold;
  unsigned jobs = 1;
  std::optional<std::filesystem::path> kb_path;
};

enum class UsageErrorKind {
  kUnknownFlag,
  kMissingArgument,
  kConflictingModes,
  kInvalidValue,
};

struct UsageError {
  UsageErrorKind kind;
  std::string message;
};

using ParseResult = std::variant<Config, UsageError>;

// `args` excludes the program name. `env_format` is the value of
// APKSCAN_FORMAT, if set.
ParseResult parse_args(std::span<const std::string> args,
                       std::optional<std::string> env_format = std::nullopt);

std::string usage_text();

// Runs a parsed configuration. Reports go to `out` (or the output file),
// diagnostics to `err`.
int execute(const Config& config, std::ostream& out, std::ostream& err);

// parse_args + execute, reading APKSCAN_FORMAT from the environment.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

struct ScanOutcome {
  std::filesystem::path path;
  std::optional<ScanResult> result;
  std::string error;
};

// Scans every path with up to `jobs` workers. Outcomes keep input order.
std::vector<ScanOutcome> scan_paths(std::span<const std::filesystem::path> paths,
                                    unsigned jobs);

// Sorted *.apk files directly inside `dir`.
std::vector<std::filesystem::path> list_apks(const std::filesystem::path& dir);

}  // namespace apkscan::cli

#endif  // APKSCAN_CLI_HPP_
