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

#include "apkscan/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <thread>

#include "apkscan/apk_archive.hpp"
#include "apkscan/error.hpp"
#include "apkscan/knowledge_base.hpp"

namespace apkscan::cli {
namespace {

constexpr unsigned kMaxJobs = 64;

struct Options {
  std::string file;
  std::string dir;
  bool matrix = false;
  std::vector<std::string> apks;
  std::string output;
  std::string format;
  std::string fail_on;
  unsigned jobs = 1;
  std::string kb;
};

void configure(CLI::App& app, Options& o) {
  app.set_help_flag("-h,--help", "Show this help and exit");
  auto* file = app.add_option("-f,--file", o.file, "Scan a single APK");
  auto* dir = app.add_option("--dir", o.dir, "Scan every *.apk in a directory");
  auto* matrix = app.add_flag("--matrix", o.matrix,
                              "Emit a fleet comparison matrix instead of reports");
  auto* apks = app.add_option("apks", o.apks, "APK files for batch or matrix mode");
  app.add_option("-o,--output", o.output, "Write output to a file instead of stdout");
  app.add_option("--format", o.format, "Output format: text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--fail-on", o.fail_on,
                 "Exit 1 when a finding is at least this severe "
                 "(critical, warning, notice, info)")
      ->check(CLI::IsMember({"critical", "warning", "notice", "info"}));
  app.add_option("-j,--jobs", o.jobs, "Concurrent scans in batch/matrix mode")
      ->check(CLI::Range(1u, kMaxJobs));
  app.add_option("--kb", o.kb, "Knowledge-base JSON overriding the built-in one");
  file->excludes(dir)->excludes(matrix)->excludes(apks);
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

bool write_output(const Config& config, const std::string& text, std::ostream& out,
                  std::ostream& err) {
  if (!config.output_path) {
    out << text;
    return static_cast<bool>(out);
  }
  std::ofstream file(*config.output_path, std::ios::binary);
  file << text;
  if (!file) {
    err << "apkscan: cannot write '" << config.output_path->string() << "'\n";
    return false;
  }
  return true;
}

int threshold_exit(const Config& config, const std::vector<ScanOutcome>& outcomes) {
  if (!config.fail_threshold) return kExitOk;
  for (const ScanOutcome& o : outcomes) {
    if (!o.result) continue;
    const auto highest = o.result->highest_severity();
    if (highest && *highest >= *config.fail_threshold) return kExitThresholdMet;
  }
  return kExitOk;
}

std::string app_name(const std::filesystem::path& path) {
  return path.stem().string();
}

}  // namespace

std::string usage_text() {
  CLI::App app("apkscan - static vulnerability scanner for Android banking APKs",
               "apkscan");
  Options o;
  configure(app, o);
  return app.help() +
         "\nExit codes: 0 clean, 1 --fail-on threshold met, 2 usage error, "
         "3 parse or I/O error.\n"
         "Environment: APKSCAN_FORMAT sets the default --format.\n";
}

ParseResult parse_args(std::span<const std::string> args,
                       std::optional<std::string> env_format) {
  CLI::App app("apkscan", "apkscan");
  Options o;
  configure(app, o);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    return Config{};
  } catch (const CLI::ExtrasError& e) {
    return UsageError{UsageErrorKind::kUnknownFlag, e.what()};
  } catch (const CLI::ArgumentMismatch& e) {
    return UsageError{UsageErrorKind::kMissingArgument, e.what()};
  } catch (const CLI::ExcludesError& e) {
    return UsageError{UsageErrorKind::kConflictingModes, e.what()};
  } catch (const CLI::ParseError& e) {
    return UsageError{UsageErrorKind::kInvalidValue, e.what()};
  }

  Config config;
  config.jobs = o.jobs;
  if (!o.output.empty()) config.output_path = o.output;
  if (!o.kb.empty()) config.kb_path = o.kb;
  if (!o.fail_on.empty()) config.fail_threshold = parse_severity(o.fail_on);
  const std::string format_text = !o.format.empty() ? o.format : env_format.value_or("");
  if (!format_text.empty()) {
    config.format = parse_output_format(format_text);
    if (!config.format) {
      return UsageError{UsageErrorKind::kInvalidValue,
                        std::string(kFormatEnvVar) + "='" + format_text +
                            "' is not one of text, json, csv"};
    }
  }

  if (!o.file.empty()) {
    config.mode = Mode::kScan;
    config.inputs.emplace_back(o.file);
    return config;
  }
  for (const auto& apk : o.apks) config.inputs.emplace_back(apk);
  if (!o.dir.empty()) config.input_dir = o.dir;
  if (config.inputs.empty() && !config.input_dir) {
    return UsageError{UsageErrorKind::kMissingArgument,
                      "no input: use -f <apk>, --dir <path> or list APK files"};
  }
  config.mode = o.matrix ? Mode::kMatrix : Mode::kBatch;
  return config;
}

std::vector<std::filesystem::path> list_apks(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> apks;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".apk") {
      apks.push_back(entry.path());
    }
  }
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot list '" + dir.string() + "': " + ec.message());
  }
  std::sort(apks.begin(), apks.end());
  return apks;
}

std::vector<ScanOutcome> scan_paths(std::span<const std::filesystem::path> paths,
                                    unsigned jobs) {
  std::vector<ScanOutcome> outcomes(paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < paths.size(); i = next++) {
      ScanOutcome& outcome = outcomes[i];
      outcome.path = paths[i];
      try {
        outcome.result = scan_archive(open_apk(paths[i]), app_name(paths[i]));
      } catch (const std::exception& e) {
        outcome.error = e.what();
      }
    }
  };
  const unsigned workers =
      std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(std::max<std::size_t>(paths.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  return outcomes;
}

int execute(const Config& config, std::ostream& out, std::ostream& err) {
  if (config.mode == Mode::kHelp) {
    out << usage_text();
    return kExitOk;
  }

  const KnowledgeBase* kb = &KnowledgeBase::embedded();
  std::optional<KnowledgeBase> custom_kb;
  std::vector<std::filesystem::path> inputs = config.inputs;
  try {
    if (config.kb_path) {
      custom_kb = KnowledgeBase::from_file(*config.kb_path);
      kb = &*custom_kb;
    }
    if (config.input_dir) {
      auto found = list_apks(*config.input_dir);
      inputs.insert(inputs.end(), found.begin(), found.end());
    }
  } catch (const Error& e) {
    err << "apkscan: " << e.what() << "\n";
    return kExitScanError;
  }
  if (inputs.empty()) {
    err << "apkscan: no .apk files found\n";
    return kExitScanError;
  }

  const auto outcomes = scan_paths(inputs, config.mode == Mode::kScan ? 1 : config.jobs);
  std::size_t failures = 0;
  for (const ScanOutcome& o : outcomes) failures += o.result ? 0 : 1;

  const std::string timestamp = utc_timestamp();
  std::string text;
  try {
    switch (config.mode) {
      case Mode::kScan:
        if (outcomes.front().result) {
          text = serialize(render_report(*outcomes.front().result, *kb, timestamp),
                           config.format.value_or(OutputFormat::kText));
        }
        break;
      case Mode::kBatch: {
        std::vector<Report> reports;
        for (const ScanOutcome& o : outcomes) {
          if (o.result) reports.push_back(render_report(*o.result, *kb, timestamp));
        }
        text = serialize_reports(reports, config.format.value_or(OutputFormat::kText));
        break;
      }
      case Mode::kMatrix: {
        std::vector<ScanResult> results;
        for (const ScanOutcome& o : outcomes) {
          if (o.result) results.push_back(*o.result);
        }
        if (!results.empty()) {
          text = serialize(build_fleet_matrix(results),
                           config.format.value_or(OutputFormat::kCsv));
        }
        break;
      }
      case Mode::kHelp:
        break;
    }
  } catch (const Error& e) {
    err << "apkscan: " << e.what() << "\n";
    return kExitScanError;
  }

  if (failures != outcomes.size() && !write_output(config, text, out, err)) {
    return kExitScanError;
  }
  if (failures > 0) {
    err << "apkscan: " << failures << " of " << outcomes.size()
        << " APK(s) could not be scanned:\n";
    for (const ScanOutcome& o : outcomes) {
      if (!o.result) err << "  " << o.path.string() << ": " << o.error << "\n";
    }
    return kExitScanError;
  }
  return threshold_exit(config, outcomes);
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  std::optional<std::string> env_format;
  if (const char* value = std::getenv(kFormatEnvVar)) env_format = value;
  const ParseResult parsed = parse_args(args, env_format);
  if (const auto* error = std::get_if<UsageError>(&parsed)) {
    err << "apkscan: " << error->message << "\n\n" << usage_text();
    return kExitUsage;
  }
  return execute(std::get<Config>(parsed), out, err);
}

}  // namespace apkscan::cli
