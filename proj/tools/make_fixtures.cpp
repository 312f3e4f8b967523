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

// Writes fixture APKs and a JSON file describing what each one contains.
//
//   make_fixtures OUT_DIR [--set fleet|corpus|all]

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "apkscan/error.hpp"
#include "apkscan/fixtures.hpp"

namespace fs = std::filesystem;
namespace fx = apkscan::fixtures;

namespace {

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw apkscan::Error(apkscan::ErrorCode::kIo, "cannot write " + path.string());
}

nlohmann::ordered_json describe(const std::string& file, const fx::FixtureProfile& profile,
                                const fx::BuiltFixture& built) {
  nlohmann::ordered_json entry;
  entry["file"] = file;
  entry["name"] = profile.name;
  entry["package"] = built.package_name;
  auto rules = nlohmann::ordered_json::array();
  for (const apkscan::RuleId r : profile.positive_rules) {
    rules.push_back(std::string(apkscan::rule_info(r).code));
  }
  entry["positive_rules"] = rules;
  auto dexes = nlohmann::ordered_json::array();
  for (const auto& [name, bytes] : built.dexes) dexes.push_back(name);
  entry["dex_entries"] = dexes;
  nlohmann::ordered_json calls = nlohmann::ordered_json::object();
  for (const auto& [target, count] : built.invocation_counts) {
    calls[target.first + "->" + target.second] = count;
  }
  entry["invocation_counts"] = calls;
  return entry;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write fixture APKs with known rule vectors"};
  std::string out_dir;
  std::string set = "fleet";
  app.add_option("out_dir", out_dir, "Output directory")->required();
  app.add_option("--set", set, "Which profiles to write")
      ->check(CLI::IsMember({"fleet", "corpus", "all"}));
  CLI11_PARSE(app, argc, argv);

  std::vector<fx::FixtureProfile> profiles;
  if (set == "fleet" || set == "all") profiles = fx::banking_fleet();
  if (set == "corpus" || set == "all") {
    auto corpus = fx::oracle_corpus();
    profiles.insert(profiles.end(), corpus.begin(), corpus.end());
  }

  try {
    fs::create_directories(out_dir);
    auto manifest = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const auto built = fx::build_fixture(profiles[i]);
      char prefix[8];
      std::snprintf(prefix, sizeof prefix, "%02zu-", i + 1);
      const std::string file = prefix + profiles[i].name + ".apk";
      write_bytes(fs::path(out_dir) / file, built.apk);
      manifest.push_back(describe(file, profiles[i], built));
    }
    std::ofstream(fs::path(out_dir) / "expectations.json") << manifest.dump(2) << '\n';
    std::cout << "wrote " << profiles.size() << " fixtures to " << out_dir << '\n';
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
