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

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "apkscan/axml.hpp"
#include "apkscan/dex.hpp"
#include "apkscan/manifest.hpp"
#include "test_support.hpp"

namespace apkscan {
namespace {

using Bytes = std::vector<std::uint8_t>;

// Truncation, single/multi byte flips, 32-bit field overwrites and
// inserted/removed spans.
Bytes mutate(const Bytes& input, std::mt19937& rng) {
  Bytes out = input;
  if (out.empty()) return out;
  auto at = [&] { return static_cast<std::size_t>(rng() % out.size()); };
  switch (rng() % 6) {
    case 0:
      out.resize(at());
      break;
    case 1:
      out[at()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
      break;
    case 2:
      for (int i = 0, n = 1 + static_cast<int>(rng() % 16); i < n; ++i) {
        out[at()] = static_cast<std::uint8_t>(rng());
      }
      break;
    case 3: {
      static constexpr std::uint32_t kInteresting[] = {0, 1, 0x7fffffff, 0x80000000, 0xffffffff,
                                                       0xfffffff0, 0x10000, 0xffff};
      const std::size_t pos = at() & ~std::size_t{3};
      if (pos + 4 <= out.size()) {
        testing::put_le32(out, pos, kInteresting[rng() % std::size(kInteresting)]);
      }
      break;
    }
    case 4: {
      const std::size_t pos = at();
      const std::size_t len = std::min<std::size_t>(out.size() - pos, 1 + rng() % 64);
      out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos),
                out.begin() + static_cast<std::ptrdiff_t>(pos + len));
      break;
    }
    case 5: {
      const std::size_t pos = at();
      Bytes junk(1 + rng() % 64);
      for (auto& b : junk) b = static_cast<std::uint8_t>(rng());
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), junk.begin(), junk.end());
      break;
    }
  }
  return out;
}

struct Tally {
  int ok = 0;
  int rejected = 0;
};

// Runs `consume` on `iterations` mutants; anything but apkscan::Error fails.
Tally fuzz(const std::vector<Bytes>& seeds, int iterations, std::uint32_t seed,
           const std::function<void(const Bytes&)>& consume) {
  std::mt19937 rng(seed);
  Tally tally;
  for (int i = 0; i < iterations; ++i) {
    Bytes input = seeds[static_cast<std::size_t>(i) % seeds.size()];
    for (int rounds = 1 + static_cast<int>(rng() % 3); rounds > 0; --rounds) {
      input = mutate(input, rng);
    }
    try {
      consume(input);
      ++tally.ok;
    } catch (const Error&) {
      ++tally.rejected;
    } catch (const std::bad_alloc&) {
      ADD_FAILURE() << "std::bad_alloc on iteration " << i;
    } catch (const std::exception& e) {
      ADD_FAILURE() << "iteration " << i << " threw " << typeid(e).name() << ": " << e.what();
    }
  }
  return tally;
}

std::vector<fixtures::BuiltFixture> seed_fixtures() {
  std::vector<fixtures::BuiltFixture> out;
  for (const auto& p : fixtures::banking_fleet()) out.push_back(fixtures::build_fixture(p));
  return out;
}

TEST(Robustness, MutatedApkBytes) {
  std::vector<Bytes> seeds;
  for (const auto& f : seed_fixtures()) seeds.push_back(f.apk);
  const Tally t = fuzz(seeds, 3000, 1, [](const Bytes& b) { testing::scan_bytes(b, "fuzz"); });
  EXPECT_GT(t.rejected, 0);
}

TEST(Robustness, MutatedManifest) {
  std::vector<Bytes> seeds;
  for (const auto& f : seed_fixtures()) seeds.push_back(f.manifest);
  const Tally t = fuzz(seeds, 4000, 2, [](const Bytes& b) { decode_manifest(b); });
  EXPECT_GT(t.rejected, 0);
  EXPECT_GT(t.ok, 0);
}

TEST(Robustness, MutatedDex) {
  std::vector<Bytes> seeds;
  for (const auto& f : seed_fixtures()) {
    for (const auto& [name, bytes] : f.dexes) seeds.push_back(bytes);
  }
  const ManifestModel manifest = decode_manifest(seed_fixtures()[0].manifest);
  const Tally t = fuzz(seeds, 4000, 3, [&](const Bytes& b) {
    DexImage dex = parse_dex(b, "classes.dex");
    ScanInput in{manifest, {std::move(dex)}, "fuzz"};
    run_all_rules(in);
  });
  EXPECT_GT(t.rejected, 0);
  EXPECT_GT(t.ok, 0);
}

// Mutated inner entries repackaged with valid CRCs reach the parsers
// through the whole pipeline.
TEST(Robustness, MutatedEntriesInValidZip) {
  const auto fixtures = seed_fixtures();
  std::mt19937 rng(4);
  int rejected = 0;
  for (int i = 0; i < 1500; ++i) {
    const auto& f = fixtures[static_cast<std::size_t>(i) % fixtures.size()];
    fixtures::ZipWriter zip;
    Bytes manifest = f.manifest;
    std::vector<Bytes> dexes;
    for (const auto& d : f.dexes) dexes.push_back(d.second);
    if (rng() % 2) {
      manifest = mutate(manifest, rng);
    } else {
      auto& target = dexes[rng() % dexes.size()];
      target = mutate(target, rng);
    }
    zip.add("AndroidManifest.xml", manifest);
    for (std::size_t d = 0; d < dexes.size(); ++d) {
      zip.add(d == 0 ? "classes.dex" : "classes" + std::to_string(d + 1) + ".dex", dexes[d],
              true);
    }
    try {
      testing::scan_bytes(zip.finish(), "fuzz");
    } catch (const Error&) {
      ++rejected;
    } catch (const std::exception& e) {
      ADD_FAILURE() << "iteration " << i << " threw " << e.what();
    }
  }
  EXPECT_GT(rejected, 0);
}

TEST(Robustness, EveryTruncationOfManifest) {
  const Bytes manifest = seed_fixtures()[5].manifest;
  for (std::size_t n = 0; n < manifest.size(); ++n) {
    const Bytes cut(manifest.begin(), manifest.begin() + static_cast<std::ptrdiff_t>(n));
    try {
      decode_manifest(cut);
      ADD_FAILURE() << "truncation to " << n << " bytes accepted";
    } catch (const Error&) {
    }
  }
}

TEST(Robustness, EveryTruncationOfDexHeaderRegion) {
  const Bytes dex = seed_fixtures()[1].dexes[0].second;
  for (std::size_t n = 0; n < dex.size(); n += (n < 512 ? 1 : 37)) {
    const Bytes cut(dex.begin(), dex.begin() + static_cast<std::ptrdiff_t>(n));
    EXPECT_APKSCAN_ERROR(parse_dex(cut),
                         n < 8 ? ErrorCode::kBadDexMagic : ErrorCode::kSectionOutOfBounds);
  }
}

TEST(Robustness, EveryTruncationOfApk) {
  const Bytes apk = seed_fixtures()[0].apk;
  for (std::size_t n = 0; n < apk.size(); n += 7) {
    const Bytes cut(apk.begin(), apk.begin() + static_cast<std::ptrdiff_t>(n));
    try {
      testing::scan_bytes(cut, "cut");
      ADD_FAILURE() << "truncation to " << n << " bytes accepted";
    } catch (const Error&) {
    }
  }
}

TEST(Robustness, HugeDeclaredSizesDoNotAllocate) {
  auto dex = seed_fixtures()[0].dexes[0].second;
  // string_ids_size and method_ids_size near 2^32.
  testing::put_le32(dex, 56, 0xfffffff0u);
  EXPECT_APKSCAN_ERROR(parse_dex(dex), ErrorCode::kSectionOutOfBounds);
  dex = seed_fixtures()[0].dexes[0].second;
  testing::put_le32(dex, 88, 0xfffffff0u);
  EXPECT_APKSCAN_ERROR(parse_dex(dex), ErrorCode::kSectionOutOfBounds);

  // A stored ZIP entry claiming a 4 GiB deflated size.
  fixtures::ZipWriter zip;
  const Bytes manifest = seed_fixtures()[0].manifest;
  zip.add("AndroidManifest.xml", manifest);
  zip.add("classes.dex", seed_fixtures()[0].dexes[0].second, true);
  auto apk = zip.finish();
  // Patch the uncompressed size of classes.dex in its central record.
  const std::size_t eocd = apk.size() - 22;
  std::size_t cd = testing::le32(apk, eocd + 16);
  cd += 46 + (apk[cd + 28] | (apk[cd + 29] << 8));
  testing::put_le32(apk, cd + 24, 0xfffffff0u);
  const auto archive = ApkArchive::from_bytes(apk);
  EXPECT_APKSCAN_ERROR(archive.read_entry("classes.dex"), ErrorCode::kCorruptEntry);
}

}  // namespace
}  // namespace apkscan
