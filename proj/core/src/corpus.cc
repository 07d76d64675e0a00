/*
 * Copyright 2026 The binsbom Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "binsbom/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include "binsbom/error.h"
#include "binsbom/io.h"
#include "binsbom/random.h"

namespace binsbom {
namespace {

std::vector<std::string> DistinctProducts(
    std::span<const VersionStringRecord> records) {
  std::set<std::string> names;
  for (const auto& r : records) names.insert(r.product);
  return {names.begin(), names.end()};
}

VersionStringRecord RecordFromJson(const nlohmann::json& j) {
  VersionStringRecord r{j.at("product").get<std::string>(),
                        j.at("package").get<std::string>(),
                        j.at("version").get<std::string>(),
                        j.at("version_string").get<std::string>()};
  if (r.product.empty() || r.product != NormalizeProduct(r.product)) {
    throw Error(ErrorCode::kMalformedLine,
                "product must be non-empty and normalized");
  }
  if (r.package.find(r.version) == std::string::npos) {
    throw Error(ErrorCode::kMalformedLine, "version not in package name");
  }
  return r;
}

LabeledPair PairFromJson(const nlohmann::json& j) {
  LabeledPair p{j.at("product").get<std::string>(),
                j.at("version_string").get<std::string>(),
                j.at("label").get<int>()};
  if (p.label != 0 && p.label != 1) {
    throw Error(ErrorCode::kMalformedLine,
                "label must be 0 or 1, got " + std::to_string(p.label));
  }
  return p;
}

// Synthetic name stems are pronounceable consonant-vowel syllables.
constexpr std::string_view kConsonants = "bcdfghklmnprstvwz";
constexpr std::string_view kVowels = "aeiou";

std::string MakeStem(RandomEngine& rng) {
  std::uniform_int_distribution<int> syllables(2, 3);
  std::uniform_int_distribution<std::size_t> consonant(0,
                                                       kConsonants.size() - 1);
  std::uniform_int_distribution<std::size_t> vowel(0, kVowels.size() - 1);
  std::string stem;
  const int n = syllables(rng);
  for (int i = 0; i < n; ++i) {
    stem += kConsonants[consonant(rng)];
    stem += kVowels[vowel(rng)];
  }
  // Occasional closing consonant so stems do not all end in a vowel.
  if (std::uniform_int_distribution<int>(0, 1)(rng) == 1) {
    stem += kConsonants[consonant(rng)];
  }
  return stem;
}

struct Release {
  int major;
  int minor;
  int patch;
  std::string Short() const {
    return std::to_string(major) + "." + std::to_string(minor);
  }
  std::string Full() const { return Short() + "." + std::to_string(patch); }
};

std::string RenderTemplate(int which, const std::string& stem,
                           const Release& rel, RandomEngine& rng) {
  switch (which) {
    case 0:
      return stem + " " + rel.Full();
    case 1:
      return "lib" + stem + ".so." + rel.Short();
    case 2:
      return stem + ": version " + rel.Short();
    case 3: {
      const int build = std::uniform_int_distribution<int>(100, 9999)(rng);
      return stem + " v" + rel.Full() + " (build " + std::to_string(build) +
             ")";
    }
    case 4:
      return stem + "-" + rel.Full();
    case 5:
      return "@(#)" + stem + " " + rel.Short() + " release";
    case 6:
      return "/usr/share/" + stem + "/" + rel.Short() + "/";
    default: {
      const int gcc = std::uniform_int_distribution<int>(7, 13)(rng);
      return stem + " version " + rel.Full() + " built with gcc " +
             std::to_string(gcc) + ".2.0";
    }
  }
}

constexpr int kTemplateCount = 8;

}  // namespace

std::string NormalizeProduct(std::string_view name) {
  const auto first = name.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = name.find_last_not_of(" \t\r\n");
  std::string out(name.substr(first, last - first + 1));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::vector<VersionStringRecord> IngestPackage(std::span<const InputFile> files,
                                               const PackageMetadata& metadata,
                                               const ScanConfig& config) {
  if (metadata.package.find(metadata.version) == std::string::npos) {
    throw Error(ErrorCode::kMetadataMismatch,
                "version '" + metadata.version + "' not found in package '" +
                    metadata.package + "'");
  }
  const std::string product = NormalizeProduct(metadata.product);
  if (product.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty product name");
  }
  std::vector<VersionStringRecord> out;
  std::set<std::string> seen;
  for (const auto& file : files) {
    const ScanReport report = ScanBytes(file.path, file.bytes, config);
    for (const auto& c : report.candidates) {
      if (!seen.insert(c.text).second) continue;
      out.push_back({product, metadata.package, metadata.version, c.text});
    }
  }
  return out;
}

std::vector<LabeledPair> MakePairs(std::span<const VersionStringRecord> records,
                                   std::size_t negatives_per_positive,
                                   std::uint64_t seed) {
  const std::vector<std::string> products = DistinctProducts(records);
  if (negatives_per_positive > 0 && !records.empty() &&
      negatives_per_positive > products.size() - 1) {
    throw Error(ErrorCode::kInsufficientProducts,
                std::to_string(negatives_per_positive) +
                    " negatives per positive need at least " +
                    std::to_string(negatives_per_positive + 1) +
                    " products, have " + std::to_string(products.size()));
  }
  RandomEngine rng(seed);
  std::vector<LabeledPair> out;
  out.reserve(records.size() * (1 + negatives_per_positive));
  std::vector<std::size_t> others;
  for (const auto& r : records) {
    out.push_back({r.product, r.version_string, 1});
    if (negatives_per_positive == 0) continue;
    others.clear();
    for (std::size_t i = 0; i < products.size(); ++i) {
      if (products[i] != r.product) others.push_back(i);
    }
    // Partial Fisher-Yates: the first k slots become a uniform sample.
    for (std::size_t k = 0; k < negatives_per_positive; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, others.size() - 1);
      std::swap(others[k], others[pick(rng)]);
      out.push_back({products[others[k]], r.version_string, 0});
    }
  }
  return out;
}

TrainTest<LabeledPair> SplitRandom(std::span<const LabeledPair> pairs,
                                   const SplitSpec& spec) {
  if (spec.mode != SplitMode::kRandom) {
    throw Error(ErrorCode::kInvalidArgument, "SplitRandom needs a random spec");
  }
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "train_fraction must lie in (0, 1)");
  }
  std::vector<LabeledPair> shuffled(pairs.begin(), pairs.end());
  RandomEngine rng(spec.seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto cut = static_cast<std::size_t>(
      std::floor(spec.train_fraction * static_cast<double>(shuffled.size())));
  TrainTest<LabeledPair> out;
  out.train.assign(std::make_move_iterator(shuffled.begin()),
                   std::make_move_iterator(shuffled.begin() + cut));
  out.test.assign(std::make_move_iterator(shuffled.begin() + cut),
                  std::make_move_iterator(shuffled.end()));
  return out;
}

TrainTest<VersionStringRecord> ZeroShotRecords(
    std::span<const VersionStringRecord> records, const SplitSpec& spec) {
  if (spec.mode != SplitMode::kZeroShot) {
    throw Error(ErrorCode::kInvalidArgument,
                "ZeroShotRecords needs a zero-shot spec");
  }
  if (spec.k_classes == 0 || spec.n_per_class == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "k_classes and n_per_class must be positive");
  }
  std::map<std::string, std::vector<std::size_t>> by_product;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_product[records[i].product].push_back(i);
  }
  if (by_product.size() <= spec.k_classes) {
    throw Error(ErrorCode::kInsufficientClasses,
                std::to_string(by_product.size()) +
                    " distinct products, need more than " +
                    std::to_string(spec.k_classes));
  }
  std::vector<const std::pair<const std::string, std::vector<std::size_t>>*>
      ranked;
  for (const auto& entry : by_product) ranked.push_back(&entry);
  // std::map iteration is already name-ascending, so a stable sort by size
  // descending yields the name tie-break.
  std::stable_sort(ranked.begin(), ranked.end(), [](auto* a, auto* b) {
    return a->second.size() > b->second.size();
  });

  RandomEngine rng(spec.seed);
  TrainTest<VersionStringRecord> out;
  for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
    const auto& indices = ranked[rank]->second;
    if (rank < spec.k_classes) {
      std::vector<std::size_t> chosen = indices;
      std::shuffle(chosen.begin(), chosen.end(), rng);
      chosen.resize(std::min(spec.n_per_class, chosen.size()));
      std::sort(chosen.begin(), chosen.end());
      for (std::size_t i : chosen) out.train.push_back(records[i]);
    } else {
      for (std::size_t i : indices) out.test.push_back(records[i]);
    }
  }
  return out;
}

TrainTest<LabeledPair> SplitZeroShot(
    std::span<const VersionStringRecord> records, const SplitSpec& spec,
    std::size_t negatives_per_positive, std::uint64_t seed) {
  const auto sides = ZeroShotRecords(records, spec);
  TrainTest<LabeledPair> out;
  out.train = MakePairs(sides.train, negatives_per_positive,
                        DeriveSeed(seed, "pairs/train"));
  out.test = MakePairs(sides.test, negatives_per_positive,
                       DeriveSeed(seed, "pairs/test"));
  return out;
}

std::vector<VersionStringRecord> SynthCorpus(std::size_t n_products,
                                             std::size_t samples_per_product,
                                             std::uint64_t seed) {
  if (n_products < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least 2 products");
  }
  RandomEngine rng(seed);
  std::set<std::string> used;
  std::vector<std::string> stems;
  while (stems.size() < n_products) {
    std::string stem = MakeStem(rng);
    if (used.insert(stem).second) stems.push_back(std::move(stem));
  }

  std::uniform_int_distribution<int> major(0, 9);
  std::uniform_int_distribution<int> minor(0, 20);
  std::uniform_int_distribution<int> patch(0, 30);
  std::uniform_int_distribution<int> release_count(3, 6);
  std::uniform_int_distribution<int> templ(0, kTemplateCount - 1);

  std::vector<VersionStringRecord> out;
  out.reserve(n_products * samples_per_product);
  for (const auto& stem : stems) {
    std::vector<Release> releases(static_cast<std::size_t>(release_count(rng)));
    for (auto& rel : releases) rel = {major(rng), minor(rng), patch(rng)};
    std::uniform_int_distribution<std::size_t> pick(0, releases.size() - 1);
    for (std::size_t s = 0; s < samples_per_product; ++s) {
      const Release& rel = releases[pick(rng)];
      VersionStringRecord r;
      r.product = stem;
      r.version = rel.Full();
      r.package = stem + "-" + r.version;
      r.version_string = RenderTemplate(templ(rng), stem, rel, rng);
      out.push_back(std::move(r));
    }
  }
  return out;
}

nlohmann::json ToJson(const VersionStringRecord& record) {
  return {{"product", record.product},
          {"package", record.package},
          {"version", record.version},
          {"version_string", record.version_string}};
}

nlohmann::json ToJson(const LabeledPair& pair) {
  return {{"product", pair.product},
          {"version_string", pair.version_string},
          {"label", pair.label}};
}

std::string ToJsonl(std::span<const VersionStringRecord> records) {
  std::string out;
  for (const auto& r : records) out += ToJson(r).dump() + "\n";
  return out;
}

std::string ToJsonl(std::span<const LabeledPair> pairs) {
  std::string out;
  for (const auto& p : pairs) out += ToJson(p).dump() + "\n";
  return out;
}

std::vector<VersionStringRecord> ParseRecordsJsonl(std::string_view text) {
  std::vector<VersionStringRecord> out;
  ForEachJsonLine(text, ErrorCode::kMalformedLine, [&](const nlohmann::json& j) {
    out.push_back(RecordFromJson(j));
  });
  return out;
}

std::vector<LabeledPair> ParsePairsJsonl(std::string_view text) {
  std::vector<LabeledPair> out;
  ForEachJsonLine(text, ErrorCode::kMalformedLine, [&](const nlohmann::json& j) {
    out.push_back(PairFromJson(j));
  });
  return out;
}

void SaveJsonl(std::span<const VersionStringRecord> records,
               const std::filesystem::path& path) {
  WriteFileAtomic(path, ToJsonl(records));
}

void SaveJsonl(std::span<const LabeledPair> pairs,
               const std::filesystem::path& path) {
  WriteFileAtomic(path, ToJsonl(pairs));
}

std::vector<VersionStringRecord> LoadRecords(const std::filesystem::path& path) {
  return ParseRecordsJsonl(ReadFileText(path));
}

std::vector<LabeledPair> LoadPairs(const std::filesystem::path& path) {
  return ParsePairsJsonl(ReadFileText(path));
}

}  // namespace binsbom
