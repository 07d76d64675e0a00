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

// Labeled dataset construction: package ingestion, positive/negative pair
// generation, random and zero-shot (class-disjoint) splits, JSONL storage and
// a synthetic corpus generator.

#ifndef BINSBOM_CORPUS_H_
#define BINSBOM_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "binsbom/binscan.h"

namespace binsbom {

struct VersionStringRecord {
  std::string product;  // class label, trimmed and lowercased
  std::string package;  // package name including the version
  std::string version;  // ground-truth version, a substring of `package`
  std::string version_string;

  bool operator==(const VersionStringRecord&) const = default;
};

struct LabeledPair {
  std::string product;
  std::string version_string;
  int label = 0;  // 1 = correlated, 0 = decorrelated

  bool operator==(const LabeledPair&) const = default;
};

enum class SplitMode { kRandom, kZeroShot };

struct SplitSpec {
  SplitMode mode = SplitMode::kRandom;
  double train_fraction = 0.8;  // kRandom only
  std::size_t k_classes = 20;   // kZeroShot only
  std::size_t n_per_class = 4000;
  std::uint64_t seed = 0;
};

template <typename T>
struct TrainTest {
  std::vector<T> train;
  std::vector<T> test;
};

struct PackageMetadata {
  std::string product;
  std::string package;
  std::string version;
};

struct InputFile {
  std::string path;
  std::vector<std::uint8_t> bytes;
};

std::string NormalizeProduct(std::string_view name);

// Scans every file of one package and labels each version-string candidate
// with the package's product and version. Duplicate (product, string) pairs
// collapse to the first occurrence. Throws kMetadataMismatch when the version
// is not a substring of the package name.
std::vector<VersionStringRecord> IngestPackage(std::span<const InputFile> files,
                                               const PackageMetadata& metadata,
                                               const ScanConfig& config);

// One positive pair per record, followed by `negatives_per_positive`
// negatives whose products are drawn without replacement from the other
// products. Throws kInsufficientProducts when not enough other products exist.
std::vector<LabeledPair> MakePairs(std::span<const VersionStringRecord> records,
                                   std::size_t negatives_per_positive,
                                   std::uint64_t seed);

// Seeded shuffle, then a prefix split at floor(train_fraction * N).
TrainTest<LabeledPair> SplitRandom(std::span<const LabeledPair> pairs,
                                   const SplitSpec& spec);

// Record-level zero-shot partition: up to n_per_class samples from each of
// the k_classes largest products go to train, every record of the remaining
// products goes to test. Products are ranked by count descending, then by
// name ascending. Throws kInsufficientClasses unless there are more than
// k_classes distinct products.
TrainTest<VersionStringRecord> ZeroShotRecords(
    std::span<const VersionStringRecord> records, const SplitSpec& spec);

// ZeroShotRecords followed by independent pair generation on each side, so
// negatives never cross the train/test product boundary.
TrainTest<LabeledPair> SplitZeroShot(
    std::span<const VersionStringRecord> records, const SplitSpec& spec,
    std::size_t negatives_per_positive, std::uint64_t seed);

// Generated records embed the product stem and a dotted version, and always
// pass the default version pattern.
std::vector<VersionStringRecord> SynthCorpus(std::size_t n_products,
                                             std::size_t samples_per_product,
                                             std::uint64_t seed);

nlohmann::json ToJson(const VersionStringRecord& record);
nlohmann::json ToJson(const LabeledPair& pair);

std::string ToJsonl(std::span<const VersionStringRecord> records);
std::string ToJsonl(std::span<const LabeledPair> pairs);

// Parsing reports kMalformedLine with a 1-based line number. Blank lines are
// ignored.
std::vector<VersionStringRecord> ParseRecordsJsonl(std::string_view text);
std::vector<LabeledPair> ParsePairsJsonl(std::string_view text);

void SaveJsonl(std::span<const VersionStringRecord> records,
               const std::filesystem::path& path);
void SaveJsonl(std::span<const LabeledPair> pairs,
               const std::filesystem::path& path);
std::vector<VersionStringRecord> LoadRecords(const std::filesystem::path& path);
std::vector<LabeledPair> LoadPairs(const std::filesystem::path& path);

}  // namespace binsbom

#endif  // BINSBOM_CORPUS_H_
