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

// Product matching and reduced-SBOM generation with local CVE lookup.

#ifndef BINSBOM_SBOMGEN_H_
#define BINSBOM_SBOMGEN_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "binsbom/binscan.h"
#include "binsbom/encoder.h"
#include "binsbom/simtrain.h"

namespace binsbom {

inline constexpr std::string_view kToolName = "binsbom";
inline constexpr std::string_view kToolVersion = "0.1.0";

struct ProductIndex {
  std::vector<std::string> products;
  std::vector<Embedding> vectors;  // parallel to `products`
  std::string encoder_fingerprint;

  std::size_t size() const { return products.size(); }
};

// Encodes each product name once. Throws kEmptyProductList or
// kDuplicateProduct.
ProductIndex BuildProductIndex(TextEmbedder& embedder,
                               std::span<const std::string> products);

struct MatchConfig {
  SimilarityKind similarity = SimilarityKind::kCosine;
  double threshold = 0.5;  // inclusive
  double prob_epsilon = 1e-6;
};

struct MatchResult {
  std::string version_string;
  std::optional<std::string> product;
  double probability = 0.5;
  bool accepted = false;
};

// Scores `query` against every entry and keeps the argmax (ties to the
// smaller product name). Under cosine similarity a zero query, or an index
// of zero vectors, is reported as unmatched.
MatchResult MatchEmbedding(const ProductIndex& index,
                           std::string version_string, const Embedding& query,
                           const MatchConfig& config);

MatchResult MatchString(const ProductIndex& index, TextEmbedder& embedder,
                        const std::string& version_string,
                        const MatchConfig& config);

struct SbomComponent {
  std::string product;
  std::string version;                // empty when no dotted version found
  std::vector<std::string> evidence;  // sorted, unique
  double max_probability = 0.0;
  std::vector<std::string> cves;
};

struct ToolInfo {
  std::string name{kToolName};
  std::string version{kToolVersion};
  std::string config_hash;
  std::string encoder_fingerprint;
};

struct SbomDocument {
  ToolInfo tool;
  std::vector<std::string> files;
  std::vector<SbomComponent> components;  // sorted by (product, version)
  std::vector<std::string> residual;      // unmatched candidates, sorted
  std::optional<bool> whitelist_ok;       // set by LookupCves
};

SbomDocument GenerateSbom(std::span<const ScanReport> reports,
                          const ProductIndex& index, TextEmbedder& embedder,
                          const MatchConfig& config);

struct CveFeed {
  std::map<std::pair<std::string, std::string>, std::vector<std::string>>
      entries;
};

bool IsCveId(std::string_view id);

// JSONL lines {"product", "version", "cves": [...]}. Repeated keys merge.
// Throws kFeedParseError on malformed lines or CVE ids.
CveFeed ParseCveFeed(std::string_view text);
CveFeed LoadCveFeed(const std::filesystem::path& path);

// Attaches CVEs to each component and sets whitelist_ok = no component has
// any CVE.
SbomDocument LookupCves(SbomDocument doc, const CveFeed& feed);

nlohmann::json ToJson(const MatchConfig& config);
nlohmann::json ToJson(const MatchResult& result);
nlohmann::json ToJson(const SbomDocument& doc);
nlohmann::json ToJson(const ProductIndex& index);
ProductIndex ProductIndexFromJson(const nlohmann::json& j);
void SaveProductIndex(const ProductIndex& index,
                      const std::filesystem::path& path);
ProductIndex LoadProductIndex(const std::filesystem::path& path);

}  // namespace binsbom

#endif  // BINSBOM_SBOMGEN_H_
