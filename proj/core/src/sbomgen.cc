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

#include "binsbom/sbomgen.h"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <unordered_map>

#include "binsbom/error.h"
#include "binsbom/io.h"

namespace binsbom {
namespace {

bool IsZero(const Embedding& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

ProductIndex BuildProductIndex(TextEmbedder& embedder,
                               std::span<const std::string> products) {
  if (products.empty()) {
    throw Error(ErrorCode::kEmptyProductList, "no products to index");
  }
  std::set<std::string> seen;
  for (const auto& p : products) {
    if (!seen.insert(p).second) {
      throw Error(ErrorCode::kDuplicateProduct, "'" + p + "' listed twice");
    }
  }
  ProductIndex index;
  index.products.assign(products.begin(), products.end());
  index.vectors = embedder.EmbedTexts(products);
  index.encoder_fingerprint = embedder.fingerprint();
  return index;
}

MatchResult MatchEmbedding(const ProductIndex& index,
                           std::string version_string, const Embedding& query,
                           const MatchConfig& config) {
  MatchResult result;
  result.version_string = std::move(version_string);
  const bool cosine = config.similarity == SimilarityKind::kCosine;
  if (cosine && IsZero(query)) return result;

  std::optional<std::size_t> best;
  double best_score = 0.0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (cosine && IsZero(index.vectors[i])) continue;
    const double score = Similarity(config.similarity, query, index.vectors[i]);
    if (!best || score > best_score ||
        (score == best_score && index.products[i] < index.products[*best])) {
      best = i;
      best_score = score;
    }
  }
  if (!best) return result;
  result.product = index.products[*best];
  result.probability =
      PairProbability(best_score, config.similarity, config.prob_epsilon);
  result.accepted = result.probability >= config.threshold;
  return result;
}

MatchResult MatchString(const ProductIndex& index, TextEmbedder& embedder,
                        const std::string& version_string,
                        const MatchConfig& config) {
  const std::string texts[] = {version_string};
  const auto embedded = embedder.EmbedTexts(texts);
  return MatchEmbedding(index, version_string, embedded.at(0), config);
}

SbomDocument GenerateSbom(std::span<const ScanReport> reports,
                          const ProductIndex& index, TextEmbedder& embedder,
                          const MatchConfig& config) {
  SbomDocument doc;
  doc.tool.config_hash = Fingerprint(ToJson(config).dump());
  doc.tool.encoder_fingerprint = index.encoder_fingerprint;

  // Embed every distinct candidate once, in first-seen order.
  std::vector<std::string> queries;
  std::unordered_map<std::string, std::size_t> query_slot;
  for (const auto& report : reports) {
    doc.files.push_back(report.path);
    for (const auto& c : report.candidates) {
      if (query_slot.emplace(c.text, queries.size()).second) {
        queries.push_back(c.text);
      }
    }
  }
  const auto vectors = embedder.EmbedTexts(queries);

  std::map<std::pair<std::string, std::string>, SbomComponent> components;
  std::set<std::string> residual;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const MatchResult m = MatchEmbedding(index, queries[q], vectors[q], config);
    if (!m.accepted) {
      residual.insert(queries[q]);
      continue;
    }
    std::string version = ExtractDottedVersion(queries[q]).value_or("");
    auto& comp = components[{*m.product, version}];
    comp.product = *m.product;
    comp.version = std::move(version);
    comp.evidence.push_back(queries[q]);
    comp.max_probability = std::max(comp.max_probability, m.probability);
  }
  for (auto& [key, comp] : components) {
    std::sort(comp.evidence.begin(), comp.evidence.end());
    doc.components.push_back(std::move(comp));
  }
  doc.residual.assign(residual.begin(), residual.end());
  return doc;
}

bool IsCveId(std::string_view id) {
  static const std::regex re(R"(^CVE-[0-9]{4}-[0-9]{4,}$)");
  return std::regex_match(id.begin(), id.end(), re);
}

CveFeed ParseCveFeed(std::string_view text) {
  CveFeed feed;
  ForEachJsonLine(text, ErrorCode::kFeedParseError,
                  [&](const nlohmann::json& j) {
                    const auto product = j.at("product").get<std::string>();
                    const auto version = j.at("version").get<std::string>();
                    auto& list = feed.entries[{product, version}];
                    for (const auto& id : j.at("cves")) {
                      const auto cve = id.get<std::string>();
                      if (!IsCveId(cve)) {
                        throw Error(ErrorCode::kFeedParseError,
                                    "bad CVE id '" + cve + "'");
                      }
                      list.push_back(cve);
                    }
                    std::sort(list.begin(), list.end());
                    list.erase(std::unique(list.begin(), list.end()),
                               list.end());
                  });
  return feed;
}

CveFeed LoadCveFeed(const std::filesystem::path& path) {
  return ParseCveFeed(ReadFileText(path));
}

SbomDocument LookupCves(SbomDocument doc, const CveFeed& feed) {
  bool clean = true;
  for (auto& comp : doc.components) {
    comp.cves.clear();
    const auto it = feed.entries.find({comp.product, comp.version});
    if (it != feed.entries.end()) comp.cves = it->second;
    if (!comp.cves.empty()) clean = false;
  }
  doc.whitelist_ok = clean;
  return doc;
}

nlohmann::json ToJson(const MatchConfig& config) {
  return {{"similarity", std::string(SimilarityName(config.similarity))},
          {"threshold", config.threshold},
          {"prob_epsilon", config.prob_epsilon}};
}

nlohmann::json ToJson(const MatchResult& result) {
  nlohmann::json j = {{"version_string", result.version_string},
                      {"product", nullptr},
                      {"probability", result.probability},
                      {"accepted", result.accepted}};
  if (result.product) j["product"] = *result.product;
  return j;
}

nlohmann::json ToJson(const SbomDocument& doc) {
  nlohmann::json components = nlohmann::json::array();
  for (const auto& c : doc.components) {
    components.push_back({{"product", c.product},
                          {"version", c.version},
                          {"evidence", c.evidence},
                          {"max_probability", c.max_probability},
                          {"cves", c.cves}});
  }
  nlohmann::json j = {
      {"tool",
       {{"name", doc.tool.name},
        {"version", doc.tool.version},
        {"config_hash", doc.tool.config_hash},
        {"encoder_fingerprint", doc.tool.encoder_fingerprint}}},
      {"files", doc.files},
      {"components", std::move(components)},
      {"residual", doc.residual},
      {"whitelist_ok", nullptr}};
  if (doc.whitelist_ok) j["whitelist_ok"] = *doc.whitelist_ok;
  return j;
}

nlohmann::json ToJson(const ProductIndex& index) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < index.size(); ++i) {
    entries.push_back(
        {{"product", index.products[i]}, {"vector", index.vectors[i]}});
  }
  return {{"encoder_fingerprint", index.encoder_fingerprint},
          {"entries", std::move(entries)}};
}

ProductIndex ProductIndexFromJson(const nlohmann::json& j) {
  try {
    ProductIndex index;
    index.encoder_fingerprint = j.at("encoder_fingerprint").get<std::string>();
    std::set<std::string> seen;
    for (const auto& e : j.at("entries")) {
      auto product = e.at("product").get<std::string>();
      if (!seen.insert(product).second) {
        throw Error(ErrorCode::kDuplicateProduct, product);
      }
      auto vec = e.at("vector").get<std::vector<double>>();
      if (!index.vectors.empty() && vec.size() != index.vectors[0].size()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "vector for '" + product + "' has a different length");
      }
      index.products.push_back(std::move(product));
      index.vectors.push_back(std::move(vec));
    }
    if (index.products.empty()) {
      throw Error(ErrorCode::kEmptyProductList, "index has no entries");
    }
    return index;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("bad index file: ") + e.what());
  }
}

void SaveProductIndex(const ProductIndex& index,
                      const std::filesystem::path& path) {
  WriteFileAtomic(path, ToJson(index).dump() + "\n");
}

ProductIndex LoadProductIndex(const std::filesystem::path& path) {
  const std::string text = ReadFileText(path);
  try {
    return ProductIndexFromJson(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
}

}  // namespace binsbom
