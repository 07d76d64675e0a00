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

// Binary classification metrics and the end-to-end experiment runners
// (fully trained, zero-shot, epoch sweep).

#ifndef BINSBOM_EVALX_H_
#define BINSBOM_EVALX_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "binsbom/corpus.h"
#include "binsbom/encoder.h"
#include "binsbom/simtrain.h"

namespace binsbom {

struct ScoredPair {
  double probability = 0.5;
  int label = 0;
};

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::optional<double> auc;  // absent when one class is missing
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double threshold = 0.5;
  ConfusionCounts counts;

  bool operator==(const MetricsReport&) const = default;
};

// Predicts 1 iff probability >= threshold. Precision, recall and F1 are 0
// when their denominators are 0. Throws kEmptyInput. Does not fill `auc`.
MetricsReport ClassifyMetrics(std::span<const ScoredPair> scored,
                              double threshold = 0.5);

// Mann-Whitney AUC by rank summation with tied ranks averaged. Throws
// kDegenerateLabels unless both classes are present.
double RocAuc(std::span<const ScoredPair> scored);

// ClassifyMetrics plus AUC when both classes are present.
MetricsReport EvaluateScores(std::span<const ScoredPair> scored,
                             double threshold = 0.5);

struct ExperimentConfig {
  SplitSpec split;
  TrainConfig train;
  EncoderConfig encoder;  // vocab_size, pad_id and seed are filled in
  std::size_t vocab_size = kDefaultVocabSize;
  std::size_t negatives_per_positive = 1;
  double threshold = 0.5;
  std::uint64_t root_seed = 0;
};

struct ExperimentResult {
  MetricsReport metrics;
  LossReport loss;
  std::size_t train_pairs = 0;
  std::size_t test_pairs = 0;
};

// make_pairs -> random split -> vocabulary on the train side -> train ->
// score the test side. Every seed is derived from config.root_seed.
ExperimentResult RunFullyTrained(std::span<const VersionStringRecord> records,
                                 const ExperimentConfig& config);

// Zero-shot split -> vocabulary on the train side -> train -> score the
// test side. Train and test product sets are disjoint by construction and
// checked before returning.
ExperimentResult RunZeroShot(std::span<const VersionStringRecord> records,
                             const ExperimentConfig& config);

struct SweepRow {
  std::size_t epochs = 0;
  ExperimentResult result;
};

// One independent zero-shot training run per entry, all sharing the data
// split, vocabulary and initial parameters.
std::vector<SweepRow> RunEpochSweep(
    std::span<const VersionStringRecord> records,
    const ExperimentConfig& config,
    std::span<const std::size_t> epochs_list);

inline constexpr std::array<std::size_t, 4> kDefaultSweepEpochs = {1, 2, 5,
                                                                   10};

// Published full-scale results, kept for side-by-side display. They come
// from a large proprietary corpus and a pretrained transformer, and are not
// expected to be reproduced by the reference encoder.
struct ReferenceRow {
  std::string_view label;
  double accuracy;
  std::optional<double> auc;
  double precision;
  double recall;
  std::optional<double> f1;
};
inline constexpr ReferenceRow kReferenceFullyTrained = {
    "Fully-Trained", 0.9290, 0.9810, 0.9447, 0.9126, 0.9284};
inline constexpr ReferenceRow kReferenceZeroShot = {
    "Zero-Shot", 0.8518, 0.9016, 0.9512, 0.7410, 0.8330};
inline constexpr std::array<ReferenceRow, 2> kReferenceSimilarity = {{
    {"Cosine", 0.9290, std::nullopt, 0.9447, 0.9126, std::nullopt},
    {"Dot Product", 0.9267, std::nullopt, 0.9452, 0.90687, std::nullopt},
}};
inline constexpr std::array<ReferenceRow, 4> kReferenceEpochSweep = {{
    {"1", 0.8518, 0.9016, 0.9512, 0.7410, 0.8330},
    {"2", 0.8225, 0.8783, 0.9967, 0.6463, 0.7841},
    {"5", 0.7383, 0.7733, 0.9777, 0.4866, 0.6498},
    {"10", 0.5579, 0.6267, 0.6901, 0.2068, 0.3182},
}};

nlohmann::json ToJson(const MetricsReport& report);
nlohmann::json ToJson(const ExperimentResult& result);
nlohmann::json ToJson(const ReferenceRow& row);

struct TableRow {
  std::string label;
  MetricsReport metrics;
};

// Aligned text table: <first_column> | Accuracy | AUC | Precision | Recall |
// F-1 Score.
std::string FormatMetricsTable(std::string_view first_column,
                               std::span<const TableRow> rows);

}  // namespace binsbom

#endif  // BINSBOM_EVALX_H_
