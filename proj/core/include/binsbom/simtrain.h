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

// Similarity functions, the pair probability / cross-entropy objective and
// the siamese mini-batch gradient-descent trainer.

#ifndef BINSBOM_SIMTRAIN_H_
#define BINSBOM_SIMTRAIN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "binsbom/corpus.h"
#include "binsbom/encoder.h"
#include "binsbom/tokenizer.h"

namespace binsbom {

enum class SimilarityKind { kCosine, kDot };

std::string_view SimilarityName(SimilarityKind kind);
// Accepts "cosine" or "dot"; throws kInvalidArgument otherwise.
SimilarityKind ParseSimilarity(std::string_view name);

struct TrainConfig {
  std::size_t batch_size = 64;
  std::size_t epochs = 1;
  double learning_rate = 0.05;
  SimilarityKind similarity = SimilarityKind::kCosine;
  double prob_epsilon = 1e-6;
  std::uint64_t seed = 0;
};

// Throws kInvalidArgument for batch_size or epochs of 0, a negative or
// non-finite learning rate, or prob_epsilon outside (0, 0.5).
void ValidateTrainConfig(const TrainConfig& config);

// Flat "key = value" lines; '#' starts a comment. Unknown keys are rejected.
TrainConfig ParseTrainConfig(std::string_view text,
                             TrainConfig defaults = TrainConfig());

struct LossReport {
  std::vector<double> per_epoch_mean_loss;
  std::size_t steps = 0;

  bool operator==(const LossReport&) const = default;
};

// u.v / (|u| |v|), clamped to [-1, 1]. Throws kZeroVector if either norm is
// zero and kDimensionMismatch on unequal lengths.
double CosineSim(std::span<const double> u, std::span<const double> v);

// sum_i u_i v_i. Throws kDimensionMismatch on unequal lengths.
double DotSim(std::span<const double> u, std::span<const double> v);

double Similarity(SimilarityKind kind, std::span<const double> u,
                  std::span<const double> v);

// Cosine: (s + 1) / 2. Dot: logistic(s). Both clamped to
// [epsilon, 1 - epsilon].
double PairProbability(double score, SimilarityKind kind,
                       double epsilon = 1e-6);

// Binary cross-entropy -[y ln p + (1 - y) ln(1 - p)].
double PairLoss(double probability, int label);

// Loss of one (product, version string) pair under `model`, both towers
// sharing its parameters. When `grad` is non-null the parameter gradient is
// accumulated into it. A zero-norm embedding under cosine similarity scores 0
// and contributes no gradient.
double PairObjective(const EmbeddingModel& model,
                     std::span<const int> product_ids,
                     std::span<const int> string_ids, int label,
                     SimilarityKind kind, double epsilon,
                     ModelGradient* grad);

struct TrainResult {
  EmbeddingModel model;
  LossReport report;
};

// Per epoch: seeded shuffle, batches of batch_size (the last may be
// smaller), mean-batch gradient descent. Throws kEmptyDataset for no pairs,
// kDimensionMismatch when the model and vocabulary disagree, and
// kNonFiniteLoss (naming the step) if training diverges.
TrainResult Train(EmbeddingModel model, const WordPieceVocab& vocab,
                  std::span<const LabeledPair> pairs,
                  const TrainConfig& config);

// Probability that each pair is correlated.
std::vector<double> ScorePairs(const EmbeddingModel& model,
                               const WordPieceVocab& vocab,
                               std::span<const LabeledPair> pairs,
                               SimilarityKind kind, double epsilon = 1e-6);

nlohmann::json ToJson(const LossReport& report);
nlohmann::json ToJson(const TrainConfig& config);

}  // namespace binsbom

#endif  // BINSBOM_SIMTRAIN_H_
