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

#include "binsbom/simtrain.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "binsbom/error.h"
#include "binsbom/random.h"

namespace binsbom {
namespace {

void CheckSameLength(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
}

double Norm(std::span<const double> u) {
  double s = 0.0;
  for (double x : u) s += x * x;
  return std::sqrt(s);
}

double Logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Tokenizes each distinct text once.
class TokenCache {
 public:
  explicit TokenCache(const WordPieceVocab& vocab) : vocab_(vocab) {}

  const std::vector<int>& Get(const std::string& text) {
    auto it = cache_.find(text);
    if (it == cache_.end()) {
      it = cache_.emplace(text, Tokenize(text, vocab_).ids).first;
    }
    return it->second;
  }

 private:
  const WordPieceVocab& vocab_;
  std::unordered_map<std::string, std::vector<int>> cache_;
};

}  // namespace

std::string_view SimilarityName(SimilarityKind kind) {
  return kind == SimilarityKind::kCosine ? "cosine" : "dot";
}

SimilarityKind ParseSimilarity(std::string_view name) {
  if (name == "cosine") return SimilarityKind::kCosine;
  if (name == "dot") return SimilarityKind::kDot;
  throw Error(ErrorCode::kInvalidArgument,
              "similarity must be 'cosine' or 'dot', got '" +
                  std::string(name) + "'");
}

void ValidateTrainConfig(const TrainConfig& config) {
  if (config.batch_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch_size must be positive");
  }
  if (config.epochs == 0) {
    throw Error(ErrorCode::kInvalidArgument, "epochs must be positive");
  }
  if (!std::isfinite(config.learning_rate) || config.learning_rate < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "learning_rate must be finite and non-negative");
  }
  if (!(config.prob_epsilon > 0.0 && config.prob_epsilon < 0.5)) {
    throw Error(ErrorCode::kInvalidArgument,
                "prob_epsilon must lie in (0, 0.5)");
  }
}

TrainConfig ParseTrainConfig(std::string_view text, TrainConfig defaults) {
  TrainConfig config = defaults;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (Trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config line " + std::to_string(line_no) + ": missing '='");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    try {
      if (key == "batch_size") {
        config.batch_size = std::stoull(value);
      } else if (key == "epochs") {
        config.epochs = std::stoull(value);
      } else if (key == "learning_rate" || key == "lr") {
        config.learning_rate = std::stod(value);
      } else if (key == "similarity") {
        config.similarity = ParseSimilarity(value);
      } else if (key == "prob_epsilon") {
        config.prob_epsilon = std::stod(value);
      } else if (key == "seed") {
        config.seed = std::stoull(value);
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config line " + std::to_string(line_no) + ": bad value '" +
                      value + "' for " + key);
    }
  }
  ValidateTrainConfig(config);
  return config;
}

double CosineSim(std::span<const double> u, std::span<const double> v) {
  CheckSameLength(u, v);
  const double nu = Norm(u);
  const double nv = Norm(v);
  if (nu == 0.0 || nv == 0.0) {
    throw Error(ErrorCode::kZeroVector, "cosine similarity of a zero vector");
  }
  const double s = DotSim(u, v) / (nu * nv);
  return std::clamp(s, -1.0, 1.0);
}

double DotSim(std::span<const double> u, std::span<const double> v) {
  CheckSameLength(u, v);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double Similarity(SimilarityKind kind, std::span<const double> u,
                  std::span<const double> v) {
  return kind == SimilarityKind::kCosine ? CosineSim(u, v) : DotSim(u, v);
}

double PairProbability(double score, SimilarityKind kind, double epsilon) {
  const double p =
      kind == SimilarityKind::kCosine ? (score + 1.0) / 2.0 : Logistic(score);
  return std::clamp(p, epsilon, 1.0 - epsilon);
}

double PairLoss(double probability, int label) {
  return label == 1 ? -std::log(probability) : -std::log(1.0 - probability);
}

double PairObjective(const EmbeddingModel& model,
                     std::span<const int> product_ids,
                     std::span<const int> string_ids, int label,
                     SimilarityKind kind, double epsilon,
                     ModelGradient* grad) {
  const Embedding u = Encode(model, product_ids);
  const Embedding v = Encode(model, string_ids);
  const std::size_t dim = u.size();

  double score = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  bool degenerate = false;
  if (kind == SimilarityKind::kCosine) {
    nu = Norm(u);
    nv = Norm(v);
    degenerate = nu == 0.0 || nv == 0.0;
    if (!degenerate) score = DotSim(u, v) / (nu * nv);
  } else {
    score = DotSim(u, v);
  }

  const double raw_p = kind == SimilarityKind::kCosine
                           ? (std::clamp(score, -1.0, 1.0) + 1.0) / 2.0
                           : Logistic(score);
  const double p = std::clamp(raw_p, epsilon, 1.0 - epsilon);
  const double loss = PairLoss(p, label);
  if (grad == nullptr || degenerate) return loss;
  if (raw_p < epsilon || raw_p > 1.0 - epsilon) return loss;  // clamp is flat

  // dL/dp, then through the probability link to dL/ds.
  const double dl_dp = label == 1 ? -1.0 / p : 1.0 / (1.0 - p);
  const double dp_ds =
      kind == SimilarityKind::kCosine ? 0.5 : raw_p * (1.0 - raw_p);
  const double dl_ds = dl_dp * dp_ds;

  std::vector<double> gu(dim);
  std::vector<double> gv(dim);
  if (kind == SimilarityKind::kCosine) {
    const double inv = 1.0 / (nu * nv);
    for (std::size_t i = 0; i < dim; ++i) {
      gu[i] = dl_ds * (v[i] * inv - score * u[i] / (nu * nu));
      gv[i] = dl_ds * (u[i] * inv - score * v[i] / (nv * nv));
    }
  } else {
    for (std::size_t i = 0; i < dim; ++i) {
      gu[i] = dl_ds * v[i];
      gv[i] = dl_ds * u[i];
    }
  }
  EncodeBackward(model, product_ids, gu, *grad);
  EncodeBackward(model, string_ids, gv, *grad);
  return loss;
}

TrainResult Train(EmbeddingModel model, const WordPieceVocab& vocab,
                  std::span<const LabeledPair> pairs,
                  const TrainConfig& config) {
  ValidateTrainConfig(config);
  if (pairs.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no training pairs");
  }
  if (vocab.size() != model.config.vocab_size) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vocabulary has " + std::to_string(vocab.size()) +
                    " pieces, model expects " +
                    std::to_string(model.config.vocab_size));
  }

  TokenCache tokens(vocab);
  std::vector<const std::vector<int>*> product_ids;
  std::vector<const std::vector<int>*> string_ids;
  for (const auto& p : pairs) {
    product_ids.push_back(&tokens.Get(p.product));
    string_ids.push_back(&tokens.Get(p.version_string));
  }

  RandomEngine rng(config.seed);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  ModelGradient grad(model);
  TrainResult result;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      grad.Clear();
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        const double loss = PairObjective(
            model, *product_ids[i], *string_ids[i], pairs[i].label,
            config.similarity, config.prob_epsilon, &grad);
        if (!std::isfinite(loss)) {
          throw Error(ErrorCode::kNonFiniteLoss,
                      "at step " + std::to_string(result.report.steps));
        }
        epoch_loss += loss;
      }
      ApplyGradient(model, grad, config.learning_rate,
                    1.0 / static_cast<double>(end - start));
      if (!AllFinite(model)) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "parameters diverged at step " +
                        std::to_string(result.report.steps));
      }
      ++result.report.steps;
    }
    result.report.per_epoch_mean_loss.push_back(
        epoch_loss / static_cast<double>(pairs.size()));
  }
  result.model = std::move(model);
  return result;
}

std::vector<double> ScorePairs(const EmbeddingModel& model,
                               const WordPieceVocab& vocab,
                               std::span<const LabeledPair> pairs,
                               SimilarityKind kind, double epsilon) {
  TokenCache tokens(vocab);
  std::unordered_map<std::string, Embedding> embedded;
  auto embed = [&](const std::string& text) -> const Embedding& {
    auto it = embedded.find(text);
    if (it == embedded.end()) {
      it = embedded.emplace(text, Encode(model, tokens.Get(text))).first;
    }
    return it->second;
  };
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const Embedding& u = embed(p.product);
    const Embedding& v = embed(p.version_string);
    double score = 0.0;
    if (kind == SimilarityKind::kCosine) {
      if (Norm(u) > 0.0 && Norm(v) > 0.0) score = CosineSim(u, v);
    } else {
      score = DotSim(u, v);
    }
    out.push_back(PairProbability(score, kind, epsilon));
  }
  return out;
}

nlohmann::json ToJson(const LossReport& report) {
  return {{"per_epoch_mean_loss", report.per_epoch_mean_loss},
          {"steps", report.steps}};
}

nlohmann::json ToJson(const TrainConfig& config) {
  return {{"batch_size", config.batch_size},
          {"epochs", config.epochs},
          {"learning_rate", config.learning_rate},
          {"similarity", std::string(SimilarityName(config.similarity))},
          {"prob_epsilon", config.prob_epsilon},
          {"seed", config.seed}};
}

}  // namespace binsbom
