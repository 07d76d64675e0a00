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

#include "binsbom/evalx.h"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "binsbom/error.h"
#include "binsbom/random.h"
#include "binsbom/tokenizer.h"

namespace binsbom {
namespace {

// Every distinct text seen on the training side, in first-seen order.
std::vector<std::string> VocabularyTexts(std::span<const LabeledPair> pairs) {
  std::set<std::string> seen;
  std::vector<std::string> texts;
  for (const auto& p : pairs) {
    if (seen.insert(p.product).second) texts.push_back(p.product);
    if (seen.insert(p.version_string).second) {
      texts.push_back(p.version_string);
    }
  }
  return texts;
}

struct Prepared {
  TrainTest<LabeledPair> pairs;
  WordPieceVocab vocab;
  EmbeddingModel initial;
  TrainConfig train;
};

Prepared Prepare(TrainTest<LabeledPair> pairs, const ExperimentConfig& config) {
  if (pairs.train.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "training side is empty");
  }
  const auto texts = VocabularyTexts(pairs.train);
  WordPieceVocab vocab = TrainVocab(texts, config.vocab_size);
  EncoderConfig enc = config.encoder;
  enc.vocab_size = vocab.size();
  enc.pad_id = vocab.pad_id();
  enc.seed = DeriveSeed(config.root_seed, "encoder/init");
  EmbeddingModel initial = InitModel(enc);
  TrainConfig train = config.train;
  train.seed = DeriveSeed(config.root_seed, "train");
  return {std::move(pairs), std::move(vocab), std::move(initial), train};
}

ExperimentResult TrainAndScore(const Prepared& prep, std::size_t epochs,
                               double threshold) {
  TrainConfig train = prep.train;
  train.epochs = epochs;
  TrainResult trained = Train(prep.initial, prep.vocab, prep.pairs.train, train);
  const auto probs = ScorePairs(trained.model, prep.vocab, prep.pairs.test,
                                train.similarity, train.prob_epsilon);
  std::vector<ScoredPair> scored;
  scored.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    scored.push_back({probs[i], prep.pairs.test[i].label});
  }
  ExperimentResult result;
  result.metrics = EvaluateScores(scored, threshold);
  result.loss = std::move(trained.report);
  result.train_pairs = prep.pairs.train.size();
  result.test_pairs = prep.pairs.test.size();
  return result;
}

Prepared PrepareZeroShot(std::span<const VersionStringRecord> records,
                         const ExperimentConfig& config) {
  SplitSpec spec = config.split;
  spec.mode = SplitMode::kZeroShot;
  spec.seed = DeriveSeed(config.root_seed, "split");
  auto pairs = SplitZeroShot(records, spec, config.negatives_per_positive,
                             DeriveSeed(config.root_seed, "pairs"));
  std::set<std::string> train_products;
  for (const auto& p : pairs.train) train_products.insert(p.product);
  for (const auto& p : pairs.test) {
    if (train_products.count(p.product) > 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "zero-shot split leaked product '" + p.product + "'");
    }
  }
  return Prepare(std::move(pairs), config);
}

std::string FormatCell(std::optional<double> v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

}  // namespace

MetricsReport ClassifyMetrics(std::span<const ScoredPair> scored,
                              double threshold) {
  if (scored.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no scored pairs");
  }
  MetricsReport r;
  r.threshold = threshold;
  for (const auto& s : scored) {
    const bool predicted = s.probability >= threshold;
    const bool actual = s.label == 1;
    if (predicted && actual) ++r.counts.tp;
    if (predicted && !actual) ++r.counts.fp;
    if (!predicted && !actual) ++r.counts.tn;
    if (!predicted && actual) ++r.counts.fn;
  }
  const auto& c = r.counts;
  r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  r.precision =
      c.tp + c.fp > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
  r.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
  r.f1 = r.precision + r.recall > 0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

double RocAuc(std::span<const ScoredPair> scored) {
  std::size_t n_pos = 0;
  for (const auto& s : scored) n_pos += s.label == 1 ? 1 : 0;
  const std::size_t n_neg = scored.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorCode::kDegenerateLabels,
                "AUC needs at least one positive and one negative");
  }
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].probability < scored[b].probability;
  });
  // Twice the 1-based average rank keeps everything in integers.
  std::uint64_t pos_rank_sum_x2 = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() &&
           scored[order[j]].probability == scored[order[i]].probability) {
      ++j;
    }
    const std::uint64_t rank_x2 = (i + 1) + j;  // (i+1 + j) / 2, doubled
    for (std::size_t k = i; k < j; ++k) {
      if (scored[order[k]].label == 1) pos_rank_sum_x2 += rank_x2;
    }
    i = j;
  }
  const std::uint64_t u_x2 = pos_rank_sum_x2 - n_pos * (n_pos + 1);
  return static_cast<double>(u_x2) / (2.0 * static_cast<double>(n_pos) *
                                      static_cast<double>(n_neg));
}

MetricsReport EvaluateScores(std::span<const ScoredPair> scored,
                             double threshold) {
  MetricsReport r = ClassifyMetrics(scored, threshold);
  const std::size_t n_pos = r.counts.tp + r.counts.fn;
  if (n_pos > 0 && n_pos < scored.size()) r.auc = RocAuc(scored);
  return r;
}

ExperimentResult RunFullyTrained(std::span<const VersionStringRecord> records,
                                 const ExperimentConfig& config) {
  const auto pairs = MakePairs(records, config.negatives_per_positive,
                               DeriveSeed(config.root_seed, "pairs"));
  SplitSpec spec = config.split;
  spec.mode = SplitMode::kRandom;
  spec.seed = DeriveSeed(config.root_seed, "split");
  const Prepared prep = Prepare(SplitRandom(pairs, spec), config);
  return TrainAndScore(prep, config.train.epochs, config.threshold);
}

ExperimentResult RunZeroShot(std::span<const VersionStringRecord> records,
                             const ExperimentConfig& config) {
  const Prepared prep = PrepareZeroShot(records, config);
  return TrainAndScore(prep, config.train.epochs, config.threshold);
}

std::vector<SweepRow> RunEpochSweep(
    std::span<const VersionStringRecord> records,
    const ExperimentConfig& config, std::span<const std::size_t> epochs_list) {
  const Prepared prep = PrepareZeroShot(records, config);
  std::vector<SweepRow> rows;
  for (std::size_t epochs : epochs_list) {
    rows.push_back({epochs, TrainAndScore(prep, epochs, config.threshold)});
  }
  return rows;
}

nlohmann::json ToJson(const MetricsReport& report) {
  nlohmann::json j = {{"accuracy", report.accuracy},
                      {"auc", nullptr},
                      {"precision", report.precision},
                      {"recall", report.recall},
                      {"f1", report.f1},
                      {"threshold", report.threshold},
                      {"counts",
                       {{"tp", report.counts.tp},
                        {"fp", report.counts.fp},
                        {"tn", report.counts.tn},
                        {"fn", report.counts.fn}}}};
  if (report.auc) j["auc"] = *report.auc;
  return j;
}

nlohmann::json ToJson(const ExperimentResult& result) {
  return {{"metrics", ToJson(result.metrics)},
          {"loss", ToJson(result.loss)},
          {"train_pairs", result.train_pairs},
          {"test_pairs", result.test_pairs}};
}

nlohmann::json ToJson(const ReferenceRow& row) {
  nlohmann::json j = {{"label", std::string(row.label)},
                      {"accuracy", row.accuracy},
                      {"precision", row.precision},
                      {"recall", row.recall},
                      {"auc", nullptr},
                      {"f1", nullptr}};
  if (row.auc) j["auc"] = *row.auc;
  if (row.f1) j["f1"] = *row.f1;
  return j;
}

std::string FormatMetricsTable(std::string_view first_column,
                               std::span<const TableRow> rows) {
  const std::vector<std::string> headers = {std::string(first_column),
                                            "Accuracy",  "AUC",
                                            "Precision", "Recall",
                                            "F-1 Score"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : rows) {
    const auto& m = row.metrics;
    cells.push_back({row.label, FormatCell(m.accuracy), FormatCell(m.auc),
                     FormatCell(m.precision), FormatCell(m.recall),
                     FormatCell(m.f1)});
  }
  std::vector<std::size_t> width(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    width[c] = headers[c].size();
    for (const auto& r : cells) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c > 0) out << "  ";
      out << r[c];
      if (c + 1 < r.size()) out << std::string(width[c] - r[c].size(), ' ');
    }
    out << "\n";
  };
  emit(headers);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << "\n";
  for (const auto& r : cells) emit(r);
  return out.str();
}

}  // namespace binsbom
