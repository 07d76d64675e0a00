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
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "binsbom/corpus.h"
#include "binsbom/error.h"
#include "binsbom/random.h"
#include "testutil.h"

namespace binsbom {
namespace {

std::vector<ScoredPair> Scored(std::vector<double> p, std::vector<int> y) {
  std::vector<ScoredPair> out;
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back({p[i], y[i]});
  return out;
}

TEST(ClassifyMetricsTest, HandCountedExample) {
  const auto r = ClassifyMetrics(Scored({0.9, 0.8, 0.4}, {1, 0, 1}), 0.5);
  EXPECT_EQ(r.counts.tp, 1u);
  EXPECT_EQ(r.counts.fp, 1u);
  EXPECT_EQ(r.counts.fn, 1u);
  EXPECT_EQ(r.counts.tn, 0u);
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0 / 3.0);
  EXPECT_EQ(r.precision, 0.5);
  EXPECT_EQ(r.recall, 0.5);
  EXPECT_EQ(r.f1, 0.5);
}

TEST(ClassifyMetricsTest, ThresholdIsInclusive) {
  const auto r = ClassifyMetrics(Scored({0.5}, {1}), 0.5);
  EXPECT_EQ(r.counts.tp, 1u);
}

TEST(ClassifyMetricsTest, SaturatedAndDegenerate) {
  const auto perfect =
      ClassifyMetrics(Scored({1 - 1e-6, 1e-6, 1 - 1e-6}, {1, 0, 1}));
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.f1, 1.0);
  const auto negatives = ClassifyMetrics(Scored({0.1, 0.2}, {0, 0}));
  EXPECT_EQ(negatives.precision, 0.0);
  EXPECT_EQ(negatives.recall, 0.0);
  EXPECT_EQ(negatives.f1, 0.0);
  EXPECT_EQ(negatives.accuracy, 1.0);
  EXPECT_THROW(ClassifyMetrics({}), Error);
}

TEST(RocAucTest, Examples) {
  EXPECT_EQ(RocAuc(Scored({0.9, 0.8, 0.4}, {1, 0, 1})), 0.5);
  EXPECT_EQ(RocAuc(Scored({0.9, 0.7, 0.2, 0.1}, {1, 1, 0, 0})), 1.0);
  EXPECT_EQ(RocAuc(Scored({0.3, 0.3, 0.3}, {1, 0, 0})), 0.5);
  try {
    RocAuc(Scored({0.2, 0.4}, {1, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateLabels);
  }
}

TEST(RocAucTest, EqualsBruteForceOnFuzz) {
  RandomEngine rng(3);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t n = 2 + rng() % 199;
    const int levels = 1 + static_cast<int>(rng() % 20);  // forces ties
    std::vector<ScoredPair> s(n);
    for (auto& p : s) {
      p.probability = static_cast<double>(rng() % levels) / levels;
      p.label = static_cast<int>(rng() % 2);
    }
    s[0].label = 1;
    s[1].label = 0;
    EXPECT_EQ(RocAuc(s), testing::BruteForceAuc(s)) << "iteration " << iter;
    const auto m = ClassifyMetrics(s, 0.5);
    EXPECT_EQ(m.counts.total(), n);
  }
}

TEST(EvaluateScoresTest, AucOnlyWithBothClasses) {
  EXPECT_FALSE(EvaluateScores(Scored({0.2, 0.9}, {1, 1})).auc.has_value());
  EXPECT_EQ(EvaluateScores(Scored({0.2, 0.9}, {0, 1})).auc, 1.0);
}

ExperimentConfig SmallExperiment(std::uint64_t seed) {
  ExperimentConfig c;
  c.root_seed = seed;
  c.vocab_size = 300;
  c.encoder.embed_dim = 8;
  c.split.k_classes = 4;
  c.split.n_per_class = 30;
  return c;
}

TEST(ExperimentTest, FullyTrainedShapesAndDeterminism) {
  const auto recs = SynthCorpus(6, 40, 1);
  const auto a = RunFullyTrained(recs, SmallExperiment(2));
  EXPECT_EQ(a.train_pairs, 384u);  // floor(0.8 * 480)
  EXPECT_EQ(a.test_pairs, 96u);
  EXPECT_TRUE(a.metrics.auc.has_value());
  EXPECT_EQ(a.loss.per_epoch_mean_loss.size(), 1u);
  const auto b = RunFullyTrained(recs, SmallExperiment(2));
  EXPECT_EQ(ToJson(a).dump(), ToJson(b).dump());
}

TEST(ExperimentTest, UntrainedModelIsNearChance) {
  const auto recs = SynthCorpus(30, 200, 1);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ExperimentConfig c;
    c.root_seed = seed;
    c.train.learning_rate = 0.0;
    const auto r = RunFullyTrained(recs, c);
    EXPECT_GE(r.metrics.accuracy, 0.4) << seed;
    EXPECT_LE(r.metrics.accuracy, 0.6) << seed;
  }
}

TEST(ExperimentTest, ZeroShotKeepsProductsDisjoint) {
  const auto recs = SynthCorpus(6, 40, 3);
  const auto r = RunZeroShot(recs, SmallExperiment(4));
  EXPECT_EQ(r.train_pairs, 4u * 30u * 2u);
  EXPECT_EQ(r.test_pairs, 2u * 40u * 2u);
  auto c = SmallExperiment(4);
  c.split.k_classes = 6;
  try {
    RunZeroShot(recs, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientClasses);
  }
}

TEST(ExperimentTest, SweepOfOneEqualsZeroShot) {
  const auto recs = SynthCorpus(6, 40, 5);
  const auto c = SmallExperiment(6);
  const std::size_t one[] = {1};
  const auto rows = RunEpochSweep(recs, c, one);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].epochs, 1u);
  EXPECT_EQ(ToJson(rows[0].result).dump(), ToJson(RunZeroShot(recs, c)).dump());
}

TEST(ReferenceTest, PublishedRowsAreRecorded) {
  EXPECT_EQ(kReferenceFullyTrained.accuracy, 0.9290);
  EXPECT_EQ(kReferenceFullyTrained.auc, 0.9810);
  EXPECT_EQ(kReferenceZeroShot.accuracy, 0.8518);
  EXPECT_EQ(kReferenceZeroShot.f1, 0.8330);
  EXPECT_EQ(kReferenceEpochSweep[3].accuracy, 0.5579);
  EXPECT_EQ(kReferenceEpochSweep[3].f1, 0.3182);
  EXPECT_EQ(kReferenceSimilarity[1].recall, 0.90687);
  EXPECT_FALSE(kReferenceSimilarity[0].auc.has_value());
}

TEST(FormatTableTest, AlignedColumnsAndMissingAuc) {
  MetricsReport m;
  m.accuracy = 0.92904;
  m.precision = 0.5;
  m.recall = 1.0;
  m.f1 = 2.0 / 3.0;
  const std::vector<TableRow> rows = {{"Cosine", m}};
  const std::string table = FormatMetricsTable("Similarity", rows);
  EXPECT_EQ(table,
            "Similarity  Accuracy  AUC  Precision  Recall  F-1 Score\n"
            "-------------------------------------------------------\n"
            "Cosine      0.9290    -    0.5000     1.0000  0.6667\n");
}

}  // namespace
}  // namespace binsbom
