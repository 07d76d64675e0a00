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
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "binsbom/binscan.h"
#include "binsbom/error.h"
#include "testutil.h"

namespace binsbom {
namespace {

VersionStringRecord Rec(std::string product, std::string s) {
  return {product, product + "-1.0", "1.0", std::move(s)};
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

// Corpus with product i holding sizes[i] records.
std::vector<VersionStringRecord> SizedCorpus(const std::vector<int>& sizes) {
  std::vector<VersionStringRecord> out;
  for (std::size_t p = 0; p < sizes.size(); ++p) {
    const std::string name = "prod" + std::to_string(100 + p);
    for (int i = 0; i < sizes[p]; ++i) {
      out.push_back(Rec(name, name + " 1.0." + std::to_string(i)));
    }
  }
  return out;
}

TEST(NormalizeProductTest, TrimsAndLowercases) {
  EXPECT_EQ(NormalizeProduct("  OpenSSL\t"), "openssl");
  EXPECT_EQ(NormalizeProduct("zlib"), "zlib");
  EXPECT_EQ(NormalizeProduct("   "), "");
}

TEST(IngestPackageTest, RecordsFromElfCandidates) {
  const InputFile elf{"libz.so", testing::MakeElf(std::string(
                                     "1.2.13\0inflate 1.2.13\0other\0", 28))};
  const auto records =
      IngestPackage(std::span(&elf, 1), {"Zlib", "zlib-1.2.13", "1.2.13"}, {});
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].version_string, "1.2.13");
  EXPECT_EQ(records[1].version_string, "inflate 1.2.13");
  for (const auto& r : records) {
    EXPECT_EQ(r.product, "zlib");
    EXPECT_EQ(r.package, "zlib-1.2.13");
    EXPECT_EQ(r.version, "1.2.13");
  }
}

TEST(IngestPackageTest, DuplicateStringsCollapseAcrossFiles) {
  const std::vector<InputFile> files = {
      {"a.so", testing::MakeElf(std::string("zlib 1.2.13\0", 12))},
      {"b.so", testing::MakeElf(std::string("zlib 1.2.13\0", 12))},
      {"readme", testing::Bytes("zlib 9.9.9")}};
  const auto records =
      IngestPackage(files, {"zlib", "zlib-1.2.13", "1.2.13"}, {});
  ASSERT_EQ(records.size(), 1u);
}

TEST(IngestPackageTest, NoCandidatesAndMetadataMismatch) {
  const InputFile elf{"x", testing::MakeElf("nothing here")};
  EXPECT_TRUE(
      IngestPackage(std::span(&elf, 1), {"zlib", "zlib-1.2.13", "1.2.13"}, {})
          .empty());
  EXPECT_EQ(CodeOf([&] {
              IngestPackage(std::span(&elf, 1), {"zlib", "zlib-1.2.13", "9.9"},
                            {});
            }),
            ErrorCode::kMetadataMismatch);
}

TEST(MakePairsTest, ZeroNegativesGivesOnlyPositives) {
  const std::vector<VersionStringRecord> recs = {Rec("a", "a 1.0")};
  const auto pairs = MakePairs(recs, 0, 1);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].label, 1);
  EXPECT_EQ(pairs[0].product, "a");
}

TEST(MakePairsTest, TwoProductsEnumerateTheOnlyOutcome) {
  const std::vector<VersionStringRecord> recs = {Rec("a", "a 1.0"),
                                                 Rec("b", "b 2.0")};
  const std::vector<LabeledPair> want = {{"a", "a 1.0", 1},
                                         {"b", "a 1.0", 0},
                                         {"b", "b 2.0", 1},
                                         {"a", "b 2.0", 0}};
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    EXPECT_EQ(MakePairs(recs, 1, seed), want);
  }
}

TEST(MakePairsTest, InsufficientProducts) {
  const std::vector<VersionStringRecord> one = {Rec("a", "a 1.0"),
                                                Rec("a", "a 2.0")};
  EXPECT_EQ(CodeOf([&] { MakePairs(one, 1, 0); }),
            ErrorCode::kInsufficientProducts);
  const std::vector<VersionStringRecord> two = {Rec("a", "a 1.0"),
                                                Rec("b", "b 1.0")};
  EXPECT_EQ(CodeOf([&] { MakePairs(two, 2, 0); }),
            ErrorCode::kInsufficientProducts);
}

TEST(MakePairsTest, CountsNegativesAndDeterminism) {
  const auto recs = SynthCorpus(8, 50, 3);
  const auto pairs = MakePairs(recs, 3, 17);
  EXPECT_EQ(pairs, MakePairs(recs, 3, 17));
  EXPECT_NE(pairs, MakePairs(recs, 3, 18));
  ASSERT_EQ(pairs.size(), recs.size() * 4);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    std::set<std::string> negs;
    for (std::size_t j = 0; j < 4; ++j) {
      const auto& p = pairs[i * 4 + j];
      EXPECT_EQ(p.version_string, recs[i].version_string);
      if (j == 0) {
        EXPECT_EQ(p.label, 1);
        EXPECT_EQ(p.product, recs[i].product);
        ++positives;
      } else {
        EXPECT_EQ(p.label, 0);
        EXPECT_NE(p.product, recs[i].product);
        negs.insert(p.product);
      }
    }
    EXPECT_EQ(negs.size(), 3u) << "negatives drawn with replacement";
  }
  EXPECT_EQ(positives, recs.size());
}

TEST(MakePairsTest, LargeCorpusIsDeterministic) {
  const auto recs = SynthCorpus(40, 250, 8);
  ASSERT_EQ(recs.size(), 10000u);
  EXPECT_EQ(MakePairs(recs, 1, 5), MakePairs(recs, 1, 5));
}

TEST(SplitRandomTest, SizesAndDeterminism) {
  std::vector<LabeledPair> pairs;
  for (int i = 0; i < 10; ++i) pairs.push_back({"p", std::to_string(i), i % 2});
  SplitSpec spec;
  spec.seed = 4;
  const auto split = SplitRandom(pairs, spec);
  EXPECT_EQ(split.train.size(), 8u);
  EXPECT_EQ(split.test.size(), 2u);
  const auto again = SplitRandom(pairs, spec);
  EXPECT_EQ(split.train, again.train);
  EXPECT_EQ(split.test, again.test);

  auto all = split.train;
  all.insert(all.end(), split.test.begin(), split.test.end());
  auto by_text = [](const LabeledPair& a, const LabeledPair& b) {
    return a.version_string < b.version_string;
  };
  std::sort(all.begin(), all.end(), by_text);
  auto sorted = pairs;
  std::sort(sorted.begin(), sorted.end(), by_text);
  EXPECT_EQ(all, sorted);
}

TEST(SplitRandomTest, EmptyInputAndBadSpec) {
  const auto split = SplitRandom({}, SplitSpec{});
  EXPECT_TRUE(split.train.empty());
  EXPECT_TRUE(split.test.empty());
  SplitSpec zs;
  zs.mode = SplitMode::kZeroShot;
  EXPECT_THROW(SplitRandom({}, zs), Error);
  SplitSpec bad;
  bad.train_fraction = 1.5;
  EXPECT_THROW(SplitRandom({}, bad), Error);
}

TEST(SplitZeroShotTest, TwentyLargestFillTrain) {
  std::vector<int> sizes;
  for (int s = 100; s >= 76; --s) sizes.push_back(s);
  const auto recs = SizedCorpus(sizes);
  SplitSpec spec;
  spec.mode = SplitMode::kZeroShot;
  spec.k_classes = 20;
  spec.n_per_class = 50;
  spec.seed = 2;
  const auto split = ZeroShotRecords(recs, spec);
  EXPECT_EQ(split.train.size(), 20u * 50u);
  std::map<std::string, int> train_counts;
  for (const auto& r : split.train) ++train_counts[r.product];
  EXPECT_EQ(train_counts.size(), 20u);
  for (const auto& [p, n] : train_counts) EXPECT_EQ(n, 50) << p;
  // The five smallest (80..76) go entirely to test.
  EXPECT_EQ(split.test.size(), 80u + 79 + 78 + 77 + 76);
  for (const auto& r : split.test) {
    EXPECT_EQ(train_counts.count(r.product), 0u);
    EXPECT_GE(r.product, "prod120");
  }
}

TEST(SplitZeroShotTest, SizeTiesBreakByName) {
  const auto recs = SizedCorpus({5, 5, 5});  // prod100, prod101, prod102
  SplitSpec spec;
  spec.mode = SplitMode::kZeroShot;
  spec.k_classes = 2;
  spec.n_per_class = 10;
  const auto split = ZeroShotRecords(recs, spec);
  EXPECT_EQ(split.train.size(), 10u);  // smaller classes give everything
  for (const auto& r : split.test) EXPECT_EQ(r.product, "prod102");
}

TEST(SplitZeroShotTest, InsufficientClasses) {
  const auto recs = SizedCorpus({3, 3, 3});
  SplitSpec spec;
  spec.mode = SplitMode::kZeroShot;
  spec.k_classes = 3;
  EXPECT_EQ(CodeOf([&] { ZeroShotRecords(recs, spec); }),
            ErrorCode::kInsufficientClasses);
}

TEST(SplitZeroShotTest, PairsNeverCrossTheProductBoundary) {
  std::mt19937_64 rng(21);
  for (int iter = 0; iter < 30; ++iter) {
    const std::size_t n_products = 4 + rng() % 20;
    const auto recs = SynthCorpus(n_products, 5 + rng() % 30, rng());
    SplitSpec spec;
    spec.mode = SplitMode::kZeroShot;
    spec.k_classes = 2 + rng() % (n_products - 3);
    spec.n_per_class = 1 + rng() % 40;
    spec.seed = rng();
    const auto split = SplitZeroShot(recs, spec, 1, rng());
    std::set<std::string> train, test;
    for (const auto& p : split.train) train.insert(p.product);
    for (const auto& p : split.test) test.insert(p.product);
    for (const auto& p : test) EXPECT_EQ(train.count(p), 0u) << p;
    EXPECT_EQ(train.size(), spec.k_classes);
  }
}

TEST(SynthCorpusTest, CardinalityPatternAndDeterminism) {
  const auto recs = SynthCorpus(30, 200, 1);
  EXPECT_EQ(recs.size(), 6000u);
  std::set<std::string> products;
  const VersionPattern pattern;
  for (const auto& r : recs) {
    products.insert(r.product);
    EXPECT_TRUE(pattern.Matches(r.version_string)) << r.version_string;
    EXPECT_NE(r.package.find(r.version), std::string::npos);
    EXPECT_NE(r.version_string.find(r.product), std::string::npos);
    EXPECT_EQ(NormalizeProduct(r.product), r.product);
  }
  EXPECT_EQ(products.size(), 30u);
  EXPECT_EQ(recs, SynthCorpus(30, 200, 1));
  EXPECT_NE(recs, SynthCorpus(30, 200, 2));
  EXPECT_THROW(SynthCorpus(1, 10, 0), Error);
}

TEST(JsonlTest, RecordsAndPairsRoundTrip) {
  testing::TempDir dir;
  const auto recs = SynthCorpus(10, 100, 6);
  SaveJsonl(recs, dir / "r.jsonl");
  EXPECT_EQ(LoadRecords(dir / "r.jsonl"), recs);
  const auto pairs = MakePairs(recs, 2, 6);
  SaveJsonl(pairs, dir / "p.jsonl");
  EXPECT_EQ(LoadPairs(dir / "p.jsonl"), pairs);
}

TEST(JsonlTest, EmptyFileAndMalformedLines) {
  EXPECT_TRUE(ParseRecordsJsonl("").empty());
  EXPECT_TRUE(ParsePairsJsonl("\n\n").empty());
  const std::string good = ToJsonl(SynthCorpus(2, 2, 0));
  const std::string first_line = good.substr(0, good.find('\n'));
  const std::string truncated =
      good + first_line.substr(0, first_line.size() / 2);
  EXPECT_EQ(CodeOf([&] { ParseRecordsJsonl(truncated); }),
            ErrorCode::kMalformedLine);
  try {
    ParseRecordsJsonl(truncated);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos)
        << e.what();
  }
  EXPECT_EQ(CodeOf([] {
              ParsePairsJsonl(R"({"product":"a","version_string":"x","label":2})");
            }),
            ErrorCode::kMalformedLine);
  EXPECT_EQ(CodeOf([] {
              ParseRecordsJsonl(
                  R"({"product":"a","package":"a-1","version":"2","version_string":"x"})");
            }),
            ErrorCode::kMalformedLine);
}

TEST(JsonlTest, MissingFileIsIoError) {
  EXPECT_EQ(CodeOf([] { LoadRecords("/nonexistent/records.jsonl"); }),
            ErrorCode::kIoError);
}

}  // namespace
}  // namespace binsbom
