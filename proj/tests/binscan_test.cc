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

#include "binsbom/binscan.h"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "binsbom/error.h"
#include "testutil.h"

namespace binsbom {
namespace {

using testing::Bytes;
using testing::MakeElf;
using testing::MakePe;

std::vector<std::string> Texts(const std::vector<ExtractedString>& v) {
  std::vector<std::string> out;
  for (const auto& s : v) out.push_back(s.text);
  return out;
}

std::vector<ExtractedString> FromTexts(std::vector<std::string> texts) {
  std::vector<ExtractedString> out;
  for (auto& t : texts) out.push_back({0, std::move(t)});
  return out;
}

TEST(DetectFormatTest, ElfMagic) {
  EXPECT_EQ(DetectFormat(Bytes("\x7F" "ELF\x02\x01")), FileFormat::kElf);
  EXPECT_EQ(DetectFormat(Bytes("\x7F" "ELF")), FileFormat::kElf);
  EXPECT_EQ(DetectFormat(Bytes("\x7F" "EL")), FileFormat::kUnknown);
  EXPECT_EQ(DetectFormat(Bytes("\x7E" "ELF")), FileFormat::kUnknown);
}

TEST(DetectFormatTest, EmptyIsUnknown) {
  EXPECT_EQ(DetectFormat({}), FileFormat::kUnknown);
}

TEST(DetectFormatTest, PeHeaderAtOffset0x40) {
  EXPECT_EQ(DetectFormat(MakePe("")), FileFormat::kPe);
}

TEST(DetectFormatTest, PeNeedsSignatureAtPointedOffset) {
  auto pe = MakePe("");
  pe[0x40] = 'X';
  EXPECT_EQ(DetectFormat(pe), FileFormat::kUnknown);

  // Pointer past the end of the buffer.
  auto truncated = MakePe("");
  truncated[0x3C] = 0xF0;
  EXPECT_EQ(DetectFormat(truncated), FileFormat::kUnknown);

  // "MZ" alone, too short to hold the pointer.
  EXPECT_EQ(DetectFormat(Bytes("MZ")), FileFormat::kUnknown);
}

TEST(DetectFormatTest, PeSignatureAtLargeLittleEndianOffset) {
  std::vector<std::uint8_t> b(0x140, 0);
  b[0] = 'M';
  b[1] = 'Z';
  b[0x3C] = 0x00;
  b[0x3D] = 0x01;  // 0x100
  b[0x100] = 'P';
  b[0x101] = 'E';
  EXPECT_EQ(DetectFormat(b), FileFormat::kPe);
  b[0x102] = 1;
  EXPECT_EQ(DetectFormat(b), FileFormat::kUnknown);
}

TEST(DetectFormatTest, FormatNames) {
  EXPECT_EQ(FileFormatName(FileFormat::kElf), "ELF");
  EXPECT_EQ(FileFormatName(FileFormat::kPe), "PE");
  EXPECT_EQ(FileFormatName(FileFormat::kUnknown), "Unknown");
}

TEST(ExtractStringsTest, SingleRunAfterShortPrefix) {
  const auto got = ExtractStrings(Bytes(std::string("ab\0version 1.2.3\0x", 19)));
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].offset, 3u);
  EXPECT_EQ(got[0].text, "version 1.2.3");
  EXPECT_EQ(got[0].length(), 13u);
}

TEST(ExtractStringsTest, AllZeroBuffer) {
  EXPECT_TRUE(ExtractStrings(std::vector<std::uint8_t>(1000, 0)).empty());
}

TEST(ExtractStringsTest, ExactMinimumLengthAtEnd) {
  const auto got = ExtractStrings(Bytes("abcd"));
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].offset, 0u);
  EXPECT_EQ(got[0].text, "abcd");
  EXPECT_TRUE(ExtractStrings(Bytes("abc")).empty());
}

TEST(ExtractStringsTest, TabIsPrintableNewlineAndHighBytesAreNot) {
  const auto got = ExtractStrings(Bytes("a\tbc\nwxyz\x80qrst"), 4);
  EXPECT_EQ(Texts(got), (std::vector<std::string>{"a\tbc", "wxyz", "qrst"}));
  EXPECT_EQ(got[1].offset, 5u);
  EXPECT_EQ(got[2].offset, 10u);
}

TEST(ExtractStringsTest, MinLenOneAndZero) {
  EXPECT_EQ(Texts(ExtractStrings(Bytes("a\x01" "b"), 1)),
            (std::vector<std::string>{"a", "b"}));
  EXPECT_THROW(ExtractStrings(Bytes("abcd"), 0), Error);
}

TEST(ExtractStringsTest, MatchesGnuStringsOnSmallFuzz) {
  if (!testing::HaveGnuStrings()) GTEST_SKIP() << "GNU strings not found";
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 40; ++iter) {
    std::vector<std::uint8_t> buf(rng() % 2048);
    for (auto& b : buf) {
      // Bias toward printable bytes so long runs actually occur.
      b = (rng() % 4 == 0) ? static_cast<std::uint8_t>(rng())
                           : static_cast<std::uint8_t>(0x20 + rng() % 95);
    }
    const std::size_t min_len = 1 + rng() % 8;
    EXPECT_EQ(ExtractStrings(buf, min_len), testing::GnuStrings(buf, min_len))
        << "iteration " << iter;
  }
}

TEST(ExtractStringsTest, RunsAreDisjointMaximalAndSorted) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<std::uint8_t> buf(rng() % 300);
    for (auto& b : buf) b = static_cast<std::uint8_t>(rng() % 160);
    const auto runs = ExtractStrings(buf, 3);
    std::size_t prev_end = 0;
    for (const auto& r : runs) {
      EXPECT_GE(r.offset, prev_end);
      const std::size_t end = r.offset + r.length();
      ASSERT_LE(end, buf.size());
      auto printable = [](std::uint8_t c) {
        return c == '\t' || (c >= 0x20 && c <= 0x7E);
      };
      if (r.offset > 0) EXPECT_FALSE(printable(buf[r.offset - 1]));
      if (end < buf.size()) EXPECT_FALSE(printable(buf[end]));
      for (char c : r.text) EXPECT_TRUE(printable(static_cast<std::uint8_t>(c)));
      prev_end = end;
    }
  }
}

TEST(VersionPatternTest, DefaultPatternExamples) {
  const VersionPattern pattern;
  EXPECT_EQ(Texts(FilterVersionStrings(
                FromTexts({"OpenSSL 1.0.2k", "hello world", "GCC: (GNU) 12.2.0"}),
                pattern)),
            (std::vector<std::string>{"OpenSSL 1.0.2k", "GCC: (GNU) 12.2.0"}));
  EXPECT_EQ(Texts(FilterVersionStrings(FromTexts({"1.2", "v2", "x.y.z"}), pattern)),
            (std::vector<std::string>{"1.2"}));
  EXPECT_TRUE(FilterVersionStrings({}, pattern).empty());
}

TEST(VersionPatternTest, BoundariesOfTheDottedCore) {
  const VersionPattern pattern;
  EXPECT_TRUE(pattern.Matches("zlib 1.2.13"));
  EXPECT_TRUE(pattern.Matches("libfoo.so.3.1"));
  EXPECT_TRUE(pattern.Matches("v10.0"));
  EXPECT_FALSE(pattern.Matches("1."));
  EXPECT_FALSE(pattern.Matches(".5"));
  EXPECT_FALSE(pattern.Matches("version twelve"));
}

TEST(VersionPatternTest, FilterPreservesOrderAndMultiplicity) {
  const VersionPattern pattern;
  const auto got = FilterVersionStrings(
      FromTexts({"a 1.0", "nothing", "a 1.0", "b 2.0"}), pattern);
  EXPECT_EQ(Texts(got), (std::vector<std::string>{"a 1.0", "a 1.0", "b 2.0"}));
}

TEST(VersionPatternTest, CustomAndInvalidPatterns) {
  const VersionPattern custom("^lib");
  EXPECT_TRUE(custom.Matches("libz"));
  EXPECT_FALSE(custom.Matches("zlib"));
  try {
    VersionPattern bad("([0-9]");
    FAIL() << "expected InvalidPattern";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidPattern);
  }
}

TEST(ExtractDottedVersionTest, FirstDottedRun) {
  EXPECT_EQ(ExtractDottedVersion("libfoo 3.1.4"), "3.1.4");
  EXPECT_EQ(ExtractDottedVersion("foo v2.0 (build 1.2.3)"), "2.0");
  EXPECT_EQ(ExtractDottedVersion("libfoo.so.3.1"), "3.1");
  EXPECT_EQ(ExtractDottedVersion("no version"), std::nullopt);
}

TEST(ScanTest, ZeroFileIsSkippedUnknown) {
  const auto report = ScanBytes("zeros", std::vector<std::uint8_t>(64, 0), {});
  EXPECT_EQ(report.format, FileFormat::kUnknown);
  EXPECT_TRUE(report.skipped);
  EXPECT_TRUE(report.strings.empty());
  EXPECT_TRUE(report.candidates.empty());
}

TEST(ScanTest, UnknownFormatSkipsEvenWithStrings) {
  const auto report = ScanBytes("text", Bytes("plain text 1.2.3\n"), {});
  EXPECT_TRUE(report.skipped);
  EXPECT_TRUE(report.candidates.empty());
}

TEST(ScanTest, ElfWithVersionString) {
  const auto elf = MakeElf(std::string("libfoo 3.1.4\0", 13));
  const auto report = ScanBytes("foo.so", elf, {});
  EXPECT_EQ(report.format, FileFormat::kElf);
  EXPECT_FALSE(report.skipped);
  EXPECT_EQ(Texts(report.candidates), (std::vector<std::string>{"libfoo 3.1.4"}));
  for (const auto& c : report.candidates) {
    EXPECT_NE(std::find(report.strings.begin(), report.strings.end(), c),
              report.strings.end());
  }
}

TEST(ScanTest, PeWithVersionString) {
  const auto pe = MakePe(std::string("\0FooApp 2.4.1\0help text\0", 24));
  const auto report = ScanBytes("foo.exe", pe, {});
  EXPECT_EQ(report.format, FileFormat::kPe);
  EXPECT_EQ(Texts(report.candidates), (std::vector<std::string>{"FooApp 2.4.1"}));
}

TEST(ScanTest, FileRoundTripsThroughJson) {
  testing::TempDir dir;
  const auto path = dir / "a.so";
  testing::WriteBytes(path, MakeElf(std::string("zlib 1.2.13\0inflate 1.2.13\0", 27)));
  const auto report = ScanFile(path, {});
  EXPECT_EQ(Texts(report.candidates),
            (std::vector<std::string>{"zlib 1.2.13", "inflate 1.2.13"}));
  const auto back = ScanReportFromJson(ToJson(report));
  EXPECT_EQ(back.path, report.path);
  EXPECT_EQ(back.format, report.format);
  EXPECT_EQ(back.strings, report.strings);
  EXPECT_EQ(back.candidates, report.candidates);
  EXPECT_EQ(back.skipped, report.skipped);
}

TEST(ScanTest, MissingFileIsIoError) {
  try {
    ScanFile("/nonexistent/binsbom/file", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

}  // namespace
}  // namespace binsbom
