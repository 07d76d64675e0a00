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

#include <utility>

#include "binsbom/error.h"
#include "binsbom/io.h"

namespace binsbom {
namespace {

constexpr std::size_t kPeOffsetField = 0x3C;

bool IsPrintable(std::uint8_t b) {
  return (b >= 0x20 && b <= 0x7E) || b == 0x09;
}

std::uint32_t ReadLe32(std::span<const std::uint8_t> bytes, std::size_t at) {
  return static_cast<std::uint32_t>(bytes[at]) |
         (static_cast<std::uint32_t>(bytes[at + 1]) << 8) |
         (static_cast<std::uint32_t>(bytes[at + 2]) << 16) |
         (static_cast<std::uint32_t>(bytes[at + 3]) << 24);
}

const std::regex& DottedVersionRegex() {
  static const std::regex re(R"((^|[^0-9])([0-9]+\.[0-9]+(\.[0-9]+)*)([^0-9]|$))");
  return re;
}

}  // namespace

std::string_view FileFormatName(FileFormat format) {
  switch (format) {
    case FileFormat::kElf:
      return "ELF";
    case FileFormat::kPe:
      return "PE";
    case FileFormat::kUnknown:
      return "Unknown";
  }
  return "Unknown";
}

VersionPattern::VersionPattern()
    : VersionPattern(std::string(kDefaultVersionPattern)) {}

VersionPattern::VersionPattern(std::string expression)
    : expression_(std::move(expression)) {
  try {
    regex_ = std::regex(expression_, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kInvalidPattern,
                "'" + expression_ + "': " + e.what());
  }
}

bool VersionPattern::Matches(std::string_view text) const {
  return std::regex_search(text.begin(), text.end(), regex_);
}

FileFormat DetectFormat(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 4 && bytes[0] == 0x7F && bytes[1] == 0x45 &&
      bytes[2] == 0x4C && bytes[3] == 0x46) {
    return FileFormat::kElf;
  }
  if (bytes.size() >= kPeOffsetField + 4 && bytes[0] == 0x4D &&
      bytes[1] == 0x5A) {
    const std::uint64_t pe_offset = ReadLe32(bytes, kPeOffsetField);
    if (pe_offset + 4 <= bytes.size() && bytes[pe_offset] == 0x50 &&
        bytes[pe_offset + 1] == 0x45 && bytes[pe_offset + 2] == 0x00 &&
        bytes[pe_offset + 3] == 0x00) {
      return FileFormat::kPe;
    }
  }
  return FileFormat::kUnknown;
}

std::vector<ExtractedString> ExtractStrings(std::span<const std::uint8_t> bytes,
                                            std::size_t min_len) {
  if (min_len == 0) {
    throw Error(ErrorCode::kInvalidArgument, "min_len must be at least 1");
  }
  std::vector<ExtractedString> out;
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    if (!IsPrintable(bytes[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < n && IsPrintable(bytes[i])) ++i;
    if (i - start >= min_len) {
      out.push_back({start, std::string(bytes.begin() + start,
                                        bytes.begin() + i)});
    }
  }
  return out;
}

std::vector<ExtractedString> FilterVersionStrings(
    std::span<const ExtractedString> strings, const VersionPattern& pattern) {
  std::vector<ExtractedString> out;
  for (const auto& s : strings) {
    if (pattern.Matches(s.text)) out.push_back(s);
  }
  return out;
}

std::optional<std::string> ExtractDottedVersion(std::string_view text) {
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(text.begin(), text.end(), m, DottedVersionRegex())) {
    return std::nullopt;
  }
  return m[2].str();
}

ScanReport ScanBytes(std::string path, std::span<const std::uint8_t> bytes,
                     const ScanConfig& config) {
  ScanReport report;
  report.path = std::move(path);
  report.format = DetectFormat(bytes);
  if (report.format == FileFormat::kUnknown) {
    report.skipped = true;
    return report;
  }
  report.strings = ExtractStrings(bytes, config.min_len);
  report.candidates = FilterVersionStrings(report.strings, config.pattern);
  return report;
}

ScanReport ScanFile(const std::filesystem::path& path,
                    const ScanConfig& config) {
  const auto bytes = ReadFileBytes(path);
  return ScanBytes(path.string(), bytes, config);
}

nlohmann::json ToJson(const ScanReport& report) {
  nlohmann::json strings = nlohmann::json::array();
  for (const auto& s : report.strings) {
    strings.push_back({{"offset", s.offset}, {"text", s.text}});
  }
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& c : report.candidates) candidates.push_back(c.text);
  nlohmann::json j = {{"path", report.path},
                      {"format", std::string(FileFormatName(report.format))},
                      {"strings", std::move(strings)},
                      {"candidates", std::move(candidates)}};
  if (report.skipped) j["skipped"] = true;
  return j;
}

ScanReport ScanReportFromJson(const nlohmann::json& j) {
  try {
    ScanReport report;
    report.path = j.at("path").get<std::string>();
    const auto format = j.at("format").get<std::string>();
    if (format == "ELF") {
      report.format = FileFormat::kElf;
    } else if (format == "PE") {
      report.format = FileFormat::kPe;
    } else {
      report.format = FileFormat::kUnknown;
    }
    for (const auto& s : j.at("strings")) {
      report.strings.push_back(
          {s.at("offset").get<std::size_t>(), s.at("text").get<std::string>()});
    }
    // Candidates are serialized as bare text; recover offsets from strings.
    std::size_t cursor = 0;
    for (const auto& c : j.at("candidates")) {
      const auto text = c.get<std::string>();
      ExtractedString found{0, text};
      for (std::size_t k = cursor; k < report.strings.size(); ++k) {
        if (report.strings[k].text == text) {
          found = report.strings[k];
          cursor = k + 1;
          break;
        }
      }
      report.candidates.push_back(std::move(found));
    }
    report.skipped = j.value("skipped", false);
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedLine,
                std::string("bad scan report: ") + e.what());
  }
}

}  // namespace binsbom
