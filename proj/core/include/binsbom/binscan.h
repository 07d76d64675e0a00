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

// Binary scanning: executable format detection, printable string extraction
// (GNU strings compatible) and version-string candidate filtering.

#ifndef BINSBOM_BINSCAN_H_
#define BINSBOM_BINSCAN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace binsbom {

enum class FileFormat { kElf, kPe, kUnknown };

std::string_view FileFormatName(FileFormat format);

struct ExtractedString {
  std::size_t offset = 0;  // byte index of the first character
  std::string text;

  std::size_t length() const { return text.size(); }
  bool operator==(const ExtractedString&) const = default;
};

inline constexpr std::string_view kDefaultVersionPattern =
    R"((^|[^0-9])[0-9]+\.[0-9]+(\.[0-9]+)*([^0-9]|$))";

inline constexpr std::size_t kDefaultMinStringLength = 4;

// A compiled version-string pattern, applied as a search (not a full match).
class VersionPattern {
 public:
  // The default dotted-numeric pattern.
  VersionPattern();
  // Throws Error(kInvalidPattern) if `expression` does not compile.
  explicit VersionPattern(std::string expression);

  bool Matches(std::string_view text) const;
  const std::string& expression() const { return expression_; }

 private:
  std::string expression_;
  std::regex regex_;
};

struct ScanConfig {
  std::size_t min_len = kDefaultMinStringLength;
  VersionPattern pattern;
};

struct ScanReport {
  std::string path;
  FileFormat format = FileFormat::kUnknown;
  std::vector<ExtractedString> strings;
  std::vector<ExtractedString> candidates;
  // Set when the file was not ELF/PE and therefore not scanned.
  bool skipped = false;
};

// ELF: 7F 45 4C 46 at offset 0. PE: "MZ" at 0 and "PE\0\0" at the 32-bit
// little-endian offset stored at 0x3C.
FileFormat DetectFormat(std::span<const std::uint8_t> bytes);

// Every maximal run of bytes in [0x20, 0x7E] or TAB that is at least
// `min_len` long, in ascending offset order.
std::vector<ExtractedString> ExtractStrings(std::span<const std::uint8_t> bytes,
                                            std::size_t min_len = 4);

// Order-preserving subsequence of `strings` whose text matches `pattern`.
std::vector<ExtractedString> FilterVersionStrings(
    std::span<const ExtractedString> strings, const VersionPattern& pattern);

// Returns the first dotted-numeric version core found by the default
// pattern, e.g. "1.0.2" for "OpenSSL 1.0.2k".
std::optional<std::string> ExtractDottedVersion(std::string_view text);

ScanReport ScanBytes(std::string path, std::span<const std::uint8_t> bytes,
                     const ScanConfig& config);

// Throws Error(kIoError) when `path` cannot be read.
ScanReport ScanFile(const std::filesystem::path& path,
                    const ScanConfig& config);

nlohmann::json ToJson(const ScanReport& report);
ScanReport ScanReportFromJson(const nlohmann::json& j);

}  // namespace binsbom

#endif  // BINSBOM_BINSCAN_H_
