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

#ifndef BINSBOM_IO_H_
#define BINSBOM_IO_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "binsbom/error.h"

namespace binsbom {

// Throws Error(kIoError) when the file cannot be opened or read.
std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
std::string ReadFileText(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written artifact.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

// Calls `fn` with each non-blank line parsed as JSON. Parse failures and
// binsbom::Error exceptions thrown by `fn` are rethrown as `on_error` with
// the 1-based line number.
void ForEachJsonLine(std::string_view text, ErrorCode on_error,
                     const std::function<void(const nlohmann::json&)>& fn);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string Fingerprint(std::string_view data);

}  // namespace binsbom

#endif  // BINSBOM_IO_H_
