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

#include "binsbom/tokenizer.h"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <utility>

#include "binsbom/error.h"
#include "binsbom/io.h"

namespace binsbom {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

template <typename F>
void ForEachWord(std::string_view text, F&& f) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (i > start) f(text.substr(start, i - start));
  }
}

bool StartsWithContinuation(std::string_view s) {
  return s.size() >= kContinuationPrefix.size() &&
         s.substr(0, kContinuationPrefix.size()) == kContinuationPrefix;
}

bool IsSpecialText(std::string_view s) {
  return s == kPadPiece || s == kUnkPiece || s == kClsPiece || s == kSepPiece;
}

std::set<char> Alphabet(std::span<const std::string> texts) {
  std::set<char> chars;
  for (const auto& t : texts) {
    for (char c : t) {
      if (!IsSpace(c)) chars.insert(c);
    }
  }
  return chars;
}

// Working state of the merge loop.
struct MergeState {
  std::vector<std::string> text;
  std::vector<bool> continuation;
  std::unordered_map<std::string, int> ids;

  int Add(std::string piece, bool is_continuation) {
    const int id = static_cast<int>(text.size());
    ids.emplace(piece, id);
    text.push_back(std::move(piece));
    continuation.push_back(is_continuation);
    return id;
  }

  std::string MergedText(int a, int b) const {
    return text[a] + text[b].substr(kContinuationPrefix.size());
  }
};

}  // namespace

WordPieceVocab::WordPieceVocab(std::vector<std::string> pieces,
                               std::size_t max_len)
    : pieces_(std::move(pieces)), max_len_(max_len) {
  if (max_len_ < 2) {
    throw Error(ErrorCode::kInvalidArgument, "max_len must be at least 2");
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (pieces_[i].empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty piece at id " +
                                                   std::to_string(i));
    }
    if (!ids_.emplace(pieces_[i], static_cast<int>(i)).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate piece '" + pieces_[i] + "'");
    }
    if (!IsSpecialText(pieces_[i])) {
      longest_piece_ = std::max(longest_piece_, pieces_[i].size());
    }
  }
  auto require = [&](std::string_view s) {
    const auto it = ids_.find(std::string(s));
    if (it == ids_.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "vocabulary lacks special " + std::string(s));
    }
    return it->second;
  };
  pad_id_ = require(kPadPiece);
  unk_id_ = require(kUnkPiece);
  cls_id_ = require(kClsPiece);
  sep_id_ = require(kSepPiece);
}

std::optional<int> WordPieceVocab::id(std::string_view piece) const {
  const auto it = ids_.find(std::string(piece));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> WordPieceVocab::WordPieceId(std::string_view piece) const {
  const auto found = id(piece);
  if (!found || IsSpecial(*found)) return std::nullopt;
  return found;
}

bool WordPieceVocab::IsSpecial(int id) const {
  return id == pad_id_ || id == unk_id_ || id == cls_id_ || id == sep_id_;
}

void WordPieceVocab::set_max_len(std::size_t max_len) {
  if (max_len < 2) {
    throw Error(ErrorCode::kInvalidArgument, "max_len must be at least 2");
  }
  max_len_ = max_len;
}

std::size_t InitialVocabSize(std::span<const std::string> texts) {
  return 4 + 2 * Alphabet(texts).size();
}

WordPieceVocab TrainVocab(std::span<const std::string> texts,
                          std::size_t target_size, std::size_t max_len) {
  const std::set<char> alphabet = Alphabet(texts);
  if (alphabet.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no characters to learn from");
  }
  const std::size_t initial = 4 + 2 * alphabet.size();
  if (target_size <= initial) {
    throw Error(ErrorCode::kInvalidArgument,
                "target_size " + std::to_string(target_size) +
                    " must exceed the initial " + std::to_string(initial) +
                    " pieces");
  }

  MergeState state;
  for (auto s : {kPadPiece, kUnkPiece, kClsPiece, kSepPiece}) {
    state.Add(std::string(s), false);
  }
  for (char c : alphabet) {
    state.Add(std::string(1, c), false);
    state.Add(std::string(kContinuationPrefix) + c, true);
  }

  // Unique words with their corpus frequency, segmented into characters.
  std::map<std::string, std::uint64_t> word_counts;
  for (const auto& t : texts) {
    ForEachWord(t, [&](std::string_view w) { ++word_counts[std::string(w)]; });
  }
  std::vector<std::vector<int>> segments;
  std::vector<std::uint64_t> freq;
  for (const auto& [word, count] : word_counts) {
    std::vector<int> seg;
    seg.push_back(state.ids.at(std::string(1, word[0])));
    for (std::size_t i = 1; i < word.size(); ++i) {
      seg.push_back(
          state.ids.at(std::string(kContinuationPrefix) + word[i]));
    }
    segments.push_back(std::move(seg));
    freq.push_back(count);
  }

  std::size_t vocab_size = state.text.size();
  std::vector<std::uint64_t> piece_count;
  std::unordered_map<std::uint64_t, std::uint64_t> pair_count;
  while (vocab_size < target_size) {
    const std::uint64_t n = state.text.size();
    piece_count.assign(n, 0);
    pair_count.clear();
    for (std::size_t w = 0; w < segments.size(); ++w) {
      const auto& seg = segments[w];
      for (std::size_t i = 0; i < seg.size(); ++i) {
        piece_count[seg[i]] += freq[w];
        if (i + 1 < seg.size()) {
          pair_count[static_cast<std::uint64_t>(seg[i]) * n + seg[i + 1]] +=
              freq[w];
        }
      }
    }

    int best_a = -1;
    int best_b = -1;
    std::uint64_t best_ab = 0;
    unsigned __int128 best_den = 1;
    for (const auto& [key, ab] : pair_count) {
      if (ab < 2) continue;
      const int a = static_cast<int>(key / n);
      const int b = static_cast<int>(key % n);
      const bool start = !state.continuation[a];
      if (start) {
        const std::string merged = state.MergedText(a, b);
        if (StartsWithContinuation(merged) || IsSpecialText(merged)) continue;
      }
      const unsigned __int128 den =
          static_cast<unsigned __int128>(piece_count[a]) * piece_count[b];
      // ab / den > best_ab / best_den, compared exactly.
      const unsigned __int128 lhs = static_cast<unsigned __int128>(ab) * best_den;
      const unsigned __int128 rhs =
          static_cast<unsigned __int128>(best_ab) * den;
      bool better = best_a < 0 || lhs > rhs;
      if (!better && lhs == rhs) {
        better = std::tie(state.text[a], state.text[b]) <
                 std::tie(state.text[best_a], state.text[best_b]);
      }
      if (better) {
        best_a = a;
        best_b = b;
        best_ab = ab;
        best_den = den;
      }
    }
    if (best_a < 0) break;

    const std::string merged = state.MergedText(best_a, best_b);
    int merged_id;
    if (const auto it = state.ids.find(merged); it != state.ids.end()) {
      // Reachable through another split; re-segment without growing.
      merged_id = it->second;
    } else {
      merged_id = state.Add(merged, state.continuation[best_a]);
      ++vocab_size;
    }
    for (auto& seg : segments) {
      if (seg.size() < 2) continue;
      std::size_t out = 0;
      for (std::size_t i = 0; i < seg.size(); ++i) {
        if (i + 1 < seg.size() && seg[i] == best_a && seg[i + 1] == best_b) {
          seg[out++] = merged_id;
          ++i;
        } else {
          seg[out++] = seg[i];
        }
      }
      seg.resize(out);
    }
  }
  return WordPieceVocab(std::move(state.text), max_len);
}

TokenSequence Tokenize(std::string_view text, const WordPieceVocab& vocab) {
  TokenSequence seq;
  auto push = [&](int id) {
    seq.ids.push_back(id);
    seq.pieces.push_back(vocab.piece(id));
  };
  push(vocab.cls_id());
  const std::size_t budget = vocab.max_len() - 1;  // room for [SEP]
  std::string probe;
  ForEachWord(text, [&](std::string_view word) {
    std::size_t pos = 0;
    while (pos < word.size() && seq.ids.size() < budget) {
      const std::size_t max_span =
          std::min(word.size() - pos, vocab.longest_piece());
      int found = -1;
      std::size_t found_len = 1;
      for (std::size_t len = max_span; len >= 1; --len) {
        probe.clear();
        if (pos > 0) probe += kContinuationPrefix;
        probe += word.substr(pos, len);
        // Start pieces never begin with "##"; such a piece is the
        // continuation form of a shorter one (e.g. "###" is "##" + "#").
        if (pos == 0 && StartsWithContinuation(probe)) continue;
        if (const auto id = vocab.WordPieceId(probe)) {
          found = *id;
          found_len = len;
          break;
        }
      }
      push(found >= 0 ? found : vocab.unk_id());
      pos += found_len;
    }
  });
  push(vocab.sep_id());
  return seq;
}

std::string Detokenize(const TokenSequence& seq) {
  std::string out;
  for (const auto& piece : seq.pieces) {
    if (piece == kUnkPiece) {
      throw Error(ErrorCode::kLossySequence, "sequence contains [UNK]");
    }
    if (piece == kClsPiece || piece == kSepPiece || piece == kPadPiece) {
      continue;
    }
    if (StartsWithContinuation(piece) &&
        piece.size() > kContinuationPrefix.size()) {
      out += piece.substr(kContinuationPrefix.size());
    } else {
      if (!out.empty()) out += ' ';
      out += piece;
    }
  }
  return out;
}

nlohmann::json ToJson(const WordPieceVocab& vocab) {
  return {{"pieces", vocab.pieces()},
          {"specials",
           {{"pad", std::string(kPadPiece)},
            {"unk", std::string(kUnkPiece)},
            {"cls", std::string(kClsPiece)},
            {"sep", std::string(kSepPiece)}}},
          {"max_len", vocab.max_len()}};
}

WordPieceVocab VocabFromJson(const nlohmann::json& j) {
  try {
    const auto& specials = j.at("specials");
    const std::map<std::string, std::string_view> expected = {
        {"pad", kPadPiece}, {"unk", kUnkPiece},
        {"cls", kClsPiece}, {"sep", kSepPiece}};
    for (const auto& [key, text] : expected) {
      if (specials.at(key).get<std::string>() != text) {
        throw Error(ErrorCode::kInvalidArgument,
                    "unsupported special token for " + key);
      }
    }
    return WordPieceVocab(j.at("pieces").get<std::vector<std::string>>(),
                          j.at("max_len").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("bad vocabulary file: ") + e.what());
  }
}

void SaveVocab(const WordPieceVocab& vocab, const std::filesystem::path& path) {
  WriteFileAtomic(path, ToJson(vocab).dump() + "\n");
}

WordPieceVocab LoadVocab(const std::filesystem::path& path) {
  const std::string text = ReadFileText(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                path.string() + ": " + e.what());
  }
  return VocabFromJson(j);
}

}  // namespace binsbom
