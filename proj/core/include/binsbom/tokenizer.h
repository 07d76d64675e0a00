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

#ifndef BINSBOM_TOKENIZER_H_
#define BINSBOM_TOKENIZER_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace binsbom {

inline constexpr std::string_view kPadPiece = "[PAD]";
inline constexpr std::string_view kUnkPiece = "[UNK]";
inline constexpr std::string_view kClsPiece = "[CLS]";
inline constexpr std::string_view kSepPiece = "[SEP]";
inline constexpr std::string_view kContinuationPrefix = "##";

inline constexpr std::size_t kDefaultMaxLen = 256;
inline constexpr std::size_t kDefaultVocabSize = 2000;

// A WordPiece vocabulary. Piece order defines ids. Continuation pieces carry
// the "##" prefix; the four special pieces must be present.
class WordPieceVocab {
 public:
  // Throws kInvalidArgument if a special is missing, a piece is duplicated,
  // or max_len < 2.
  explicit WordPieceVocab(std::vector<std::string> pieces,
                          std::size_t max_len = kDefaultMaxLen);

  std::size_t size() const { return pieces_.size(); }
  const std::vector<std::string>& pieces() const { return pieces_; }
  const std::string& piece(int id) const { return pieces_.at(id); }
  std::optional<int> id(std::string_view piece) const;
  bool contains(std::string_view piece) const { return id(piece).has_value(); }

  std::size_t max_len() const { return max_len_; }
  void set_max_len(std::size_t max_len);

  int pad_id() const { return pad_id_; }
  int unk_id() const { return unk_id_; }
  int cls_id() const { return cls_id_; }
  int sep_id() const { return sep_id_; }
  bool IsSpecial(int id) const;

  // Lookup restricted to non-special pieces, as used by tokenization.
  std::optional<int> WordPieceId(std::string_view piece) const;
  std::size_t longest_piece() const { return longest_piece_; }

 private:
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, int> ids_;
  std::size_t max_len_;
  std::size_t longest_piece_ = 0;
  int pad_id_ = -1;
  int unk_id_ = -1;
  int cls_id_ = -1;
  int sep_id_ = -1;
};

struct TokenSequence {
  std::vector<int> ids;
  std::vector<std::string> pieces;

  std::size_t size() const { return ids.size(); }
  bool operator==(const TokenSequence&) const = default;
};

// Learns a vocabulary of at most `target_size` pieces. Starts from the
// character alphabet (each character as a word-start piece and as a "##"
// continuation) plus the specials, then repeatedly merges the adjacent pair
// with the highest count(ab) / (count(a) * count(b)) until the budget is
// reached or no pair occurs more than once. Ties go to the lexicographically
// smallest (a, b).
//
// Throws kEmptyCorpus when `texts` holds no non-whitespace characters and
// kInvalidArgument when target_size does not exceed the initial piece count.
WordPieceVocab TrainVocab(std::span<const std::string> texts,
                          std::size_t target_size,
                          std::size_t max_len = kDefaultMaxLen);

// Initial piece count TrainVocab would start from (specials + 2 per char).
std::size_t InitialVocabSize(std::span<const std::string> texts);

// Whitespace split, greedy longest-match-first per word, unknown characters
// become [UNK]; wrapped in [CLS] ... [SEP] and truncated to max_len.
TokenSequence Tokenize(std::string_view text, const WordPieceVocab& vocab);

// Inverse of Tokenize up to whitespace normalization. Throws kLossySequence
// if the sequence contains [UNK].
std::string Detokenize(const TokenSequence& seq);

nlohmann::json ToJson(const WordPieceVocab& vocab);
WordPieceVocab VocabFromJson(const nlohmann::json& j);
void SaveVocab(const WordPieceVocab& vocab, const std::filesystem::path& path);
WordPieceVocab LoadVocab(const std::filesystem::path& path);

}  // namespace binsbom

#endif  // BINSBOM_TOKENIZER_H_
