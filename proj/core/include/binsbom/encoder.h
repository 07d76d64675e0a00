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

// Reference sentence encoder: a trainable token-embedding table followed by
// mean pooling and an optional affine projection. Both towers of the siamese
// setup share one EmbeddingModel.

#ifndef BINSBOM_ENCODER_H_
#define BINSBOM_ENCODER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "binsbom/tokenizer.h"

namespace binsbom {

using Embedding = std::vector<double>;

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t r) {
    return {data.data() + r * cols, cols};
  }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  bool operator==(const Matrix&) const = default;
};

struct EncoderConfig {
  std::size_t embed_dim = 32;   // output size e
  std::size_t hidden_dim = 0;   // token width when projecting; 0 = embed_dim
  bool projection = false;
  std::size_t vocab_size = 0;
  int pad_id = 0;
  std::uint64_t seed = 0;

  std::size_t token_dim() const {
    return projection && hidden_dim > 0 ? hidden_dim : embed_dim;
  }
  bool operator==(const EncoderConfig&) const = default;
};

struct Projection {
  Matrix weight;  // embed_dim x token_dim
  std::vector<double> bias;
  bool operator==(const Projection&) const = default;
};

struct EmbeddingModel {
  EncoderConfig config;
  Matrix token_table;  // vocab_size x token_dim
  std::optional<Projection> projection;

  bool operator==(const EmbeddingModel&) const = default;
};

// Parameter gradient with the same layout as EmbeddingModel.
struct ModelGradient {
  Matrix token_table;
  Matrix projection_weight;
  std::vector<double> projection_bias;

  explicit ModelGradient(const EmbeddingModel& model);
  void Clear();
};

// Token rows uniform in [-0.05, 0.05], the [PAD] row zero. Projection weights
// uniform in +-1/sqrt(token_dim), bias zero. Throws kInvalidArgument for
// embed_dim < 1 or vocab_size < 5.
EmbeddingModel InitModel(const EncoderConfig& config);

// Mean of the token rows of every non-[PAD] id (specials included), then the
// projection if present. No normalization.
Embedding Encode(const EmbeddingModel& model, const TokenSequence& seq);
Embedding Encode(const EmbeddingModel& model, std::span<const int> ids);

std::vector<Embedding> EncodeBatch(const EmbeddingModel& model,
                                   std::span<const TokenSequence> seqs);

// Accumulates d(loss)/d(parameters) into `grad` given d(loss)/d(output).
void EncodeBackward(const EmbeddingModel& model, std::span<const int> ids,
                    std::span<const double> grad_output, ModelGradient& grad);

// theta -= learning_rate * scale * grad. The [PAD] row is never updated.
void ApplyGradient(EmbeddingModel& model, const ModelGradient& grad,
                   double learning_rate, double scale);

bool AllFinite(const EmbeddingModel& model);

nlohmann::json ToJson(const EmbeddingModel& model);
EmbeddingModel ModelFromJson(const nlohmann::json& j);
void SaveModel(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel LoadModel(const std::filesystem::path& path);

// Anything that turns texts into embeddings: the reference model with its
// vocabulary, or an external process.
class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual std::vector<Embedding> EmbedTexts(
      std::span<const std::string> texts) = 0;
  virtual std::size_t dim() const = 0;
  // Identifies the encoder; embedded in indexes and SBOM documents.
  virtual std::string fingerprint() const = 0;
};

class ModelEmbedder : public TextEmbedder {
 public:
  ModelEmbedder(const EmbeddingModel& model, const WordPieceVocab& vocab);

  std::vector<Embedding> EmbedTexts(
      std::span<const std::string> texts) override;
  std::size_t dim() const override { return model_.config.embed_dim; }
  std::string fingerprint() const override { return fingerprint_; }

 private:
  const EmbeddingModel& model_;
  const WordPieceVocab& vocab_;
  std::string fingerprint_;
};

}  // namespace binsbom

#endif  // BINSBOM_ENCODER_H_
