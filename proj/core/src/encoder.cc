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

#include "binsbom/encoder.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "binsbom/error.h"
#include "binsbom/io.h"
#include "binsbom/random.h"

namespace binsbom {
namespace {

constexpr double kInitRange = 0.05;

void CheckIds(const EmbeddingModel& model, std::span<const int> ids) {
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= model.token_table.rows) {
      throw Error(ErrorCode::kInvalidArgument,
                  "token id " + std::to_string(id) + " outside vocabulary of " +
                      std::to_string(model.token_table.rows));
    }
  }
}

nlohmann::json MatrixToJson(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix MatrixFromJson(const nlohmann::json& j, std::size_t rows,
                      std::size_t cols) {
  if (!j.is_array() || j.size() != rows) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto values = j[r].get<std::vector<double>>();
    if (values.size() != cols) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "row " + std::to_string(r) + " has " +
                      std::to_string(values.size()) + " columns, expected " +
                      std::to_string(cols));
    }
    std::copy(values.begin(), values.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace

ModelGradient::ModelGradient(const EmbeddingModel& model)
    : token_table(model.token_table.rows, model.token_table.cols) {
  if (model.projection) {
    projection_weight =
        Matrix(model.projection->weight.rows, model.projection->weight.cols);
    projection_bias.assign(model.projection->bias.size(), 0.0);
  }
}

void ModelGradient::Clear() {
  std::fill(token_table.data.begin(), token_table.data.end(), 0.0);
  std::fill(projection_weight.data.begin(), projection_weight.data.end(), 0.0);
  std::fill(projection_bias.begin(), projection_bias.end(), 0.0);
}

EmbeddingModel InitModel(const EncoderConfig& config) {
  if (config.embed_dim < 1) {
    throw Error(ErrorCode::kInvalidArgument, "embed_dim must be at least 1");
  }
  if (config.vocab_size < 5) {
    throw Error(ErrorCode::kInvalidArgument, "vocab_size must be at least 5");
  }
  if (config.pad_id < 0 ||
      static_cast<std::size_t>(config.pad_id) >= config.vocab_size) {
    throw Error(ErrorCode::kInvalidArgument, "pad_id outside vocabulary");
  }
  EmbeddingModel model;
  model.config = config;
  const std::size_t width = config.token_dim();
  model.token_table = Matrix(config.vocab_size, width);
  RandomEngine rng(config.seed);
  std::uniform_real_distribution<double> uniform(-kInitRange, kInitRange);
  for (double& x : model.token_table.data) x = uniform(rng);
  auto pad = model.token_table.row(static_cast<std::size_t>(config.pad_id));
  std::fill(pad.begin(), pad.end(), 0.0);

  if (config.projection) {
    Projection p;
    p.weight = Matrix(config.embed_dim, width);
    const double bound = 1.0 / std::sqrt(static_cast<double>(width));
    std::uniform_real_distribution<double> wdist(-bound, bound);
    for (double& x : p.weight.data) x = wdist(rng);
    p.bias.assign(config.embed_dim, 0.0);
    model.projection = std::move(p);
  }
  return model;
}

Embedding Encode(const EmbeddingModel& model, std::span<const int> ids) {
  CheckIds(model, ids);
  const std::size_t width = model.token_table.cols;
  std::vector<double> mean(width, 0.0);
  std::size_t n = 0;
  for (int id : ids) {
    if (id == model.config.pad_id) continue;
    const auto row = model.token_table.row(static_cast<std::size_t>(id));
    for (std::size_t k = 0; k < width; ++k) mean[k] += row[k];
    ++n;
  }
  if (n > 0) {
    for (double& x : mean) x /= static_cast<double>(n);
  }
  if (!model.projection) return mean;

  const auto& p = *model.projection;
  Embedding out(p.bias);
  for (std::size_t i = 0; i < p.weight.rows; ++i) {
    const auto w = p.weight.row(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < width; ++k) acc += w[k] * mean[k];
    out[i] += acc;
  }
  return out;
}

Embedding Encode(const EmbeddingModel& model, const TokenSequence& seq) {
  return Encode(model, std::span<const int>(seq.ids));
}

std::vector<Embedding> EncodeBatch(const EmbeddingModel& model,
                                   std::span<const TokenSequence> seqs) {
  std::vector<Embedding> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) out.push_back(Encode(model, s));
  return out;
}

void EncodeBackward(const EmbeddingModel& model, std::span<const int> ids,
                    std::span<const double> grad_output, ModelGradient& grad) {
  const std::size_t width = model.token_table.cols;
  std::size_t n = 0;
  for (int id : ids) {
    if (id != model.config.pad_id) ++n;
  }
  if (n == 0) return;

  // Gradient with respect to the pooled mean.
  std::vector<double> grad_mean(grad_output.begin(), grad_output.end());
  if (model.projection) {
    const auto& p = *model.projection;
    std::vector<double> mean(width, 0.0);
    for (int id : ids) {
      if (id == model.config.pad_id) continue;
      const auto row = model.token_table.row(static_cast<std::size_t>(id));
      for (std::size_t k = 0; k < width; ++k) mean[k] += row[k];
    }
    for (double& x : mean) x /= static_cast<double>(n);

    grad_mean.assign(width, 0.0);
    for (std::size_t i = 0; i < p.weight.rows; ++i) {
      const double g = grad_output[i];
      grad.projection_bias[i] += g;
      auto gw = grad.projection_weight.row(i);
      const auto w = p.weight.row(i);
      for (std::size_t k = 0; k < width; ++k) {
        gw[k] += g * mean[k];
        grad_mean[k] += g * w[k];
      }
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  for (int id : ids) {
    if (id == model.config.pad_id) continue;
    auto row = grad.token_table.row(static_cast<std::size_t>(id));
    for (std::size_t k = 0; k < width; ++k) row[k] += grad_mean[k] * inv_n;
  }
}

void ApplyGradient(EmbeddingModel& model, const ModelGradient& grad,
                   double learning_rate, double scale) {
  const double step = learning_rate * scale;
  if (step == 0.0) return;
  const std::size_t pad = static_cast<std::size_t>(model.config.pad_id);
  for (std::size_t r = 0; r < model.token_table.rows; ++r) {
    if (r == pad) continue;
    auto row = model.token_table.row(r);
    const auto g = grad.token_table.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] -= step * g[k];
  }
  if (model.projection) {
    auto& w = model.projection->weight.data;
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] -= step * grad.projection_weight.data[i];
    }
    auto& b = model.projection->bias;
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] -= step * grad.projection_bias[i];
    }
  }
}

bool AllFinite(const EmbeddingModel& model) {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](double x) { return std::isfinite(x); });
  };
  if (!finite(model.token_table.data)) return false;
  if (model.projection) {
    return finite(model.projection->weight.data) &&
           finite(model.projection->bias);
  }
  return true;
}

nlohmann::json ToJson(const EmbeddingModel& model) {
  const auto& c = model.config;
  nlohmann::json j = {{"config",
                       {{"embed_dim", c.embed_dim},
                        {"hidden_dim", c.hidden_dim},
                        {"projection", c.projection},
                        {"vocab_size", c.vocab_size},
                        {"pad_id", c.pad_id},
                        {"seed", c.seed}}},
                      {"token_table", MatrixToJson(model.token_table)},
                      {"projection", nullptr}};
  if (model.projection) {
    j["projection"] = {{"weight", MatrixToJson(model.projection->weight)},
                       {"bias", model.projection->bias}};
  }
  return j;
}

EmbeddingModel ModelFromJson(const nlohmann::json& j) {
  try {
    const auto& jc = j.at("config");
    EncoderConfig c;
    c.embed_dim = jc.at("embed_dim").get<std::size_t>();
    c.hidden_dim = jc.value("hidden_dim", std::size_t{0});
    c.projection = jc.value("projection", false);
    c.vocab_size = jc.at("vocab_size").get<std::size_t>();
    c.pad_id = jc.value("pad_id", 0);
    c.seed = jc.value("seed", std::uint64_t{0});
    if (c.embed_dim < 1 || c.vocab_size < 5) {
      throw Error(ErrorCode::kInvalidArgument, "invalid encoder config");
    }

    EmbeddingModel model;
    model.config = c;
    model.token_table =
        MatrixFromJson(j.at("token_table"), c.vocab_size, c.token_dim());
    const auto& jp = j.at("projection");
    if (c.projection != !jp.is_null()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "projection flag disagrees with projection parameters");
    }
    if (!jp.is_null()) {
      Projection p;
      p.weight = MatrixFromJson(jp.at("weight"), c.embed_dim, c.token_dim());
      p.bias = jp.at("bias").get<std::vector<double>>();
      if (p.bias.size() != c.embed_dim) {
        throw Error(ErrorCode::kDimensionMismatch, "projection bias size");
      }
      model.projection = std::move(p);
    }
    if (!AllFinite(model)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite parameter");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("bad model file: ") + e.what());
  }
}

void SaveModel(const EmbeddingModel& model, const std::filesystem::path& path) {
  WriteFileAtomic(path, ToJson(model).dump() + "\n");
}

EmbeddingModel LoadModel(const std::filesystem::path& path) {
  const std::string text = ReadFileText(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
  return ModelFromJson(j);
}

ModelEmbedder::ModelEmbedder(const EmbeddingModel& model,
                             const WordPieceVocab& vocab)
    : model_(model), vocab_(vocab) {
  if (vocab.size() != model.config.vocab_size) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vocabulary has " + std::to_string(vocab.size()) +
                    " pieces, model expects " +
                    std::to_string(model.config.vocab_size));
  }
  fingerprint_ = Fingerprint(ToJson(model).dump() + ToJson(vocab).dump());
}

std::vector<Embedding> ModelEmbedder::EmbedTexts(
    std::span<const std::string> texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(Encode(model_, Tokenize(t, vocab_)));
  return out;
}

}  // namespace binsbom
