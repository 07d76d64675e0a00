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

#include "testutil.h"

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <stdexcept>

namespace binsbom::testing {

TempDir::TempDir() {
  std::string tmpl =
      (std::filesystem::temp_directory_path() / "binsbom-test-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) {
    throw std::runtime_error("mkdtemp failed");
  }
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::vector<std::uint8_t> Bytes(std::string_view s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

void WriteBytes(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void WriteText(const std::filesystem::path& path, std::string_view text) {
  WriteBytes(path, Bytes(text));
}

std::vector<std::uint8_t> MakeElf(std::string_view payload) {
  std::vector<std::uint8_t> b = {0x7F, 'E', 'L', 'F', 2, 1, 1, 0};
  b.resize(64, 0);
  b.insert(b.end(), payload.begin(), payload.end());
  return b;
}

std::vector<std::uint8_t> MakePe(std::string_view payload) {
  std::vector<std::uint8_t> b(0x40, 0);
  b[0] = 'M';
  b[1] = 'Z';
  b[0x3C] = 0x40;
  for (std::uint8_t c : {'P', 'E', '\0', '\0'}) b.push_back(c);
  b.resize(0x80, 0);
  b.insert(b.end(), payload.begin(), payload.end());
  return b;
}

bool HaveGnuStrings() {
  return std::string_view(BINSBOM_STRINGS_PATH).find("NOTFOUND") ==
             std::string_view::npos &&
         std::filesystem::exists(BINSBOM_STRINGS_PATH);
}

std::vector<ExtractedString> GnuStrings(std::span<const std::uint8_t> bytes,
                                        std::size_t min_len) {
  TempDir dir;
  const auto input = dir / "buf.bin";
  WriteBytes(input, bytes);
  const std::string cmd = std::string(BINSBOM_STRINGS_PATH) +
                          " -a -t d -n " + std::to_string(min_len) + " " +
                          ShellQuote(input.string());
  const CommandResult r = RunCommand(cmd);
  if (r.exit_code != 0) throw std::runtime_error("strings failed");
  std::vector<ExtractedString> out;
  std::size_t pos = 0;
  while (pos < r.out.size()) {
    std::size_t end = r.out.find('\n', pos);
    if (end == std::string::npos) end = r.out.size();
    std::string_view line(r.out.data() + pos, end - pos);
    pos = end + 1;
    const std::size_t digits = line.find_first_not_of(' ');
    const std::size_t space = line.find(' ', digits);
    ExtractedString s;
    s.offset = std::stoull(std::string(line.substr(digits, space - digits)));
    s.text = std::string(line.substr(space + 1));
    out.push_back(std::move(s));
  }
  return out;
}

double BruteForceAuc(std::span<const ScoredPair> scored) {
  std::uint64_t twice = 0;
  std::uint64_t pairs = 0;
  for (const auto& p : scored) {
    if (p.label != 1) continue;
    for (const auto& n : scored) {
      if (n.label != 0) continue;
      ++pairs;
      if (p.probability > n.probability) twice += 2;
      if (p.probability == n.probability) twice += 1;
    }
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pairs));
}

EmbeddingModel RandomSmallModel(RandomEngine& rng, bool projection) {
  EncoderConfig config;
  config.vocab_size = 5 + rng() % 16;
  config.embed_dim = 2 + rng() % 7;
  config.projection = projection;
  config.hidden_dim = projection ? 2 + rng() % 7 : 0;
  config.seed = rng();
  EmbeddingModel model = InitModel(config);
  std::uniform_real_distribution<double> wide(-1.0, 1.0);
  for (std::size_t r = 1; r < model.token_table.rows; ++r) {
    for (std::size_t c = 0; c < model.token_table.cols; ++c) {
      model.token_table.at(r, c) = wide(rng);
    }
  }
  if (model.projection) {
    for (double& b : model.projection->bias) b = 0.1 * wide(rng);
  }
  return model;
}

double GradientRelativeError(const EmbeddingModel& model,
                             std::span<const int> product_ids,
                             std::span<const int> string_ids, int label,
                             SimilarityKind kind, double step) {
  ModelGradient grad(model);
  PairObjective(model, product_ids, string_ids, label, kind, 1e-6, &grad);

  EmbeddingModel probe = model;
  std::vector<double*> params;
  std::vector<double> analytic;
  for (std::size_t i = 0; i < probe.token_table.data.size(); ++i) {
    params.push_back(&probe.token_table.data[i]);
    analytic.push_back(grad.token_table.data[i]);
  }
  if (probe.projection) {
    for (std::size_t i = 0; i < probe.projection->weight.data.size(); ++i) {
      params.push_back(&probe.projection->weight.data[i]);
      analytic.push_back(grad.projection_weight.data[i]);
    }
    for (std::size_t i = 0; i < probe.projection->bias.size(); ++i) {
      params.push_back(&probe.projection->bias[i]);
      analytic.push_back(grad.projection_bias[i]);
    }
  }
  double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = *params[i];
    *params[i] = saved + step;
    const double up = PairObjective(probe, product_ids, string_ids, label,
                                    kind, 1e-6, nullptr);
    *params[i] = saved - step;
    const double down = PairObjective(probe, product_ids, string_ids, label,
                                      kind, 1e-6, nullptr);
    *params[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    diff2 += (analytic[i] - numeric) * (analytic[i] - numeric);
    a2 += analytic[i] * analytic[i];
    n2 += numeric * numeric;
  }
  const double scale = std::max(std::sqrt(a2), std::sqrt(n2));
  return scale == 0.0 ? 0.0 : std::sqrt(diff2) / scale;
}

CommandResult RunCommand(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return result;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
    result.out.append(buf, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string ShellQuote(std::string_view s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  return q + "'";
}

}  // namespace binsbom::testing
