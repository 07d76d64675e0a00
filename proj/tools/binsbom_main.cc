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

// binsbom command-line tool. Subcommands follow the pipeline stages:
//   scan -> corpus -> train / eval -> index -> match / sbom

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "binsbom/binscan.h"
#include "binsbom/corpus.h"
#include "binsbom/encoder.h"
#include "binsbom/error.h"
#include "binsbom/evalx.h"
#include "binsbom/external_encoder.h"
#include "binsbom/io.h"
#include "binsbom/random.h"
#include "binsbom/sbomgen.h"
#include "binsbom/simtrain.h"
#include "binsbom/tokenizer.h"

namespace binsbom {
namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitProtocol = 3;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError:
      return kExitIo;
    case ErrorCode::kProtocolError:
    case ErrorCode::kEndpointUnavailable:
      return kExitProtocol;
    default:
      return kExitValidation;
  }
}

struct Options {
  std::uint64_t seed = 0;
  bool pretty = false;
  std::string out;

  // scan / corpus
  std::vector<std::string> paths;
  std::string pattern{kDefaultVersionPattern};
  std::size_t min_len = kDefaultMinStringLength;
  std::size_t synth_products = 0;
  std::size_t synth_samples = 200;
  std::string product;
  std::string package;
  std::string version;

  // train / eval
  std::string corpus;
  std::string config_file;
  std::string mode = "random";
  std::size_t k_classes = 20;
  std::size_t n_per_class = 4000;
  std::size_t negatives = 1;
  std::size_t batch_size = 64;
  std::size_t epochs = 1;
  double lr = 0.05;
  std::string similarity = "cosine";
  double threshold = 0.5;
  std::size_t embed_dim = 32;
  std::size_t vocab_size = kDefaultVocabSize;
  std::vector<std::size_t> sweep;

  // model artifacts
  std::string model;
  std::string vocab;
  std::string index;
  std::string products;
  std::string feed;
  std::string external_encoder;
  std::string query;
};

void LogHeader(std::string_view command, const nlohmann::json& resolved) {
  std::cerr << "binsbom " << command << " " << resolved.dump() << "\n";
}

// Writes to --out atomically, or to stdout when no path was given.
void Emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    WriteFileAtomic(opt.out, text);
  }
}

std::string DumpJson(const nlohmann::json& j, bool pretty) {
  return (pretty ? j.dump(2) : j.dump()) + "\n";
}

TrainConfig ResolveTrainConfig(const Options& opt, const CLI::App& sub) {
  TrainConfig config;
  if (!opt.config_file.empty()) {
    config = ParseTrainConfig(ReadFileText(opt.config_file), config);
  }
  // Explicit flags win over the config file.
  if (sub.count("--batch-size") > 0 || opt.config_file.empty()) {
    config.batch_size = opt.batch_size;
  }
  if (sub.count("--epochs") > 0 || opt.config_file.empty()) {
    config.epochs = opt.epochs;
  }
  if (sub.count("--lr") > 0 || opt.config_file.empty()) {
    config.learning_rate = opt.lr;
  }
  if (sub.count("--similarity") > 0 || opt.config_file.empty()) {
    config.similarity = ParseSimilarity(opt.similarity);
  }
  ValidateTrainConfig(config);
  return config;
}

ScanConfig ResolveScanConfig(const Options& opt) {
  if (opt.min_len == 0) {
    throw Error(ErrorCode::kInvalidArgument, "--min-len must be positive");
  }
  return ScanConfig{opt.min_len, VersionPattern(opt.pattern)};
}

// Owns whichever encoder the flags select.
struct EmbedderHandle {
  std::optional<EmbeddingModel> model;
  std::optional<WordPieceVocab> vocab;
  std::unique_ptr<ModelEmbedder> local;
  std::optional<ExternalEncoder> external;

  TextEmbedder& get() {
    if (external) return *external;
    return *local;
  }
};

EmbedderHandle OpenEmbedder(const Options& opt) {
  EmbedderHandle h;
  if (!opt.external_encoder.empty()) {
    h.external.emplace(ExternalEncoder::Open(opt.external_encoder));
    return h;
  }
  if (opt.model.empty() || opt.vocab.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "--model and --vocab are required without --external-encoder");
  }
  h.model.emplace(LoadModel(opt.model));
  h.vocab.emplace(LoadVocab(opt.vocab));
  h.local = std::make_unique<ModelEmbedder>(*h.model, *h.vocab);
  return h;
}

int RunScan(const Options& opt) {
  const ScanConfig config = ResolveScanConfig(opt);
  LogHeader("scan", {{"seed", opt.seed},
                     {"pattern", opt.pattern},
                     {"min_len", opt.min_len},
                     {"paths", opt.paths}});
  std::string out;
  for (const auto& path : opt.paths) {
    out += ToJson(ScanFile(path, config)).dump() + "\n";
  }
  Emit(opt, out);
  return 0;
}

int RunCorpus(const Options& opt) {
  std::vector<VersionStringRecord> records;
  if (opt.synth_products > 0) {
    LogHeader("corpus", {{"seed", opt.seed},
                         {"synthetic_products", opt.synth_products},
                         {"samples", opt.synth_samples}});
    records = SynthCorpus(opt.synth_products, opt.synth_samples, opt.seed);
  } else {
    if (opt.paths.empty() || opt.product.empty() || opt.package.empty() ||
        opt.version.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "ingestion needs files plus --product, --package and "
                  "--version (or use --synthetic)");
    }
    const ScanConfig config = ResolveScanConfig(opt);
    LogHeader("corpus", {{"seed", opt.seed},
                         {"product", opt.product},
                         {"package", opt.package},
                         {"version", opt.version},
                         {"pattern", opt.pattern},
                         {"min_len", opt.min_len},
                         {"paths", opt.paths}});
    std::vector<InputFile> files;
    for (const auto& path : opt.paths) {
      files.push_back({path, ReadFileBytes(path)});
    }
    records = IngestPackage(files, {opt.product, opt.package, opt.version},
                            config);
  }
  Emit(opt, ToJsonl(records));
  return 0;
}

int RunTrain(const Options& opt, const CLI::App& sub) {
  const TrainConfig base = ResolveTrainConfig(opt, sub);
  if (opt.model.empty() || opt.vocab.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--model and --vocab are required");
  }
  const auto records = LoadRecords(opt.corpus);
  TrainConfig config = base;
  config.seed = DeriveSeed(opt.seed, "train");
  LogHeader("train", {{"seed", opt.seed},
                      {"corpus", opt.corpus},
                      {"negatives", opt.negatives},
                      {"embed_dim", opt.embed_dim},
                      {"vocab_size", opt.vocab_size},
                      {"train", ToJson(config)}});

  const auto pairs =
      MakePairs(records, opt.negatives, DeriveSeed(opt.seed, "pairs"));
  std::vector<std::string> texts;
  std::set<std::string> seen;
  for (const auto& p : pairs) {
    if (seen.insert(p.product).second) texts.push_back(p.product);
    if (seen.insert(p.version_string).second) texts.push_back(p.version_string);
  }
  const WordPieceVocab vocab = TrainVocab(texts, opt.vocab_size);
  EncoderConfig enc;
  enc.embed_dim = opt.embed_dim;
  enc.vocab_size = vocab.size();
  enc.pad_id = vocab.pad_id();
  enc.seed = DeriveSeed(opt.seed, "encoder/init");
  TrainResult result = Train(InitModel(enc), vocab, pairs, config);

  SaveVocab(vocab, opt.vocab);
  SaveModel(result.model, opt.model);
  Emit(opt, DumpJson(ToJson(result.report), opt.pretty));
  return 0;
}

int RunEval(const Options& opt, const CLI::App& sub) {
  ExperimentConfig config;
  config.train = ResolveTrainConfig(opt, sub);
  config.encoder.embed_dim = opt.embed_dim;
  config.vocab_size = opt.vocab_size;
  config.negatives_per_positive = opt.negatives;
  config.threshold = opt.threshold;
  config.root_seed = opt.seed;
  config.split.k_classes = opt.k_classes;
  config.split.n_per_class = opt.n_per_class;
  if (opt.mode != "random" && opt.mode != "zero-shot") {
    throw Error(ErrorCode::kInvalidArgument, "unknown --mode " + opt.mode);
  }
  if (!opt.sweep.empty() && opt.mode != "zero-shot") {
    throw Error(ErrorCode::kInvalidArgument, "--sweep needs --mode zero-shot");
  }
  const auto records = LoadRecords(opt.corpus);
  LogHeader("eval", {{"seed", opt.seed},
                     {"corpus", opt.corpus},
                     {"mode", opt.mode},
                     {"k_classes", opt.k_classes},
                     {"n_per_class", opt.n_per_class},
                     {"negatives", opt.negatives},
                     {"embed_dim", opt.embed_dim},
                     {"vocab_size", opt.vocab_size},
                     {"threshold", opt.threshold},
                     {"train", ToJson(config.train)},
                     {"sweep", opt.sweep}});

  if (!opt.sweep.empty()) {
    const auto rows = RunEpochSweep(records, config, opt.sweep);
    if (opt.pretty) {
      std::vector<TableRow> table;
      for (const auto& r : rows) {
        table.push_back({std::to_string(r.epochs), r.result.metrics});
      }
      Emit(opt, FormatMetricsTable("Epochs", table));
    } else {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : rows) {
        j.push_back({{"epochs", r.epochs}, {"result", ToJson(r.result)}});
      }
      Emit(opt, DumpJson(j, false));
    }
    return 0;
  }

  const bool zero_shot = opt.mode == "zero-shot";
  const ExperimentResult result = zero_shot ? RunZeroShot(records, config)
                                            : RunFullyTrained(records, config);
  if (opt.pretty) {
    const TableRow row{zero_shot ? "Zero-Shot" : "Fully-Trained",
                       result.metrics};
    Emit(opt, FormatMetricsTable("Model", std::span(&row, 1)));
  } else {
    Emit(opt, DumpJson(ToJson(result), false));
  }
  return 0;
}

std::vector<std::string> ReadProductList(const Options& opt) {
  std::vector<std::string> products;
  if (!opt.products.empty()) {
    std::istringstream in(ReadFileText(opt.products));
    std::set<std::string> seen;
    for (std::string line; std::getline(in, line);) {
      std::string name = NormalizeProduct(line);
      if (!name.empty() && seen.insert(name).second) {
        products.push_back(std::move(name));
      }
    }
  } else if (!opt.corpus.empty()) {
    std::set<std::string> distinct;
    for (const auto& r : LoadRecords(opt.corpus)) distinct.insert(r.product);
    products.assign(distinct.begin(), distinct.end());
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "--products or --corpus is required");
  }
  return products;
}

int RunIndex(const Options& opt) {
  if (opt.out.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--out is required");
  }
  LogHeader("index", {{"seed", opt.seed},
                      {"products", opt.products},
                      {"corpus", opt.corpus},
                      {"model", opt.model},
                      {"vocab", opt.vocab},
                      {"external_encoder", opt.external_encoder}});
  const auto products = ReadProductList(opt);
  EmbedderHandle embedder = OpenEmbedder(opt);
  SaveProductIndex(BuildProductIndex(embedder.get(), products), opt.out);
  return 0;
}

MatchConfig ResolveMatchConfig(const Options& opt) {
  MatchConfig config;
  config.similarity = ParseSimilarity(opt.similarity);
  config.threshold = opt.threshold;
  return config;
}

// The index must come from the same encoder that embeds the queries.
void CheckIndexEncoder(const ProductIndex& index, TextEmbedder& embedder) {
  if (index.encoder_fingerprint != embedder.fingerprint()) {
    throw Error(ErrorCode::kInvalidArgument,
                "index was built with a different encoder");
  }
}

int RunMatch(const Options& opt) {
  const MatchConfig config = ResolveMatchConfig(opt);
  LogHeader("match", {{"seed", opt.seed},
                      {"index", opt.index},
                      {"string", opt.query},
                      {"match", ToJson(config)}});
  const ProductIndex index = LoadProductIndex(opt.index);
  EmbedderHandle embedder = OpenEmbedder(opt);
  CheckIndexEncoder(index, embedder.get());
  const MatchResult result =
      MatchString(index, embedder.get(), opt.query, config);
  Emit(opt, DumpJson(ToJson(result), opt.pretty));
  return 0;
}

int RunSbom(const Options& opt) {
  const MatchConfig match = ResolveMatchConfig(opt);
  const ScanConfig scan = ResolveScanConfig(opt);
  LogHeader("sbom", {{"seed", opt.seed},
                     {"index", opt.index},
                     {"feed", opt.feed},
                     {"pattern", opt.pattern},
                     {"min_len", opt.min_len},
                     {"match", ToJson(match)},
                     {"paths", opt.paths}});
  const ProductIndex index = LoadProductIndex(opt.index);
  std::optional<CveFeed> feed;
  if (!opt.feed.empty()) feed = LoadCveFeed(opt.feed);
  std::vector<ScanReport> reports;
  for (const auto& path : opt.paths) reports.push_back(ScanFile(path, scan));
  EmbedderHandle embedder = OpenEmbedder(opt);
  CheckIndexEncoder(index, embedder.get());
  SbomDocument doc = GenerateSbom(reports, index, embedder.get(), match);
  if (feed) doc = LookupCves(std::move(doc), *feed);
  Emit(opt, DumpJson(ToJson(doc), opt.pretty));
  return 0;
}

void AddScanFlags(CLI::App* sub, Options& opt) {
  sub->add_option("--pattern", opt.pattern, "Version-string regex");
  sub->add_option("--min-len", opt.min_len, "Minimum printable run length");
}

void AddTrainFlags(CLI::App* sub, Options& opt) {
  sub->add_option("--corpus", opt.corpus, "Record JSONL file")->required();
  sub->add_option("--config", opt.config_file, "key=value training config");
  sub->add_option("--negatives", opt.negatives,
                  "Negative pairs per positive");
  sub->add_option("--batch-size", opt.batch_size);
  sub->add_option("--epochs", opt.epochs);
  sub->add_option("--lr", opt.lr, "Learning rate");
  sub->add_option("--similarity", opt.similarity)
      ->check(CLI::IsMember({"cosine", "dot"}));
  sub->add_option("--embed-dim", opt.embed_dim);
  sub->add_option("--vocab-size", opt.vocab_size);
}

void AddEncoderFlags(CLI::App* sub, Options& opt) {
  sub->add_option("--model", opt.model, "Model JSON");
  sub->add_option("--vocab", opt.vocab, "Vocabulary JSON");
  sub->add_option("--external-encoder", opt.external_encoder,
                  "unix:<socket> or a command speaking the EMBED protocol");
}

void AddMatchFlags(CLI::App* sub, Options& opt) {
  sub->add_option("--index", opt.index, "Product index JSON")->required();
  sub->add_option("--similarity", opt.similarity)
      ->check(CLI::IsMember({"cosine", "dot"}));
  sub->add_option("--threshold", opt.threshold, "Inclusive acceptance bound");
  AddEncoderFlags(sub, opt);
}

int Main(int argc, char** argv) {
  CLI::App app{"Version-string extraction, product matching and SBOM output"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--seed", opt.seed, "Root seed")->envname("BINSBOM_SEED");
  app.add_flag("--pretty", opt.pretty, "Human-readable output");
  app.add_option("--out", opt.out, "Output path (default: stdout)");

  auto* scan = app.add_subcommand("scan", "Extract version-string candidates");
  scan->add_option("paths", opt.paths, "Files to scan")->required();
  AddScanFlags(scan, opt);

  auto* corpus = app.add_subcommand("corpus", "Build a labeled record corpus");
  corpus->add_option("paths", opt.paths, "Package files to ingest");
  corpus->add_option("--synthetic", opt.synth_products,
                     "Generate N synthetic products instead of ingesting");
  corpus->add_option("--samples", opt.synth_samples,
                     "Synthetic records per product");
  corpus->add_option("--product", opt.product);
  corpus->add_option("--package", opt.package);
  corpus->add_option("--version", opt.version);
  AddScanFlags(corpus, opt);

  auto* train = app.add_subcommand("train", "Train vocabulary and encoder");
  AddTrainFlags(train, opt);
  train->add_option("--model", opt.model, "Model output path");
  train->add_option("--vocab", opt.vocab, "Vocabulary output path");

  auto* eval = app.add_subcommand("eval", "Run a train/test experiment");
  AddTrainFlags(eval, opt);
  eval->add_option("--mode", opt.mode)
      ->check(CLI::IsMember({"random", "zero-shot"}));
  eval->add_option("--k-classes", opt.k_classes);
  eval->add_option("--n-per-class", opt.n_per_class);
  eval->add_option("--threshold", opt.threshold);
  eval->add_option("--sweep", opt.sweep, "Epoch counts for a sweep")
      ->delimiter(',');

  auto* index = app.add_subcommand("index", "Embed a product list");
  index->add_option("--products", opt.products, "One product per line");
  index->add_option("--corpus", opt.corpus, "Take products from a corpus");
  AddEncoderFlags(index, opt);

  auto* match = app.add_subcommand("match", "Match one version string");
  match->add_option("--string", opt.query)->required();
  AddMatchFlags(match, opt);

  auto* sbom = app.add_subcommand("sbom", "Scan binaries and emit an SBOM");
  sbom->add_option("paths", opt.paths, "Binaries to scan");
  sbom->add_option("--feed", opt.feed, "CVE feed JSONL");
  AddScanFlags(sbom, opt);
  AddMatchFlags(sbom, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*scan) return RunScan(opt);
    if (*corpus) return RunCorpus(opt);
    if (*train) return RunTrain(opt, *train);
    if (*eval) return RunEval(opt, *eval);
    if (*index) return RunIndex(opt);
    if (*match) return RunMatch(opt);
    if (*sbom) return RunSbom(opt);
  } catch (const Error& e) {
    std::cerr << "binsbom: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "binsbom: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace
}  // namespace binsbom

int main(int argc, char** argv) { return binsbom::Main(argc, argv); }
