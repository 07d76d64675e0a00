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

// Client for an out-of-process sentence encoder (e.g. a pretrained
// transformer served by a small script).
//
// Wire protocol, line oriented, UTF-8:
//   endpoint -> client   "EMBED <dim>\n" once, on start
//   client -> endpoint   one text per line
//   endpoint -> client   one line per text: <dim> decimal floats separated by
//                        single spaces, in request order
//
// An endpoint is either "unix:<path>" (connect to a listening local socket)
// or a shell command whose stdin/stdout carry the protocol.

#ifndef BINSBOM_EXTERNAL_ENCODER_H_
#define BINSBOM_EXTERNAL_ENCODER_H_

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

#include "binsbom/encoder.h"

namespace binsbom {

// Parses one response line into exactly `dim` finite values. Throws
// kDimensionMismatch on a wrong count and kProtocolError on a bad number.
Embedding ParseEmbeddingLine(std::string_view line, std::size_t dim);

// Parses "EMBED <dim>". Throws kProtocolError otherwise.
std::size_t ParseHandshake(std::string_view line);

class ExternalEncoder : public TextEmbedder {
 public:
  // Connects (or spawns) and reads the handshake. Throws
  // kEndpointUnavailable if nothing answers, kProtocolError on a bad
  // handshake, and kDimensionMismatch if `expected_dim` is given and differs.
  static ExternalEncoder Open(
      const std::string& endpoint,
      std::optional<std::size_t> expected_dim = std::nullopt,
      std::chrono::milliseconds timeout = std::chrono::seconds(30));

  ExternalEncoder(ExternalEncoder&& other) noexcept;
  ExternalEncoder& operator=(ExternalEncoder&& other) noexcept;
  ExternalEncoder(const ExternalEncoder&) = delete;
  ExternalEncoder& operator=(const ExternalEncoder&) = delete;
  ~ExternalEncoder() override;

  std::vector<Embedding> EmbedTexts(
      std::span<const std::string> texts) override;
  std::size_t dim() const override { return dim_; }
  std::string fingerprint() const override;

 private:
  ExternalEncoder(std::string endpoint, int fd, pid_t child,
                  std::chrono::milliseconds timeout);

  std::string ReadLine();
  void WriteAll(std::string_view data);
  void Close() noexcept;

  std::string endpoint_;
  int fd_ = -1;
  pid_t child_ = -1;
  std::chrono::milliseconds timeout_;
  std::size_t dim_ = 0;
  std::string buffer_;
};

}  // namespace binsbom

#endif  // BINSBOM_EXTERNAL_ENCODER_H_
