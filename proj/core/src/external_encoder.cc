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

#include "binsbom/external_encoder.h"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <tuple>
#include <utility>

#include "binsbom/error.h"
#include "binsbom/io.h"

namespace binsbom {
namespace {

constexpr std::string_view kUnixPrefix = "unix:";
constexpr std::size_t kMaxLineBytes = 1 << 22;

int ConnectUnix(const std::string& path) {
  sockaddr_un addr{};
  if (path.size() >= sizeof(addr.sun_path)) {
    throw Error(ErrorCode::kEndpointUnavailable, "socket path too long");
  }
  const int fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) {
    throw Error(ErrorCode::kEndpointUnavailable, std::strerror(errno));
  }
  addr.sun_family = AF_UNIX;
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) !=
      0) {
    const int err = errno;
    ::close(fd);
    throw Error(ErrorCode::kEndpointUnavailable,
                "connect " + path + ": " + std::strerror(err));
  }
  return fd;
}

// Spawns `/bin/sh -c command` with stdin and stdout on one end of a socket
// pair. Sockets let us write with MSG_NOSIGNAL to a child that has died.
std::pair<int, pid_t> SpawnCommand(const std::string& command) {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw Error(ErrorCode::kEndpointUnavailable, std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    const int err = errno;
    ::close(fds[0]);
    ::close(fds[1]);
    throw Error(ErrorCode::kEndpointUnavailable, std::strerror(err));
  }
  if (pid == 0) {
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);
  return {fds[0], pid};
}

}  // namespace

Embedding ParseEmbeddingLine(std::string_view line, std::size_t dim) {
  Embedding out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    const std::string field(line.substr(pos, end - pos));
    if (field.empty()) {
      throw Error(ErrorCode::kProtocolError,
                  "empty field in embedding line (fields are separated by "
                  "single spaces)");
    }
    char* parse_end = nullptr;
    errno = 0;
    const double value = std::strtod(field.c_str(), &parse_end);
    if (parse_end != field.c_str() + field.size() || errno == ERANGE) {
      throw Error(ErrorCode::kProtocolError, "bad number '" + field + "'");
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kProtocolError, "non-finite value '" + field + "'");
    }
    out.push_back(value);
    pos = end + 1;
  }
  if (out.size() != dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "got " + std::to_string(out.size()) + " values, expected " +
                    std::to_string(dim));
  }
  return out;
}

std::size_t ParseHandshake(std::string_view line) {
  constexpr std::string_view kTag = "EMBED ";
  if (line.substr(0, kTag.size()) != kTag) {
    throw Error(ErrorCode::kProtocolError,
                "expected 'EMBED <dim>', got '" + std::string(line) + "'");
  }
  const std::string digits(line.substr(kTag.size()));
  if (digits.empty() ||
      digits.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorCode::kProtocolError, "bad dimension '" + digits + "'");
  }
  const auto dim = std::stoull(digits);
  if (dim == 0) throw Error(ErrorCode::kProtocolError, "dimension 0");
  return static_cast<std::size_t>(dim);
}

ExternalEncoder ExternalEncoder::Open(const std::string& endpoint,
                                      std::optional<std::size_t> expected_dim,
                                      std::chrono::milliseconds timeout) {
  int fd = -1;
  pid_t child = -1;
  if (endpoint.substr(0, kUnixPrefix.size()) == kUnixPrefix) {
    fd = ConnectUnix(endpoint.substr(kUnixPrefix.size()));
  } else {
    std::tie(fd, child) = SpawnCommand(endpoint);
  }
  ExternalEncoder encoder(endpoint, fd, child, timeout);
  encoder.dim_ = ParseHandshake(encoder.ReadLine());
  if (expected_dim && *expected_dim != encoder.dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "endpoint produces " + std::to_string(encoder.dim_) +
                    "-dim vectors, expected " + std::to_string(*expected_dim));
  }
  return encoder;
}

ExternalEncoder::ExternalEncoder(std::string endpoint, int fd, pid_t child,
                                 std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), fd_(fd), child_(child),
      timeout_(timeout) {}

ExternalEncoder::ExternalEncoder(ExternalEncoder&& other) noexcept
    : endpoint_(std::move(other.endpoint_)),
      fd_(std::exchange(other.fd_, -1)),
      child_(std::exchange(other.child_, -1)),
      timeout_(other.timeout_),
      dim_(other.dim_),
      buffer_(std::move(other.buffer_)) {}

ExternalEncoder& ExternalEncoder::operator=(ExternalEncoder&& other) noexcept {
  if (this != &other) {
    Close();
    endpoint_ = std::move(other.endpoint_);
    fd_ = std::exchange(other.fd_, -1);
    child_ = std::exchange(other.child_, -1);
    timeout_ = other.timeout_;
    dim_ = other.dim_;
    buffer_ = std::move(other.buffer_);
  }
  return *this;
}

ExternalEncoder::~ExternalEncoder() { Close(); }

void ExternalEncoder::Close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  if (child_ > 0) {
    // Closing the socket delivers EOF; give the endpoint a moment to exit.
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(child_, &status, WNOHANG) == child_) {
        child_ = -1;
        return;
      }
      ::usleep(10000);
    }
    ::kill(child_, SIGKILL);
    ::waitpid(child_, &status, 0);
    child_ = -1;
  }
}

std::string ExternalEncoder::ReadLine() {
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (buffer_.size() > kMaxLineBytes) {
      throw Error(ErrorCode::kProtocolError, "response line too long");
    }
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(timeout_.count()));
    if (ready == 0) {
      throw Error(ErrorCode::kEndpointUnavailable,
                  "timed out waiting for " + endpoint_);
    }
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kEndpointUnavailable, std::strerror(errno));
    }
    char chunk[4096];
    const ssize_t n = ::read(fd_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kEndpointUnavailable, std::strerror(errno));
    }
    if (n == 0) {
      throw Error(ErrorCode::kEndpointUnavailable,
                  "endpoint closed the connection: " + endpoint_);
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void ExternalEncoder::WriteAll(std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kEndpointUnavailable,
                  "write to endpoint failed: " + std::string(std::strerror(errno)));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::vector<Embedding> ExternalEncoder::EmbedTexts(
    std::span<const std::string> texts) {
  if (fd_ < 0) {
    throw Error(ErrorCode::kEndpointUnavailable, "encoder is closed");
  }
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    std::string line = text;
    for (char& c : line) {
      if (c == '\n' || c == '\r') c = ' ';
    }
    line += '\n';
    WriteAll(line);
    out.push_back(ParseEmbeddingLine(ReadLine(), dim_));
  }
  return out;
}

std::string ExternalEncoder::fingerprint() const {
  return Fingerprint("external:" + endpoint_ + ":" + std::to_string(dim_));
}

}  // namespace binsbom
