// Copyright 2026 The mrforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mrforge/wire.h"

#include <errno.h>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <map>
#include <thread>

#include "json.hpp"
#include "mrforge/error.h"
#include "mrforge/text.h"

extern char **environ;

namespace mrforge {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

json BooleansJson(SourceBooleans b) { return json::array({b.e2e, b.nyc}); }

SourceBooleans BooleansFromJson(const json &j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_boolean() || !j[1].is_boolean()) {
    throw ParseError("source booleans must be [bool, bool]", 0);
  }
  return {j[0].get<bool>(), j[1].get<bool>()};
}

json ParseObject(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception &e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0);
  }
  if (!j.is_object()) throw ParseError("expected a JSON object", 0);
  return j;
}

void SetNonBlocking(int fd) {
  int flags = fcntl(fd, F_GETFL, 0);
  if (flags >= 0) fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

int RemainingMs(Clock::time_point deadline) {
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return static_cast<int>(std::max<long>(0, left.count()));
}

// Blocking line reader for the endpoint side.
class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  // Appends complete lines to `lines`. Blocks until at least one line or
  // EOF; afterwards drains whatever is already readable. False at EOF with
  // nothing returned.
  bool ReadBatch(std::vector<std::string> *lines) {
    bool blocking = true;
    while (true) {
      std::size_t nl;
      while ((nl = buffer_.find('\n')) != std::string::npos) {
        lines->push_back(buffer_.substr(0, nl));
        buffer_.erase(0, nl + 1);
        blocking = false;
      }
      if (eof_) {
        if (!buffer_.empty()) {
          lines->push_back(buffer_);
          buffer_.clear();
        }
        return !lines->empty();
      }
      if (!blocking) {
        pollfd p{fd_, POLLIN, 0};
        if (poll(&p, 1, 0) <= 0) return true;
      }
      char chunk[65536];
      ssize_t n = read(fd_, chunk, sizeof(chunk));
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        eof_ = true;
        continue;
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buffer_;
  bool eof_ = false;
};

bool WriteBlocking(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) n = write(fd, data.data(), data.size());
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

std::vector<std::string> ModeNames(const std::vector<SupervisionMode> &modes) {
  std::vector<std::string> out;
  for (SupervisionMode m : modes) out.emplace_back(SupervisionName(m));
  return out;
}

}  // namespace

bool WireHandshake::Supports(SupervisionMode mode) const {
  return std::find(supervision.begin(), supervision.end(), mode) != supervision.end();
}

std::string EncodeHandshake(const WireHandshake &handshake) {
  json j;
  j["protocol"] = handshake.protocol;
  j["version"] = handshake.version;
  j["supervision"] = ModeNames(handshake.supervision);
  if (!handshake.generator.empty()) j["generator"] = handshake.generator;
  return j.dump();
}

WireHandshake DecodeHandshake(std::string_view line) {
  WireHandshake h;
  try {
    json j = ParseObject(line);
    h.protocol = j.at("protocol").get<std::string>();
    h.version = j.at("version").get<int>();
    for (const auto &m : j.value("supervision", json::array())) {
      h.supervision.push_back(ParseSupervision(m.get<std::string>()));
    }
    h.generator = j.value("generator", "");
  } catch (const std::exception &e) {
    throw EndpointError(std::string("bad handshake: ") + e.what());
  }
  if (h.protocol != kWireProtocol) {
    throw EndpointError("endpoint speaks '" + h.protocol + "', not " +
                        std::string(kWireProtocol));
  }
  if (h.version != kWireVersion) {
    throw EndpointError("unsupported protocol version " + std::to_string(h.version));
  }
  return h;
}

std::string EncodeRequest(const GenerationRequest &request) {
  SerializedMr serialized = SerializeMr(request.mr, request.supervision);
  json j;
  j["id"] = request.id;
  j["mr"] = FormatMr(request.mr);
  j["supervision"] = SupervisionName(request.supervision);
  j["source_booleans"] = BooleansJson(SourceBooleansFor(request.mr.provenance));
  j["guide_hint"] =
      serialized.guide_hint ? BooleansJson(*serialized.guide_hint) : json(nullptr);
  json tokens = json::array();
  for (const MrToken &t : serialized.tokens) tokens.push_back({t.attribute, t.value});
  j["tokens"] = std::move(tokens);
  return j.dump();
}

WireRequest DecodeRequest(std::string_view line) {
  json j = ParseObject(line);
  WireRequest r;
  try {
    r.id = j.at("id").get<std::string>();
    r.mr = j.at("mr").get<std::string>();
    r.supervision = ParseSupervision(j.value("supervision", "nosup"));
    if (j.contains("source_booleans")) r.source_booleans = BooleansFromJson(j["source_booleans"]);
    if (j.contains("guide_hint") && !j["guide_hint"].is_null()) {
      r.guide_hint = BooleansFromJson(j["guide_hint"]);
    }
    for (const auto &t : j.value("tokens", json::array())) {
      r.tokens.push_back({t.at(0).get<std::string>(), t.at(1).get<std::string>()});
    }
  } catch (const ParseError &) {
    throw;
  } catch (const std::exception &e) {
    throw ParseError(std::string("bad request: ") + e.what(), 0);
  }
  return r;
}

std::string EncodeResponse(const GenerationResult &result) {
  json j;
  j["id"] = result.id;
  if (result.text) {
    j["text"] = *result.text;
  } else {
    j["error"] = result.error.empty() ? "unknown error" : result.error;
  }
  return j.dump();
}

GenerationResult DecodeResponse(std::string_view line) {
  json j = ParseObject(line);
  GenerationResult r;
  if (!j.contains("id") || !j["id"].is_string()) throw ParseError("response without id", 0);
  r.id = j["id"].get<std::string>();
  if (j.contains("text") && j["text"].is_string()) {
    r.text = j["text"].get<std::string>();
  } else if (j.contains("error") && j["error"].is_string()) {
    r.error = j["error"].get<std::string>();
  } else {
    r.error = "malformed response: neither text nor error";
  }
  return r;
}

std::string EncodeRetrain(const RetrainMessage &message) {
  json j;
  j["retrain"] = {{"corpus_delta_path", message.corpus_delta_path},
                  {"corpus_path", message.corpus_path},
                  {"round", message.round}};
  return j.dump();
}

std::string EncodeRetrainAck(int round, const std::string &error) {
  json j;
  j["round"] = round;
  j["status"] = error.empty() ? "ok" : "error";
  if (!error.empty()) j["error"] = error;
  return j.dump();
}

long ServeWire(int in_fd, int out_fd, Generator &generator, const Ontology &ontology,
               const ServeOptions &options) {
  WireHandshake handshake;
  handshake.supervision = options.supervision;
  handshake.generator = generator.Describe();
  if (!WriteBlocking(out_fd, EncodeHandshake(handshake) + "\n")) return 0;

  LineReader reader(in_fd);
  long responded = 0;
  std::vector<std::string> lines;
  while (true) {
    lines.clear();
    if (!reader.ReadBatch(&lines)) return responded;

    std::vector<std::string> out;
    std::vector<GenerationRequest> batch;
    std::vector<std::string> batch_out;
    auto flush_batch = [&] {
      if (batch.empty()) return;
      for (const GenerationResult &r : generator.Generate(batch)) {
        batch_out.push_back(EncodeResponse(r));
      }
      batch.clear();
    };
    auto push_out = [&](std::string line) {
      flush_batch();
      if (options.reverse_batches) std::reverse(batch_out.begin(), batch_out.end());
      out.insert(out.end(), batch_out.begin(), batch_out.end());
      batch_out.clear();
      if (!line.empty()) out.push_back(std::move(line));
    };

    for (const std::string &line : lines) {
      if (CollapseWhitespace(line).empty()) continue;
      json j;
      try {
        j = ParseObject(line);
      } catch (const ParseError &e) {
        push_out(EncodeResponse({"", std::nullopt, e.what(), std::nullopt}));
        continue;
      }
      if (j.contains("retrain")) {
        flush_batch();
        int round = 0;
        std::string error;
        try {
          const json &m = j["retrain"];
          RetrainMessage message{m.value("corpus_delta_path", ""), m.value("corpus_path", ""),
                                 m.value("round", 0)};
          round = message.round;
          generator.Retrain(message);
        } catch (const std::exception &e) {
          error = e.what();
        }
        push_out(EncodeRetrainAck(round, error));
        continue;
      }
      std::string id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : "";
      try {
        WireRequest request = DecodeRequest(line);
        if (!handshake.Supports(request.supervision)) {
          throw ParseError("unsupported supervision mode", 0);
        }
        MeaningRepresentation mr = ParseMr(request.mr, ontology);
        batch.push_back({request.id, std::move(mr), request.supervision});
      } catch (const Error &e) {
        flush_batch();
        batch_out.push_back(EncodeResponse({id, std::nullopt, e.what(), std::nullopt}));
      }
    }
    push_out("");

    for (const std::string &line : out) {
      if (options.die_after >= 0 && responded >= options.die_after) return responded;
      if (!WriteBlocking(out_fd, line + "\n")) return responded;
      ++responded;
    }
  }
}

void ServeUnixSocket(const std::string &path, Generator &generator, const Ontology &ontology,
                     const ServeOptions &options, int max_connections) {
  int fd = socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw EndpointError(std::string("socket: ") + std::strerror(errno));
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path)) {
    close(fd);
    throw EndpointError("socket path too long: " + path);
  }
  std::strncpy(addr.sun_path, path.c_str(), sizeof(addr.sun_path) - 1);
  unlink(path.c_str());
  if (bind(fd, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) != 0 || listen(fd, 4) != 0) {
    std::string why = std::strerror(errno);
    close(fd);
    throw EndpointError("cannot listen on " + path + ": " + why);
  }
  for (int served = 0; max_connections < 0 || served < max_connections; ++served) {
    int conn = accept(fd, nullptr, nullptr);
    if (conn < 0) {
      if (errno == EINTR) continue;
      break;
    }
    ServeWire(conn, conn, generator, ontology, options);
    close(conn);
  }
  close(fd);
  unlink(path.c_str());
}

std::unique_ptr<RemoteGenerator> RemoteGenerator::Spawn(const std::string &command,
                                                        const RemoteOptions &options) {
  int to_child[2], from_child[2];
  if (pipe2(to_child, O_CLOEXEC) != 0) {
    throw EndpointError(std::string("pipe: ") + std::strerror(errno));
  }
  if (pipe2(from_child, O_CLOEXEC) != 0) {
    close(to_child[0]);
    close(to_child[1]);
    throw EndpointError(std::string("pipe: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
  const char *argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
  pid_t pid = 0;
  int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char **>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  close(to_child[0]);
  close(from_child[1]);
  if (rc != 0) {
    close(to_child[1]);
    close(from_child[0]);
    throw EndpointError("cannot spawn '" + command + "': " + std::strerror(rc));
  }
  return std::make_unique<RemoteGenerator>(from_child[0], to_child[1], pid, options,
                                           "exec:" + command);
}

std::unique_ptr<RemoteGenerator> RemoteGenerator::Connect(const std::string &socket_path,
                                                          const RemoteOptions &options) {
  int fd = socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw EndpointError(std::string("socket: ") + std::strerror(errno));
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (socket_path.size() >= sizeof(addr.sun_path)) {
    close(fd);
    throw EndpointError("socket path too long: " + socket_path);
  }
  std::strncpy(addr.sun_path, socket_path.c_str(), sizeof(addr.sun_path) - 1);
  if (connect(fd, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) != 0) {
    std::string why = std::strerror(errno);
    close(fd);
    throw EndpointError("cannot connect to " + socket_path + ": " + why);
  }
  int write_fd = dup(fd);
  return std::make_unique<RemoteGenerator>(fd, write_fd, 0, options, "unix:" + socket_path);
}

RemoteGenerator::RemoteGenerator(int read_fd, int write_fd, pid_t child,
                                 const RemoteOptions &options, std::string description)
    : read_fd_(read_fd),
      write_fd_(write_fd),
      child_(child),
      options_(options),
      description_(std::move(description)) {
  // Writes to a dead pipe must surface as errors, not kill the process.
  signal(SIGPIPE, SIG_IGN);
  SetNonBlocking(read_fd_);
  SetNonBlocking(write_fd_);
  std::optional<std::string> line = ReadLine(options_.handshake_timeout_ms);
  if (!line) {
    Close();
    throw EndpointError(description_ + ": no handshake from endpoint");
  }
  try {
    handshake_ = DecodeHandshake(*line);
  } catch (const EndpointError &) {
    Close();
    throw;
  }
}

RemoteGenerator::~RemoteGenerator() { Close(); }

void RemoteGenerator::Close() {
  if (write_fd_ >= 0) close(write_fd_);
  if (read_fd_ >= 0) close(read_fd_);
  write_fd_ = read_fd_ = -1;
  alive_ = false;
  if (child_ > 0) {
    auto deadline = Clock::now() + std::chrono::seconds(2);
    while (waitpid(child_, nullptr, WNOHANG) == 0) {
      if (Clock::now() > deadline) {
        kill(child_, SIGKILL);
        waitpid(child_, nullptr, 0);
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    child_ = 0;
  }
}

bool RemoteGenerator::WriteAll(std::string_view data, int timeout_ms) {
  auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
  while (!data.empty()) {
    ssize_t n = write(write_fd_, data.data(), data.size());
    if (n > 0) {
      data.remove_prefix(static_cast<std::size_t>(n));
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
      pollfd p{write_fd_, POLLOUT, 0};
      if (poll(&p, 1, RemainingMs(deadline)) <= 0) return false;
      continue;
    }
    // Answers already sent by the endpoint stay readable.
    write_closed_ = true;
    return false;
  }
  return true;
}

std::optional<std::string> RemoteGenerator::ReadLine(int timeout_ms) {
  auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
  while (true) {
    std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    if (!alive_ || read_fd_ < 0) return std::nullopt;
    pollfd p{read_fd_, POLLIN, 0};
    int ready = poll(&p, 1, RemainingMs(deadline));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) return std::nullopt;
    char chunk[65536];
    ssize_t n = read(read_fd_, chunk, sizeof(chunk));
    if (n < 0 && (errno == EINTR || errno == EAGAIN)) continue;
    if (n <= 0) {
      alive_ = false;
      return std::nullopt;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<GenerationResult> RemoteGenerator::Generate(
    const std::vector<GenerationRequest> &requests) {
  std::vector<GenerationResult> results(requests.size());
  std::map<std::string, std::size_t> pending;  // id -> index
  std::map<std::size_t, Clock::time_point> deadlines;
  std::size_t next = 0;
  std::size_t done = 0;

  auto finish = [&](std::size_t index, GenerationResult result) {
    result.id = requests[index].id;
    results[index] = std::move(result);
    pending.erase(requests[index].id);
    deadlines.erase(index);
    ++done;
  };
  auto fail = [&](std::size_t index, const std::string &why) {
    finish(index, {"", std::nullopt, why, std::nullopt});
  };

  // Ids must be unique within a batch to be matchable.
  std::map<std::string, int> seen_ids;
  for (const GenerationRequest &r : requests) ++seen_ids[r.id];

  while (done < requests.size()) {
    if (!alive_) {
      for (std::size_t i = 0; i < requests.size(); ++i) {
        if (!results[i].ok() && results[i].error.empty()) fail(i, "endpoint closed");
      }
      break;
    }
    if (write_closed_) {
      for (; next < requests.size(); ++next) fail(next, "endpoint closed");
    }
    while (next < requests.size() && pending.size() < static_cast<std::size_t>(
                                                          std::max(1, options_.max_in_flight))) {
      std::size_t index = next++;
      const GenerationRequest &request = requests[index];
      if (seen_ids[request.id] > 1) {
        fail(index, "duplicate request id in batch");
        continue;
      }
      if (!handshake_.Supports(request.supervision)) {
        fail(index, "endpoint does not support supervision mode " +
                        std::string(SupervisionName(request.supervision)));
        continue;
      }
      pending[request.id] = index;
      deadlines[index] = Clock::now() + std::chrono::milliseconds(options_.timeout_ms);
      if (!WriteAll(EncodeRequest(request) + "\n", options_.timeout_ms)) {
        fail(index, write_closed_ ? "endpoint closed" : "timeout writing request");
        break;
      }
    }
    if (pending.empty()) continue;

    auto earliest = std::min_element(
        deadlines.begin(), deadlines.end(),
        [](const auto &a, const auto &b) { return a.second < b.second; });
    std::optional<std::string> line = ReadLine(RemainingMs(earliest->second));
    if (!line) {
      if (!alive_) continue;
      auto now = Clock::now();
      std::vector<std::size_t> expired;
      for (const auto &[index, deadline] : deadlines) {
        if (deadline <= now) expired.push_back(index);
      }
      for (std::size_t index : expired) fail(index, "timeout");
      continue;
    }
    if (CollapseWhitespace(*line).empty()) continue;
    GenerationResult response;
    try {
      response = DecodeResponse(*line);
    } catch (const ParseError &) {
      stray_.push_back(*line);
      continue;
    }
    auto it = pending.find(response.id);
    if (it == pending.end()) {
      stray_.push_back(*line);
      continue;
    }
    finish(it->second, std::move(response));
  }
  return results;
}

void RemoteGenerator::Retrain(const RetrainMessage &message) {
  if (!healthy()) throw EndpointError(description_ + ": endpoint closed");
  if (!WriteAll(EncodeRetrain(message) + "\n", options_.timeout_ms)) {
    throw EndpointError(description_ + ": cannot send retrain message");
  }
  auto deadline = Clock::now() + std::chrono::milliseconds(options_.timeout_ms);
  while (true) {
    std::optional<std::string> line = ReadLine(RemainingMs(deadline));
    if (!line) throw EndpointError(description_ + ": no retrain acknowledgement");
    json j;
    try {
      j = ParseObject(*line);
    } catch (const ParseError &) {
      stray_.push_back(*line);
      continue;
    }
    if (!j.contains("status")) {
      stray_.push_back(*line);
      continue;
    }
    if (j.value("status", "") != "ok") {
      throw EndpointError(description_ + ": retrain failed: " + j.value("error", "?"));
    }
    return;
  }
}

std::unique_ptr<Generator> OpenEndpoint(const std::string &spec, const Lexicon &lexicon,
                                        const RemoteOptions &options) {
  std::string kind = spec;
  std::string rest;
  if (std::size_t colon = spec.find(':'); colon != std::string::npos) {
    kind = spec.substr(0, colon);
    rest = spec.substr(colon + 1);
  }
  kind = NormalizeValue(kind);
  if (kind == "template") return std::make_unique<TemplateGenerator>(lexicon);
  if (kind == "echo") return std::make_unique<EchoGenerator>();
  if (kind == "corrupt") {
    return std::make_unique<CorruptingGenerator>(lexicon, ParseNoiseSpec(rest));
  }
  if (kind == "surrogate") {
    double half = 500;
    NoiseConfig noise = ParseNoiseSpec(rest, &half);
    return std::make_unique<SurrogateLearner>(lexicon, noise, half);
  }
  if (kind == "exec") {
    if (rest.empty()) throw ConfigError("exec endpoint needs a command");
    return RemoteGenerator::Spawn(rest, options);
  }
  if (kind == "unix") {
    if (rest.empty()) throw ConfigError("unix endpoint needs a socket path");
    return RemoteGenerator::Connect(rest, options);
  }
  throw ConfigError("unknown endpoint '" + spec + "'");
}

}  // namespace mrforge
