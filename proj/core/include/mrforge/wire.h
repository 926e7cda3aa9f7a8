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

#ifndef MRFORGE_WIRE_H_
#define MRFORGE_WIRE_H_

#include <sys/types.h>

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrforge/generator.h"

namespace mrforge {

// Line-delimited JSON between the toolkit and a generator process.
//
//   endpoint -> {"protocol":"mrforge-wire","version":1,"supervision":[...],
//                "generator":"..."}                              (once)
//   client   -> {"id","mr","supervision","source_booleans","guide_hint","tokens"}
//   endpoint -> {"id","text"} | {"id","error"}                  (any order)
//   client   -> {"retrain":{"corpus_delta_path","corpus_path","round"}}
//   endpoint -> {"round":n,"status":"ok"} | {"round":n,"status":"error","error"}
inline constexpr std::string_view kWireProtocol = "mrforge-wire";
inline constexpr int kWireVersion = 1;

struct WireHandshake {
  std::string protocol = std::string(kWireProtocol);
  int version = kWireVersion;
  std::vector<SupervisionMode> supervision;
  std::string generator;

  bool Supports(SupervisionMode mode) const;
};

std::string EncodeHandshake(const WireHandshake &handshake);
// Throws EndpointError on a foreign protocol or version.
WireHandshake DecodeHandshake(std::string_view line);

struct WireRequest {
  std::string id;
  std::string mr;
  SupervisionMode supervision = SupervisionMode::kNosup;
  SourceBooleans source_booleans;
  std::optional<SourceBooleans> guide_hint;
  std::vector<MrToken> tokens;
};

std::string EncodeRequest(const GenerationRequest &request);
// Throws ParseError.
WireRequest DecodeRequest(std::string_view line);

std::string EncodeResponse(const GenerationResult &result);
// Throws ParseError when the line is not a response object.
GenerationResult DecodeResponse(std::string_view line);

std::string EncodeRetrain(const RetrainMessage &message);
std::string EncodeRetrainAck(int round, const std::string &error = "");

struct ServeOptions {
  // Stop (closing the stream) after this many responses; -1 never.
  long die_after = -1;
  // Answer each batch of pending requests in reverse order.
  bool reverse_batches = false;
  std::vector<SupervisionMode> supervision = {SupervisionMode::kNosup, SupervisionMode::kAttr,
                                              SupervisionMode::kBool,
                                              SupervisionMode::kGuideHint};
};

// Runs the endpoint side of the protocol until end of input. Requests are
// parsed against `ontology`; bad requests get per-request errors. Returns
// the number of responses written.
long ServeWire(int in_fd, int out_fd, Generator &generator, const Ontology &ontology,
               const ServeOptions &options = {});

// Listens on a unix socket and serves connections one at a time, up to
// `max_connections` (-1 for no limit).
void ServeUnixSocket(const std::string &path, Generator &generator, const Ontology &ontology,
                     const ServeOptions &options = {}, int max_connections = -1);

struct RemoteOptions {
  int max_in_flight = 64;
  int timeout_ms = 30000;  // per item, from the moment it is sent
  int handshake_timeout_ms = 10000;
};

// Client for a generator speaking the wire protocol. Requests are
// pipelined up to max_in_flight and matched by id. Timeouts, malformed
// responses and a closed endpoint become per-item errors.
class RemoteGenerator : public Generator {
 public:
  // Spawns `/bin/sh -c command` with stdin/stdout connected. Throws
  // EndpointError if the process cannot start or fails the handshake.
  static std::unique_ptr<RemoteGenerator> Spawn(const std::string &command,
                                                const RemoteOptions &options = {});
  static std::unique_ptr<RemoteGenerator> Connect(const std::string &socket_path,
                                                  const RemoteOptions &options = {});

  // Takes ownership of the descriptors (and child, if > 0) and performs
  // the handshake.
  RemoteGenerator(int read_fd, int write_fd, pid_t child, const RemoteOptions &options,
                  std::string description);
  ~RemoteGenerator() override;

  RemoteGenerator(const RemoteGenerator &) = delete;
  RemoteGenerator &operator=(const RemoteGenerator &) = delete;

  std::vector<GenerationResult> Generate(const std::vector<GenerationRequest> &requests) override;
  // Sends the retrain message and waits for the acknowledgement. Throws
  // EndpointError on failure.
  void Retrain(const RetrainMessage &message) override;
  std::string Describe() const override { return description_; }
  bool healthy() const override { return alive_ && !write_closed_; }

  const WireHandshake &handshake() const { return handshake_; }
  bool alive() const { return healthy(); }
  // Response lines that matched no outstanding request.
  const std::vector<std::string> &stray_lines() const { return stray_; }

 private:
  bool WriteAll(std::string_view data, int timeout_ms);
  // Reads one line, waiting up to timeout_ms. nullopt on timeout or EOF.
  std::optional<std::string> ReadLine(int timeout_ms);
  void Close();

  int read_fd_;
  int write_fd_;
  pid_t child_;
  RemoteOptions options_;
  std::string description_;
  WireHandshake handshake_;
  std::string buffer_;
  bool alive_ = true;
  bool write_closed_ = false;
  std::vector<std::string> stray_;
};

// Builds a generator from an endpoint spec: "template", "echo",
// "corrupt:<noise>", "surrogate:<noise>,half=<n>", "exec:<command>",
// "unix:<path>". Throws ConfigError for unknown specs and EndpointError
// for unreachable remote endpoints.
std::unique_ptr<Generator> OpenEndpoint(const std::string &spec, const Lexicon &lexicon,
                                        const RemoteOptions &options = {});

}  // namespace mrforge

#endif  // MRFORGE_WIRE_H_
