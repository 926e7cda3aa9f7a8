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

#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "json.hpp"
#include "mrforge/error.h"
#include "mrforge/testgen.h"
#include "test_util.h"

namespace mrforge {
namespace {

using json = nlohmann::json;

const Lexicon &Lex() { return DefaultLexicon(); }
const Ontology &Ont() { return DefaultLexicon().ontology(); }
MeaningRepresentation Mr(std::string_view text) { return ParseMr(text, Ont()); }

std::vector<json> Vectors(const std::string &kind) {
  std::ifstream in(std::string(MRFORGE_TEST_DATA) + "/protocol_vectors.jsonl");
  REQUIRE(in);
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    json j = json::parse(line);
    if (j["kind"] == kind) out.push_back(j);
  }
  REQUIRE(!out.empty());
  return out;
}

// Feeds `input` to ServeWire over pipes and returns every output line.
std::vector<std::string> Serve(Generator &generator, const std::string &input,
                               const ServeOptions &options = {}) {
  int in[2], out[2];
  REQUIRE(pipe(in) == 0);
  REQUIRE(pipe(out) == 0);
  std::thread server([&] {
    ServeWire(in[0], out[1], generator, Ont(), options);
    close(out[1]);
  });
  std::string data = input;
  const char *p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    ssize_t n = write(in[1], p, left);
    REQUIRE(n > 0);
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  close(in[1]);
  std::string text;
  char buf[4096];
  ssize_t n;
  while ((n = read(out[0], buf, sizeof(buf))) > 0) text.append(buf, static_cast<std::size_t>(n));
  server.join();
  close(in[0]);
  close(out[0]);
  std::vector<std::string> lines;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

std::string ServeCommand(const std::string &flags = "") {
  return std::string(MRFORGE_SERVE_BIN) + " " + flags;
}

std::vector<GenerationRequest> Requests(const std::vector<MeaningRepresentation> &mrs,
                                        SupervisionMode mode = SupervisionMode::kNosup) {
  std::vector<GenerationRequest> out;
  for (std::size_t i = 0; i < mrs.size(); ++i) {
    out.push_back({"q" + std::to_string(i), mrs[i], mode});
  }
  return out;
}

TEST_CASE("handshake vectors") {
  for (const json &v : Vectors("handshake")) {
    CAPTURE(v["name"].get<std::string>());
    std::string line = v["line"];
    if (v["valid"]) {
      WireHandshake h = DecodeHandshake(line);
      std::vector<std::string> modes;
      for (SupervisionMode m : h.supervision) modes.emplace_back(SupervisionName(m));
      CHECK(json(modes) == v["supervision"]);
      CHECK(json::parse(EncodeHandshake(h)) == json::parse(line));
    } else {
      CHECK_THROWS_AS(DecodeHandshake(line), EndpointError);
    }
  }
}

TEST_CASE("request vectors") {
  for (const json &v : Vectors("request")) {
    CAPTURE(v["name"].get<std::string>());
    GenerationRequest request{v["id"], Mr(v["mr"].get<std::string>()),
                              ParseSupervision(v["supervision"].get<std::string>())};
    std::string line = EncodeRequest(request);
    CHECK(json::parse(line) == v["expect"]);
    WireRequest decoded = DecodeRequest(line);
    CHECK(decoded.id == request.id);
    CHECK(decoded.mr == v["mr"]);
    CHECK(decoded.supervision == request.supervision);
    CHECK(decoded.source_booleans == SourceBooleansFor(request.mr.provenance));
    CHECK(decoded.guide_hint.has_value() == (request.supervision == SupervisionMode::kGuideHint));
    CHECK(decoded.tokens == SerializeMr(request.mr, request.supervision).tokens);
  }
}

TEST_CASE("response vectors") {
  for (const json &v : Vectors("response")) {
    CAPTURE(v["name"].get<std::string>());
    std::string line = v["line"];
    if (v.value("invalid", false)) {
      CHECK_THROWS_AS(DecodeResponse(line), ParseError);
      continue;
    }
    GenerationResult r = DecodeResponse(line);
    CHECK(r.id == v["id"]);
    if (v.contains("text")) {
      REQUIRE(r.ok());
      CHECK(*r.text == v["text"]);
      CHECK(json::parse(EncodeResponse(r)) == json::parse(line));
    } else {
      CHECK(!r.ok());
      CHECK(r.error == v["error"]);
    }
  }
}

TEST_CASE("retrain and acknowledgement vectors") {
  for (const json &v : Vectors("retrain")) {
    const json &m = v["message"];
    RetrainMessage message{m["corpus_delta_path"], m["corpus_path"], m["round"]};
    CHECK(json::parse(EncodeRetrain(message)) == v["expect"]);
  }
  for (const json &v : Vectors("ack")) {
    CHECK(json::parse(EncodeRetrainAck(v["round"], v["error"])) == v["expect"]);
  }
}

TEST_CASE("malformed requests are rejected") {
  CHECK_THROWS_AS(DecodeRequest("{\"mr\":\"name[x]\"}"), ParseError);
  CHECK_THROWS_AS(DecodeRequest("{\"id\":\"a\"}"), ParseError);
  CHECK_THROWS_AS(DecodeRequest("{\"id\":\"a\",\"mr\":\"x\",\"supervision\":\"loud\"}"),
                  Error);
  CHECK_THROWS_AS(DecodeRequest("nope"), ParseError);
}

TEST_CASE("echo endpoint answers the serve vectors in process") {
  EchoGenerator echo;
  std::string input;
  std::vector<json> vectors = Vectors("serve");
  for (const json &v : vectors) input += v["line"].get<std::string>() + "\n";
  std::vector<std::string> lines = Serve(echo, input);
  REQUIRE(lines.size() == vectors.size() + 1);
  WireHandshake h = DecodeHandshake(lines[0]);
  CHECK(h.generator == "echo");
  CHECK(h.supervision.size() == 4);
  std::map<std::string, GenerationResult> by_id;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    GenerationResult r = DecodeResponse(lines[i]);
    by_id[r.id] = r;
  }
  for (const json &v : vectors) {
    CAPTURE(v["name"].get<std::string>());
    REQUIRE(by_id.count(v["id"]) == 1);
    const GenerationResult &r = by_id[v["id"]];
    if (v.contains("text")) {
      REQUIRE(r.ok());
      CHECK(*r.text == v["text"]);
    } else {
      CHECK(!r.ok());
      CHECK(!r.error.empty());
    }
  }
}

TEST_CASE("serve acknowledges retrain messages and enforces advertised modes") {
  EchoGenerator echo;
  ServeOptions options;
  options.supervision = {SupervisionMode::kNosup};
  std::string input =
      EncodeRequest({"a", Mr("name[[RESTAURANT]]"), SupervisionMode::kBool}) + "\n" +
      EncodeRetrain({"d.jsonl", "c.jsonl", 7}) + "\n" +
      EncodeRequest({"b", Mr("name[[RESTAURANT]]"), SupervisionMode::kNosup}) + "\n";
  std::vector<std::string> lines = Serve(echo, input, options);
  REQUIRE(lines.size() == 4);
  GenerationResult a = DecodeResponse(lines[1]);
  CHECK(a.id == "a");
  CHECK(!a.ok());
  CHECK(a.error.find("supervision") != std::string::npos);
  CHECK(json::parse(lines[2]) == json::parse(EncodeRetrainAck(7)));
  GenerationResult b = DecodeResponse(lines[3]);
  CHECK(b.id == "b");
  CHECK(b.ok());
}

TEST_CASE("spawned echo endpoint round-trips a batch") {
  auto remote = RemoteGenerator::Spawn(ServeCommand("--generator echo"));
  CHECK(remote->handshake().generator == "echo");
  CHECK(remote->healthy());
  std::vector<MeaningRepresentation> mrs = {Mr("name[[RESTAURANT]], eatType[pub]"),
                                            Mr("recommend[yes], name[[RESTAURANT]], qual[good]")};
  for (SupervisionMode mode : {SupervisionMode::kNosup, SupervisionMode::kAttr,
                               SupervisionMode::kBool, SupervisionMode::kGuideHint}) {
    std::vector<GenerationResult> results = remote->Generate(Requests(mrs, mode));
    REQUIRE(results.size() == 2);
    for (std::size_t i = 0; i < mrs.size(); ++i) {
      REQUIRE(results[i].ok());
      CHECK(results[i].id == "q" + std::to_string(i));
      CHECK(*results[i].text == FormatMr(mrs[i]));
    }
  }
  remote->Retrain({"d", "c", 1});
  CHECK(remote->healthy());
}

TEST_CASE("spawned template endpoint matches the in-process generator on the default test set") {
  std::vector<MeaningRepresentation> mrs = GenerateComTestset(Ont(), TestGenConfig{});
  REQUIRE(mrs.size() == 3040);
  auto remote = RemoteGenerator::Spawn(ServeCommand("--generator template"));
  TemplateGenerator local(Lex());
  std::vector<GenerationRequest> requests = Requests(mrs);
  std::vector<GenerationResult> got = remote->Generate(requests);
  std::vector<GenerationResult> want = local.Generate(requests);
  REQUIRE(got.size() == want.size());
  long mismatches = 0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (!got[i].ok() || got[i].text != want[i].text) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("reversed responses are matched by id") {
  auto remote = RemoteGenerator::Spawn(ServeCommand("--generator echo --reverse"));
  Rng rng(5);
  std::vector<MeaningRepresentation> mrs;
  for (int i = 0; i < 100; ++i) mrs.push_back(testing::RandomMr(Ont(), rng, 1, true));
  std::vector<GenerationResult> results = remote->Generate(Requests(mrs));
  REQUIRE(results.size() == 100);
  for (std::size_t i = 0; i < mrs.size(); ++i) {
    REQUIRE(results[i].ok());
    CHECK(results[i].id == "q" + std::to_string(i));
    CHECK(*results[i].text == FormatMr(mrs[i]));
  }
}

TEST_CASE("an endpoint dying mid-batch fails the remaining items") {
  auto remote = RemoteGenerator::Spawn(ServeCommand("--generator echo --die-after 40"));
  Rng rng(9);
  std::vector<MeaningRepresentation> mrs;
  for (int i = 0; i < 100; ++i) mrs.push_back(testing::RandomMr(Ont(), rng, 1, true));
  std::vector<GenerationResult> results = remote->Generate(Requests(mrs));
  REQUIRE(results.size() == 100);
  long ok = 0;
  long closed = 0;
  for (const GenerationResult &r : results) {
    if (r.ok()) ++ok;
    if (r.error == "endpoint closed") ++closed;
  }
  CHECK(ok == 40);
  CHECK(closed == 60);
  CHECK(!remote->healthy());
  CHECK_THROWS_AS(remote->Retrain({"d", "c", 1}), EndpointError);
}

TEST_CASE("a silent endpoint times out per item") {
  RemoteOptions options;
  options.timeout_ms = 200;
  auto remote = RemoteGenerator::Spawn(
      "printf '{\"protocol\":\"mrforge-wire\",\"version\":1,\"supervision\":[\"nosup\"]}\\n';"
      " exec sleep 30",
      options);
  auto start = std::chrono::steady_clock::now();
  std::vector<GenerationResult> results = remote->Generate(Requests({Mr("name[[RESTAURANT]]")}));
  auto elapsed = std::chrono::steady_clock::now() - start;
  REQUIRE(results.size() == 1);
  CHECK(results[0].error == "timeout");
  CHECK(elapsed < std::chrono::seconds(5));
}

TEST_CASE("unsupported supervision fails on the client side") {
  auto remote = RemoteGenerator::Spawn(ServeCommand("--generator echo --supervision nosup"));
  std::vector<GenerationResult> results =
      remote->Generate(Requests({Mr("name[[RESTAURANT]]")}, SupervisionMode::kBool));
  REQUIRE(results.size() == 1);
  CHECK(!results[0].ok());
  CHECK(results[0].error.find("bool") != std::string::npos);
}

TEST_CASE("endpoints that cannot start or handshake are rejected") {
  RemoteOptions options;
  options.handshake_timeout_ms = 2000;
  CHECK_THROWS_AS(RemoteGenerator::Spawn("exit 0", options), EndpointError);
  CHECK_THROWS_AS(RemoteGenerator::Spawn("echo '{\"protocol\":\"x\",\"version\":1}'", options),
                  EndpointError);
  CHECK_THROWS_AS(RemoteGenerator::Connect("/nonexistent/mrforge.sock"), EndpointError);
  CHECK_THROWS_AS(OpenEndpoint("carrier-pigeon", Lex()), ConfigError);
  CHECK_THROWS_AS(OpenEndpoint("exec:", Lex()), ConfigError);
}

TEST_CASE("unix socket endpoint") {
  testing::TempDir dir;
  std::string path = dir / "gen.sock";
  EchoGenerator echo;
  std::thread server([&] { ServeUnixSocket(path, echo, Ont(), {}, 1); });
  std::unique_ptr<Generator> remote;
  for (int attempt = 0; attempt < 200 && !remote; ++attempt) {
    try {
      remote = OpenEndpoint("unix:" + path, Lex());
    } catch (const EndpointError &) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  REQUIRE(remote);
  std::vector<GenerationResult> results =
      remote->Generate(Requests({Mr("name[[RESTAURANT]], near[[POINT-OF-INTEREST]]")}));
  REQUIRE(results.size() == 1);
  REQUIRE(results[0].ok());
  CHECK(*results[0].text == "name[[RESTAURANT]], near[[POINT-OF-INTEREST]]");
  remote.reset();
  server.join();
}

}  // namespace
}  // namespace mrforge
