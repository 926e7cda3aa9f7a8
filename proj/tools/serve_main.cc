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

// Serves a local generator over the wire protocol on stdin/stdout or a
// unix socket.

#include <unistd.h>

#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mrforge/error.h"
#include "mrforge/lexicon.h"
#include "mrforge/wire.h"

int main(int argc, char **argv) {
  CLI::App app{"mrforge-serve: wire-protocol endpoint for local generators", "mrforge-serve"};
  std::string spec = "echo";
  std::string unix_path;
  int max_connections = -1;
  std::vector<std::string> supervision;
  mrforge::ServeOptions options;
  app.add_option("--generator", spec, "echo, template, corrupt:<noise> or surrogate:<noise>");
  app.add_option("--die-after", options.die_after, "Close after this many responses");
  app.add_flag("--reverse", options.reverse_batches, "Answer each batch in reverse order");
  app.add_option("--unix", unix_path, "Listen on a unix socket instead of stdin/stdout");
  app.add_option("--max-connections", max_connections, "Connections to serve on --unix");
  app.add_option("--supervision", supervision, "Advertised supervision modes");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!supervision.empty()) {
      options.supervision.clear();
      for (const std::string &s : supervision) {
        options.supervision.push_back(mrforge::ParseSupervision(s));
      }
    }
    if (spec.rfind("exec:", 0) == 0 || spec.rfind("unix:", 0) == 0) {
      throw mrforge::ConfigError("mrforge-serve cannot relay to another endpoint");
    }
    const mrforge::Lexicon &lexicon = mrforge::DefaultLexicon();
    std::unique_ptr<mrforge::Generator> generator = mrforge::OpenEndpoint(spec, lexicon);
    if (unix_path.empty()) {
      mrforge::ServeWire(STDIN_FILENO, STDOUT_FILENO, *generator, lexicon.ontology(), options);
    } else {
      mrforge::ServeUnixSocket(unix_path, *generator, lexicon.ontology(), options,
                               max_connections);
    }
  } catch (const mrforge::ConfigError &e) {
    std::cerr << "mrforge-serve: " << e.what() << "\n";
    return 1;
  } catch (const mrforge::Error &e) {
    std::cerr << "mrforge-serve: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
