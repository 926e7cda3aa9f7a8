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

#ifndef MRFORGE_TOOLS_CLI_H_
#define MRFORGE_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace mrforge {

enum ExitCode {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitEndpoint = 3,
};

// Runs the mrforge command line. `args` excludes the program name. When
// MRFORGE_CONFIG names a file and --config is absent, that file supplies
// option defaults.
int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace mrforge

#endif  // MRFORGE_TOOLS_CLI_H_
