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

#ifndef MRFORGE_TESTS_TEST_UTIL_H_
#define MRFORGE_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "mrforge/mr.h"
#include "mrforge/ontology.h"
#include "mrforge/rng.h"

namespace mrforge::testing {

// A valid MR over `ontology` with between min_len and all attributes.
// Open attributes get their placeholder or, unless `delexicalized`, a
// made-up name.
inline MeaningRepresentation RandomMr(const Ontology &ontology, Rng &rng, int min_len = 1,
                                      bool delexicalized = false) {
  const auto &attrs = ontology.attributes();
  MeaningRepresentation mr;
  int n = min_len + static_cast<int>(rng.Below(attrs.size() - min_len + 1));
  std::vector<std::size_t> order(attrs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
  for (int k = 0; k < n; ++k) {
    const Attribute &a = attrs[order[k]];
    std::string value;
    if (a.open) {
      value = (delexicalized || rng.Bernoulli(0.5)) && a.has_placeholder()
                  ? a.placeholder()
                  : "place " + std::to_string(rng.Below(1000));
    } else {
      value = a.values[rng.Below(a.values.size())];
    }
    mr.slots.push_back({a.id, value});
  }
  mr.recommend = ontology.has_recommend() && rng.Bernoulli(0.5);
  return mr;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string templ =
        (std::filesystem::temp_directory_path() / "mrforge-test-XXXXXX").string();
    path_ = mkdtemp(templ.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string operator/(const std::string &name) const { return (path_ / name).string(); }
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void WriteText(const std::string &path, const std::string &text) {
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace mrforge::testing

#endif  // MRFORGE_TESTS_TEST_UTIL_H_
