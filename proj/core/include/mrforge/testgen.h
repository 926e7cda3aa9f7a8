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

#ifndef MRFORGE_TESTGEN_H_
#define MRFORGE_TESTGEN_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mrforge/mr.h"
#include "mrforge/ontology.h"
#include "mrforge/rng.h"

namespace mrforge {

struct TestGenConfig {
  int size = 3040;
  int length_min = 3;
  int length_max = 10;
  double length_mean = 6.5;
  double length_stddev = 1.5;
  double recommend_fraction = 0.5;
  std::uint64_t seed = 1;

  // Throws ConfigError when the bounds cannot be met by `ontology`.
  void Validate(const Ontology &ontology) const;
};

// Truncated normal rounded to the nearest integer, by rejection.
int SampleMrLength(const TestGenConfig &config, Rng &rng);

// Draws `config.size` distinct canonical MRs. Each has `name`, at least one
// NYC-unique and one E2E-unique attribute and a length in the configured
// range; exactly round(size * recommend_fraction) carry RECOMMEND. Open
// attributes get their placeholder, closed ones a uniform in-domain value.
// MRs whose canonical string is in `exclude` are never produced. Throws
// ConfigError if the configuration is infeasible.
std::vector<MeaningRepresentation> GenerateComTestset(
    const Ontology &ontology, const TestGenConfig &config,
    const std::set<std::string> &exclude = {});

struct TestsetStats {
  long size = 0;
  long recommend = 0;
  double recommend_fraction = 0;
  std::map<int, long> length_histogram;
  std::map<std::string, long> attribute_frequency;
  double mean_length = 0;

  std::string ToString() const;
};

TestsetStats ComputeTestsetStats(const std::vector<MeaningRepresentation> &mrs);

// Upper-tail p-value of Pearson's chi-squared test of the length histogram
// against the configured truncated, rounded normal. Bins with expected
// count below 5 are pooled into their neighbours.
double LengthChiSquaredPValue(const TestsetStats &stats, const TestGenConfig &config);

// Probability of each length under the configured distribution.
std::map<int, double> LengthDistribution(const TestGenConfig &config);

}  // namespace mrforge

#endif  // MRFORGE_TESTGEN_H_
