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

#ifndef MRFORGE_RNG_H_
#define MRFORGE_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace mrforge {

// Derives a child seed from a root seed and a stage label, so every stage of
// a run draws from an independent, reproducible stream.
std::uint64_t DeriveSeed(std::uint64_t root, std::string_view label);

// Random source with platform-independent output. The engine sequence is
// fixed by the standard; the distributions below are implemented here
// because the std:: ones are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double Uniform();

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t Below(std::uint64_t n);

  bool Bernoulli(double p) { return Uniform() < p; }

  // Standard normal via Box-Muller (second variate discarded).
  double Normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace mrforge

#endif  // MRFORGE_RNG_H_
