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

#include <benchmark/benchmark.h>
#include <fmt/format.h>

#include <vector>

#include "mrforge/generator.h"
#include "mrforge/lexicon.h"
#include "mrforge/testgen.h"

namespace mrforge {
namespace {

const std::vector<MeaningRepresentation> &Mrs() {
  static const std::vector<MeaningRepresentation> mrs =
      GenerateComTestset(DefaultOntology(), TestGenConfig{});
  return mrs;
}

void BM_TemplateRealize(benchmark::State &state) {
  TemplateRealizer realizer(DefaultLexicon());
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(realizer.Realize(Mrs()[i]));
    i = (i + 1) % Mrs().size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TemplateRealize);

void BM_CorruptGenerate(benchmark::State &state) {
  NoiseConfig noise{0.2, 0.1, 0.05, 0.1, 0};
  Rng rng(1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(CorruptGenerate(Mrs()[i], noise, DefaultLexicon(), rng));
    i = (i + 1) % Mrs().size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CorruptGenerate);

void BM_CorruptingGeneratorBatch(benchmark::State &state) {
  CorruptingGenerator generator(DefaultLexicon(), NoiseConfig{0.2, 0.1, 0.05, 0.1, 7});
  std::vector<GenerationRequest> requests;
  for (std::size_t i = 0; i < Mrs().size(); ++i) {
    requests.push_back({fmt::format("b{:05d}", i), Mrs()[i], SupervisionMode::kNosup});
  }
  for (auto _ : state) benchmark::DoNotOptimize(generator.Generate(requests));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(requests.size()));
}
BENCHMARK(BM_CorruptingGeneratorBatch)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mrforge

BENCHMARK_MAIN();
