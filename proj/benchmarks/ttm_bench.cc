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

#include <string>
#include <vector>

#include "mrforge/generator.h"
#include "mrforge/lexicon.h"
#include "mrforge/metrics.h"
#include "mrforge/testgen.h"
#include "mrforge/ttm.h"

namespace mrforge {
namespace {

struct Fixture {
  std::vector<MeaningRepresentation> mrs;
  std::vector<std::string> texts;
};

const Fixture &Data() {
  static const Fixture data = [] {
    Fixture f;
    f.mrs = GenerateComTestset(DefaultOntology(), TestGenConfig{});
    TemplateRealizer realizer(DefaultLexicon());
    for (const MeaningRepresentation &mr : f.mrs) f.texts.push_back(realizer.Realize(mr));
    return f;
  }();
  return data;
}

void BM_ExtractMr(benchmark::State &state) {
  const Fixture &f = Data();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ExtractMr(f.texts[i], DefaultLexicon()));
    i = (i + 1) % f.texts.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExtractMr);

void BM_ScoreAll(benchmark::State &state) {
  const Fixture &f = Data();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ScoreAll(f.mrs, f.texts, DefaultLexicon(), static_cast<int>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.mrs.size()));
}
BENCHMARK(BM_ScoreAll)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mrforge

BENCHMARK_MAIN();
