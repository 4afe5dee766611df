// Copyright (c) 2026 The sqagen Authors
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

#include <map>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "sqagen/metrics.hpp"

namespace {

using sqagen::EvalTask;
using sqagen::TextSample;

struct Corpus {
  std::vector<TextSample> predictions;
  std::vector<TextSample> references;
};

// Synthetic transcripts: references of 8-40 words, predictions with about
// 15% of words substituted, dropped or doubled.
const Corpus& corpus(std::size_t n) {
  static std::map<std::size_t, Corpus> cache;
  auto [it, inserted] = cache.try_emplace(n);
  if (!inserted) return it->second;
  std::mt19937_64 rng(n);
  std::uniform_int_distribution<int> len(8, 40), word(0, 499), noise(0, 99);
  for (std::size_t i = 0; i < n; ++i) {
    std::string ref, hyp;
    const int words = len(rng);
    for (int k = 0; k < words; ++k) {
      const std::string w = "w" + std::to_string(word(rng));
      ref += (k ? " " : "") + w;
      const int roll = noise(rng);
      if (roll < 5) continue;
      hyp += (hyp.empty() ? "" : " ") + (roll < 10 ? "x" + std::to_string(word(rng)) : w);
      if (roll >= 95) hyp += " " + w;
    }
    it->second.references.push_back({std::to_string(i), std::move(ref)});
    it->second.predictions.push_back({std::to_string(i), std::move(hyp)});
  }
  return it->second;
}

template <EvalTask kTask>
void BM_Serial(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sqagen::reference::evaluate_corpus_serial(c.predictions, c.references, kTask));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <EvalTask kTask>
void BM_Parallel(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sqagen::evaluate_corpus(c.predictions, c.references, kTask));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_Serial<EvalTask::kAsrWer>)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel<EvalTask::kAsrWer>)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Serial<EvalTask::kQaRouge>)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel<EvalTask::kQaRouge>)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
