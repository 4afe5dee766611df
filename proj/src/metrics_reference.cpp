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

#include "metrics_internal.hpp"

namespace sqagen::reference {

MetricReport evaluate_corpus_serial(std::span<const TextSample> predictions,
                                    std::span<const TextSample> references, EvalTask task, double beta) {
  if (!(beta > 0.0)) throw InvariantViolation("ROUGE-L beta must be positive");
  const detail::SampleMatch match = detail::match_samples(predictions, references);
  std::vector<detail::SampleScore> scores;
  scores.reserve(match.pairs.size());
  for (const auto& [p, r] : match.pairs) {
    scores.push_back(detail::score_sample(predictions[p], references[r], task, beta));
  }
  return detail::reduce_scores(scores, match, task, beta);
}

}  // namespace sqagen::reference
