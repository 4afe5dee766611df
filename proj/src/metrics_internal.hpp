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

#ifndef SQAGEN_SRC_METRICS_INTERNAL_HPP_
#define SQAGEN_SRC_METRICS_INTERNAL_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sqagen/metrics.hpp"

namespace sqagen::detail {

struct SampleMatch {
  // (prediction index, reference index), in reference order.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t missing = 0;
  std::size_t unmatched = 0;
};

SampleMatch match_samples(std::span<const TextSample> predictions, std::span<const TextSample> references);

struct SampleScore {
  RougeScore rouge;
  WerBreakdown wer;
};

SampleScore score_sample(const TextSample& prediction, const TextSample& reference, EvalTask task, double beta);

// Ordered reduction shared by the parallel and serial paths.
MetricReport reduce_scores(std::span<const SampleScore> scores, const SampleMatch& match, EvalTask task,
                           double beta);

}  // namespace sqagen::detail

#endif  // SQAGEN_SRC_METRICS_INTERNAL_HPP_
