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

#ifndef SQAGEN_METRICS_HPP_
#define SQAGEN_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqagen/core_model.hpp"

namespace sqagen {

using Tokens = std::vector<std::string>;

// ASCII lowercase, ASCII punctuation to spaces, split on whitespace.
// Bytes >= 0x80 pass through untouched.
Tokens normalize_text(std::string_view s);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  double beta = 1.0;
};

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// LCS-based ROUGE-L. F = (1+b^2)PR / (R + b^2 P), 0 when P+R = 0.
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference,
                   double beta = 1.0);

struct WerBreakdown {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_words = 0;
  // (S+D+I)/N. +inf when N = 0 and the hypothesis is not empty.
  double wer = 0.0;

  std::size_t errors() const noexcept { return substitutions + deletions + insertions; }
};

// Unit-cost Levenshtein alignment. The backtrace prefers a match or
// substitution, then deletion, then insertion; this only affects the S/D/I
// split, never the total.
WerBreakdown wer(std::span<const std::string> hypothesis, std::span<const std::string> reference);

enum class EvalTask { kQaRouge, kAsrWer };
std::string_view to_string(EvalTask t);
EvalTask parse_eval_task(std::string_view s);

struct TextSample {
  std::string id;
  std::string text;
};

struct MetricReport {
  EvalTask task = EvalTask::kQaRouge;
  // Mean ROUGE-L F for kQaRouge; pooled WER for kAsrWer.
  double value = 0.0;
  std::size_t matched = 0;
  // References with no prediction.
  std::size_t missing = 0;
  // Predictions whose id has no reference.
  std::size_t unmatched = 0;

  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double beta = 1.0;

  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_words = 0;

  Json to_json() const;
};

// Scores predictions against references by id after normalizing both sides.
// Per-sample work runs in parallel (OpenMP); the reduction runs in reference
// order, so results do not depend on the thread count.
MetricReport evaluate_corpus(std::span<const TextSample> predictions, std::span<const TextSample> references,
                             EvalTask task, double beta = 1.0);

namespace reference {
// Single-threaded evaluate_corpus, kept as the baseline for tests and the
// benchmark.
MetricReport evaluate_corpus_serial(std::span<const TextSample> predictions,
                                    std::span<const TextSample> references, EvalTask task, double beta = 1.0);
}  // namespace reference

struct TableRow {
  std::string label;
  std::vector<std::optional<MetricReport>> cells;
};

// Tab-separated table: WER cells as percentages with one decimal, ROUGE-L
// cells with two decimals, "NA" for empty cells.
std::string format_metric_table(std::span<const std::string> column_names, std::span<const TableRow> rows,
                                std::string_view first_column = "Datasets Trained on");

}  // namespace sqagen

#endif  // SQAGEN_METRICS_HPP_
