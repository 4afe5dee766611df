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

#include "sqagen/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "metrics_internal.hpp"

namespace sqagen {

Tokens normalize_text(std::string_view s) {
  Tokens out;
  std::string current;
  for (unsigned char c : s) {
    if (c < 0x80 && (std::isspace(c) || std::ispunct(c))) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference, double beta) {
  if (!(beta > 0.0)) throw InvariantViolation("ROUGE-L beta must be positive");
  RougeScore s;
  s.beta = beta;
  const auto lcs = static_cast<double>(lcs_length(candidate, reference));
  s.precision = candidate.empty() ? 0.0 : lcs / static_cast<double>(candidate.size());
  s.recall = reference.empty() ? 0.0 : lcs / static_cast<double>(reference.size());
  if (s.precision + s.recall > 0.0) {
    const double b2 = beta * beta;
    s.f_measure = (1.0 + b2) * s.precision * s.recall / (s.recall + b2 * s.precision);
  }
  return s;
}

WerBreakdown wer(std::span<const std::string> hypothesis, std::span<const std::string> reference) {
  const std::size_t n = reference.size();
  const std::size_t m = hypothesis.size();
  const std::size_t cols = m + 1;
  // dist[i * cols + j]: edit distance between reference[:i] and hypothesis[:j].
  std::vector<std::uint32_t> dist((n + 1) * cols);
  for (std::size_t i = 0; i <= n; ++i) dist[i * cols] = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j <= m; ++j) dist[j] = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag = dist[(i - 1) * cols + j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      const std::uint32_t del = dist[(i - 1) * cols + j] + 1;
      const std::uint32_t ins = dist[i * cols + j - 1] + 1;
      dist[i * cols + j] = std::min({diag, del, ins});
    }
  }

  WerBreakdown out;
  out.reference_words = n;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t here = dist[i * cols + j];
    if (i > 0 && j > 0) {
      const bool same = reference[i - 1] == hypothesis[j - 1];
      if (here == dist[(i - 1) * cols + j - 1] + (same ? 0 : 1)) {
        if (!same) ++out.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && here == dist[(i - 1) * cols + j] + 1) {
      ++out.deletions;
      --i;
    } else {
      ++out.insertions;
      --j;
    }
  }
  if (n > 0) {
    out.wer = static_cast<double>(out.errors()) / static_cast<double>(n);
  } else {
    out.wer = m == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return out;
}

std::string_view to_string(EvalTask t) { return t == EvalTask::kQaRouge ? "qa_rouge" : "asr_wer"; }

EvalTask parse_eval_task(std::string_view s) {
  if (s == "qa_rouge") return EvalTask::kQaRouge;
  if (s == "asr_wer") return EvalTask::kAsrWer;
  throw ConfigError("unknown task '" + std::string(s) + "' (expected qa_rouge or asr_wer)");
}

Json MetricReport::to_json() const {
  Json j = Json::object();
  j["task"] = to_string(task);
  if (task == EvalTask::kQaRouge) {
    j["rouge_l"] = value;
    j["precision"] = mean_precision;
    j["recall"] = mean_recall;
    j["beta"] = beta;
  } else {
    // JSON has no infinity; an undefined WER is reported as null.
    j["wer"] = std::isfinite(value) ? Json(value) : Json(nullptr);
    j["substitutions"] = substitutions;
    j["deletions"] = deletions;
    j["insertions"] = insertions;
    j["reference_words"] = reference_words;
  }
  j["matched"] = matched;
  j["missing"] = missing;
  j["unmatched"] = unmatched;
  return j;
}

namespace detail {

SampleMatch match_samples(std::span<const TextSample> predictions, std::span<const TextSample> references) {
  std::unordered_map<std::string_view, std::size_t> by_id;
  by_id.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!by_id.emplace(predictions[i].id, i).second) {
      throw InvariantViolation("duplicate prediction id '" + predictions[i].id + "'");
    }
  }
  SampleMatch match;
  std::unordered_set<std::string_view> seen;
  seen.reserve(references.size());
  for (std::size_t r = 0; r < references.size(); ++r) {
    if (!seen.insert(references[r].id).second) {
      throw InvariantViolation("duplicate reference id '" + references[r].id + "'");
    }
    auto it = by_id.find(references[r].id);
    if (it == by_id.end()) {
      ++match.missing;
    } else {
      match.pairs.emplace_back(it->second, r);
    }
  }
  match.unmatched = predictions.size() - match.pairs.size();
  if (match.pairs.empty()) throw InvariantViolation("no prediction id matches a reference id");
  return match;
}

SampleScore score_sample(const TextSample& prediction, const TextSample& reference, EvalTask task, double beta) {
  const Tokens hyp = normalize_text(prediction.text);
  const Tokens ref = normalize_text(reference.text);
  SampleScore s;
  if (task == EvalTask::kQaRouge) {
    s.rouge = rouge_l(hyp, ref, beta);
  } else {
    s.wer = wer(hyp, ref);
  }
  return s;
}

MetricReport reduce_scores(std::span<const SampleScore> scores, const SampleMatch& match, EvalTask task,
                           double beta) {
  MetricReport rep;
  rep.task = task;
  rep.beta = beta;
  rep.matched = match.pairs.size();
  rep.missing = match.missing;
  rep.unmatched = match.unmatched;
  if (task == EvalTask::kQaRouge) {
    double f = 0.0, p = 0.0, r = 0.0;
    for (const auto& s : scores) {
      f += s.rouge.f_measure;
      p += s.rouge.precision;
      r += s.rouge.recall;
    }
    const auto n = static_cast<double>(scores.size());
    rep.value = f / n;
    rep.mean_precision = p / n;
    rep.mean_recall = r / n;
  } else {
    for (const auto& s : scores) {
      rep.substitutions += s.wer.substitutions;
      rep.deletions += s.wer.deletions;
      rep.insertions += s.wer.insertions;
      rep.reference_words += s.wer.reference_words;
    }
    const std::size_t errors = rep.substitutions + rep.deletions + rep.insertions;
    if (rep.reference_words > 0) {
      rep.value = static_cast<double>(errors) / static_cast<double>(rep.reference_words);
    } else {
      rep.value = errors == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
  }
  return rep;
}

}  // namespace detail

MetricReport evaluate_corpus(std::span<const TextSample> predictions, std::span<const TextSample> references,
                             EvalTask task, double beta) {
  if (!(beta > 0.0)) throw InvariantViolation("ROUGE-L beta must be positive");
  const detail::SampleMatch match = detail::match_samples(predictions, references);
  const auto n = static_cast<std::ptrdiff_t>(match.pairs.size());
  std::vector<detail::SampleScore> scores(match.pairs.size());
#pragma omp parallel for schedule(dynamic, 64) default(none) shared(scores, match, predictions, references, task, beta, n)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto [p, r] = match.pairs[static_cast<std::size_t>(k)];
    scores[static_cast<std::size_t>(k)] = detail::score_sample(predictions[p], references[r], task, beta);
  }
  return detail::reduce_scores(scores, match, task, beta);
}

std::string format_metric_table(std::span<const std::string> column_names, std::span<const TableRow> rows,
                                std::string_view first_column) {
  std::string out(first_column);
  for (const auto& c : column_names) out += "\t" + c;
  out += '\n';
  for (const auto& row : rows) {
    out += row.label;
    for (std::size_t c = 0; c < column_names.size(); ++c) {
      out += '\t';
      const bool has = c < row.cells.size() && row.cells[c].has_value();
      if (!has || !std::isfinite(row.cells[c]->value)) {
        out += "NA";
      } else if (row.cells[c]->task == EvalTask::kAsrWer) {
        out += fmt::format("{:.1f}", 100.0 * row.cells[c]->value);
      } else {
        out += fmt::format("{:.2f}", row.cells[c]->value);
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace sqagen
