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

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sqagen/metrics.hpp"

using namespace sqagen;

namespace {

Tokens toks(std::initializer_list<const char*> words) { return Tokens(words.begin(), words.end()); }

}  // namespace

TEST_CASE("normalize_text") {
  CHECK(normalize_text("Energy and climate!") == toks({"energy", "and", "climate"}));
  CHECK(normalize_text("").empty());
  CHECK(normalize_text("it's") == toks({"it", "s"}));
  CHECK(normalize_text("  Caf\xc3\xa9  ") == Tokens{"caf\xc3\xa9"});
}

TEST_CASE("ROUGE-L spot values") {
  const auto same = toks({"a", "b", "c"});
  auto s = rouge_l(same, same);
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.f_measure == 1.0);

  const auto cand = toks({"police", "killed", "the", "gunman"});
  const auto ref = toks({"police", "kill", "the", "gunman"});
  CHECK(lcs_length(cand, ref) == 3);
  auto r = rouge_l(cand, ref);
  CHECK(r.precision == 0.75);
  CHECK(r.recall == 0.75);
  CHECK(r.f_measure == 0.75);

  auto e = rouge_l(Tokens{}, ref);
  CHECK(e.precision == 0.0);
  CHECK(e.recall == 0.0);
  CHECK(e.f_measure == 0.0);

  // Recall-weighted variant.
  auto w = rouge_l(toks({"a", "b"}), toks({"a", "b", "c", "d"}), 2.0);
  CHECK(w.f_measure == doctest::Approx(5.0 * 1.0 * 0.5 / (0.5 + 4.0 * 1.0)));
}

TEST_CASE("WER spot values") {
  const auto ref = toks({"the", "cat", "sat", "on", "the", "mat"});
  auto w = wer(toks({"the", "cat", "sat", "mat"}), ref);
  CHECK(w.deletions == 2);
  CHECK(w.substitutions == 0);
  CHECK(w.insertions == 0);
  CHECK(std::abs(w.wer - 2.0 / 6.0) < 1e-9);

  CHECK(wer(ref, ref).wer == 0.0);
  auto s = wer(toks({"b"}), toks({"a"}));
  CHECK(s.substitutions == 1);
  CHECK(s.wer == 1.0);

  CHECK(wer(Tokens{}, Tokens{}).wer == 0.0);
  CHECK(std::isinf(wer(toks({"x"}), Tokens{}).wer));
  auto ins = wer(toks({"a", "x", "b"}), toks({"a", "b"}));
  CHECK(ins.insertions == 1);
  CHECK(ins.wer == 0.5);
}

TEST_CASE("kernels agree with exhaustive oracles (length <= 4)") {
  const auto seqs = oracle::all_sequences({"a", "b", "c"}, 4);
  for (const auto& a : seqs) {
    for (const auto& b : seqs) {
      REQUIRE(lcs_length(a, b) == oracle::lcs(a, b));
      const auto w = wer(a, b);
      REQUIRE(w.errors() == oracle::edit_distance(a, b));
      REQUIRE(static_cast<long>(a.size()) - static_cast<long>(b.size()) ==
              static_cast<long>(w.insertions) - static_cast<long>(w.deletions));
      const auto r = rouge_l(a, b);
      const auto o = oracle::rouge(a, b);
      REQUIRE(r.f_measure == o.f);
    }
  }
}

TEST_CASE("corpus evaluation") {
  SUBCASE("perfect predictions") {
    std::vector<TextSample> refs = {{"1", "the cat sat"}, {"2", "on the mat"}};
    auto rouge = evaluate_corpus(refs, refs, EvalTask::kQaRouge);
    CHECK(rouge.value == 1.0);
    CHECK(rouge.matched == 2);
    auto w = evaluate_corpus(refs, refs, EvalTask::kAsrWer);
    CHECK(w.value == 0.0);
  }
  SUBCASE("mean ROUGE-L") {
    std::vector<TextSample> refs = {{"1", "a b"}, {"2", "c d"}};
    std::vector<TextSample> preds = {{"1", "a b"}, {"2", "c x"}};
    CHECK(evaluate_corpus(preds, refs, EvalTask::kQaRouge).value == 0.75);
  }
  SUBCASE("pooled WER") {
    std::vector<TextSample> refs = {{"1", "the cat sat on the mat"}, {"2", "one two three four"}};
    std::vector<TextSample> preds = {{"1", "the cat sat mat"}, {"2", "one two three four"}};
    auto w = evaluate_corpus(preds, refs, EvalTask::kAsrWer);
    CHECK(w.value == 0.2);
    CHECK(w.reference_words == 10);
    CHECK(w.deletions == 2);
  }
  SUBCASE("missing and unmatched ids") {
    std::vector<TextSample> refs = {{"1", "a"}, {"2", "b"}};
    std::vector<TextSample> preds = {{"1", "a"}, {"3", "c"}};
    auto r = evaluate_corpus(preds, refs, EvalTask::kQaRouge);
    CHECK(r.matched == 1);
    CHECK(r.missing == 1);
    CHECK(r.unmatched == 1);
    CHECK(r.value == 1.0);
  }
  SUBCASE("invalid inputs") {
    std::vector<TextSample> dup = {{"1", "a"}, {"1", "b"}};
    CHECK_THROWS_AS(evaluate_corpus(dup, dup, EvalTask::kQaRouge), InvariantViolation);
    std::vector<TextSample> refs = {{"1", "a"}};
    std::vector<TextSample> preds = {{"2", "a"}};
    CHECK_THROWS_AS(evaluate_corpus(preds, refs, EvalTask::kAsrWer), InvariantViolation);
  }
}

TEST_CASE("parallel evaluation matches the serial reference") {
  std::vector<TextSample> refs, preds;
  for (int i = 0; i < 3000; ++i) {
    refs.push_back({std::to_string(i), testing::sentence(i, 5 + i % 20)});
    preds.push_back({std::to_string(i), testing::sentence(i + (i % 4 == 0 ? 7 : 0), 5 + i % 17)});
  }
  for (auto task : {EvalTask::kQaRouge, EvalTask::kAsrWer}) {
    const auto par = evaluate_corpus(preds, refs, task);
    const auto ser = reference::evaluate_corpus_serial(preds, refs, task);
    CHECK(par.to_json() == ser.to_json());
    CHECK(par.value == ser.value);
  }
}

TEST_CASE("metric table") {
  MetricReport w;
  w.task = EvalTask::kAsrWer;
  w.value = 0.0567;
  MetricReport r;
  r.task = EvalTask::kQaRouge;
  r.value = 0.3512;
  std::vector<std::string> cols = {"LibriSpeech WER", "QA ROUGE-L"};
  std::vector<TableRow> rows = {{"ASR", {w, std::nullopt}}, {"ASR + SQA", {w, r}}};
  CHECK(format_metric_table(cols, rows) ==
        "Datasets Trained on\tLibriSpeech WER\tQA ROUGE-L\n"
        "ASR\t5.7\tNA\n"
        "ASR + SQA\t5.7\t0.35\n");
}
