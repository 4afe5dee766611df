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

#include <algorithm>

#include "fixtures.hpp"
#include "sqagen/triplet_builder.hpp"

using namespace sqagen;

namespace {

RawQARecord record(std::string q, std::vector<Passage> passages, std::vector<std::string> answers) {
  return {std::move(q), std::move(passages), std::move(answers)};
}

QATriplet with_duration(std::string id, double d) {
  QATriplet t = testing::make_triplet(std::move(id), "ctx", "q", "a");
  t.context_duration = d;
  return t;
}

}  // namespace

TEST_CASE("build_triplets selects the marked passage") {
  std::vector<RawQARecord> recs = {record("what color is the sky", {{"x", false}, {"the sky is blue", true}}, {"blue"})};
  auto r = build_triplets(recs);
  REQUIRE(r.triplets.size() == 1);
  CHECK(r.skipped == 0);
  const auto& t = r.triplets[0];
  CHECK(t.question == "what color is the sky");
  CHECK(t.context_text == "the sky is blue");
  CHECK(t.answer == "blue");
  CHECK(t.id == "msmarco-0000000");
  CHECK(t.provenance == Provenance::kTtsSynthesized);
  CHECK_FALSE(t.context_audio.has_value());
}

TEST_CASE("build_triplets skips records without answers") {
  std::vector<RawQARecord> recs = {record("q", {{"p", true}}, {}), record("q2", {{"p2", true}}, {"  "})};
  auto r = build_triplets(recs);
  CHECK(r.triplets.empty());
  CHECK(r.skipped == 2);
}

TEST_CASE("first selected passage wins, independent of unselected order") {
  std::vector<Passage> passages = {{"noise a", false}, {"first pick", true}, {"noise b", false}, {"second pick", true}};
  CHECK(select_context(record("q", passages, {"x"})) == 1);

  // Permuting the unselected passages never changes the chosen text.
  std::sort(passages.begin(), passages.end(), [](const Passage& a, const Passage& b) { return a.passage_text < b.passage_text; });
  do {
    auto rec = record("q", passages, {"x"});
    const auto idx = select_context(rec);
    REQUIRE(idx < passages.size());
    const auto first_selected =
        std::find_if(passages.begin(), passages.end(), [](const Passage& p) { return p.is_selected; });
    CHECK(rec.contexts[idx].passage_text == first_selected->passage_text);
  } while (std::next_permutation(passages.begin(), passages.end(), [](const Passage& a, const Passage& b) {
    return a.passage_text < b.passage_text;
  }));
}

TEST_CASE("fallback to a passage containing the answer") {
  auto rec = record("q", {{"nothing here", false}, {"The answer is BLUE indeed", false}}, {"blue"});
  CHECK(select_context(rec) == 1);
  auto none = record("q", {{"nothing here", false}}, {"blue"});
  CHECK(select_context(none) == static_cast<std::size_t>(-1));
  CHECK(build_triplets(std::vector<RawQARecord>{none}).skipped == 1);
}

TEST_CASE("raw records from json") {
  auto rec = raw_record_from_json(Json::parse(
      R"({"query":"who","answers":["Bob"],"passages":[{"passage_text":"Bob did","is_selected":1}]})"));
  CHECK(rec.question == "who");
  REQUIRE(rec.contexts.size() == 1);
  CHECK(rec.contexts[0].is_selected);
  CHECK(rec.answers == std::vector<std::string>{"Bob"});
}

TEST_CASE("filter_by_duration") {
  std::vector<QATriplet> ts = {with_duration("a", 5.0), with_duration("b", 19.9), with_duration("c", 20.0),
                               with_duration("d", 25.0)};
  auto kept = filter_by_duration(ts, 20.0);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].id == "a");
  CHECK(kept[1].id == "b");

  CHECK(filter_by_duration(std::vector<QATriplet>{}, 20.0).empty());

  std::vector<QATriplet> ones = {with_duration("x", 1.0), with_duration("y", 1.0)};
  CHECK(filter_by_duration(ones, 20.0) == ones);

  std::vector<QATriplet> missing = {testing::make_triplet("m", "c", "q", "a")};
  CHECK_THROWS_AS(filter_by_duration(missing, 20.0), InvariantViolation);
}
