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

#include <numeric>

#include "fixtures.hpp"
#include "sqagen/manifest.hpp"

using namespace sqagen;
using sqagen::testing::TempDir;

TEST_CASE("read_manifest") {
  TempDir dir;
  SUBCASE("single line") {
    testing::write_file(dir / "m.jsonl", R"({"audio_filepath":"a.wav","duration":2.5,"text":"hello"})" "\n");
    auto rows = read_manifest(dir / "m.jsonl");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == UtteranceRecord{"a.wav", 2.5, "hello", LabelSource::kReal, Json::object()});
  }
  SUBCASE("empty file") {
    testing::write_file(dir / "m.jsonl", "");
    CHECK(read_manifest(dir / "m.jsonl").empty());
  }
  SUBCASE("negative duration names the line") {
    testing::write_file(dir / "m.jsonl",
                        R"({"audio_filepath":"a.wav","duration":1.0,"text":"x"})" "\n"
                        R"({"audio_filepath":"b.wav","duration":-1.0,"text":"y"})" "\n");
    try {
      read_manifest(dir / "m.jsonl");
      FAIL("expected ManifestError");
    } catch (const ManifestError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("malformed json") {
    testing::write_file(dir / "m.jsonl", "{not json}\n");
    CHECK_THROWS_AS(read_manifest(dir / "m.jsonl"), ManifestError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(read_manifest(dir / "absent.jsonl"), IoError); }
}

TEST_CASE("write_manifest") {
  TempDir dir;
  SUBCASE("round trip") {
    auto rows = testing::make_utterances(3);
    rows[1].label_source = LabelSource::kPseudo;
    rows[2].extra["speaker"] = "s7";
    write_manifest(std::span<const UtteranceRecord>(rows), dir / "m.jsonl");
    CHECK(read_manifest(dir / "m.jsonl") == rows);
  }
  SUBCASE("empty list writes zero bytes") {
    write_manifest(std::span<const UtteranceRecord>(), dir / "m.jsonl");
    CHECK(std::filesystem::file_size(dir / "m.jsonl") == 0);
  }
  SUBCASE("newlines are escaped") {
    std::vector<UtteranceRecord> rows = {{"a.wav", 1.0, "line one\nline two", LabelSource::kReal, Json::object()},
                                         {"b.wav", 2.0, "tab\there \"quoted\"", LabelSource::kReal, Json::object()}};
    write_manifest(std::span<const UtteranceRecord>(rows), dir / "m.jsonl");
    const std::string text = testing::read_file(dir / "m.jsonl");
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(read_manifest(dir / "m.jsonl") == rows);
  }
  SUBCASE("invalid record is refused") {
    std::vector<UtteranceRecord> rows = {{"a.wav", -2.0, "x", LabelSource::kReal, Json::object()}};
    CHECK_THROWS_AS(write_manifest(std::span<const UtteranceRecord>(rows), dir / "m.jsonl"), InvariantViolation);
  }
  SUBCASE("triplets") {
    std::vector<QATriplet> ts = {testing::make_triplet("t1", "ctx one", "q1", "a1"),
                                 testing::make_triplet("t2", "ctx\ntwo", "q2", "a2")};
    write_manifest(std::span<const QATriplet>(ts), dir / "t.jsonl");
    CHECK(read_triplets(dir / "t.jsonl") == ts);
  }
}

TEST_CASE("random manifests round trip") {
  TempDir dir;
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<UtteranceRecord> rows;
    const int n = static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      std::string text;
      const int len = static_cast<int>(rng() % 40);
      for (int k = 0; k < len; ++k) {
        // Printable ASCII plus a few control characters and a multibyte letter.
        const char* pieces[] = {"a", "b", " ", "\n", "\t", "\"", "\\", "\xc3\xa9", "{", "}"};
        text += pieces[rng() % 10];
      }
      rows.push_back({fmt::format("x/{}.wav", i), static_cast<double>(rng() % 1000) / 8.0, text,
                      text.empty() ? LabelSource::kNone : LabelSource::kReal, Json::object()});
    }
    const auto path = dir / fmt::format("r{}.jsonl", trial);
    write_manifest(std::span<const UtteranceRecord>(rows), path);
    CHECK(read_manifest(path) == rows);
  }
}

TEST_CASE("split_dataset") {
  SUBCASE("large corpus split") {
    std::vector<int> ids(111000);
    std::iota(ids.begin(), ids.end(), 0);
    auto split = split_dataset(ids, 42, 1000, 1000);
    CHECK(split.train.size() == 109000);
    CHECK(split.dev.size() == 1000);
    CHECK(split.test.size() == 1000);
    std::vector<int> all;
    for (auto* part : {&split.train, &split.dev, &split.test}) all.insert(all.end(), part->begin(), part->end());
    std::sort(all.begin(), all.end());
    CHECK(all == ids);
  }
  SUBCASE("no holdout") {
    std::vector<int> ids = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    auto split = split_dataset(ids, 3, 0, 0);
    CHECK(split.train.size() == 10);
    CHECK(split.dev.empty());
    CHECK(split.test.empty());
  }
  SUBCASE("deterministic in seed") {
    std::vector<int> ids(500);
    std::iota(ids.begin(), ids.end(), 0);
    auto a = split_dataset(ids, 9, 50, 60);
    auto b = split_dataset(ids, 9, 50, 60);
    auto c = split_dataset(ids, 10, 50, 60);
    CHECK(a.train == b.train);
    CHECK(a.dev == b.dev);
    CHECK(a.test == b.test);
    CHECK(a.test != c.test);
  }
  SUBCASE("oversized request") {
    std::vector<int> ids(10);
    CHECK_THROWS_AS(split_dataset(ids, 1, 6, 5), ConfigError);
  }
}

TEST_CASE("seeded shuffle is a uniform permutation") {
  // Every permutation of 3 items shows up with roughly equal frequency.
  std::map<std::vector<int>, int> counts;
  Rng rng(123);
  for (int i = 0; i < 6000; ++i) {
    std::vector<int> v = {0, 1, 2};
    seeded_shuffle(std::span<int>(v), rng);
    ++counts[v];
  }
  CHECK(counts.size() == 6);
  for (const auto& [perm, n] : counts) CHECK(std::abs(n - 1000) < 150);
}
