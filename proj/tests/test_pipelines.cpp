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

#include <set>

#include "fixtures.hpp"
#include "sqagen/manifest.hpp"
#include "sqagen/pipelines.hpp"

using namespace sqagen;

namespace {

PipelineConfig config_with(std::vector<std::string> speakers = {"spk1", "spk2", "spk3"}, std::uint64_t seed = 7) {
  PipelineConfig c;
  c.speaker_ids = std::move(speakers);
  c.rng_seed = seed;
  return c;
}

std::vector<QATriplet> strip_provenance(std::vector<QATriplet> ts) {
  for (auto& t : ts) t.provenance = Provenance::kRealLabel;
  return ts;
}

}  // namespace

TEST_CASE("TTS pipeline drops long contexts") {
  testing::TempDir dir;
  std::vector<QATriplet> ts;
  for (int i = 0; i < 4; ++i) {
    QATriplet t = testing::make_triplet(fmt::format("t{}", i), std::string(i == 3 ? 400 : 150, 'a'), "q", "a");
    t.provenance = Provenance::kTtsSynthesized;
    ts.push_back(t);
  }
  TtsClient tts(std::make_shared<MockTtsBackend>(15.0), testing::fast_policy(), {"spk1", "spk2", "spk3"});
  auto run = run_tts_pipeline(ts, config_with(), tts, dir / "audio");
  REQUIRE(run.triplets.size() == 3);
  CHECK(run.report.dropped_over_duration == 1);
  CHECK(run.report.succeeded == 4);
  CHECK(run.report.pairs_emitted == 3);
  CHECK_NOTHROW(run.report.check());
  for (const auto& t : run.triplets) {
    CHECK(t.context_duration.value() == doctest::Approx(10.0));
    REQUIRE(t.context_audio.has_value());
    CHECK(std::filesystem::exists(*t.context_audio));
    CHECK_NOTHROW(t.validate_emitted());
    CHECK(t.extra.contains("speaker_id"));
  }
  CHECK_FALSE(std::filesystem::exists(dir / "audio" / "t3.wav"));
}

TEST_CASE("TTS speaker assignment") {
  testing::TempDir dir;
  std::vector<QATriplet> ts;
  for (int i = 0; i < 40; ++i) {
    QATriplet t = testing::make_triplet(fmt::format("t{}", i), testing::sentence(i, 8), "q", "a");
    t.provenance = Provenance::kTtsSynthesized;
    ts.push_back(t);
  }
  TtsClient single(std::make_shared<MockTtsBackend>(), testing::fast_policy(), {"a"});
  for (const auto& t : run_tts_pipeline(ts, config_with({"a"}, 99), single, dir / "one").triplets) {
    CHECK(t.extra["speaker_id"] == "a");
  }

  TtsClient multi(std::make_shared<MockTtsBackend>(), testing::fast_policy(), {"s1", "s2", "s3", "s4"});
  auto speakers = [&](std::uint64_t seed, const std::string& sub) {
    std::vector<std::string> out;
    for (const auto& t : run_tts_pipeline(ts, config_with({"s1", "s2", "s3", "s4"}, seed), multi, dir / sub).triplets) {
      out.push_back(t.extra["speaker_id"].get<std::string>());
    }
    return out;
  };
  const auto a = speakers(5, "a");
  CHECK(a == speakers(5, "b"));
  CHECK(std::set<std::string>(a.begin(), a.end()).size() > 1);
  CHECK(a != speakers(6, "c"));
}

TEST_CASE("QA generation counting") {
  const auto utts = testing::make_utterances(100);
  SUBCASE("well-formed") {
    auto run = run_qa_generation(utts, config_with(), testing::generator_client(20), testing::default_prompts());
    CHECK(run.triplets.size() == 2000);
    CHECK(run.report.failed_generations == 0);
    CHECK(run.report.succeeded == 100);
    CHECK(run.report.pairs_emitted == 2000);
    CHECK_NOTHROW(run.report.check());
    CHECK(run.triplets.front().id == "sqa-000000-01");
    CHECK(run.triplets.back().id == "sqa-000099-20");
    for (const auto& t : run.triplets) CHECK(t.provenance == Provenance::kRealLabel);
  }
  SUBCASE("ten failures") {
    auto marked = utts;
    for (int i = 0; i < 100; i += 10) marked[i].text += " XFAILX";
    auto run =
        run_qa_generation(marked, config_with(), testing::generator_client(20, "XFAILX"), testing::default_prompts());
    CHECK(run.triplets.size() == 1800);
    CHECK(run.report.failed_generations == 10);
    CHECK(run.report.generations_attempted == 100);
    CHECK_NOTHROW(run.report.check());
  }
  SUBCASE("pseudo labels propagate") {
    auto pseudo = testing::make_utterances(3, LabelSource::kPseudo);
    auto run = run_qa_generation(pseudo, config_with(), testing::generator_client(4), testing::default_prompts());
    REQUIRE(run.triplets.size() == 12);
    for (const auto& t : run.triplets) CHECK(t.provenance == Provenance::kPseudoLabel);
  }
  SUBCASE("blank transcripts are skipped") {
    auto some = testing::make_utterances(5);
    some[2].text = "   ";
    some[2].label_source = LabelSource::kNone;
    auto run = run_qa_generation(some, config_with(), testing::generator_client(2), testing::default_prompts());
    CHECK(run.triplets.size() == 8);
    CHECK(run.report.skipped == 1);
    CHECK(run.report.generations_attempted == 4);
  }
  SUBCASE("backend failures are counted") {
    auto backend = std::make_shared<MockChatBackend>(mock_generator({}), 5);
    LlmClient llm(backend, testing::fast_policy(2));
    auto run = run_qa_generation(testing::make_utterances(4), config_with(), llm, testing::default_prompts());
    CHECK(run.triplets.empty());
    CHECK(run.report.backend_failures == 4);
    CHECK_NOTHROW(run.report.check());
  }
}

TEST_CASE("pseudo-label pipeline matches real labels modulo provenance") {
  testing::TempDir dir;
  auto utts = testing::make_utterances(50, LabelSource::kReal, (dir / "audio").string());
  testing::write_dummy_audio(utts);
  AsrClient asr(std::make_shared<MockAsrBackend>(testing::reference_map(utts)), testing::fast_policy());
  const auto llm = testing::generator_client(5);

  auto unlabeled = utts;
  for (auto& u : unlabeled) {
    u.text.clear();
    u.label_source = LabelSource::kNone;
  }
  auto pseudo = run_pseudo_label_pipeline(unlabeled, config_with(), asr, llm, testing::default_prompts(),
                                          dir / "pseudo.jsonl");
  auto real = run_qa_generation(utts, config_with(), llm, testing::default_prompts());

  REQUIRE(pseudo.generation.triplets.size() == 250);
  CHECK(strip_provenance(pseudo.generation.triplets) == real.triplets);
  for (const auto& t : pseudo.generation.triplets) CHECK(t.provenance == Provenance::kPseudoLabel);

  auto manifest = read_manifest(dir / "pseudo.jsonl");
  REQUIRE(manifest.size() == 50);
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    CHECK(manifest[i].text == utts[i].text);
    CHECK(manifest[i].label_source == LabelSource::kPseudo);
  }
}

TEST_CASE("empty ASR output is skipped before generation") {
  testing::TempDir dir;
  auto utts = testing::make_utterances(4, LabelSource::kNone, (dir / "audio").string());
  testing::write_dummy_audio(utts);
  auto refs = testing::reference_map(utts);
  refs[utts[1].audio_filepath] = "";
  AsrClient asr(std::make_shared<MockAsrBackend>(refs), testing::fast_policy());
  auto run = run_pseudo_label_pipeline(utts, config_with(), asr, testing::generator_client(3),
                                       testing::default_prompts(), dir / "pseudo.jsonl");
  CHECK(run.transcription.report.skipped == 1);
  CHECK(run.transcription.utterances.size() == 4);
  CHECK(run.transcription.utterances[1].label_source == LabelSource::kNone);
  CHECK(run.generation.report.skipped == 1);
  CHECK(run.generation.triplets.size() == 9);
}

TEST_CASE("large pseudo manifest keeps one row per input") {
  testing::TempDir dir;
  // All rows share one audio file on disk; durations differ per row.
  const auto seed_rows = testing::make_utterances(1, LabelSource::kNone, (dir / "audio").string());
  testing::write_dummy_audio(seed_rows);
  std::vector<UtteranceRecord> rows(33000, seed_rows.front());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].duration = static_cast<double>(i % 30);
  std::map<std::string, std::string> refs = {{seed_rows.front().audio_filepath, "word"}};
  AsrClient asr(std::make_shared<MockAsrBackend>(refs), testing::fast_policy());
  auto run = transcribe_utterances(rows, asr);
  write_manifest(std::span<const UtteranceRecord>(run.utterances), dir / "pseudo.jsonl");
  auto back = read_manifest(dir / "pseudo.jsonl");
  CHECK(back.size() == 33000);
  CHECK(run.report.succeeded == 33000);
  CHECK(back[123].label_source == LabelSource::kPseudo);
  CHECK(back[123].duration == 3.0);
}

TEST_CASE("filter") {
  SUBCASE("accept all is identity with status accepted") {
    std::vector<QATriplet> ts;
    for (int i = 0; i < 5; ++i) ts.push_back(testing::make_triplet(fmt::format("t{}", i), "ctx", "q", "a"));
    auto run = run_filter(ts, testing::judge_client(JudgePolicy::kAcceptAll), testing::default_prompts());
    REQUIRE(run.accepted.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      QATriplet expected = ts[i];
      expected.filter_status = FilterStatus::kAccepted;
      CHECK(run.accepted[i] == expected);
    }
    CHECK(run.judged.size() == 5);
    CHECK(run.judged[0].extra.contains("judge_reasoning"));
  }
  SUBCASE("grounded judge matches the substring oracle") {
    std::vector<QATriplet> ts;
    for (int i = 0; i < 10; ++i) {
      const std::string ctx = testing::sentence(50 + i, 10);
      const std::string answer = i < 6 ? ctx.substr(0, ctx.find(' ')) : "zebra crossing";
      ts.push_back(testing::make_triplet(fmt::format("t{}", i), ctx, "what?", answer));
    }
    auto run = run_filter(ts, testing::judge_client(JudgePolicy::kGrounded), testing::default_prompts());
    std::size_t oracle = 0;
    for (const auto& t : ts) oracle += t.context_text.find(t.answer) != std::string::npos;
    CHECK(oracle == 6);
    CHECK(run.accepted.size() == oracle);
    CHECK(run.report.accepted == 6);
    CHECK(run.report.rejected == 4);
  }
  SUBCASE("28 triplets, 10 rejected") {
    std::vector<QATriplet> ts;
    for (int i = 0; i < 28; ++i) {
      ts.push_back(testing::make_triplet(fmt::format("t{}", i), "ctx", i % 3 == 0 ? "bad [x] q" : "q", "a"));
    }
    std::size_t marked = 0;
    for (const auto& t : ts) marked += t.question.find("[x]") != std::string::npos;
    REQUIRE(marked == 10);
    auto run = run_filter(ts, testing::judge_client(JudgePolicy::kAcceptAll, "[x]"), testing::default_prompts());
    CHECK(run.accepted.size() == 18);
    CHECK(run.judged.size() == 28);
    CHECK_NOTHROW(run.report.check());
  }
  SUBCASE("missing verdicts are retried once then rejected") {
    std::vector<QATriplet> ts = {testing::make_triplet("t0", "ctx", "q", "a"),
                                 testing::make_triplet("t1", "ctx", "q", "a ???")};
    MockJudgeOptions o;
    o.missing_marker = "???";
    auto backend = std::make_shared<MockChatBackend>(mock_judge(o));
    auto run = run_filter(ts, LlmClient(backend, testing::fast_policy()), testing::default_prompts());
    CHECK(run.accepted.size() == 1);
    CHECK(run.report.failed_generations == 1);
    CHECK(backend->stats().calls() == 3);
    CHECK(run.judged[1].filter_status == FilterStatus::kRejected);
  }
  SUBCASE("backend errors reject") {
    auto backend = std::make_shared<MockChatBackend>([](const ChatRequest&) -> std::string {
      throw BackendError(BackendErrorKind::kNonRetryable, "down");
    });
    auto run = run_filter(std::vector<QATriplet>{testing::make_triplet("t", "c", "q", "a")},
                          LlmClient(backend, testing::fast_policy()), testing::default_prompts());
    CHECK(run.accepted.empty());
    CHECK(run.report.backend_failures == 1);
    CHECK(run.judged[0].filter_status == FilterStatus::kRejected);
  }
}

TEST_CASE("mix_datasets") {
  using Set = SyntheticSet<int>;
  std::vector<int> original = {1, 2, 3, 4};
  std::vector<Set> one = {Set{{10, 11}, 3}};
  CHECK(mix_datasets<int>(original, one) == std::vector<int>{1, 2, 3, 4, 10, 11, 10, 11, 10, 11});

  std::vector<Set> plain = {Set{{10, 11}, 1}};
  CHECK(mix_datasets<int>(original, plain) == std::vector<int>{1, 2, 3, 4, 10, 11});

  std::vector<Set> two = {Set{{20, 21}, 2}, Set{{30, 31, 32}, 1}};
  std::vector<int> single = {1};
  CHECK(mix_datasets<int>(single, two) == std::vector<int>{1, 20, 21, 20, 21, 30, 31, 32});

  auto shuffled = mix_datasets<int>(single, two, 5);
  CHECK(shuffled.size() == 8);
  CHECK(shuffled == mix_datasets<int>(single, two, 5));

  std::vector<Set> bad = {Set{{1}, 0}};
  CHECK_THROWS_AS(mix_datasets<int>(single, bad), ConfigError);
}

TEST_CASE("run lock") {
  testing::TempDir dir;
  {
    RunLock a(dir / "out.jsonl");
    CHECK_THROWS_AS(RunLock(dir / "out.jsonl"), ConfigError);
  }
  CHECK_NOTHROW(RunLock(dir / "out.jsonl"));
}

TEST_CASE("interrupt stops new work and is reported") {
  request_interrupt();
  auto run = run_qa_generation(testing::make_utterances(10), config_with(), testing::generator_client(2),
                               testing::default_prompts());
  clear_interrupt();
  CHECK(run.report.interrupted);
  CHECK(run.report.inputs_seen < 10);
  CHECK_NOTHROW(run.report.check());
}

TEST_CASE("sanitize_file_stem") {
  CHECK(sanitize_file_stem("sqa-000001-02") == "sqa-000001-02");
  CHECK(sanitize_file_stem("a/b\\c:d") .find('/') == std::string::npos);
  CHECK_FALSE(sanitize_file_stem("..").empty());
}
