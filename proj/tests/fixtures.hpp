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

#ifndef SQAGEN_TESTS_FIXTURES_HPP_
#define SQAGEN_TESTS_FIXTURES_HPP_

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "sqagen/backends.hpp"
#include "sqagen/core_model.hpp"
#include "sqagen/mock_backends.hpp"
#include "sqagen/prompt_engine.hpp"
#include "sqagen/wav.hpp"

namespace sqagen::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "sqagen") {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            fmt::format("{}-{}-{}-{}", tag, ::getpid(), counter++, std::random_device{}());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f << text;
}

inline RetryPolicy fast_policy(int max_attempts = 3, int concurrency = 4) {
  RetryPolicy p;
  p.max_attempts = max_attempts;
  p.base_backoff_ms = 1;
  p.max_backoff_ms = 2;
  p.max_concurrency = concurrency;
  return p;
}

inline const PromptBank& default_prompts() {
  static const PromptBank bank = PromptBank::load(default_template_dir());
  return bank;
}

inline LlmClient generator_client(int pairs = 20, std::string fail_marker = "") {
  MockGeneratorOptions o;
  o.pairs = pairs;
  o.fail_marker = std::move(fail_marker);
  return LlmClient(std::make_shared<MockChatBackend>(mock_generator(o)), fast_policy());
}

inline LlmClient judge_client(JudgePolicy policy, std::string reject_marker = "", std::string missing_marker = "") {
  MockJudgeOptions o;
  o.policy = policy;
  o.reject_marker = std::move(reject_marker);
  o.missing_marker = std::move(missing_marker);
  return LlmClient(std::make_shared<MockChatBackend>(mock_judge(o)), fast_policy());
}

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> words = {
      "river", "lantern", "quiet", "morning", "harbor", "engine", "violet", "stone", "market", "window",
      "garden", "signal", "copper", "winter", "letter", "orchard", "bridge", "candle", "meadow", "thunder",
      "silver", "forest", "ladder", "pocket", "island", "marble", "feather", "canvas", "timber", "velvet"};
  return words;
}

// n space-separated lowercase words, deterministic in seed.
inline std::string sentence(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += word_pool()[rng() % word_pool().size()];
  }
  return s;
}

inline std::vector<UtteranceRecord> make_utterances(int n, LabelSource source = LabelSource::kReal,
                                                    const std::string& dir = "audio") {
  std::vector<UtteranceRecord> out;
  for (int i = 0; i < n; ++i) {
    UtteranceRecord r;
    r.audio_filepath = fmt::format("{}/utt{:04}.wav", dir, i);
    r.duration = 1.0 + 0.25 * (i % 16);
    r.text = sentence(1000 + static_cast<std::uint64_t>(i), 12 + i % 7);
    r.label_source = source;
    out.push_back(std::move(r));
  }
  return out;
}

inline QATriplet make_triplet(std::string id, std::string context, std::string question, std::string answer) {
  QATriplet t;
  t.id = std::move(id);
  t.context_text = std::move(context);
  t.question = std::move(question);
  t.answer = std::move(answer);
  t.provenance = Provenance::kRealLabel;
  return t;
}

// Writes a short silent WAV at every audio_filepath so ASR clients can read it.
inline void write_dummy_audio(const std::vector<UtteranceRecord>& utts) {
  const std::vector<std::int16_t> silence(160, 0);
  const auto wav = encode_wav_pcm16(silence, 16000);
  for (const auto& u : utts) {
    std::filesystem::create_directories(std::filesystem::path(u.audio_filepath).parent_path());
    std::ofstream f(u.audio_filepath, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(wav.data()), static_cast<std::streamsize>(wav.size()));
  }
}

inline std::map<std::string, std::string> reference_map(const std::vector<UtteranceRecord>& utts) {
  std::map<std::string, std::string> refs;
  for (const auto& u : utts) refs[u.audio_filepath] = u.text;
  return refs;
}

}  // namespace sqagen::testing

#endif  // SQAGEN_TESTS_FIXTURES_HPP_
