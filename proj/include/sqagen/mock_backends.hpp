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

#ifndef SQAGEN_MOCK_BACKENDS_HPP_
#define SQAGEN_MOCK_BACKENDS_HPP_

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "sqagen/backends.hpp"

namespace sqagen {

// Call counters shared by all mocks.
class MockInstrumentation {
 public:
  class Scope {
   public:
    explicit Scope(MockInstrumentation& m);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    MockInstrumentation& m_;
  };

  int calls() const noexcept { return calls_.load(); }
  int max_in_flight() const noexcept { return max_in_flight_.load(); }

 private:
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

// Deterministic in-process chat backend. The responder maps a request to the
// completion text; it may throw BackendError to simulate failures.
//
// transient_failures makes the first N attempts of every distinct request
// fail with a transient error. latency_ms delays each call, which lets tests
// observe the concurrency bound.
class MockChatBackend final : public ChatBackend {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;

  explicit MockChatBackend(Responder responder, int transient_failures = 0, int latency_ms = 0);

  ChatResponse send(const ChatRequest& request) override;
  const MockInstrumentation& stats() const noexcept { return stats_; }

 private:
  Responder responder_;
  int transient_failures_;
  int latency_ms_;
  std::mutex mu_;
  std::map<std::uint64_t, int> attempts_;
  MockInstrumentation stats_;
};

// Last user message of a request.
const std::string& prompt_of(const ChatRequest& request);

struct MockGeneratorOptions {
  int pairs = 20;
  // Prompts containing this marker get a prose reply with no QA list.
  std::string fail_marker;
};

// Emits `pairs` well-formed QA pairs. Answers quote words of the transcript
// found after the last "#Given Transcript#" header, so they are grounded in
// the context.
MockChatBackend::Responder mock_generator(MockGeneratorOptions opts);

enum class JudgePolicy { kAcceptAll, kRejectAll, kGrounded };

struct MockJudgeOptions {
  JudgePolicy policy = JudgePolicy::kAcceptAll;
  // Triplets whose question or answer contains this marker are rejected.
  std::string reject_marker;
  // Triplets whose answer contains this marker get a reply with no verdict.
  std::string missing_marker;
};

// Reads the last #Context#/#Question#/#Answer# sections of a filter prompt
// and replies with a short reasoning line and a verdict. kGrounded accepts a
// triplet when its answer is an ASCII case-insensitive substring of its
// context.
MockChatBackend::Responder mock_judge(MockJudgeOptions opts);

// Returns the prompt unchanged.
MockChatBackend::Responder mock_echo();

// Duration = code points / chars_per_sec; the payload is silence of that
// length rounded to the nearest frame.
class MockTtsBackend final : public TtsBackend {
 public:
  explicit MockTtsBackend(double chars_per_sec = 15.0, int sample_rate = 16000);

  TtsResponse send(const TtsRequest& request) override;
  const MockInstrumentation& stats() const noexcept { return stats_; }

 private:
  double chars_per_sec_;
  int sample_rate_;
  MockInstrumentation stats_;
};

// Returns a stored reference transcript per audio path, dropping each word
// independently with probability drop_rate (a pure function of seed, path
// and word position). Unknown paths are NonRetryable.
class MockAsrBackend final : public AsrBackend {
 public:
  MockAsrBackend(std::map<std::string, std::string> references, double drop_rate = 0.0,
                 std::uint64_t seed = 0);

  AsrResponse send(const AsrRequest& request) override;
  const MockInstrumentation& stats() const noexcept { return stats_; }

 private:
  std::map<std::string, std::string> references_;
  double drop_rate_;
  std::uint64_t seed_;
  MockInstrumentation stats_;
};

// URL forms (query parameters optional):
//   mock:generate?pairs=20&fail_marker=S&transient_failures=0&latency_ms=0
//   mock:judge?policy=accept_all|reject_all|grounded&reject_marker=S&missing_marker=S
//   mock:echo
//   mock:tts?chars_per_sec=15&sample_rate=16000
//   mock:asr?references=<manifest.jsonl>&drop_rate=0&seed=0
std::shared_ptr<ChatBackend> make_mock_chat_backend(const std::string& url);
std::shared_ptr<TtsBackend> make_mock_tts_backend(const std::string& url);
std::shared_ptr<AsrBackend> make_mock_asr_backend(const std::string& url);

}  // namespace sqagen

#endif  // SQAGEN_MOCK_BACKENDS_HPP_
