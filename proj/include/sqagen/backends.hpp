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

#ifndef SQAGEN_BACKENDS_HPP_
#define SQAGEN_BACKENDS_HPP_

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "sqagen/core_model.hpp"
#include "sqagen/wav.hpp"

namespace sqagen {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::string model_name;
  std::vector<ChatMessage> messages;
  SamplingParams sampling;

  void validate() const;
};

enum class FinishReason { kStop, kLength, kError };
std::string_view to_string(FinishReason r);

struct ChatResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::kStop;
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct TtsRequest {
  std::string text;
  std::string speaker_id;
};

struct TtsResponse {
  AudioBytes audio;  // RIFF/WAVE
  double duration = 0.0;
  int sample_rate = 0;
};

// Either a path (read by the client) or an in-memory payload.
struct AsrRequest {
  std::string audio_filepath;
  AudioBytes audio;
};

struct AsrResponse {
  std::string transcript;  // may be empty for silence
};

struct RetryPolicy {
  int max_attempts = 3;
  int base_backoff_ms = 500;
  int max_backoff_ms = 30000;
  int max_concurrency = 4;

  void validate() const;
};

enum class BackendErrorKind {
  kTransient,         // timeout, connection failure, 429, 5xx: retried
  kNonRetryable,      // other 4xx, bad input
  kProtocol,          // unparseable response body
  kExhaustedRetries,  // transient failures on every attempt
  kUnknownSpeaker,
};
std::string_view to_string(BackendErrorKind k);

class BackendError : public Error {
 public:
  BackendError(BackendErrorKind kind, const std::string& what, int attempts = 1)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind), attempts_(attempts) {}

  BackendErrorKind kind() const noexcept { return kind_; }
  int attempts() const noexcept { return attempts_; }

 private:
  BackendErrorKind kind_;
  int attempts_;
};

// Single-attempt transports. Implementations throw BackendError on failure
// and must be safe to call from several threads at once.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse send(const ChatRequest& request) = 0;
};

class TtsBackend {
 public:
  virtual ~TtsBackend() = default;
  virtual TtsResponse send(const TtsRequest& request) = 0;
};

class AsrBackend {
 public:
  virtual ~AsrBackend() = default;
  virtual AsrResponse send(const AsrRequest& request) = 0;
};

// Counting semaphore with a runtime bound.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(int max_in_flight);

  void acquire();
  void release();
  int limit() const noexcept { return limit_; }

  class Slot {
   public:
    explicit Slot(ConcurrencyLimiter& l) : limiter_(l) { limiter_.acquire(); }
    ~Slot() { limiter_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    ConcurrencyLimiter& limiter_;
  };

 private:
  const int limit_;
  int in_flight_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

namespace detail {
// Full jitter: uniform in [0, min(max_backoff, base * 2^(attempt-1))].
std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt);
}  // namespace detail

// Runs fn, retrying transient BackendErrors with exponential backoff. Other
// errors propagate after a single attempt.
template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn) -> decltype(fn()) {
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const BackendError& e) {
      if (e.kind() != BackendErrorKind::kTransient) throw;
      if (attempt >= policy.max_attempts) {
        throw BackendError(BackendErrorKind::kExhaustedRetries,
                           "gave up after " + std::to_string(attempt) + " attempts; last error: " + e.what(),
                           attempt);
      }
      std::this_thread::sleep_for(detail::backoff_delay(policy, attempt));
    }
  }
}

// Shareable client handles. Copies share the backend and the per-backend
// concurrency limiter.
class LlmClient {
 public:
  LlmClient(std::shared_ptr<ChatBackend> backend, RetryPolicy policy, std::string model_name = "default");

  ChatResponse chat_complete(const ChatRequest& request) const;

  // A user-message request with the model name of this client.
  ChatRequest make_request(std::string prompt, SamplingParams sampling) const;

  const RetryPolicy& policy() const noexcept { return policy_; }
  const std::string& model_name() const noexcept { return model_name_; }

 private:
  std::shared_ptr<ChatBackend> backend_;
  RetryPolicy policy_;
  std::string model_name_;
  std::shared_ptr<ConcurrencyLimiter> limiter_;
};

class TtsClient {
 public:
  // An empty speaker list disables the speaker check.
  TtsClient(std::shared_ptr<TtsBackend> backend, RetryPolicy policy,
            std::vector<std::string> speakers = {});

  TtsResponse synthesize(const TtsRequest& request) const;

  const RetryPolicy& policy() const noexcept { return policy_; }

 private:
  std::shared_ptr<TtsBackend> backend_;
  RetryPolicy policy_;
  std::vector<std::string> speakers_;
  std::shared_ptr<ConcurrencyLimiter> limiter_;
};

class AsrClient {
 public:
  AsrClient(std::shared_ptr<AsrBackend> backend, RetryPolicy policy);

  // Reads audio_filepath when the request carries no payload; an unreadable
  // file is a NonRetryable error. The transcript is returned unnormalized.
  AsrResponse transcribe(const AsrRequest& request) const;

  const RetryPolicy& policy() const noexcept { return policy_; }

 private:
  std::shared_ptr<AsrBackend> backend_;
  RetryPolicy policy_;
  std::shared_ptr<ConcurrencyLimiter> limiter_;
};

// Where and how to reach one backend.
struct BackendConfig {
  std::string url;  // http(s)://... or mock:<kind>?k=v&...
  std::string model;
  std::string api_key_env;  // name of the env var holding a bearer token
  int timeout_ms = 120000;
  RetryPolicy retry;
};

std::shared_ptr<ChatBackend> make_chat_backend(const BackendConfig& cfg);
std::shared_ptr<TtsBackend> make_tts_backend(const BackendConfig& cfg);
std::shared_ptr<AsrBackend> make_asr_backend(const BackendConfig& cfg);

std::string base64_encode(std::span<const std::uint8_t> bytes);
AudioBytes base64_decode(std::string_view text);

}  // namespace sqagen

#endif  // SQAGEN_BACKENDS_HPP_
