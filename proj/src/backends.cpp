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

#include "sqagen/backends.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>

#include <openssl/evp.h>

#include "sqagen/http_backends.hpp"
#include "sqagen/mock_backends.hpp"

namespace sqagen {

std::string_view to_string(FinishReason r) {
  switch (r) {
    case FinishReason::kStop:
      return "stop";
    case FinishReason::kLength:
      return "length";
    case FinishReason::kError:
      return "error";
  }
  return "error";
}

std::string_view to_string(BackendErrorKind k) {
  switch (k) {
    case BackendErrorKind::kTransient:
      return "Transient";
    case BackendErrorKind::kNonRetryable:
      return "NonRetryable";
    case BackendErrorKind::kProtocol:
      return "ProtocolError";
    case BackendErrorKind::kExhaustedRetries:
      return "ExhaustedRetries";
    case BackendErrorKind::kUnknownSpeaker:
      return "UnknownSpeaker";
  }
  return "BackendError";
}

void ChatRequest::validate() const {
  if (messages.empty()) throw InvariantViolation("chat request has no messages");
  for (const auto& m : messages) {
    if (m.role != "system" && m.role != "user" && m.role != "assistant") {
      throw InvariantViolation("unknown chat role '" + m.role + "'");
    }
  }
  if (messages.back().role != "user") throw InvariantViolation("last chat message must be from the user");
  sampling.validate();
}

void RetryPolicy::validate() const {
  if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  if (max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
  if (base_backoff_ms < 0 || max_backoff_ms < 0) throw ConfigError("backoff must be non-negative");
}

namespace detail {

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt) {
  const double ceiling = std::min<double>(policy.max_backoff_ms,
                                          policy.base_backoff_ms * std::ldexp(1.0, std::min(attempt - 1, 30)));
  if (ceiling <= 0.0) return std::chrono::milliseconds(0);
  thread_local std::mt19937_64 jitter{std::random_device{}()};
  std::uniform_real_distribution<double> dist(0.0, ceiling);
  return std::chrono::milliseconds(static_cast<long long>(dist(jitter)));
}

}  // namespace detail

ConcurrencyLimiter::ConcurrencyLimiter(int max_in_flight) : limit_(max_in_flight) {
  if (max_in_flight < 1) throw ConfigError("max_concurrency must be >= 1");
}

void ConcurrencyLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_flight_ < limit_; });
  ++in_flight_;
}

void ConcurrencyLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

LlmClient::LlmClient(std::shared_ptr<ChatBackend> backend, RetryPolicy policy, std::string model_name)
    : backend_(std::move(backend)),
      policy_(policy),
      model_name_(std::move(model_name)),
      limiter_(std::make_shared<ConcurrencyLimiter>(policy.max_concurrency)) {
  if (!backend_) throw ConfigError("LLM client needs a backend");
  policy_.validate();
}

ChatRequest LlmClient::make_request(std::string prompt, SamplingParams sampling) const {
  ChatRequest req;
  req.model_name = model_name_;
  req.messages.push_back({"user", std::move(prompt)});
  req.sampling = sampling;
  return req;
}

ChatResponse LlmClient::chat_complete(const ChatRequest& request) const {
  request.validate();
  return with_retries(policy_, [&] {
    ConcurrencyLimiter::Slot slot(*limiter_);
    return backend_->send(request);
  });
}

TtsClient::TtsClient(std::shared_ptr<TtsBackend> backend, RetryPolicy policy,
                     std::vector<std::string> speakers)
    : backend_(std::move(backend)),
      policy_(policy),
      speakers_(std::move(speakers)),
      limiter_(std::make_shared<ConcurrencyLimiter>(policy.max_concurrency)) {
  if (!backend_) throw ConfigError("TTS client needs a backend");
  policy_.validate();
}

TtsResponse TtsClient::synthesize(const TtsRequest& request) const {
  if (!speakers_.empty() &&
      std::find(speakers_.begin(), speakers_.end(), request.speaker_id) == speakers_.end()) {
    throw BackendError(BackendErrorKind::kUnknownSpeaker, "speaker '" + request.speaker_id + "' is not configured");
  }
  if (request.text.empty()) throw BackendError(BackendErrorKind::kNonRetryable, "empty text");
  TtsResponse resp = with_retries(policy_, [&] {
    ConcurrencyLimiter::Slot slot(*limiter_);
    return backend_->send(request);
  });
  WavInfo info;
  try {
    info = parse_wav(resp.audio);
  } catch (const InvariantViolation& e) {
    throw BackendError(BackendErrorKind::kProtocol, std::string("TTS returned bad audio: ") + e.what());
  }
  if (resp.sample_rate == 0) resp.sample_rate = info.sample_rate;
  if (resp.duration <= 0.0) resp.duration = info.duration();
  if (!(resp.duration > 0.0)) throw BackendError(BackendErrorKind::kProtocol, "TTS returned empty audio");
  const double frame = info.sample_rate > 0 ? 1.0 / info.sample_rate : 0.0;
  if (std::abs(resp.duration - info.duration()) > frame + 1e-9) {
    throw BackendError(BackendErrorKind::kProtocol,
                       "TTS duration " + std::to_string(resp.duration) + " s disagrees with payload length " +
                           std::to_string(info.duration()) + " s");
  }
  return resp;
}

AsrClient::AsrClient(std::shared_ptr<AsrBackend> backend, RetryPolicy policy)
    : backend_(std::move(backend)),
      policy_(policy),
      limiter_(std::make_shared<ConcurrencyLimiter>(policy.max_concurrency)) {
  if (!backend_) throw ConfigError("ASR client needs a backend");
  policy_.validate();
}

AsrResponse AsrClient::transcribe(const AsrRequest& request) const {
  AsrRequest req = request;
  if (req.audio.empty()) {
    std::ifstream in(req.audio_filepath, std::ios::binary);
    if (req.audio_filepath.empty() || !in) {
      throw BackendError(BackendErrorKind::kNonRetryable, "cannot read audio '" + req.audio_filepath + "'");
    }
    req.audio.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return with_retries(policy_, [&] {
    ConcurrencyLimiter::Slot slot(*limiter_);
    return backend_->send(req);
  });
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

AudioBytes base64_decode(std::string_view text) {
  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if (c != '\n' && c != '\r' && c != ' ') clean += c;
  }
  if (clean.size() % 4 != 0) throw BackendError(BackendErrorKind::kProtocol, "base64 length not a multiple of 4");
  AudioBytes out(3 * clean.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                                static_cast<int>(clean.size()));
  if (n < 0) throw BackendError(BackendErrorKind::kProtocol, "invalid base64 payload");
  std::size_t pad = 0;
  if (!clean.empty() && clean.back() == '=') ++pad;
  if (clean.size() > 1 && clean[clean.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

namespace {
bool is_mock(const std::string& url) { return url.rfind("mock:", 0) == 0; }
}  // namespace

std::shared_ptr<ChatBackend> make_chat_backend(const BackendConfig& cfg) {
  if (cfg.url.empty()) throw ConfigError("no URL configured for the chat backend");
  return is_mock(cfg.url) ? make_mock_chat_backend(cfg.url) : make_http_chat_backend(cfg);
}

std::shared_ptr<TtsBackend> make_tts_backend(const BackendConfig& cfg) {
  if (cfg.url.empty()) throw ConfigError("no URL configured for the TTS backend");
  return is_mock(cfg.url) ? make_mock_tts_backend(cfg.url) : make_http_tts_backend(cfg);
}

std::shared_ptr<AsrBackend> make_asr_backend(const BackendConfig& cfg) {
  if (cfg.url.empty()) throw ConfigError("no URL configured for the ASR backend");
  return is_mock(cfg.url) ? make_mock_asr_backend(cfg.url) : make_http_asr_backend(cfg);
}

}  // namespace sqagen
