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

#include "sqagen/mock_backends.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "sqagen/http_backends.hpp"
#include "sqagen/manifest.hpp"
#include "sqagen/random.hpp"

namespace sqagen {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

std::size_t code_points(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](unsigned char c) { return (c & 0xC0) != 0x80; }));
}

struct MockUrl {
  std::string kind;
  std::map<std::string, std::string> params;
};

MockUrl parse_mock_url(const std::string& url, std::initializer_list<std::string_view> allowed) {
  if (url.rfind("mock:", 0) != 0) throw ConfigError("not a mock URL: '" + url + "'");
  MockUrl out;
  const std::string rest = url.substr(5);
  const auto q = rest.find('?');
  out.kind = rest.substr(0, q);
  if (q == std::string::npos) return out;
  std::istringstream in(rest.substr(q + 1));
  for (std::string kv; std::getline(in, kv, '&');) {
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    std::string key = kv.substr(0, eq);
    std::string value = eq == std::string::npos ? "" : kv.substr(eq + 1);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown parameter '" + key + "' in " + url);
    }
    out.params[key] = value;
  }
  return out;
}

template <typename T>
T param(const MockUrl& u, const std::string& key, T fallback) {
  auto it = u.params.find(key);
  if (it == u.params.end()) return fallback;
  try {
    if constexpr (std::is_same_v<T, int>) {
      return std::stoi(it->second);
    } else if constexpr (std::is_same_v<T, double>) {
      return std::stod(it->second);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      return std::stoull(it->second);
    } else {
      return it->second;
    }
  } catch (const std::logic_error&) {
    throw ConfigError("bad value for mock parameter '" + key + "': '" + it->second + "'");
  }
}

// Text between the last occurrence of `header` and the next `stop` (or end).
std::string_view section_after(std::string_view prompt, std::string_view header, std::string_view stop) {
  const auto at = prompt.rfind(header);
  if (at == std::string_view::npos) return {};
  auto body = prompt.substr(at + header.size());
  return trim(body.substr(0, body.find(stop)));
}

}  // namespace

MockInstrumentation::Scope::Scope(MockInstrumentation& m) : m_(m) {
  m_.calls_.fetch_add(1);
  const int now = m_.in_flight_.fetch_add(1) + 1;
  int seen = m_.max_in_flight_.load();
  while (now > seen && !m_.max_in_flight_.compare_exchange_weak(seen, now)) {
  }
}

MockInstrumentation::Scope::~Scope() { m_.in_flight_.fetch_sub(1); }

MockChatBackend::MockChatBackend(Responder responder, int transient_failures, int latency_ms)
    : responder_(std::move(responder)), transient_failures_(transient_failures), latency_ms_(latency_ms) {}

const std::string& prompt_of(const ChatRequest& request) {
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role == "user") return it->content;
  }
  throw InvariantViolation("chat request has no user message");
}

ChatResponse MockChatBackend::send(const ChatRequest& request) {
  MockInstrumentation::Scope scope(stats_);
  if (latency_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(latency_ms_));
  if (transient_failures_ > 0) {
    const std::uint64_t key = fnv1a64(chat_request_body(request).dump());
    std::lock_guard lock(mu_);
    if (attempts_[key]++ < transient_failures_) {
      throw BackendError(BackendErrorKind::kTransient, "mock: HTTP 503");
    }
  }
  ChatResponse resp;
  resp.text = responder_(request);
  resp.finish_reason = FinishReason::kStop;
  resp.prompt_tokens = static_cast<int>(split_words(prompt_of(request)).size());
  resp.completion_tokens = static_cast<int>(split_words(resp.text).size());
  return resp;
}

MockChatBackend::Responder mock_generator(MockGeneratorOptions opts) {
  return [opts](const ChatRequest& request) -> std::string {
    const std::string& prompt = prompt_of(request);
    if (!opts.fail_marker.empty() && prompt.find(opts.fail_marker) != std::string::npos) {
      return "Sure! This passage touches on a few themes, and the speaker seems thoughtful "
             "throughout. Let me know if you would like me to go deeper on any part of it.";
    }
    std::string_view transcript = section_after(prompt, "#Given Transcript#\n", "\n\n");
    if (transcript.empty()) transcript = prompt;
    const auto words = split_words(transcript);
    const auto tag = fnv1a64(transcript) & 0xffffffULL;
    std::string out = fmt::format("Here are {} question - answer pairs:\n\n", opts.pairs);
    for (int k = 1; k <= opts.pairs; ++k) {
      const std::size_t len = std::min<std::size_t>(4, words.size());
      std::size_t start = words.empty() ? 0 : (static_cast<std::size_t>(k - 1) * 3) % words.size();
      if (start + len > words.size()) start = words.size() - len;
      std::string answer;
      for (std::size_t i = start; i < start + len; ++i) {
        if (!answer.empty()) answer += ' ';
        answer += words[i];
      }
      if (answer.empty()) answer = "nothing";
      out += fmt::format("{0}. Instruction: What does the speaker say in part {0} of passage {1:06x}?\n"
                         "{0}. Output: {2}\n",
                         k, tag, answer);
    }
    return out;
  };
}

MockChatBackend::Responder mock_judge(MockJudgeOptions opts) {
  return [opts](const ChatRequest& request) -> std::string {
    const std::string_view prompt = prompt_of(request);
    const auto c = prompt.rfind("#Context#");
    const auto q = prompt.rfind("#Question#");
    const auto a = prompt.rfind("#Answer#");
    const auto e = prompt.rfind("#Evaluation#");
    if (c == std::string_view::npos || !(c < q && q < a && a < e && e != std::string_view::npos)) {
      return "I could not find a triplet to evaluate.";
    }
    const auto context = trim(prompt.substr(c + 9, q - c - 9));
    const auto question = trim(prompt.substr(q + 10, a - q - 10));
    const auto answer = trim(prompt.substr(a + 8, e - a - 8));

    if (!opts.missing_marker.empty() && answer.find(opts.missing_marker) != std::string_view::npos) {
      return "The answer looks plausible, but I am not sure either way.";
    }
    if (!opts.reject_marker.empty() && (question.find(opts.reject_marker) != std::string_view::npos ||
                                        answer.find(opts.reject_marker) != std::string_view::npos)) {
      return "The triplet is flagged as low quality.\nREJECT";
    }
    switch (opts.policy) {
      case JudgePolicy::kAcceptAll:
        return "The question is relevant to the context and the answer is grounded.\nACCEPT";
      case JudgePolicy::kRejectAll:
        return "The triplet does not meet the guidelines.\nREJECT";
      case JudgePolicy::kGrounded:
        if (!answer.empty() && lower(context).find(lower(answer)) != std::string::npos) {
          return "The answer appears verbatim in the context, so it is grounded.\nACCEPT";
        }
        return "The answer is not supported by the context.\nREJECT";
    }
    return "REJECT";
  };
}

MockChatBackend::Responder mock_echo() {
  return [](const ChatRequest& request) { return prompt_of(request); };
}

MockTtsBackend::MockTtsBackend(double chars_per_sec, int sample_rate)
    : chars_per_sec_(chars_per_sec), sample_rate_(sample_rate) {
  if (!(chars_per_sec > 0.0) || sample_rate <= 0) throw ConfigError("mock TTS needs positive rate settings");
}

TtsResponse MockTtsBackend::send(const TtsRequest& request) {
  MockInstrumentation::Scope scope(stats_);
  if (request.text.empty()) throw BackendError(BackendErrorKind::kNonRetryable, "mock TTS: empty text");
  TtsResponse resp;
  resp.duration = static_cast<double>(code_points(request.text)) / chars_per_sec_;
  resp.sample_rate = sample_rate_;
  const auto frames = static_cast<std::size_t>(std::llround(resp.duration * sample_rate_));
  const std::vector<std::int16_t> silence(frames, 0);
  resp.audio = encode_wav_pcm16(silence, sample_rate_);
  return resp;
}

MockAsrBackend::MockAsrBackend(std::map<std::string, std::string> references, double drop_rate,
                               std::uint64_t seed)
    : references_(std::move(references)), drop_rate_(drop_rate), seed_(seed) {
  if (!(drop_rate >= 0.0 && drop_rate <= 1.0)) throw ConfigError("mock ASR drop_rate must be in [0, 1]");
}

AsrResponse MockAsrBackend::send(const AsrRequest& request) {
  MockInstrumentation::Scope scope(stats_);
  auto it = references_.find(request.audio_filepath);
  if (it == references_.end()) {
    throw BackendError(BackendErrorKind::kNonRetryable, "mock ASR: no reference for '" + request.audio_filepath + "'");
  }
  if (drop_rate_ == 0.0) return {it->second};
  std::string out;
  const auto words = split_words(it->second);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::uint64_t h = fnv1a64(fmt::format("{}|{}|{}", seed_, request.audio_filepath, i));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    if (u < drop_rate_) continue;
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return {out};
}

std::shared_ptr<ChatBackend> make_mock_chat_backend(const std::string& url) {
  const MockUrl u = parse_mock_url(url, {"pairs", "fail_marker", "policy", "reject_marker",
                                         "missing_marker", "transient_failures", "latency_ms"});
  const int failures = param(u, "transient_failures", 0);
  const int latency = param(u, "latency_ms", 0);
  if (u.kind == "generate") {
    MockGeneratorOptions o;
    o.pairs = param(u, "pairs", 20);
    o.fail_marker = param<std::string>(u, "fail_marker", "");
    return std::make_shared<MockChatBackend>(mock_generator(o), failures, latency);
  }
  if (u.kind == "judge") {
    MockJudgeOptions o;
    const std::string policy = param<std::string>(u, "policy", "accept_all");
    if (policy == "accept_all") {
      o.policy = JudgePolicy::kAcceptAll;
    } else if (policy == "reject_all") {
      o.policy = JudgePolicy::kRejectAll;
    } else if (policy == "grounded") {
      o.policy = JudgePolicy::kGrounded;
    } else {
      throw ConfigError("unknown mock judge policy '" + policy + "'");
    }
    o.reject_marker = param<std::string>(u, "reject_marker", "");
    o.missing_marker = param<std::string>(u, "missing_marker", "");
    return std::make_shared<MockChatBackend>(mock_judge(o), failures, latency);
  }
  if (u.kind == "echo") return std::make_shared<MockChatBackend>(mock_echo(), failures, latency);
  throw ConfigError("unknown mock chat backend '" + u.kind + "'");
}

std::shared_ptr<TtsBackend> make_mock_tts_backend(const std::string& url) {
  const MockUrl u = parse_mock_url(url, {"chars_per_sec", "sample_rate"});
  if (u.kind != "tts") throw ConfigError("unknown mock TTS backend '" + u.kind + "'");
  return std::make_shared<MockTtsBackend>(param(u, "chars_per_sec", 15.0), param(u, "sample_rate", 16000));
}

std::shared_ptr<AsrBackend> make_mock_asr_backend(const std::string& url) {
  const MockUrl u = parse_mock_url(url, {"references", "drop_rate", "seed"});
  if (u.kind != "asr") throw ConfigError("unknown mock ASR backend '" + u.kind + "'");
  std::map<std::string, std::string> refs;
  if (auto path = param<std::string>(u, "references", ""); !path.empty()) {
    for (const auto& r : read_manifest(path)) refs[r.audio_filepath] = r.text;
  }
  return std::make_shared<MockAsrBackend>(std::move(refs), param(u, "drop_rate", 0.0),
                                          param<std::uint64_t>(u, "seed", 0));
}

}  // namespace sqagen
