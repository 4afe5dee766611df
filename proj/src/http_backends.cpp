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

#include "sqagen/http_backends.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>

namespace sqagen {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  static const std::regex kUrl(R"(^(https?://[^/?#]+)([/?].*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) throw ConfigError("not an http(s) URL: '" + url + "'");
  std::string path = m[2].matched ? m[2].str() : "/";
  if (path.front() == '?') path = "/" + path;
  return {m[1].str(), path};
}

// One JSON POST per call; a fresh httplib client per request keeps the
// transport safe under concurrent callers.
class JsonPoster {
 public:
  explicit JsonPoster(const BackendConfig& cfg) : endpoint_(parse_endpoint(cfg.url)), timeout_ms_(cfg.timeout_ms) {
    if (!cfg.api_key_env.empty()) {
      const char* key = std::getenv(cfg.api_key_env.c_str());
      if (key == nullptr || *key == '\0') {
        throw ConfigError("environment variable " + cfg.api_key_env + " is not set");
      }
      bearer_ = key;
    }
  }

  Json post(const Json& body) const {
    httplib::Client client(endpoint_.origin);
    const auto timeout = std::chrono::milliseconds(timeout_ms_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!bearer_.empty()) headers.emplace("Authorization", "Bearer " + bearer_);

    auto res = client.Post(endpoint_.path, headers, body.dump(), "application/json");
    if (!res) {
      throw BackendError(BackendErrorKind::kTransient,
                         endpoint_.origin + endpoint_.path + ": " + httplib::to_string(res.error()));
    }
    const int status = res->status;
    if (status == 429 || status >= 500) {
      throw BackendError(BackendErrorKind::kTransient, "HTTP " + std::to_string(status));
    }
    if (status < 200 || status >= 300) {
      throw BackendError(BackendErrorKind::kNonRetryable,
                         "HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200));
    }
    try {
      return Json::parse(res->body);
    } catch (const Json::parse_error& e) {
      throw BackendError(BackendErrorKind::kProtocol, std::string("response is not JSON: ") + e.what());
    }
  }

 private:
  Endpoint endpoint_;
  int timeout_ms_;
  std::string bearer_;
};

class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(const BackendConfig& cfg) : poster_(cfg) {}

  ChatResponse send(const ChatRequest& request) override {
    const Json reply = poster_.post(chat_request_body(request));
    return parse_chat_response_body(reply.dump());
  }

 private:
  JsonPoster poster_;
};

class HttpTtsBackend final : public TtsBackend {
 public:
  explicit HttpTtsBackend(const BackendConfig& cfg) : poster_(cfg), model_(cfg.model) {}

  TtsResponse send(const TtsRequest& request) override {
    Json body = {{"text", request.text}, {"speaker_id", request.speaker_id}};
    if (!model_.empty()) body["model"] = model_;
    const Json reply = poster_.post(body);
    try {
      TtsResponse resp;
      resp.audio = base64_decode(reply.at("audio_base64").get<std::string>());
      resp.sample_rate = reply.value("sample_rate", 0);
      resp.duration = reply.value("duration", 0.0);
      return resp;
    } catch (const Json::exception& e) {
      throw BackendError(BackendErrorKind::kProtocol, std::string("bad TTS response: ") + e.what());
    }
  }

 private:
  JsonPoster poster_;
  std::string model_;
};

class HttpAsrBackend final : public AsrBackend {
 public:
  explicit HttpAsrBackend(const BackendConfig& cfg) : poster_(cfg), model_(cfg.model) {}

  AsrResponse send(const AsrRequest& request) override {
    Json body = {{"audio_base64", base64_encode(request.audio)}, {"audio_filepath", request.audio_filepath}};
    if (!model_.empty()) body["model"] = model_;
    const Json reply = poster_.post(body);
    auto it = reply.find("text");
    if (it == reply.end() || !it->is_string()) {
      throw BackendError(BackendErrorKind::kProtocol, "ASR response has no string 'text'");
    }
    return {it->get<std::string>()};
  }

 private:
  JsonPoster poster_;
  std::string model_;
};

}  // namespace

Json chat_request_body(const ChatRequest& request) {
  Json messages = Json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  return Json{{"model", request.model_name},
              {"messages", std::move(messages)},
              {"temperature", request.sampling.temperature},
              {"top_p", request.sampling.top_p},
              {"max_tokens", request.sampling.max_tokens}};
}

ChatResponse parse_chat_response_body(std::string_view body) {
  try {
    const Json reply = Json::parse(body);
    const Json& choice = reply.at("choices").at(0);
    ChatResponse resp;
    const Json& content = choice.at("message").at("content");
    resp.text = content.is_null() ? std::string() : content.get<std::string>();
    const std::string reason = choice.value("finish_reason", std::string("stop"));
    resp.finish_reason = reason == "stop" ? FinishReason::kStop
                         : reason == "length" ? FinishReason::kLength
                                              : FinishReason::kError;
    if (auto usage = reply.find("usage"); usage != reply.end() && usage->is_object()) {
      resp.prompt_tokens = usage->value("prompt_tokens", 0);
      resp.completion_tokens = usage->value("completion_tokens", 0);
    }
    return resp;
  } catch (const Json::exception& e) {
    throw BackendError(BackendErrorKind::kProtocol, std::string("bad chat completion body: ") + e.what());
  }
}

std::shared_ptr<ChatBackend> make_http_chat_backend(const BackendConfig& cfg) {
  return std::make_shared<HttpChatBackend>(cfg);
}
std::shared_ptr<TtsBackend> make_http_tts_backend(const BackendConfig& cfg) {
  return std::make_shared<HttpTtsBackend>(cfg);
}
std::shared_ptr<AsrBackend> make_http_asr_backend(const BackendConfig& cfg) {
  return std::make_shared<HttpAsrBackend>(cfg);
}

}  // namespace sqagen
