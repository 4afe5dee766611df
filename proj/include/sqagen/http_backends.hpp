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

#ifndef SQAGEN_HTTP_BACKENDS_HPP_
#define SQAGEN_HTTP_BACKENDS_HPP_

#include <memory>

#include "sqagen/backends.hpp"

namespace sqagen {

std::shared_ptr<ChatBackend> make_http_chat_backend(const BackendConfig& cfg);
std::shared_ptr<TtsBackend> make_http_tts_backend(const BackendConfig& cfg);
std::shared_ptr<AsrBackend> make_http_asr_backend(const BackendConfig& cfg);

// Serialized chat-completions body: model, messages, temperature, top_p,
// max_tokens.
Json chat_request_body(const ChatRequest& request);
ChatResponse parse_chat_response_body(std::string_view body);

}  // namespace sqagen

#endif  // SQAGEN_HTTP_BACKENDS_HPP_
