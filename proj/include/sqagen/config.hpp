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

#ifndef SQAGEN_CONFIG_HPP_
#define SQAGEN_CONFIG_HPP_

#include <filesystem>
#include <string>

#include "sqagen/backends.hpp"
#include "sqagen/core_model.hpp"

namespace sqagen {

// Everything a CLI stage needs besides its input/output paths.
//
// The file is INI:
//
//   [pipeline]  qa_pairs_per_generation, max_synth_duration, upsample_factor,
//               seed, speakers (comma separated), id_prefix, strict_parse
//   [templates] dir (relative paths resolve against the config file)
//   [llm] [judge] [tts] [asr]
//               url, model, api_key_env, timeout_ms, max_attempts,
//               base_backoff_ms, max_backoff_ms, max_concurrency
//   [llm] [judge] additionally: temperature, top_p, max_tokens
//
// Secrets never live in the file; api_key_env names the environment
// variable that holds the bearer token. Unknown sections or keys are errors.
struct RunConfig {
  PipelineConfig pipeline;
  std::filesystem::path template_dir;
  BackendConfig llm;
  BackendConfig judge;
  BackendConfig tts;
  BackendConfig asr;
  SamplingParams generation_sampling;
  SamplingParams judge_sampling;
};

RunConfig default_run_config();
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace sqagen

#endif  // SQAGEN_CONFIG_HPP_
