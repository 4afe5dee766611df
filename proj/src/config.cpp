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

#include "sqagen/config.hpp"

#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sqagen/pipelines.hpp"
#include "sqagen/prompt_engine.hpp"

namespace sqagen {
namespace {

namespace pt = boost::property_tree;

const std::set<std::string> kBackendKeys = {"url",           "model",          "api_key_env",
                                            "timeout_ms",    "max_attempts",   "base_backoff_ms",
                                            "max_backoff_ms", "max_concurrency"};
const std::set<std::string> kSamplingKeys = {"temperature", "top_p", "max_tokens"};
const std::set<std::string> kPipelineKeys = {"qa_pairs_per_generation", "max_synth_duration", "upsample_factor",
                                             "seed", "speakers", "id_prefix", "strict_parse"};

template <typename T>
void read_key(const pt::ptree& section, const std::string& name, const std::string& key, T& dst) {
  if (auto v = section.get_optional<std::string>(key)) {
    try {
      dst = section.get<T>(key);
    } catch (const pt::ptree_error&) {
      throw ConfigError("[" + name + "] " + key + ": cannot parse '" + *v + "'");
    }
  }
}

void check_keys(const pt::ptree& section, const std::string& name, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : section) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in section [" + name + "]");
  }
}

void read_backend(const pt::ptree& root, const std::string& name, BackendConfig& b, SamplingParams* sampling) {
  auto section = root.get_child_optional(name);
  if (!section) return;
  std::set<std::string> allowed = kBackendKeys;
  if (sampling != nullptr) allowed.insert(kSamplingKeys.begin(), kSamplingKeys.end());
  check_keys(*section, name, allowed);
  read_key(*section, name, "url", b.url);
  read_key(*section, name, "model", b.model);
  read_key(*section, name, "api_key_env", b.api_key_env);
  read_key(*section, name, "timeout_ms", b.timeout_ms);
  read_key(*section, name, "max_attempts", b.retry.max_attempts);
  read_key(*section, name, "base_backoff_ms", b.retry.base_backoff_ms);
  read_key(*section, name, "max_backoff_ms", b.retry.max_backoff_ms);
  read_key(*section, name, "max_concurrency", b.retry.max_concurrency);
  b.retry.validate();
  if (sampling != nullptr) {
    read_key(*section, name, "temperature", sampling->temperature);
    read_key(*section, name, "top_p", sampling->top_p);
    read_key(*section, name, "max_tokens", sampling->max_tokens);
    try {
      sampling->validate();
    } catch (const InvariantViolation& e) {
      throw ConfigError("[" + name + "] " + e.what());
    }
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.template_dir = default_template_dir();
  cfg.generation_sampling = default_generation_sampling();
  cfg.judge_sampling = default_judge_sampling();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  pt::ptree root;
  try {
    pt::read_ini(path.string(), root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  for (const auto& [name, section] : root) {
    static const std::set<std::string> kSections = {"pipeline", "templates", "llm", "judge", "tts", "asr"};
    if (!kSections.count(name)) throw ConfigError("unknown config section [" + name + "]");
  }

  RunConfig cfg = default_run_config();
  if (auto p = root.get_child_optional("pipeline")) {
    check_keys(*p, "pipeline", kPipelineKeys);
    read_key(*p, "pipeline", "qa_pairs_per_generation", cfg.pipeline.qa_pairs_per_generation);
    read_key(*p, "pipeline", "max_synth_duration", cfg.pipeline.max_synth_duration);
    read_key(*p, "pipeline", "upsample_factor", cfg.pipeline.upsample_factor);
    read_key(*p, "pipeline", "seed", cfg.pipeline.rng_seed);
    read_key(*p, "pipeline", "id_prefix", cfg.pipeline.id_prefix);
    read_key(*p, "pipeline", "strict_parse", cfg.pipeline.strict_parse);
    if (auto s = p->get_optional<std::string>("speakers")) cfg.pipeline.speaker_ids = split_list(*s);
    cfg.pipeline.validate();
  }
  if (auto t = root.get_child_optional("templates")) {
    check_keys(*t, "templates", {"dir"});
    if (auto dir = t->get_optional<std::string>("dir")) {
      std::filesystem::path d(*dir);
      cfg.template_dir = d.is_absolute() ? d : path.parent_path() / d;
    }
  }
  read_backend(root, "llm", cfg.llm, &cfg.generation_sampling);
  read_backend(root, "judge", cfg.judge, &cfg.judge_sampling);
  read_backend(root, "tts", cfg.tts, nullptr);
  read_backend(root, "asr", cfg.asr, nullptr);
  return cfg;
}

}  // namespace sqagen
