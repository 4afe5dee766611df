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

#ifndef SQAGEN_PROMPT_ENGINE_HPP_
#define SQAGEN_PROMPT_ENGINE_HPP_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sqagen/core_model.hpp"

namespace sqagen {

// Few-shot exemplar for QA generation.
struct GenerationExample {
  std::string instruction;
  std::string transcript;
  std::string output;
};

// Few-shot exemplar for judge filtering.
struct FilterExample {
  std::string context;
  std::string question;
  std::string answer;
  std::string evaluation;
  Verdict verdict = Verdict::kAccept;
};

void validate(const GenerationExample& e);
void validate(const FilterExample& e);

// A prompt body with {name} placeholders. Required placeholders must occur
// exactly once; optional ones ({n_pairs}, {n_examples}) any number of times.
// Any other brace sequence is plain text.
struct PromptTemplate {
  std::string template_id;
  std::string body;
  std::vector<std::string> required_placeholders;
  std::vector<std::string> optional_placeholders;

  void validate() const;
};

PromptTemplate make_generation_template(std::string template_id, std::string body);
PromptTemplate make_filter_template(std::string template_id, std::string body);

// Single-pass literal substitution of the template's own placeholders.
// Substituted values are never rescanned.
std::string substitute(const PromptTemplate& tmpl, const std::map<std::string, std::string>& values);

std::string render_generation_examples(std::span<const GenerationExample> examples);
std::string render_filter_examples(std::span<const FilterExample> examples);

std::string render_generation_prompt(const PromptTemplate& tmpl,
                                     std::span<const GenerationExample> examples,
                                     const std::string& transcript, int n_pairs);

std::string render_filter_prompt(const PromptTemplate& tmpl, std::span<const FilterExample> examples,
                                 const QATriplet& triplet);

// Templates and exemplars for both prompts, immutable once loaded.
//
// Directory layout:
//   generation.txt             generation template
//   generation.examples.jsonl  {instruction, transcript, output}
//   filter.txt                 filter template
//   filter.examples.jsonl      {context, question, answer, evaluation, verdict}
//
// Lines starting with "%%" in a template file are comments and dropped.
struct PromptBank {
  PromptTemplate generation;
  std::vector<GenerationExample> generation_examples;
  PromptTemplate filter;
  std::vector<FilterExample> filter_examples;

  static PromptBank load(const std::filesystem::path& dir);
};

// Directory holding the templates shipped with the project.
std::filesystem::path default_template_dir();

}  // namespace sqagen

#endif  // SQAGEN_PROMPT_ENGINE_HPP_
