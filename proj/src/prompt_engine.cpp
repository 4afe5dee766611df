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

#include "sqagen/prompt_engine.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "sqagen/manifest.hpp"

namespace sqagen {
namespace {

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

bool contains(const std::vector<std::string>& names, std::string_view name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::string read_template_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open template " + path.string());
  std::string out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.rfind("%%", 0) == 0) continue;
    if (!first) out += '\n';
    out += line;
    first = false;
  }
  // Trailing newlines in the file are not part of the prompt.
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return out;
}

std::string field(const Json& row, const char* key) {
  auto it = row.find(key);
  if (it == row.end() || !it->is_string()) {
    throw InvariantViolation(std::string("few-shot example needs string field '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

void validate(const GenerationExample& e) {
  if (blank(e.instruction) || blank(e.transcript) || blank(e.output)) {
    throw InvariantViolation("generation example has an empty field");
  }
}

void validate(const FilterExample& e) {
  if (blank(e.context) || blank(e.question) || blank(e.answer) || blank(e.evaluation)) {
    throw InvariantViolation("filter example has an empty field");
  }
}

void PromptTemplate::validate() const {
  for (const auto& name : required_placeholders) {
    const std::size_t n = count_occurrences(body, "{" + name + "}");
    if (n == 0) throw ConfigError(fmt::format("template '{}' is missing placeholder {{{}}}", template_id, name));
    if (n > 1) {
      throw ConfigError(fmt::format("template '{}' uses placeholder {{{}}} {} times; expected once",
                                    template_id, name, n));
    }
  }
}

PromptTemplate make_generation_template(std::string template_id, std::string body) {
  PromptTemplate t{std::move(template_id), std::move(body), {"examples", "transcript"}, {"n_pairs"}};
  t.validate();
  return t;
}

PromptTemplate make_filter_template(std::string template_id, std::string body) {
  PromptTemplate t{std::move(template_id),
                   std::move(body),
                   {"examples", "context", "question", "answer"},
                   {"n_examples"}};
  t.validate();
  return t;
}

std::string substitute(const PromptTemplate& tmpl, const std::map<std::string, std::string>& values) {
  tmpl.validate();
  const std::string& body = tmpl.body;
  std::string out;
  out.reserve(body.size());
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      const std::size_t close = body.find('}', i + 1);
      if (close != std::string::npos) {
        const std::string_view name(body.data() + i + 1, close - i - 1);
        if (contains(tmpl.required_placeholders, name) || contains(tmpl.optional_placeholders, name)) {
          auto it = values.find(std::string(name));
          if (it == values.end()) {
            throw InvariantViolation(fmt::format("no value for placeholder {{{}}}", name));
          }
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += body[i++];
  }
  return out;
}

std::string render_generation_examples(std::span<const GenerationExample> examples) {
  std::string out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& e = examples[i];
    const std::size_t n = i + 1;
    if (i > 0) out += '\n';
    out += fmt::format("{0}. Instruction: {1}\n{0}. Corresponding Transcript: {2}\n{0}. Output: {3}",
                       n, e.instruction, e.transcript, e.output);
  }
  return out;
}

std::string render_filter_examples(std::span<const FilterExample> examples) {
  std::string out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& e = examples[i];
    if (i > 0) out += "\n\n";
    out += fmt::format(
        "Example {}: #Context#\n{}\n\n#Question#\n{}\n\n#Answer#\n{}\n\n#Evaluation#\n{}\n{}", i + 1,
        e.context, e.question, e.answer, e.evaluation, to_string(e.verdict));
  }
  return out;
}

std::string render_generation_prompt(const PromptTemplate& tmpl,
                                     std::span<const GenerationExample> examples,
                                     const std::string& transcript, int n_pairs) {
  if (blank(transcript)) throw InvariantViolation("cannot render a generation prompt for an empty transcript");
  if (examples.empty()) throw InvariantViolation("generation prompt needs at least one few-shot example");
  if (n_pairs < 1) throw InvariantViolation("n_pairs must be >= 1");
  for (const auto& e : examples) validate(e);
  return substitute(tmpl, {{"examples", render_generation_examples(examples)},
                           {"transcript", transcript},
                           {"n_pairs", std::to_string(n_pairs)}});
}

std::string render_filter_prompt(const PromptTemplate& tmpl, std::span<const FilterExample> examples,
                                 const QATriplet& triplet) {
  if (blank(triplet.context_text) || blank(triplet.question) || blank(triplet.answer)) {
    throw InvariantViolation("triplet " + triplet.id + " has an empty field; cannot judge it");
  }
  for (const auto& e : examples) validate(e);
  return substitute(tmpl, {{"examples", render_filter_examples(examples)},
                           {"context", triplet.context_text},
                           {"question", triplet.question},
                           {"answer", triplet.answer},
                           {"n_examples", std::to_string(examples.size())}});
}

PromptBank PromptBank::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("template directory not found: " + dir.string());
  PromptBank bank;
  bank.generation = make_generation_template("generation", read_template_file(dir / "generation.txt"));
  bank.filter = make_filter_template("filter", read_template_file(dir / "filter.txt"));

  const auto gen_path = dir / "generation.examples.jsonl";
  const auto filt_path = dir / "filter.examples.jsonl";
  if (!std::filesystem::exists(gen_path)) throw ConfigError("missing " + gen_path.string());
  if (!std::filesystem::exists(filt_path)) throw ConfigError("missing " + filt_path.string());

  for (const Json& row : read_jsonl(gen_path)) {
    GenerationExample e{field(row, "instruction"), field(row, "transcript"), field(row, "output")};
    validate(e);
    bank.generation_examples.push_back(std::move(e));
  }
  for (const Json& row : read_jsonl(filt_path)) {
    FilterExample e{field(row, "context"), field(row, "question"), field(row, "answer"),
                    field(row, "evaluation"), Verdict::kAccept};
    const std::string v = field(row, "verdict");
    if (v == "ACCEPT") {
      e.verdict = Verdict::kAccept;
    } else if (v == "REJECT") {
      e.verdict = Verdict::kReject;
    } else {
      throw InvariantViolation("filter example verdict must be ACCEPT or REJECT, got '" + v + "'");
    }
    validate(e);
    bank.filter_examples.push_back(std::move(e));
  }
  if (bank.generation_examples.empty()) throw ConfigError("no generation examples in " + gen_path.string());
  if (bank.filter_examples.empty()) throw ConfigError("no filter examples in " + filt_path.string());
  return bank;
}

std::filesystem::path default_template_dir() { return SQAGEN_DEFAULT_TEMPLATE_DIR; }

}  // namespace sqagen
