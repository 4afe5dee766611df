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

#include "sqagen/output_parser.hpp"

#include <array>
#include <optional>

#include <fmt/format.h>

namespace sqagen {
namespace {

constexpr std::string_view kWhitespace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(kWhitespace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kWhitespace);
  return s.substr(b, e - b + 1);
}

enum class Keyword { kInstruction, kTranscript, kOutput };

struct MarkerLine {
  Keyword keyword;
  std::string_view rest;
};

// Matches "<ws>N<ws>.<ws>Keyword<ws>:" and returns the text after the colon.
std::optional<MarkerLine> match_marker(std::string_view line) {
  static constexpr std::array<std::pair<std::string_view, Keyword>, 3> kKeywords = {{
      {"Instruction", Keyword::kInstruction},
      {"Corresponding Transcript", Keyword::kTranscript},
      {"Output", Keyword::kOutput},
  }};
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  };
  skip_ws();
  const std::size_t digits_begin = i;
  while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
  if (i == digits_begin) return std::nullopt;
  skip_ws();
  if (i >= line.size() || line[i] != '.') return std::nullopt;
  ++i;
  skip_ws();
  for (const auto& [word, kw] : kKeywords) {
    if (line.substr(i, word.size()) != word) continue;
    std::size_t j = i + word.size();
    while (j < line.size() && (line[j] == ' ' || line[j] == '\t')) ++j;
    if (j < line.size() && line[j] == ':') return MarkerLine{kw, line.substr(j + 1)};
  }
  return std::nullopt;
}

void append_continuation(std::string& field, std::string_view text) {
  if (!field.empty()) field += ' ';
  field += text;
}

}  // namespace

QAParseResult parse_qa_list(std::string_view completion, int expected_pairs, bool strict) {
  if (expected_pairs < 1) throw InvariantViolation("expected_pairs must be >= 1");

  enum class State { kIdle, kQuestion, kTranscript, kAnswer };
  struct Pending {
    std::string question;
    std::string answer;
    bool has_output = false;
  };

  QAParseResult result;
  std::optional<Pending> pending;
  State state = State::kIdle;

  auto finish = [&] {
    if (!pending) return;
    std::string q(trim(pending->question));
    std::string a(trim(pending->answer));
    if (pending->has_output && !q.empty() && !a.empty()) {
      result.pairs.push_back({0, std::move(q), std::move(a)});
    } else {
      ++result.malformed;
    }
    pending.reset();
  };

  std::size_t pos = 0;
  while (pos <= completion.size()) {
    std::size_t nl = completion.find('\n', pos);
    if (nl == std::string_view::npos) nl = completion.size();
    const std::string_view line = completion.substr(pos, nl - pos);
    pos = nl + 1;

    if (trim(line).empty()) {
      // Blank lines end a wrapped field but not the pair.
      state = State::kIdle;
      continue;
    }
    if (auto marker = match_marker(line)) {
      switch (marker->keyword) {
        case Keyword::kInstruction:
          finish();
          pending = Pending{std::string(trim(marker->rest)), {}, false};
          state = State::kQuestion;
          break;
        case Keyword::kTranscript:
          state = pending ? State::kTranscript : State::kIdle;
          break;
        case Keyword::kOutput:
          if (pending && !pending->has_output) {
            pending->answer = std::string(trim(marker->rest));
            pending->has_output = true;
            state = State::kAnswer;
          } else {
            // Output with no open instruction.
            finish();
            ++result.malformed;
            state = State::kIdle;
          }
          break;
      }
      continue;
    }
    switch (state) {
      case State::kQuestion:
        append_continuation(pending->question, trim(line));
        break;
      case State::kAnswer:
        append_continuation(pending->answer, trim(line));
        break;
      case State::kTranscript:
      case State::kIdle:
        break;
    }
  }
  finish();

  if (result.pairs.empty()) {
    throw FailedGeneration(
        fmt::format("no well-formed question/answer pair found ({} malformed)", result.malformed),
        result.malformed);
  }
  const auto expected = static_cast<std::size_t>(expected_pairs);
  if (strict && (result.malformed > 0 || result.pairs.size() != expected)) {
    throw FailedGeneration(fmt::format("strict parse: {} pairs, {} malformed, expected {}",
                                       result.pairs.size(), result.malformed, expected),
                           result.malformed);
  }
  if (result.pairs.size() > expected) {
    result.truncated = result.pairs.size() - expected;
    result.pairs.resize(expected);
  }
  for (std::size_t i = 0; i < result.pairs.size(); ++i) result.pairs[i].index = static_cast<int>(i + 1);
  return result;
}

std::string render_qa_list(std::span<const ParsedQAPair> pairs) {
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out += fmt::format("{0}. Instruction: {1}\n{0}. Output: {2}\n", i + 1, pairs[i].question,
                       pairs[i].answer);
  }
  return out;
}

FilterVerdict parse_filter_verdict(std::string_view completion) {
  std::size_t end = completion.size();
  while (true) {
    const std::size_t nl = end == 0 ? std::string_view::npos : completion.rfind('\n', end - 1);
    const std::size_t begin = nl == std::string_view::npos ? 0 : nl + 1;
    const std::string_view line = trim(completion.substr(begin, end - begin));
    if (!line.empty()) {
      FilterVerdict v;
      if (line == "ACCEPT") {
        v.decision = Verdict::kAccept;
      } else if (line == "REJECT") {
        v.decision = Verdict::kReject;
      } else {
        throw VerdictMissing(fmt::format("last line is not ACCEPT or REJECT: '{}'",
                                         line.substr(0, 80)));
      }
      v.reasoning = std::string(trim(completion.substr(0, begin)));
      return v;
    }
    if (nl == std::string_view::npos) break;
    end = nl;
  }
  throw VerdictMissing("empty judge completion");
}

}  // namespace sqagen
