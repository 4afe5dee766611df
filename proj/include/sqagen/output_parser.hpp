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

#ifndef SQAGEN_OUTPUT_PARSER_HPP_
#define SQAGEN_OUTPUT_PARSER_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqagen/core_model.hpp"

namespace sqagen {

struct ParsedQAPair {
  int index = 0;  // 1-based, reassigned sequentially
  std::string question;
  std::string answer;

  bool operator==(const ParsedQAPair&) const = default;
};

struct QAParseResult {
  std::vector<ParsedQAPair> pairs;
  // Pairs dropped for an empty field or a missing Output line.
  std::size_t malformed = 0;
  // Well-formed pairs beyond expected_pairs that were discarded.
  std::size_t truncated = 0;
};

// The completion did not follow the QA list format and is rejected whole.
class FailedGeneration : public Error {
 public:
  FailedGeneration(const std::string& what, std::size_t malformed)
      : Error(what), malformed_(malformed) {}
  std::size_t malformed() const noexcept { return malformed_; }

 private:
  std::size_t malformed_;
};

// The last non-empty line of a judge completion is not ACCEPT or REJECT.
class VerdictMissing : public Error {
 public:
  using Error::Error;
};

// Grammar, one item per line:
//
//   N. Instruction: <question>
//   N. Corresponding Transcript: <ignored>     (optional)
//   N. Output: <answer>
//
// N is not checked against position. A line without a keyword continues the
// current field (joined by one space) until a blank line. Text before the
// first marker is ignored.
//
// Lenient mode returns whatever well-formed pairs exist (at most
// expected_pairs) and throws FailedGeneration only when there are none.
// Strict mode also throws on any malformed pair or a count mismatch.
QAParseResult parse_qa_list(std::string_view completion, int expected_pairs, bool strict = false);

// Canonical rendering accepted by parse_qa_list.
std::string render_qa_list(std::span<const ParsedQAPair> pairs);

struct FilterVerdict {
  Verdict decision = Verdict::kReject;
  std::string reasoning;
};

// The trimmed last non-empty line must be exactly "ACCEPT" or "REJECT".
// Everything above it, trimmed, is the reasoning.
FilterVerdict parse_filter_verdict(std::string_view completion);

}  // namespace sqagen

#endif  // SQAGEN_OUTPUT_PARSER_HPP_
