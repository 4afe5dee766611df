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

#ifndef SQAGEN_TRIPLET_BUILDER_HPP_
#define SQAGEN_TRIPLET_BUILDER_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sqagen/core_model.hpp"

namespace sqagen {

struct Passage {
  std::string passage_text;
  bool is_selected = false;
};

// One reading-comprehension record: a question, candidate passages and
// reference answers.
struct RawQARecord {
  std::string question;
  std::vector<Passage> contexts;
  std::vector<std::string> answers;
};

// Accepts {question|query, answers, passages:[{passage_text, is_selected}]};
// is_selected may be a bool or 0/1.
RawQARecord raw_record_from_json(const Json& row);
std::vector<RawQARecord> read_raw_corpus(const std::filesystem::path& path);

struct BuildResult {
  std::vector<QATriplet> triplets;
  std::size_t skipped = 0;
};

// Index of the passage used as context, or npos when none qualifies.
// Selected passages win; otherwise the first passage containing an answer
// (ASCII case-insensitive) is used.
std::size_t select_context(const RawQARecord& record);

// One triplet per record with a non-empty answer and a qualifying passage.
// Ids are "<id_prefix>-<input index>" so they stay stable across reruns.
BuildResult build_triplets(std::span<const RawQARecord> records,
                           const std::string& id_prefix = "msmarco");

// Keeps triplets whose context_duration is strictly below cap.
std::vector<QATriplet> filter_by_duration(std::span<const QATriplet> triplets, double cap);

}  // namespace sqagen

#endif  // SQAGEN_TRIPLET_BUILDER_HPP_
