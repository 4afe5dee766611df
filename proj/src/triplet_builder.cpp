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

#include "sqagen/triplet_builder.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "sqagen/manifest.hpp"

namespace sqagen {
namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

RawQARecord raw_record_from_json(const Json& row) {
  if (!row.is_object()) throw InvariantViolation("corpus row is not a JSON object");
  RawQARecord rec;
  if (auto it = row.find("question"); it != row.end()) {
    rec.question = it->get<std::string>();
  } else if (auto q = row.find("query"); q != row.end()) {
    rec.question = q->get<std::string>();
  } else {
    throw InvariantViolation("missing required field 'question'");
  }
  if (auto it = row.find("answers"); it != row.end() && !it->is_null()) {
    for (const auto& a : *it) rec.answers.push_back(a.get<std::string>());
  }
  auto passages = row.find("passages");
  if (passages == row.end() || !passages->is_array()) {
    throw InvariantViolation("missing required array 'passages'");
  }
  for (const auto& p : *passages) {
    Passage passage;
    passage.passage_text = p.at("passage_text").get<std::string>();
    if (auto sel = p.find("is_selected"); sel != p.end()) {
      passage.is_selected = sel->is_boolean() ? sel->get<bool>() : sel->get<long long>() != 0;
    }
    rec.contexts.push_back(std::move(passage));
  }
  if (rec.contexts.empty()) throw InvariantViolation("record has no passages");
  return rec;
}

std::vector<RawQARecord> read_raw_corpus(const std::filesystem::path& path) {
  std::vector<Json> rows = read_jsonl(path);
  std::vector<RawQARecord> out;
  out.reserve(rows.size());
  // read_jsonl skips blank lines, so the row index is not the line number.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      out.push_back(raw_record_from_json(rows[i]));
    } catch (const InvariantViolation& e) {
      throw ManifestError(path.string(), i + 1, fmt::format("record {}: {}", i + 1, e.what()));
    } catch (const Json::exception& e) {
      throw ManifestError(path.string(), i + 1, fmt::format("record {}: {}", i + 1, e.what()));
    }
  }
  return out;
}

std::size_t select_context(const RawQARecord& record) {
  for (std::size_t i = 0; i < record.contexts.size(); ++i) {
    if (record.contexts[i].is_selected && !is_blank(record.contexts[i].passage_text)) return i;
  }
  std::vector<std::string> needles;
  for (const auto& a : record.answers) {
    if (!is_blank(a)) needles.push_back(ascii_lower(a));
  }
  for (std::size_t i = 0; i < record.contexts.size(); ++i) {
    const std::string hay = ascii_lower(record.contexts[i].passage_text);
    for (const auto& n : needles) {
      if (hay.find(n) != std::string::npos) return i;
    }
  }
  return std::string::npos;
}

BuildResult build_triplets(std::span<const RawQARecord> records, const std::string& id_prefix) {
  BuildResult result;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const RawQARecord& rec = records[i];
    auto answer = std::find_if(rec.answers.begin(), rec.answers.end(),
                               [](const std::string& a) { return !is_blank(a); });
    if (answer == rec.answers.end() || is_blank(rec.question)) {
      ++result.skipped;
      continue;
    }
    std::size_t ctx = select_context(rec);
    if (ctx == std::string::npos) {
      ++result.skipped;
      continue;
    }
    QATriplet t;
    t.id = fmt::format("{}-{:07}", id_prefix, i);
    t.question = rec.question;
    t.context_text = rec.contexts[ctx].passage_text;
    t.answer = *answer;
    // Audio arrives with the TTS stage.
    t.provenance = Provenance::kTtsSynthesized;
    t.filter_status = FilterStatus::kUnfiltered;
    result.triplets.push_back(std::move(t));
  }
  return result;
}

std::vector<QATriplet> filter_by_duration(std::span<const QATriplet> triplets, double cap) {
  std::vector<QATriplet> out;
  for (const auto& t : triplets) {
    if (!t.context_duration) {
      throw InvariantViolation("triplet " + t.id + " has no context_duration; synthesize first");
    }
    if (*t.context_duration < cap) out.push_back(t);
  }
  return out;
}

}  // namespace sqagen
