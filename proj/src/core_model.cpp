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

#include "sqagen/core_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace sqagen {
namespace {

constexpr std::array<std::string_view, 3> kLabelSourceNames = {"real", "pseudo", "none"};
constexpr std::array<std::string_view, 3> kProvenanceNames = {"tts_synthesized", "real_label",
                                                              "pseudo_label"};
constexpr std::array<std::string_view, 3> kFilterStatusNames = {"unfiltered", "accepted",
                                                                "rejected"};

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<std::string_view, N>& names,
                std::string_view what) {
  auto it = std::find(names.begin(), names.end(), s);
  if (it == names.end()) {
    throw InvariantViolation("unknown " + std::string(what) + " '" + std::string(s) + "'");
  }
  return static_cast<Enum>(it - names.begin());
}

const Json& require(const Json& row, const char* key) {
  auto it = row.find(key);
  if (it == row.end()) throw InvariantViolation(std::string("missing required field '") + key + "'");
  return *it;
}

std::string require_string(const Json& row, const char* key) {
  const Json& v = require(row, key);
  if (!v.is_string()) throw InvariantViolation(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const Json& row, const char* key) {
  auto it = row.find(key);
  if (it == row.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw InvariantViolation(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<double> optional_number(const Json& row, const char* key) {
  auto it = row.find(key);
  if (it == row.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw InvariantViolation(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

Json collect_extra(const Json& row, std::initializer_list<std::string_view> known) {
  Json extra = Json::object();
  for (auto it = row.begin(); it != row.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) extra[it.key()] = it.value();
  }
  return extra;
}

void append_extra(Json& row, const Json& extra) {
  if (!extra.is_object()) return;
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    if (!row.contains(it.key())) row[it.key()] = it.value();
  }
}

void check_duration(double d) {
  if (!std::isfinite(d) || d < 0.0) {
    throw InvariantViolation("duration must be a finite non-negative number, got " +
                             std::to_string(d));
  }
}

}  // namespace

std::string_view to_string(LabelSource v) { return kLabelSourceNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Provenance v) { return kProvenanceNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(FilterStatus v) { return kFilterStatusNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Verdict v) { return v == Verdict::kAccept ? "ACCEPT" : "REJECT"; }

LabelSource parse_label_source(std::string_view s) {
  return parse_enum<LabelSource>(s, kLabelSourceNames, "label_source");
}
Provenance parse_provenance(std::string_view s) {
  return parse_enum<Provenance>(s, kProvenanceNames, "provenance");
}
FilterStatus parse_filter_status(std::string_view s) {
  return parse_enum<FilterStatus>(s, kFilterStatusNames, "filter_status");
}

void UtteranceRecord::validate() const {
  if (audio_filepath.empty()) throw InvariantViolation("audio_filepath is empty");
  check_duration(duration);
  if (label_source == LabelSource::kNone && !text.empty()) {
    throw InvariantViolation("label_source 'none' requires an empty transcript");
  }
}

void QATriplet::validate() const {
  if (id.empty()) throw InvariantViolation("triplet id is empty");
  if (context_audio && context_audio->empty()) {
    throw InvariantViolation("triplet " + id + ": context audio path is empty");
  }
  if (context_duration) check_duration(*context_duration);
}

void QATriplet::validate_emitted() const {
  validate();
  if (question.empty() || context_text.empty() || answer.empty()) {
    throw InvariantViolation("triplet " + id + ": question, context and answer must be non-empty");
  }
  if (provenance == Provenance::kTtsSynthesized && !context_audio) {
    throw InvariantViolation("triplet " + id + ": synthesized triplet has no context audio");
  }
}

void set_filter_status(QATriplet& t, FilterStatus next) {
  if (t.filter_status != FilterStatus::kUnfiltered || next == FilterStatus::kUnfiltered) {
    throw InvariantViolation("triplet " + t.id + ": illegal filter_status transition " +
                             std::string(to_string(t.filter_status)) + " -> " +
                             std::string(to_string(next)));
  }
  t.filter_status = next;
}

void SamplingParams::validate() const {
  if (!(temperature >= 0.0)) throw InvariantViolation("temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw InvariantViolation("top_p must be in (0, 1]");
  if (max_tokens < 1) throw InvariantViolation("max_tokens must be positive");
}

void PipelineConfig::validate() const {
  if (qa_pairs_per_generation < 1) throw ConfigError("qa_pairs_per_generation must be >= 1");
  if (upsample_factor < 1) throw ConfigError("upsample_factor must be >= 1");
  if (!(max_synth_duration > 0.0)) throw ConfigError("max_synth_duration must be > 0");
}

Json to_json(const UtteranceRecord& r) {
  Json row = Json::object();
  row["audio_filepath"] = r.audio_filepath;
  row["duration"] = r.duration;
  row["text"] = r.text;
  row["label_source"] = to_string(r.label_source);
  append_extra(row, r.extra);
  return row;
}

Json to_json(const QATriplet& t) {
  Json row = Json::object();
  row["id"] = t.id;
  if (t.context_audio) row["audio_filepath"] = *t.context_audio;
  if (t.context_duration) row["duration"] = *t.context_duration;
  row["context_text"] = t.context_text;
  row["question"] = t.question;
  row["answer"] = t.answer;
  row["provenance"] = to_string(t.provenance);
  row["filter_status"] = to_string(t.filter_status);
  append_extra(row, t.extra);
  return row;
}

UtteranceRecord utterance_from_json(const Json& row) {
  if (!row.is_object()) throw InvariantViolation("manifest row is not a JSON object");
  UtteranceRecord r;
  r.audio_filepath = require_string(row, "audio_filepath");
  const Json& duration = require(row, "duration");
  if (!duration.is_number()) throw InvariantViolation("field 'duration' must be a number");
  r.duration = duration.get<double>();
  r.text = optional_string(row, "text").value_or("");
  if (auto src = optional_string(row, "label_source")) {
    r.label_source = parse_label_source(*src);
  } else {
    r.label_source = r.text.empty() ? LabelSource::kNone : LabelSource::kReal;
  }
  r.extra = collect_extra(row, {"audio_filepath", "duration", "text", "label_source"});
  r.validate();
  return r;
}

QATriplet triplet_from_json(const Json& row) {
  if (!row.is_object()) throw InvariantViolation("manifest row is not a JSON object");
  QATriplet t;
  t.id = require_string(row, "id");
  t.question = require_string(row, "question");
  t.context_text = require_string(row, "context_text");
  t.answer = require_string(row, "answer");
  t.context_audio = optional_string(row, "audio_filepath");
  t.context_duration = optional_number(row, "duration");
  t.provenance = parse_provenance(require_string(row, "provenance"));
  if (auto s = optional_string(row, "filter_status")) t.filter_status = parse_filter_status(*s);
  t.extra = collect_extra(row, {"id", "audio_filepath", "duration", "context_text", "question",
                                "answer", "provenance", "filter_status"});
  t.validate();
  return t;
}

}  // namespace sqagen
