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

#ifndef SQAGEN_CORE_MODEL_HPP_
#define SQAGEN_CORE_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sqagen/errors.hpp"

namespace sqagen {

using Json = nlohmann::ordered_json;

enum class LabelSource { kReal, kPseudo, kNone };
enum class Provenance { kTtsSynthesized, kRealLabel, kPseudoLabel };
enum class FilterStatus { kUnfiltered, kAccepted, kRejected };
// Judge decision; rendered as the tokens ACCEPT / REJECT.
enum class Verdict { kAccept, kReject };

std::string_view to_string(LabelSource v);
std::string_view to_string(Provenance v);
std::string_view to_string(FilterStatus v);
std::string_view to_string(Verdict v);
LabelSource parse_label_source(std::string_view s);
Provenance parse_provenance(std::string_view s);
FilterStatus parse_filter_status(std::string_view s);

// One audio file and its transcript; a manifest row.
struct UtteranceRecord {
  std::string audio_filepath;
  double duration = 0.0;
  std::string text;
  LabelSource label_source = LabelSource::kNone;
  // Unknown keys from the input row, in their original order.
  Json extra = Json::object();

  void validate() const;
  bool operator==(const UtteranceRecord&) const = default;
};

// Question/context/answer triplet. In manifests the context audio is stored
// under the NeMo keys audio_filepath/duration.
struct QATriplet {
  std::string id;
  std::string question;
  std::string context_text;
  std::string answer;
  std::optional<std::string> context_audio;
  std::optional<double> context_duration;
  Provenance provenance = Provenance::kTtsSynthesized;
  FilterStatus filter_status = FilterStatus::kUnfiltered;
  Json extra = Json::object();

  // Structural checks that hold for every triplet we read or write.
  void validate() const;
  // Stronger checks for triplets leaving a pipeline stage: non-empty
  // fields, and TTS provenance carries audio.
  void validate_emitted() const;
  bool operator==(const QATriplet&) const = default;
};

// Moves filter_status out of kUnfiltered; any other transition throws.
void set_filter_status(QATriplet& t, FilterStatus next);

struct SamplingParams {
  double temperature = 1.0;
  double top_p = 0.95;
  int max_tokens = 2048;

  void validate() const;
  bool operator==(const SamplingParams&) const = default;
};

struct PipelineConfig {
  int qa_pairs_per_generation = 20;
  double max_synth_duration = 20.0;
  int upsample_factor = 3;
  std::uint64_t rng_seed = 0;
  std::vector<std::string> speaker_ids;
  // Prefix for generated triplet ids.
  std::string id_prefix = "sqa";
  // All-or-nothing parsing of generation completions.
  bool strict_parse = false;

  void validate() const;
};

Json to_json(const UtteranceRecord& r);
Json to_json(const QATriplet& t);
UtteranceRecord utterance_from_json(const Json& row);
QATriplet triplet_from_json(const Json& row);

}  // namespace sqagen

#endif  // SQAGEN_CORE_MODEL_HPP_
