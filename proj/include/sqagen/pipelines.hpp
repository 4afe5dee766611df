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

#ifndef SQAGEN_PIPELINES_HPP_
#define SQAGEN_PIPELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sqagen/backends.hpp"
#include "sqagen/core_model.hpp"
#include "sqagen/prompt_engine.hpp"
#include "sqagen/random.hpp"

namespace sqagen {

// Bookkeeping for one pipeline run. Counts reconcile as
//   inputs_seen = succeeded + failed_generations + backend_failures + skipped
struct RunReport {
  std::string stage;
  std::size_t inputs_seen = 0;
  std::size_t succeeded = 0;
  std::size_t generations_attempted = 0;
  std::size_t failed_generations = 0;
  std::size_t backend_failures = 0;
  std::size_t skipped = 0;
  std::size_t malformed_pairs = 0;
  std::size_t pairs_emitted = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t dropped_over_duration = 0;
  double wall_time = 0.0;
  bool interrupted = false;

  // Throws InvariantViolation when the counters do not reconcile.
  void check() const;
  Json to_json() const;
};

// Cooperative cancellation. Workers stop picking up new items once set;
// items already in flight finish.
void request_interrupt() noexcept;
bool interrupt_requested() noexcept;
void clear_interrupt() noexcept;

// Sampling used for generation and judging calls.
SamplingParams default_generation_sampling();
SamplingParams default_judge_sampling();

struct TripletRun {
  std::vector<QATriplet> triplets;
  RunReport report;
};

// Synthesizes each triplet's context with a speaker drawn uniformly from
// config.speaker_ids (seeded by config.rng_seed, drawn in input order).
// Audio goes to <audio_dir>/<id>.wav; triplets at or above
// config.max_synth_duration are dropped, as are triplets whose synthesis
// fails. The chosen speaker is recorded in extra["speaker_id"].
TripletRun run_tts_pipeline(std::span<const QATriplet> triplets, const PipelineConfig& config,
                            const TtsClient& tts, const std::filesystem::path& audio_dir);

// One generation request per utterance for config.qa_pairs_per_generation
// pairs. Triplet ids are "<id_prefix>-<utterance index>-<pair index>".
// Utterances with no transcript are skipped; completions that fail to parse
// count as failed generations.
TripletRun run_qa_generation(std::span<const UtteranceRecord> utterances, const PipelineConfig& config,
                             const LlmClient& llm, const PromptBank& prompts,
                             const SamplingParams& sampling = default_generation_sampling());

struct TranscriptionRun {
  // Same length and order as the input. Empty transcripts and ASR failures
  // leave label_source = none.
  std::vector<UtteranceRecord> utterances;
  RunReport report;
};

// Replaces every transcript with the ASR output and tags it pseudo.
TranscriptionRun transcribe_utterances(std::span<const UtteranceRecord> unlabeled, const AsrClient& asr);

struct PseudoLabelRun {
  TranscriptionRun transcription;
  TripletRun generation;
};

// transcribe_utterances, then writes the pseudo-labeled manifest to
// pseudo_manifest, then run_qa_generation on it.
PseudoLabelRun run_pseudo_label_pipeline(std::span<const UtteranceRecord> unlabeled, const PipelineConfig& config,
                                         const AsrClient& asr, const LlmClient& llm, const PromptBank& prompts,
                                         const std::filesystem::path& pseudo_manifest,
                                         const SamplingParams& sampling = default_generation_sampling());

struct FilterRun {
  std::vector<QATriplet> accepted;
  // Every judged triplet with its status and extra["judge_reasoning"].
  std::vector<QATriplet> judged;
  RunReport report;
};

// Judges each triplet once. A completion without a verdict is retried once
// and then rejected; backend failures are rejected with the error recorded.
FilterRun run_filter(std::span<const QATriplet> triplets, const LlmClient& judge, const PromptBank& prompts,
                     const SamplingParams& sampling = default_judge_sampling());

template <typename T>
struct SyntheticSet {
  std::vector<T> records;
  int upsample_factor = 1;
};

// original, then each synthetic set repeated upsample_factor times
// (repetitions contiguous), optionally shuffled with a seed.
template <typename T>
std::vector<T> mix_datasets(std::span<const T> original, std::span<const SyntheticSet<T>> synthetic,
                            std::optional<std::uint64_t> shuffle_seed = std::nullopt) {
  std::size_t total = original.size();
  for (const auto& s : synthetic) {
    if (s.upsample_factor < 1) throw ConfigError("upsample factor must be >= 1");
    total += s.records.size() * static_cast<std::size_t>(s.upsample_factor);
  }
  std::vector<T> out;
  out.reserve(total);
  out.insert(out.end(), original.begin(), original.end());
  for (const auto& s : synthetic) {
    for (int k = 0; k < s.upsample_factor; ++k) out.insert(out.end(), s.records.begin(), s.records.end());
  }
  if (shuffle_seed) {
    Rng rng(*shuffle_seed);
    seeded_shuffle(std::span<T>(out), rng);
  }
  return out;
}

// Exclusive lock on an output path, held as "<path>.lock" for the lifetime
// of the object. A second RunLock on the same path throws ConfigError.
class RunLock {
 public:
  explicit RunLock(const std::filesystem::path& output);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::filesystem::path lock_path_;
};

// Filesystem-safe form of a triplet id.
std::string sanitize_file_stem(std::string_view id);

}  // namespace sqagen

#endif  // SQAGEN_PIPELINES_HPP_
