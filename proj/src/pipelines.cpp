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

#include "sqagen/pipelines.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "sqagen/manifest.hpp"
#include "sqagen/output_parser.hpp"

namespace sqagen {
namespace {

std::atomic<bool> g_interrupt{false};

// Calls fn(i) for i in [0, n) on up to `workers` threads. Returns a mask of
// the indices that ran; items not started before an interrupt stay false.
// The first exception escaping fn is rethrown after all workers join.
template <typename Fn>
std::vector<char> parallel_for_index(std::size_t n, int workers, Fn&& fn) {
  std::vector<char> ran(n, 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    while (!interrupt_requested()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
        ran[i] = 1;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        request_interrupt();
        return;
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) {
    clear_interrupt();
    std::rethrow_exception(failure);
  }
  return ran;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

void write_bytes(const std::filesystem::path& path, const AudioBytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace

void request_interrupt() noexcept { g_interrupt.store(true); }
bool interrupt_requested() noexcept { return g_interrupt.load(); }
void clear_interrupt() noexcept { g_interrupt.store(false); }

SamplingParams default_generation_sampling() { return {1.0, 0.95, 2048}; }
SamplingParams default_judge_sampling() { return {1.0, 0.95, 1024}; }

void RunReport::check() const {
  if (inputs_seen != succeeded + failed_generations + backend_failures + skipped) {
    throw InvariantViolation(fmt::format("{} report does not reconcile: seen {} != {} ok + {} failed + {} backend + {} skipped",
                                         stage, inputs_seen, succeeded, failed_generations, backend_failures,
                                         skipped));
  }
  if (accepted + rejected > pairs_emitted) throw InvariantViolation(stage + " report: accepted + rejected > emitted");
  if (failed_generations > generations_attempted) {
    throw InvariantViolation(stage + " report: more failed generations than attempts");
  }
}

Json RunReport::to_json() const {
  return Json{{"stage", stage},
              {"inputs_seen", inputs_seen},
              {"succeeded", succeeded},
              {"generations_attempted", generations_attempted},
              {"failed_generations", failed_generations},
              {"backend_failures", backend_failures},
              {"skipped", skipped},
              {"malformed_pairs", malformed_pairs},
              {"pairs_emitted", pairs_emitted},
              {"accepted", accepted},
              {"rejected", rejected},
              {"dropped_over_duration", dropped_over_duration},
              {"wall_time", wall_time},
              {"interrupted", interrupted}};
}

std::string sanitize_file_stem(std::string_view id) {
  std::string out(id);
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    if (!ok) c = '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

TripletRun run_tts_pipeline(std::span<const QATriplet> triplets, const PipelineConfig& config, const TtsClient& tts,
                            const std::filesystem::path& audio_dir) {
  config.validate();
  if (config.speaker_ids.empty()) throw ConfigError("TTS pipeline needs at least one speaker id");
  Stopwatch clock;
  std::filesystem::create_directories(audio_dir);

  // Draw speakers up front, in input order, so assignment does not depend on
  // scheduling.
  Rng rng(config.rng_seed);
  std::vector<std::string> speakers(triplets.size());
  for (auto& s : speakers) s = config.speaker_ids[uniform_index(rng, config.speaker_ids.size())];

  enum class Outcome { kKept, kTooLong, kFailed, kSkipped };
  struct Item {
    Outcome outcome = Outcome::kSkipped;
    QATriplet triplet;
  };
  std::vector<Item> items(triplets.size());
  std::atomic<std::size_t> calls{0};

  const auto ran = parallel_for_index(triplets.size(), tts.policy().max_concurrency, [&](std::size_t i) {
    Item& item = items[i];
    const QATriplet& in = triplets[i];
    if (blank(in.context_text)) {
      item.outcome = Outcome::kSkipped;
      return;
    }
    TtsResponse resp;
    try {
      calls.fetch_add(1);
      resp = tts.synthesize({in.context_text, speakers[i]});
    } catch (const BackendError&) {
      item.outcome = Outcome::kFailed;
      return;
    }
    if (!(resp.duration < config.max_synth_duration)) {
      item.outcome = Outcome::kTooLong;
      return;
    }
    const auto path = audio_dir / (sanitize_file_stem(in.id) + ".wav");
    write_bytes(path, resp.audio);
    item.triplet = in;
    item.triplet.context_audio = path.string();
    item.triplet.context_duration = resp.duration;
    item.triplet.provenance = Provenance::kTtsSynthesized;
    item.triplet.extra["speaker_id"] = speakers[i];
    item.outcome = Outcome::kKept;
  });

  TripletRun run;
  run.report.stage = "synthesize";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!ran[i]) {
      run.report.interrupted = true;
      continue;
    }
    ++run.report.inputs_seen;
    switch (items[i].outcome) {
      case Outcome::kKept:
        ++run.report.succeeded;
        run.triplets.push_back(std::move(items[i].triplet));
        break;
      case Outcome::kTooLong:
        ++run.report.succeeded;
        ++run.report.dropped_over_duration;
        break;
      case Outcome::kFailed:
        ++run.report.backend_failures;
        break;
      case Outcome::kSkipped:
        ++run.report.skipped;
        break;
    }
  }
  for (const auto& t : run.triplets) t.validate_emitted();
  run.report.generations_attempted = calls.load();
  run.report.pairs_emitted = run.triplets.size();
  run.report.wall_time = clock.seconds();
  run.report.check();
  return run;
}

TripletRun run_qa_generation(std::span<const UtteranceRecord> utterances, const PipelineConfig& config,
                             const LlmClient& llm, const PromptBank& prompts, const SamplingParams& sampling) {
  config.validate();
  sampling.validate();
  Stopwatch clock;

  enum class Outcome { kOk, kFailedGeneration, kBackendFailure, kSkipped };
  struct Item {
    Outcome outcome = Outcome::kSkipped;
    std::vector<ParsedQAPair> pairs;
    std::size_t malformed = 0;
  };
  std::vector<Item> items(utterances.size());

  const auto ran = parallel_for_index(utterances.size(), llm.policy().max_concurrency, [&](std::size_t i) {
    Item& item = items[i];
    const UtteranceRecord& u = utterances[i];
    if (blank(u.text)) {
      item.outcome = Outcome::kSkipped;
      return;
    }
    const std::string prompt = render_generation_prompt(prompts.generation, prompts.generation_examples, u.text,
                                                        config.qa_pairs_per_generation);
    ChatResponse resp;
    try {
      resp = llm.chat_complete(llm.make_request(prompt, sampling));
    } catch (const BackendError&) {
      item.outcome = Outcome::kBackendFailure;
      return;
    }
    try {
      QAParseResult parsed = parse_qa_list(resp.text, config.qa_pairs_per_generation, config.strict_parse);
      item.pairs = std::move(parsed.pairs);
      item.malformed = parsed.malformed;
      item.outcome = Outcome::kOk;
    } catch (const FailedGeneration& e) {
      item.malformed = e.malformed();
      item.outcome = Outcome::kFailedGeneration;
    }
  });

  TripletRun run;
  run.report.stage = "generate";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!ran[i]) {
      run.report.interrupted = true;
      continue;
    }
    ++run.report.inputs_seen;
    Item& item = items[i];
    run.report.malformed_pairs += item.malformed;
    if (item.outcome != Outcome::kSkipped) ++run.report.generations_attempted;
    switch (item.outcome) {
      case Outcome::kOk:
        ++run.report.succeeded;
        break;
      case Outcome::kFailedGeneration:
        ++run.report.failed_generations;
        continue;
      case Outcome::kBackendFailure:
        ++run.report.backend_failures;
        continue;
      case Outcome::kSkipped:
        ++run.report.skipped;
        continue;
    }
    const UtteranceRecord& u = utterances[i];
    for (const auto& pair : item.pairs) {
      QATriplet t;
      t.id = fmt::format("{}-{:06}-{:02}", config.id_prefix, i, pair.index);
      t.question = pair.question;
      t.context_text = u.text;
      t.answer = pair.answer;
      t.context_audio = u.audio_filepath;
      t.context_duration = u.duration;
      t.provenance = u.label_source == LabelSource::kPseudo ? Provenance::kPseudoLabel : Provenance::kRealLabel;
      t.validate_emitted();
      run.triplets.push_back(std::move(t));
    }
  }
  run.report.pairs_emitted = run.triplets.size();
  run.report.wall_time = clock.seconds();
  run.report.check();
  return run;
}

TranscriptionRun transcribe_utterances(std::span<const UtteranceRecord> unlabeled, const AsrClient& asr) {
  Stopwatch clock;
  enum class Outcome { kOk, kEmpty, kFailed };
  std::vector<Outcome> outcomes(unlabeled.size(), Outcome::kFailed);
  std::vector<std::string> transcripts(unlabeled.size());

  const auto ran = parallel_for_index(unlabeled.size(), asr.policy().max_concurrency, [&](std::size_t i) {
    try {
      transcripts[i] = asr.transcribe({unlabeled[i].audio_filepath, {}}).transcript;
      outcomes[i] = blank(transcripts[i]) ? Outcome::kEmpty : Outcome::kOk;
    } catch (const BackendError&) {
      outcomes[i] = Outcome::kFailed;
    }
  });

  TranscriptionRun run;
  run.report.stage = "transcribe";
  run.utterances.reserve(unlabeled.size());
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    UtteranceRecord u = unlabeled[i];
    u.text.clear();
    u.label_source = LabelSource::kNone;
    if (!ran[i]) {
      run.report.interrupted = true;
    } else {
      ++run.report.inputs_seen;
      ++run.report.generations_attempted;
      switch (outcomes[i]) {
        case Outcome::kOk:
          ++run.report.succeeded;
          u.text = std::move(transcripts[i]);
          u.label_source = LabelSource::kPseudo;
          break;
        case Outcome::kEmpty:
          ++run.report.skipped;
          break;
        case Outcome::kFailed:
          ++run.report.backend_failures;
          break;
      }
    }
    run.utterances.push_back(std::move(u));
  }
  run.report.pairs_emitted = run.report.succeeded;
  run.report.wall_time = clock.seconds();
  run.report.check();
  return run;
}

PseudoLabelRun run_pseudo_label_pipeline(std::span<const UtteranceRecord> unlabeled, const PipelineConfig& config,
                                         const AsrClient& asr, const LlmClient& llm, const PromptBank& prompts,
                                         const std::filesystem::path& pseudo_manifest,
                                         const SamplingParams& sampling) {
  PseudoLabelRun run;
  run.transcription = transcribe_utterances(unlabeled, asr);
  write_manifest(std::span<const UtteranceRecord>(run.transcription.utterances), pseudo_manifest);
  if (run.transcription.report.interrupted) {
    run.generation.report.stage = "generate";
    run.generation.report.interrupted = true;
    return run;
  }
  run.generation = run_qa_generation(run.transcription.utterances, config, llm, prompts, sampling);
  return run;
}

FilterRun run_filter(std::span<const QATriplet> triplets, const LlmClient& judge, const PromptBank& prompts,
                     const SamplingParams& sampling) {
  sampling.validate();
  for (const auto& t : triplets) {
    if (t.filter_status != FilterStatus::kUnfiltered) {
      throw InvariantViolation("triplet " + t.id + " was already judged (" +
                               std::string(to_string(t.filter_status)) + ")");
    }
  }
  Stopwatch clock;

  enum class Outcome { kJudged, kVerdictMissing, kBackendFailure };
  struct Item {
    Outcome outcome = Outcome::kBackendFailure;
    Verdict verdict = Verdict::kReject;
    std::string reasoning;
    std::size_t calls = 0;
  };
  std::vector<Item> items(triplets.size());

  const auto ran = parallel_for_index(triplets.size(), judge.policy().max_concurrency, [&](std::size_t i) {
    Item& item = items[i];
    const std::string prompt = render_filter_prompt(prompts.filter, prompts.filter_examples, triplets[i]);
    const ChatRequest request = judge.make_request(prompt, sampling);
    for (int attempt = 0; attempt < 2; ++attempt) {
      try {
        ++item.calls;
        const ChatResponse resp = judge.chat_complete(request);
        const FilterVerdict v = parse_filter_verdict(resp.text);
        item.outcome = Outcome::kJudged;
        item.verdict = v.decision;
        item.reasoning = v.reasoning;
        return;
      } catch (const VerdictMissing& e) {
        item.outcome = Outcome::kVerdictMissing;
        item.reasoning = std::string("no verdict: ") + e.what();
      } catch (const BackendError& e) {
        item.outcome = Outcome::kBackendFailure;
        item.reasoning = std::string("backend error: ") + e.what();
        return;
      }
    }
  });

  FilterRun run;
  run.report.stage = "filter";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!ran[i]) {
      run.report.interrupted = true;
      continue;
    }
    const Item& item = items[i];
    ++run.report.inputs_seen;
    run.report.generations_attempted += item.calls;
    QATriplet judged = triplets[i];
    const bool accept = item.outcome == Outcome::kJudged && item.verdict == Verdict::kAccept;
    set_filter_status(judged, accept ? FilterStatus::kAccepted : FilterStatus::kRejected);
    switch (item.outcome) {
      case Outcome::kJudged:
        ++run.report.succeeded;
        break;
      case Outcome::kVerdictMissing:
        ++run.report.failed_generations;
        break;
      case Outcome::kBackendFailure:
        ++run.report.backend_failures;
        break;
    }
    if (accept) {
      ++run.report.accepted;
      run.accepted.push_back(judged);
    } else {
      ++run.report.rejected;
    }
    judged.extra["judge_reasoning"] = item.reasoning;
    run.judged.push_back(std::move(judged));
  }
  run.report.pairs_emitted = run.judged.size();
  run.report.wall_time = clock.seconds();
  run.report.check();
  return run;
}

RunLock::RunLock(const std::filesystem::path& output) : lock_path_(output.string() + ".lock") {
  const int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    throw ConfigError("output " + output.string() + " is locked by another run (remove " + lock_path_.string() +
                      " if that run is gone)");
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

RunLock::~RunLock() {
  std::error_code ec;
  std::filesystem::remove(lock_path_, ec);
}

}  // namespace sqagen
