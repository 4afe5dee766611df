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

#include "sqagen/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sqagen/config.hpp"
#include "sqagen/manifest.hpp"
#include "sqagen/metrics.hpp"
#include "sqagen/output_parser.hpp"
#include "sqagen/pipelines.hpp"
#include "sqagen/triplet_builder.hpp"

namespace sqagen {
namespace {

namespace fs = std::filesystem;

struct Streams {
  std::ostream& out;
  std::ostream& err;
  std::istream& in;
};

struct GlobalOptions {
  std::string config;
  bool json = false;
  bool overwrite = false;
};

// Returned by stages so the caller can pick the exit code.
struct StageResult {
  Json summary;
  bool interrupted = false;
};

RunConfig resolve_config(const GlobalOptions& g) {
  return g.config.empty() ? default_run_config() : load_run_config(g.config);
}

void require_input(const std::string& path) {
  if (path.empty()) throw ConfigError("--input is required");
  if (!fs::exists(path)) throw ConfigError("input not found: " + path);
}

void prepare_output(const fs::path& path, bool overwrite) {
  if (path.empty()) throw ConfigError("--output is required");
  if (fs::exists(path) && !overwrite) {
    throw ConfigError("output " + path.string() + " exists; pass --overwrite to replace it");
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

fs::path report_path(const fs::path& output) { return output.string() + ".report.json"; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failure on " + path.string());
}

void write_report(const fs::path& output, const Json& report) { write_text(report_path(output), report.dump(2) + "\n"); }

StageResult report_result(const RunReport& report) { return {report.to_json(), report.interrupted}; }

std::string human_summary(const Json& summary) {
  std::string line;
  for (auto it = summary.begin(); it != summary.end(); ++it) {
    if (!line.empty()) line += ' ';
    line += it.key() + "=" + (it->is_string() ? it->get<std::string>() : it->dump());
  }
  return line;
}

LlmClient make_llm(const BackendConfig& b) {
  return LlmClient(make_chat_backend(b), b.retry, b.model.empty() ? "default" : b.model);
}

// --- stages ---------------------------------------------------------------

struct BuildArgs {
  std::string input, output, id_prefix = "msmarco";
};

StageResult cmd_build_triplets(const GlobalOptions& g, const BuildArgs& a) {
  require_input(a.input);
  prepare_output(a.output, g.overwrite);
  RunLock lock(a.output);
  const auto records = read_raw_corpus(a.input);
  BuildResult built = build_triplets(records, a.id_prefix);
  write_manifest(std::span<const QATriplet>(built.triplets), a.output);
  RunReport r;
  r.stage = "build-triplets";
  r.inputs_seen = records.size();
  r.succeeded = built.triplets.size();
  r.skipped = built.skipped;
  r.pairs_emitted = built.triplets.size();
  r.check();
  Json summary = r.to_json();
  write_report(a.output, summary);
  return {summary, false};
}

struct SynthArgs {
  std::string input, output, audio_dir;
  std::optional<double> max_duration;
  std::optional<std::uint64_t> seed;
};

StageResult cmd_synthesize(const GlobalOptions& g, const SynthArgs& a) {
  require_input(a.input);
  RunConfig cfg = resolve_config(g);
  if (a.max_duration) cfg.pipeline.max_synth_duration = *a.max_duration;
  if (a.seed) cfg.pipeline.rng_seed = *a.seed;
  cfg.pipeline.validate();
  prepare_output(a.output, g.overwrite);
  RunLock lock(a.output);
  const fs::path audio_dir = a.audio_dir.empty() ? fs::path(fs::path(a.output).replace_extension("").string() + "_audio")
                                                 : fs::path(a.audio_dir);
  TtsClient tts(make_tts_backend(cfg.tts), cfg.tts.retry, cfg.pipeline.speaker_ids);
  const auto triplets = read_triplets(a.input);
  TripletRun run = run_tts_pipeline(triplets, cfg.pipeline, tts, audio_dir);
  write_manifest(std::span<const QATriplet>(run.triplets), a.output);
  write_report(a.output, run.report.to_json());
  return report_result(run.report);
}

struct GenerateArgs {
  std::string input, output;
  std::optional<int> n_pairs;
  bool strict = false;
};

StageResult cmd_generate(const GlobalOptions& g, const GenerateArgs& a) {
  require_input(a.input);
  RunConfig cfg = resolve_config(g);
  if (a.n_pairs) cfg.pipeline.qa_pairs_per_generation = *a.n_pairs;
  if (a.strict) cfg.pipeline.strict_parse = true;
  cfg.pipeline.validate();
  prepare_output(a.output, g.overwrite);
  RunLock lock(a.output);
  const PromptBank prompts = PromptBank::load(cfg.template_dir);
  const LlmClient llm = make_llm(cfg.llm);
  const auto utterances = read_manifest(a.input);
  TripletRun run = run_qa_generation(utterances, cfg.pipeline, llm, prompts, cfg.generation_sampling);
  write_manifest(std::span<const QATriplet>(run.triplets), a.output);
  write_report(a.output, run.report.to_json());
  return report_result(run.report);
}

struct TranscribeArgs {
  std::string input, output;
};

StageResult cmd_transcribe(const GlobalOptions& g, const TranscribeArgs& a) {
  require_input(a.input);
  RunConfig cfg = resolve_config(g);
  prepare_output(a.output, g.overwrite);
  RunLock lock(a.output);
  AsrClient asr(make_asr_backend(cfg.asr), cfg.asr.retry);
  const auto utterances = read_manifest(a.input);
  TranscriptionRun run = transcribe_utterances(utterances, asr);
  write_manifest(std::span<const UtteranceRecord>(run.utterances), a.output);
  write_report(a.output, run.report.to_json());
  return report_result(run.report);
}

struct FilterArgs {
  std::string input, output, audit;
};

StageResult cmd_filter(const GlobalOptions& g, const FilterArgs& a) {
  require_input(a.input);
  RunConfig cfg = resolve_config(g);
  const fs::path audit = a.audit.empty() ? fs::path(fs::path(a.output).replace_extension("").string() + ".judged.jsonl")
                                         : fs::path(a.audit);
  prepare_output(a.output, g.overwrite);
  prepare_output(audit, g.overwrite);
  RunLock lock(a.output);
  const PromptBank prompts = PromptBank::load(cfg.template_dir);
  // The judge defaults to the generation model.
  const BackendConfig& judge_cfg = cfg.judge.url.empty() ? cfg.llm : cfg.judge;
  const LlmClient judge = make_llm(judge_cfg);
  const auto triplets = read_triplets(a.input);
  FilterRun run = run_filter(triplets, judge, prompts, cfg.judge_sampling);
  write_manifest(std::span<const QATriplet>(run.accepted), a.output);
  write_manifest(std::span<const QATriplet>(run.judged), audit);
  write_report(a.output, run.report.to_json());
  return report_result(run.report);
}

struct MixArgs {
  std::string input, output;
  std::vector<std::string> synthetic;
  std::optional<int> upsample;
  std::optional<std::uint64_t> seed;
};

StageResult cmd_mix(const GlobalOptions& g, const MixArgs& a) {
  require_input(a.input);
  RunConfig cfg = resolve_config(g);
  const int default_factor = a.upsample.value_or(cfg.pipeline.upsample_factor);
  if (default_factor < 1) throw ConfigError("--upsample must be >= 1");
  std::vector<SyntheticSet<Json>> sets;
  Json sources = Json::array();
  for (const std::string& spec : a.synthetic) {
    std::string path = spec;
    int factor = default_factor;
    // PATH:FACTOR, where FACTOR is all digits.
    if (auto colon = spec.rfind(':'); colon != std::string::npos && colon + 1 < spec.size() &&
                                      spec.find_first_not_of("0123456789", colon + 1) == std::string::npos) {
      path = spec.substr(0, colon);
      factor = std::stoi(spec.substr(colon + 1));
    }
    require_input(path);
    if (factor < 1) throw ConfigError("upsample factor must be >= 1 in '" + spec + "'");
    sets.push_back({read_jsonl(path), factor});
    sources.push_back({{"path", path}, {"records", sets.back().records.size()}, {"upsample_factor", factor}});
  }
  prepare_output(a.output, g.overwrite);
  RunLock lock(a.output);
  const auto original = read_jsonl(a.input);
  const auto mixed = mix_datasets<Json>(original, sets, a.seed);
  write_jsonl(mixed, a.output);
  Json summary{{"stage", "mix"},
               {"original", original.size()},
               {"synthetic", sources},
               {"records", mixed.size()},
               {"shuffled", a.seed.has_value()}};
  write_report(a.output, summary);
  return {summary, false};
}

struct SplitArgs {
  std::string input, output;
  std::size_t dev_size = 0, test_size = 0;
  std::optional<std::uint64_t> seed;
};

StageResult cmd_split(const GlobalOptions& g, const SplitArgs& a) {
  require_input(a.input);
  RunConfig cfg = resolve_config(g);
  if (a.output.empty()) throw ConfigError("--output (a directory) is required");
  const fs::path dir(a.output);
  for (const char* name : {"train.jsonl", "dev.jsonl", "test.jsonl"}) prepare_output(dir / name, g.overwrite);
  RunLock lock(dir / "split");
  auto rows = read_jsonl(a.input);
  const std::size_t total = rows.size();
  auto split = split_dataset(std::move(rows), a.seed.value_or(cfg.pipeline.rng_seed), a.dev_size, a.test_size);
  write_jsonl(split.train, dir / "train.jsonl");
  write_jsonl(split.dev, dir / "dev.jsonl");
  write_jsonl(split.test, dir / "test.jsonl");
  Json summary{{"stage", "split"},
               {"records", total},
               {"train", split.train.size()},
               {"dev", split.dev.size()},
               {"test", split.test.size()}};
  write_text(dir / "split.report.json", summary.dump(2) + "\n");
  return {summary, false};
}

struct EvaluateArgs {
  std::string input, references, output, task = "qa_rouge", table_label;
  double beta = 1.0;
};

std::string row_id(const Json& row) {
  if (auto it = row.find("id"); it != row.end() && it->is_string()) return it->get<std::string>();
  if (auto it = row.find("audio_filepath"); it != row.end() && it->is_string()) return it->get<std::string>();
  throw InvariantViolation("row has neither 'id' nor 'audio_filepath'");
}

std::vector<TextSample> load_samples(const std::string& path, std::initializer_list<const char*> text_keys) {
  std::vector<TextSample> out;
  const auto rows = read_jsonl(path);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      TextSample s{row_id(rows[i]), {}};
      bool found = false;
      for (const char* key : text_keys) {
        if (auto it = rows[i].find(key); it != rows[i].end() && it->is_string()) {
          s.text = it->get<std::string>();
          found = true;
          break;
        }
      }
      if (!found) throw InvariantViolation(fmt::format("row has no text field ({})", fmt::join(text_keys, "/")));
      out.push_back(std::move(s));
    } catch (const InvariantViolation& e) {
      throw ManifestError(path, i + 1, e.what());
    }
  }
  return out;
}

StageResult cmd_evaluate(const GlobalOptions& g, const EvaluateArgs& a) {
  require_input(a.input);
  if (a.references.empty()) throw ConfigError("--references is required");
  require_input(a.references);
  const EvalTask task = parse_eval_task(a.task);
  if (!a.output.empty()) prepare_output(a.output, g.overwrite);
  const auto predictions = load_samples(a.input, {"text"});
  const auto references = task == EvalTask::kQaRouge ? load_samples(a.references, {"answer", "text"})
                                                     : load_samples(a.references, {"text"});
  const MetricReport report = evaluate_corpus(predictions, references, task, a.beta);
  Json summary = report.to_json();
  if (!a.table_label.empty()) {
    const std::vector<std::string> columns = {task == EvalTask::kQaRouge ? "ROUGE-L" : "WER%"};
    const std::vector<TableRow> rows = {{a.table_label, {report}}};
    summary["table"] = format_metric_table(columns, rows);
  }
  if (!a.output.empty()) write_text(a.output, summary.dump(2) + "\n");
  return {summary, false};
}

struct StatsArgs {
  std::string input;
};

StageResult cmd_stats(const GlobalOptions&, const StatsArgs& a) {
  require_input(a.input);
  const auto rows = read_jsonl(a.input);
  double total_duration = 0.0;
  std::map<std::string, std::size_t> provenance, label_source, filter_status;
  for (const auto& row : rows) {
    if (auto d = row.find("duration"); d != row.end() && d->is_number()) total_duration += d->get<double>();
    if (auto p = row.find("provenance"); p != row.end() && p->is_string()) ++provenance[p->get<std::string>()];
    if (auto l = row.find("label_source"); l != row.end() && l->is_string()) ++label_source[l->get<std::string>()];
    if (auto f = row.find("filter_status"); f != row.end() && f->is_string()) ++filter_status[f->get<std::string>()];
  }
  const std::size_t accepted = filter_status.count("accepted") ? filter_status["accepted"] : 0;
  const std::size_t rejected = filter_status.count("rejected") ? filter_status["rejected"] : 0;
  Json summary{{"records", rows.size()},
               {"total_duration", total_duration},
               {"provenance", provenance},
               {"label_source", label_source},
               {"filter_status", filter_status}};
  summary["acceptance_rate"] = accepted + rejected > 0
                                   ? Json(static_cast<double>(accepted) / static_cast<double>(accepted + rejected))
                                   : Json(nullptr);
  return {summary, false};
}

struct ParseArgs {
  std::string mode = "qa";
  int n_pairs = 20;
  bool strict = false;
};

StageResult cmd_parse(const Streams& io, const ParseArgs& a) {
  const std::string text{std::istreambuf_iterator<char>(io.in), std::istreambuf_iterator<char>()};
  if (a.mode == "verdict") {
    const FilterVerdict v = parse_filter_verdict(text);
    return {Json{{"decision", to_string(v.decision)}, {"reasoning", v.reasoning}}, false};
  }
  if (a.mode != "qa") throw ConfigError("--mode must be qa or verdict");
  const QAParseResult r = parse_qa_list(text, a.n_pairs, a.strict);
  Json pairs = Json::array();
  for (const auto& p : r.pairs) pairs.push_back({{"index", p.index}, {"question", p.question}, {"answer", p.answer}});
  return {Json{{"pairs", pairs}, {"malformed", r.malformed}, {"truncated", r.truncated}}, false};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  Streams io{out, err, in};
  CLI::App app{"Speech instruction data generation, filtering and evaluation"};
  app.name(args.empty() ? "sqagen" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "INI run configuration");
  app.add_flag("--json", g.json, "Print only a JSON summary on stdout");
  app.add_flag("--overwrite", g.overwrite, "Replace existing outputs");

  std::function<StageResult()> action;

  BuildArgs build;
  auto* sc = app.add_subcommand("build-triplets", "Build QA triplets from a reading-comprehension corpus");
  sc->add_option("--input", build.input, "Corpus JSONL (question, answers, passages)");
  sc->add_option("--output", build.output, "Triplet manifest to write");
  sc->add_option("--id-prefix", build.id_prefix, "Prefix for triplet ids");
  sc->callback([&] { action = [&] { return cmd_build_triplets(g, build); }; });

  SynthArgs synth;
  sc = app.add_subcommand("synthesize", "Synthesize triplet contexts with a multi-speaker TTS backend");
  sc->add_option("--input", synth.input, "Triplet manifest");
  sc->add_option("--output", synth.output, "Triplet manifest with audio");
  sc->add_option("--audio-dir", synth.audio_dir, "Directory for WAV files (default <output>_audio)");
  sc->add_option("--max-duration", synth.max_duration, "Drop contexts at or above this many seconds");
  sc->add_option("--seed", synth.seed, "Speaker selection seed");
  sc->callback([&] { action = [&] { return cmd_synthesize(g, synth); }; });

  GenerateArgs gen;
  sc = app.add_subcommand("generate", "Generate QA triplets from transcribed utterances with an LLM");
  sc->add_option("--input", gen.input, "Utterance manifest");
  sc->add_option("--output", gen.output, "Triplet manifest to write");
  sc->add_option("--n-pairs", gen.n_pairs, "QA pairs requested per utterance");
  sc->add_flag("--strict-parse", gen.strict, "Reject a completion unless every pair parses");
  sc->callback([&] { action = [&] { return cmd_generate(g, gen); }; });

  TranscribeArgs tr;
  sc = app.add_subcommand("transcribe", "Pseudo-label utterances with an ASR backend");
  sc->add_option("--input", tr.input, "Utterance manifest");
  sc->add_option("--output", tr.output, "Pseudo-labeled manifest to write");
  sc->callback([&] { action = [&] { return cmd_transcribe(g, tr); }; });

  FilterArgs filt;
  sc = app.add_subcommand("filter", "Accept or reject triplets with an LLM judge");
  sc->add_option("--input", filt.input, "Triplet manifest");
  sc->add_option("--output", filt.output, "Accepted triplets");
  sc->add_option("--audit", filt.audit, "All judged triplets with reasoning (default <output>.judged.jsonl)");
  sc->callback([&] { action = [&] { return cmd_filter(g, filt); }; });

  MixArgs mix;
  sc = app.add_subcommand("mix", "Append upsampled synthetic sets to an original manifest");
  sc->add_option("--input", mix.input, "Original manifest");
  sc->add_option("--synthetic", mix.synthetic, "Synthetic manifest, optionally PATH:FACTOR (repeatable)");
  sc->add_option("--upsample", mix.upsample, "Default repeat factor for synthetic sets");
  sc->add_option("--output", mix.output, "Mixed manifest to write");
  sc->add_option("--seed", mix.seed, "Shuffle the mixture with this seed");
  sc->callback([&] { action = [&] { return cmd_mix(g, mix); }; });

  SplitArgs split;
  sc = app.add_subcommand("split", "Seeded train/dev/test split");
  sc->add_option("--input", split.input, "Manifest to split");
  sc->add_option("--output", split.output, "Directory for train/dev/test.jsonl");
  sc->add_option("--dev-size", split.dev_size, "Dev records");
  sc->add_option("--test-size", split.test_size, "Test records");
  sc->add_option("--seed", split.seed, "Shuffle seed");
  sc->callback([&] { action = [&] { return cmd_split(g, split); }; });

  EvaluateArgs ev;
  sc = app.add_subcommand("evaluate", "Score predictions with ROUGE-L or WER");
  sc->add_option("--input", ev.input, "Predictions JSONL {id, text}");
  sc->add_option("--references", ev.references, "Reference manifest keyed by id (or audio_filepath)");
  sc->add_option("--task", ev.task, "qa_rouge or asr_wer")->check(CLI::IsMember({"qa_rouge", "asr_wer"}));
  sc->add_option("--output", ev.output, "Write the JSON report here");
  sc->add_option("--beta", ev.beta, "ROUGE-L recall weight");
  sc->add_option("--table-label", ev.table_label, "Add a results-table row with this label");
  sc->callback([&] { action = [&] { return cmd_evaluate(g, ev); }; });

  StatsArgs stats;
  sc = app.add_subcommand("stats", "Counts, total duration, provenance and acceptance rate of a manifest");
  sc->add_option("--input", stats.input, "Any manifest");
  sc->callback([&] { action = [&] { return cmd_stats(g, stats); }; });

  ParseArgs parse;
  sc = app.add_subcommand("parse", "Debug: run the completion parsers on stdin");
  sc->add_option("--mode", parse.mode, "qa or verdict");
  sc->add_option("--n-pairs", parse.n_pairs, "Expected pairs for qa mode");
  sc->add_flag("--strict-parse", parse.strict, "All-or-nothing qa parsing");
  sc->callback([&] { action = [&] { return cmd_parse(io, parse); }; });

  std::vector<const char*> argv;
  std::vector<std::string> owned = args.empty() ? std::vector<std::string>{"sqagen"} : args;
  for (const auto& a : owned) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const StageResult result = action();
    if (g.json) {
      out << result.summary.dump() << '\n';
    } else if (result.summary.contains("table")) {
      Json brief = result.summary;
      brief.erase("table");
      out << human_summary(brief) << '\n' << result.summary["table"].get<std::string>();
    } else {
      out << human_summary(result.summary) << '\n';
    }
    if (result.interrupted) {
      err << "interrupted; partial outputs and report were written\n";
      return kExitRuntime;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FailedGeneration& e) {
    err << "FailedGeneration: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const VerdictMissing& e) {
    err << "VerdictMissing: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace sqagen
