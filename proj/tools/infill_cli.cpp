// Command-line front end. Exit codes: 0 success, 1 partial (skips
// occurred), 2 failure with a JSON reason on stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "infill/codec.h"
#include "infill/compliance.h"
#include "infill/example_gen.h"
#include "infill/jsonl.h"
#include "infill/metrics.h"
#include "infill/midi.h"
#include "infill/quantize.h"
#include "infill/report.h"
#include "infill/synth.h"
#include "infill/tokens.h"

namespace {

using Json = nlohmann::ordered_json;
using namespace infill;

/// Thrown by subcommands; main turns it into the exit code and stderr JSON.
struct CliFailure {
  int code;
  Json reason;
};

[[noreturn]] void fail(const std::string& error, const std::string& message, Json extra = Json::object()) {
  Json j;
  j["status"] = "error";
  j["error"] = error;
  j["message"] = message;
  for (auto& [k, v] : extra.items()) j[k] = v;
  throw CliFailure{2, j};
}

void requireReadable(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("unreadable_input", "cannot open " + path, {{"path", path}});
}

std::ifstream openInput(const std::string& path) {
  requireReadable(path);
  return std::ifstream(path, std::ios::binary);
}

/// Writes to `path`, or stdout when the path is empty or "-".
void writeOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("unwritable_output", "cannot write " + path, {{"path", path}});
  out << text;
}

std::string readText(const std::string& path) {
  std::ifstream in = openInput(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

QuantizeResult loadResultOrFail(const std::string& path) {
  requireReadable(path);
  try {
    return loadScore(path);
  } catch (const MidiParseError& e) {
    fail("midi_parse_error", e.what(), {{"path", path}, {"offset", e.offset()}});
  } catch (const UnsupportedMeterError& e) {
    fail("unsupported_meter", e.what(), {{"path", path}, {"measure", e.measureIndex()}});
  }
}

QuantizedScore loadOrFail(const std::string& path) { return loadResultOrFail(path).score; }

MeasureSlice selectSlice(const QuantizedScore& score, int start, int measures) {
  const int total = static_cast<int>(score.measure_map.size());
  if (total == 0) fail("empty_score", "the file has no measures");
  const int count = measures <= 0 ? total - start : measures;
  try {
    return slice(score, start, count);
  } catch (const BoundsError& e) {
    fail("slice_out_of_range", e.what(), {{"start", start}, {"measures", count}, {"available", total}});
  }
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
  std::string midi;
  bool per_measure = false;
  int start = 0;
  int measures = 0;
  std::string out;
  std::string diagnostics;  // quantization listing
};

int runAnalyze(const AnalyzeArgs& a) {
  const QuantizeResult loaded = loadResultOrFail(a.midi);
  if (!a.diagnostics.empty()) writeOutput(a.diagnostics, loaded.diagnostics.listing());
  writeOutput(a.out, analyzeReport(selectSlice(loaded.score, a.start, a.measures), a.per_measure));
  return 0;
}

// ---- tokenize / detokenize -------------------------------------------------

Conditioning parseConditioning(const std::string& s) {
  if (s == "none") return Conditioning::kNone;
  if (s == "1d") return Conditioning::k1D;
  if (s == "2d") return Conditioning::k2D;
  fail("bad_mask_spec", "unknown conditioning \"" + s + "\"");
}

CellControlRequest parseCellControls(const Json& list) {
  CellControlRequest r;
  for (const Json& c : list) {
    const std::string name = c.get<std::string>();
    if (name == "horiz") r.horiz = true;
    else if (name == "vert") r.vert = true;
    else if (name == "pcs") r.pcs = true;
    else if (name == "dnoc") r.dnoc = true;
    else if (name == "strict_range") r.strict_range = true;
    else fail("bad_mask_spec", "unknown track-measure control \"" + name + "\"");
  }
  return r;
}

TrackControlRequest parseTrackControls(const Json& list) {
  TrackControlRequest r;
  for (const Json& c : list) {
    const std::string name = c.get<std::string>();
    if (name == "horiz") r.horiz = true;
    else if (name == "interest") r.interest = true;
    else if (name == "vert") r.vert = true;
    else if (name == "pcs") r.pcs = true;
    else if (name == "step") r.step = true;
    else if (name == "leap") r.leap = true;
    else if (name == "strict_range") r.strict_range = true;
    else if (name == "loose_range") r.loose_range = true;
    else fail("bad_mask_spec", "unknown track control \"" + name + "\"");
  }
  return r;
}

struct MaskFile {
  int start = 0;
  int measures = 0;  // 0 = to the end
  MaskSpec mask;
  ControlSpec controls;
};

MaskFile parseMaskFile(const std::string& path) {
  MaskFile f;
  try {
    const Json j = Json::parse(readText(path));
    f.start = j.value("start", 0);
    f.measures = j.value("measures", 0);
    const Json cells = j.value("cells", Json::array());
    for (const Json& c : cells) {
      const int t = c.at("track").get<int>();
      const int m = c.at("measure").get<int>();
      f.mask.add(t, m, parseConditioning(c.value("conditioning", "none")));
      if (c.contains("controls")) f.controls.cells[{t, m}] = parseCellControls(c.at("controls"));
    }
    const Json track_controls = j.value("track_controls", Json::object());
    for (const auto& [key, list] : track_controls.items()) {
      f.controls.tracks[std::stoi(key)] = parseTrackControls(list);
    }
  } catch (const Json::exception& e) {
    fail("bad_mask_spec", e.what(), {{"path", path}});
  } catch (const std::invalid_argument& e) {
    fail("bad_mask_spec", e.what(), {{"path", path}});
  }
  return f;
}

struct TokenizeArgs {
  std::string midi;
  std::string mask;
  std::string out;
};

int runTokenize(const TokenizeArgs& a) {
  const QuantizedScore score = loadOrFail(a.midi);
  MaskFile spec;
  if (!a.mask.empty()) spec = parseMaskFile(a.mask);
  const MeasureSlice s = selectSlice(score, spec.start, spec.measures);
  PromptTargetPair pair;
  try {
    pair = encode(s, spec.mask, spec.controls);
  } catch (const EncodeError& e) {
    fail("encode_error", e.what());
  } catch (const BoundsError& e) {
    fail("encode_error", e.what());
  }
  Json j;
  j["prompt_text"] = renderText(pair.prompt);
  j["target_text"] = renderText(pair.target);
  j["prompt_ids"] = toIds(pair.prompt);
  j["target_ids"] = toIds(pair.target);
  j["clamped_2d"] = pair.diagnostics.clamped_2d;
  writeOutput(a.out, j.dump(2) + "\n");
  return 0;
}

struct DetokenizeArgs {
  std::string tokens;  // tokenize output
  std::string prompt;  // or token text files
  std::string target;
  std::string out;
};

TokenSequence parseTokensOrFail(const std::string& text, const char* which) {
  try {
    return parseText(text);
  } catch (const TokenError& e) {
    fail("token_error", std::string(which) + ": " + e.what(), {{"sequence", which}, {"offset", e.index()}});
  }
}

int runDetokenize(const DetokenizeArgs& a) {
  std::string prompt_text;
  std::string target_text;
  if (!a.tokens.empty()) {
    try {
      const Json j = Json::parse(readText(a.tokens));
      prompt_text = j.at("prompt_text").get<std::string>();
      target_text = j.value("target_text", std::string("<eot>"));
    } catch (const Json::exception& e) {
      fail("bad_tokens_file", e.what(), {{"path", a.tokens}});
    }
  } else {
    if (a.prompt.empty()) fail("missing_input", "either --tokens or --prompt is required");
    prompt_text = readText(a.prompt);
    target_text = a.target.empty() ? "<eot>" : readText(a.target);
  }
  const TokenSequence prompt = parseTokensOrFail(prompt_text, "prompt");
  const TokenSequence target = parseTokensOrFail(target_text, "target");
  MeasureSlice out;
  try {
    const PromptLayout layout = parsePrompt(prompt);
    out = assembleOutput(layout, decodeTarget(target, layout.geometry()));
  } catch (const DecodeError& e) {
    fail("decode_error", e.what(), {{"offset", e.offset()}});
  }
  try {
    const std::vector<std::uint8_t> bytes = writeMidi(toScore(out));
    if (a.out.empty() || a.out == "-") {
      std::cout.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    } else {
      writeMidiFile(toScore(out), a.out);
    }
  } catch (const std::exception& e) {
    fail("unwritable_output", e.what(), {{"path", a.out}});
  }
  return 0;
}

// ---- make-dataset ----------------------------------------------------------

struct DatasetArgs {
  std::string corpus;
  std::string task = "random";
  int n = 5000;
  bool max_controls = false;
  int slices_per_file = 3;
  std::string out;
  std::string manifest;
};

int runMakeDataset(const DatasetArgs& a, std::uint64_t seed, int jobs) {
  if (!std::filesystem::is_directory(a.corpus)) fail("unreadable_input", "not a directory: " + a.corpus);
  const auto task = parseTask(a.task);
  if (!task) fail("bad_argument", "unknown task " + a.task);
  if (a.max_controls && *task == Task::kTrain) fail("bad_argument", "--max-controls applies to test tasks only");
  CorpusOptions opts;
  opts.task = *task;
  opts.n = a.n;
  opts.seed = seed;
  opts.max_controls = a.max_controls;
  opts.jobs = jobs;
  opts.slices_per_file = a.slices_per_file;
  const CorpusResult result = buildCorpus(a.corpus, opts);

  std::ostringstream jsonl;
  writeExamples(jsonl, result.examples);
  writeOutput(a.out, jsonl.str());
  const std::string manifest_path = a.manifest.empty() ? a.out + ".manifest.json" : a.manifest;
  if (!a.out.empty() && a.out != "-") writeOutput(manifest_path, manifestToJson(result.manifest));
  else if (!a.manifest.empty()) writeOutput(a.manifest, manifestToJson(result.manifest));

  if (result.examples.empty()) {
    Json skips = Json::object();
    for (const auto& [k, v] : result.manifest.skip_reasons) skips[k] = v;
    fail("no_examples", "no examples produced", {{"skip_reasons", skips}});
  }
  if (!result.manifest.skip_reasons.empty()) {
    Json j;
    j["status"] = "partial";
    j["examples"] = result.manifest.examples;
    Json skips = Json::object();
    for (const auto& [k, v] : result.manifest.skip_reasons) skips[k] = v;
    j["skip_reasons"] = skips;
    std::cerr << j.dump() << "\n";
    return 1;
  }
  return 0;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string examples;
  std::string outputs;
  std::string out_dir;
  bool match_duration = false;
};

template <typename Fn>
auto readJsonlOrFail(const std::string& path, Fn&& read) {
  std::ifstream in = openInput(path);
  try {
    return read(in);
  } catch (const JsonlError& e) {
    fail("malformed_jsonl", e.what(), {{"path", path}, {"line", e.line()}});
  }
}

int runEval(const EvalArgs& a) {
  const auto examples = readJsonlOrFail(a.examples, readExamples);
  const auto outputs = readJsonlOrFail(a.outputs, readOutputs);
  std::map<std::string, const ModelOutput*> by_id;
  for (const auto& o : outputs) {
    if (!by_id.emplace(o.id, &o).second) fail("duplicate_id", "duplicate output id " + o.id, {{"id", o.id}});
  }
  std::set<std::string> example_ids;
  Json missing = Json::array();
  for (const auto& ex : examples) {
    example_ids.insert(ex.id);
    if (!by_id.count(ex.id)) missing.push_back(ex.id);
  }
  Json unknown = Json::array();
  for (const auto& o : outputs) {
    if (!example_ids.count(o.id)) unknown.push_back(o.id);
  }
  if (!missing.empty() || !unknown.empty()) {
    fail("id_mismatch", "outputs and examples do not have the same ids", {{"missing", missing}, {"unknown", unknown}});
  }

  const DurationPolicy policy = a.match_duration ? DurationPolicy::kMatch : DurationPolicy::kIgnore;
  std::vector<ExampleScore> scores;
  scores.reserve(examples.size());
  for (const auto& ex : examples) {
    try {
      scores.push_back(scoreOutput(ex, by_id.at(ex.id)->target_ids, policy));
    } catch (const std::exception& e) {
      fail("bad_example", e.what(), {{"id", ex.id}});
    }
  }
  const EvalReport report = EvalReport::of(std::move(scores));
  if (a.out_dir.empty()) {
    std::cout << report.aggregateCsv();
    return 0;
  }
  std::filesystem::create_directories(a.out_dir);
  writeOutput((std::filesystem::path(a.out_dir) / "per_example.csv").string(), report.perExampleCsv());
  writeOutput((std::filesystem::path(a.out_dir) / "aggregate.csv").string(), report.aggregateCsv());
  std::cout << report.aggregateCsv();
  return 0;
}

// ---- comply ----------------------------------------------------------------

struct ComplyArgs {
  std::string records;
  std::string outputs;  // optional: replaces target_ids by id
  int tolerance = 1;
  std::string out;
};

int runComply(const ComplyArgs& a) {
  auto records = readJsonlOrFail(a.records, readComplyRecords);
  if (!a.outputs.empty()) {
    const auto outputs = readJsonlOrFail(a.outputs, readOutputs);
    std::map<std::string, std::vector<int>> by_id;
    for (const auto& o : outputs) by_id[o.id] = o.target_ids;
    Json missing = Json::array();
    for (auto& r : records) {
      auto it = by_id.find(r.id);
      if (it == by_id.end()) missing.push_back(r.id);
      else r.target_ids = it->second;
    }
    if (!missing.empty()) fail("id_mismatch", "records without outputs", {{"missing", missing}});
  }
  std::vector<ComplianceSample> samples;
  for (const auto& r : records) {
    try {
      const TokenSequence prompt = fromIds(r.prompt_ids);
      std::vector<int> valid;
      for (int id : r.target_ids) {
        if (id < 0 || id >= vocabularySize()) break;
        valid.push_back(id);
      }
      auto s = checkOutput(prompt, fromIds(valid), r.probes);
      samples.insert(samples.end(), s.begin(), s.end());
    } catch (const std::exception& e) {
      fail("bad_record", e.what(), {{"id", r.id}});
    }
  }
  writeOutput(a.out, successRateCsv(successRateReport(samples), a.tolerance));
  return 0;
}

// ---- vocab / synth-corpus --------------------------------------------------

int runVocab(const std::string& format, const std::string& out) {
  if (format == "text") {
    std::string text;
    for (const Token& t : vocabulary()) text += spelling(t) + "\n";
    writeOutput(out, text);
    return 0;
  }
  Json j;
  j["size"] = vocabularySize();
  j["hash"] = vocabularyHash();
  j["hash_hex"] = [] {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(vocabularyHash()));
    return std::string(buf);
  }();
  Json tokens = Json::array();
  for (const Token& t : vocabulary()) tokens.push_back(spelling(t));
  j["tokens"] = std::move(tokens);
  writeOutput(out, j.dump(1) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-track MIDI infilling toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  int jobs = 1;
  app.add_option("--seed", seed, "Global seed")->capture_default_str();
  app.add_option("--jobs", jobs, "Worker threads for corpus processing")->check(CLI::PositiveNumber)->capture_default_str();

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Measurement report for a MIDI file");
  c_analyze->add_option("midi", analyze.midi)->required();
  c_analyze->add_flag("--per-measure", analyze.per_measure, "Also report every track-measure");
  c_analyze->add_option("--start", analyze.start, "First measure")->check(CLI::NonNegativeNumber);
  c_analyze->add_option("--measures", analyze.measures, "Measure count, 0 = to the end")->check(CLI::NonNegativeNumber);
  c_analyze->add_option("-o,--out", analyze.out, "Output path (default stdout)");
  c_analyze->add_option("--diagnostics", analyze.diagnostics, "Write the quantization listing (snaps, merges, clamps)");

  TokenizeArgs tokenize;
  auto* c_tokenize = app.add_subcommand("tokenize", "Encode a MIDI file under a mask spec");
  c_tokenize->add_option("midi", tokenize.midi)->required();
  c_tokenize->add_option("--mask", tokenize.mask, "Mask spec JSON (default: nothing masked)");
  c_tokenize->add_option("-o,--out", tokenize.out, "Output path (default stdout)");

  DetokenizeArgs detokenize;
  auto* c_detok = app.add_subcommand("detokenize", "Write prompt context plus decoded target as MIDI");
  c_detok->add_option("--tokens", detokenize.tokens, "JSON written by tokenize");
  c_detok->add_option("--prompt", detokenize.prompt, "Prompt token text file");
  c_detok->add_option("--target", detokenize.target, "Target token text file");
  c_detok->add_option("-o,--out", detokenize.out, "Output MIDI path")->required();

  DatasetArgs dataset;
  auto* c_dataset = app.add_subcommand("make-dataset", "Build training or test examples from a corpus");
  c_dataset->add_option("corpus", dataset.corpus)->required();
  c_dataset->add_option("--task", dataset.task, "train, random, track or lastbar")->capture_default_str();
  c_dataset->add_option("--n", dataset.n, "Maximum number of examples")->check(CLI::NonNegativeNumber)->capture_default_str();
  c_dataset->add_flag("--max-controls", dataset.max_controls, "Describe masked content with every applicable control");
  c_dataset->add_option("--slices-per-file", dataset.slices_per_file)->check(CLI::PositiveNumber)->capture_default_str();
  c_dataset->add_option("-o,--out", dataset.out, "Output JSONL path")->required();
  c_dataset->add_option("--manifest", dataset.manifest, "Manifest path (default <out>.manifest.json)");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Score model outputs against examples");
  c_eval->add_option("examples", eval.examples)->required();
  c_eval->add_option("outputs", eval.outputs)->required();
  c_eval->add_option("--out-dir", eval.out_dir, "Directory for per_example.csv and aggregate.csv");
  c_eval->add_flag("--match-duration", eval.match_duration, "Require equal durations for a note match");

  ComplyArgs comply;
  auto* c_comply = app.add_subcommand("comply", "Control success rates over generated outputs");
  c_comply->add_option("records", comply.records, "JSONL with id, prompt_ids, target_ids, optional probes")->required();
  c_comply->add_option("--outputs", comply.outputs, "Outputs JSONL replacing target_ids by id");
  c_comply->add_option("--tolerance", comply.tolerance, "Bins of tolerance")->check(CLI::Range(0, 1))->capture_default_str();
  c_comply->add_option("-o,--out", comply.out, "Output CSV path (default stdout)");

  std::string vocab_format = "json";
  std::string vocab_out;
  auto* c_vocab = app.add_subcommand("vocab", "Print the vocabulary, its size and hash");
  c_vocab->add_option("--format", vocab_format)->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  c_vocab->add_option("-o,--out", vocab_out, "Output path (default stdout)");

  std::string synth_dir;
  int synth_count = 200;
  auto* c_synth = app.add_subcommand("synth-corpus", "Write a procedurally generated MIDI corpus");
  c_synth->add_option("dir", synth_dir)->required();
  c_synth->add_option("--count", synth_count)->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Json j{{"status", "error"}, {"error", "bad_arguments"}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return 2;
  }

  try {
    if (*c_analyze) return runAnalyze(analyze);
    if (*c_tokenize) return runTokenize(tokenize);
    if (*c_detok) return runDetokenize(detokenize);
    if (*c_dataset) return runMakeDataset(dataset, seed, jobs);
    if (*c_eval) return runEval(eval);
    if (*c_comply) return runComply(comply);
    if (*c_vocab) return runVocab(vocab_format, vocab_out);
    if (*c_synth) {
      const auto names = writeSynthCorpus(synth_dir, synth_count, seed);
      std::cout << Json{{"dir", synth_dir}, {"files", names.size()}}.dump() << "\n";
      return 0;
    }
  } catch (const CliFailure& f) {
    std::cerr << f.reason.dump() << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << Json{{"status", "error"}, {"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
  return 2;
}
