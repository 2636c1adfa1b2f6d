#include "infill/example_gen.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <stdexcept>
#include <thread>

#include "infill/measurements.h"
#include "infill/midi.h"
#include "infill/quantize.h"

namespace infill {

std::string_view taskName(Task task) {
  switch (task) {
    case Task::kTrain: return "train";
    case Task::kRandom: return "random";
    case Task::kTrack: return "track";
    case Task::kLastBar: return "last-bar";
  }
  return "unknown";
}

std::optional<Task> parseTask(std::string_view name) {
  if (name == "train") return Task::kTrain;
  if (name == "random") return Task::kRandom;
  if (name == "track") return Task::kTrack;
  if (name == "last-bar" || name == "lastbar") return Task::kLastBar;
  return std::nullopt;
}

std::string InfillExample::promptText() const { return renderText(fromIds(prompt_ids)); }

InfillExample makeExample(const MeasureSlice& slice, const MaskSpec& mask, const ControlSpec& controls, Task task,
                          const ExampleContext& ctx, const std::vector<Cell>& auto_credited) {
  const PromptTargetPair pair = encode(slice, mask, controls);
  InfillExample ex;
  ex.id = ctx.source + "#" + std::to_string(ctx.slice_index);
  ex.task = task;
  ex.source = ctx.source;
  ex.slice_start = slice.source_start_measure;
  ex.slice_measures = slice.numMeasures();
  ex.seed = ctx.seed;
  ex.prompt_ids = toIds(pair.prompt);
  ex.target_ids = toIds(pair.target);
  ex.masked = mask.ordered();
  ex.auto_credited = auto_credited;
  std::vector<Cell> truth_cells = ex.masked;
  truth_cells.insert(truth_cells.end(), auto_credited.begin(), auto_credited.end());
  for (const auto& [t, m] : truth_cells) {
    for (const Note& n : slice.cell(t, m)) ex.ground_truth.push_back({t, m, n.pitch, n.onset, n.duration});
  }
  std::sort(ex.ground_truth.begin(), ex.ground_truth.end());
  return ex;
}

namespace {

bool hasSingleDistinctPitch(const std::vector<Note>& notes) {
  if (notes.empty()) return false;
  return std::all_of(notes.begin(), notes.end(), [&](const Note& n) { return n.pitch == notes.front().pitch; });
}

int countOnsetTicks(const std::vector<Note>& notes) {
  std::set<Tick> ticks;
  for (const Note& n : notes) ticks.insert(n.onset);
  return static_cast<int>(ticks.size());
}

std::vector<int> maskedMeasures(const MaskSpec& mask, int track, int measures) {
  std::vector<int> out;
  for (int m = 0; m < measures; ++m) {
    if (mask.contains(track, m)) out.push_back(m);
  }
  return out;
}

BuildResult finish(const MeasureSlice& slice, const MaskSpec& mask, Task task, const ExampleContext& ctx,
                   bool max_controls) {
  BuildResult r;
  if (max_controls) {
    const MaxControlPlan plan = maxControls(slice, mask);
    r.example = makeExample(slice, plan.mask, plan.controls, task, ctx, plan.auto_credited);
  } else {
    r.example = makeExample(slice, mask, {}, task, ctx);
  }
  return r;
}

BuildResult skip(std::string reason) { return {std::nullopt, std::move(reason)}; }

std::optional<std::string> checkTestSlice(const MeasureSlice& slice) {
  if (slice.numMeasures() != kTestSliceMeasures) return "wrong_slice_length";
  if (slice.noteCount() == 0) return "empty_slice";
  if (slice.numTracks() > kMaxTracks) return "too_many_tracks";
  return std::nullopt;
}

}  // namespace

MaxControlPlan maxControls(const MeasureSlice& slice, const MaskSpec& mask) {
  MaxControlPlan plan;
  for (const auto& [cell, cond] : mask.cells) {
    const auto& notes = slice.cell(cell.first, cell.second);
    if (hasSingleDistinctPitch(notes)) {
      plan.auto_credited.push_back(cell);
      continue;
    }
    plan.mask.add(cell.first, cell.second, Conditioning::k2D);
    if (notes.empty()) continue;
    CellControlRequest req;
    req.strict_range = true;
    req.dnoc = dnocFlag(slice, cell.first, cell.second);
    plan.controls.cells[cell] = req;
  }
  for (int t = 0; t < slice.numTracks(); ++t) {
    const auto measures = maskedMeasures(plan.mask, t, slice.numMeasures());
    if (measures.empty()) continue;
    const TrackExcerpt ex = excerptOfCells(slice, t, measures);
    if (countOnsetTicks(ex.notes) < 2) continue;
    auto& req = plan.controls.tracks[t];
    req.step = true;
    req.leap = true;
  }
  return plan;
}

std::vector<int> trackInfillEligible(const MeasureSlice& slice) {
  std::vector<int> out;
  for (int t = 0; t < slice.numTracks(); ++t) {
    int with_onsets = 0;
    for (int m = 0; m < slice.numMeasures(); ++m) with_onsets += slice.cellEmpty(t, m) ? 0 : 1;
    if (with_onsets >= kTrackInfillMinMeasures) out.push_back(t);
  }
  return out;
}

BuildResult buildRandomInfill(const MeasureSlice& slice, const ExampleContext& ctx, bool max_controls) {
  if (auto reason = checkTestSlice(slice)) return skip(*reason);
  Rng rng(ctx.seed);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    MaskSpec mask;
    bool has_note = false;
    for (int t = 0; t < slice.numTracks(); ++t) {
      for (int m = 0; m < slice.numMeasures(); ++m) {
        if (!rng.bernoulli(0.5)) continue;
        mask.add(t, m);
        has_note = has_note || !slice.cellEmpty(t, m);
      }
    }
    if (!has_note || static_cast<int>(mask.size()) > kMaxMasks) continue;
    return finish(slice, mask, Task::kRandom, ctx, max_controls);
  }
  return skip("resample_limit");
}

BuildResult buildTrackInfill(const MeasureSlice& slice, const ExampleContext& ctx, bool max_controls) {
  if (auto reason = checkTestSlice(slice)) return skip(*reason);
  if (slice.numTracks() < 2) return skip("single_track");
  const auto eligible = trackInfillEligible(slice);
  if (eligible.empty()) return skip("no_eligible_track");
  Rng rng(ctx.seed);
  const int track = rng.pick(eligible);
  MaskSpec mask;
  for (int m = 0; m < slice.numMeasures(); ++m) mask.add(track, m);
  return finish(slice, mask, Task::kTrack, ctx, max_controls);
}

BuildResult buildLastBar(const MeasureSlice& slice, const ExampleContext& ctx, bool max_controls) {
  if (auto reason = checkTestSlice(slice)) return skip(*reason);
  const int last = slice.numMeasures() - 1;
  MaskSpec mask;
  bool has_note = false;
  for (int t = 0; t < slice.numTracks(); ++t) {
    mask.add(t, last);
    has_note = has_note || !slice.cellEmpty(t, last);
  }
  if (!has_note) return skip("empty_last_measure");
  return finish(slice, mask, Task::kLastBar, ctx, max_controls);
}

namespace {

Conditioning drawConditioning(Rng& rng, const TrainingConfig& config) {
  const double u = rng.uniform01();
  if (u < config.conditioning_1d) return Conditioning::k1D;
  if (u < config.conditioning_1d + config.conditioning_2d) return Conditioning::k2D;
  return Conditioning::kNone;
}

MeasureSlice drawTrainingSlice(const QuantizedScore& score, Rng& rng, const TrainingConfig& config) {
  const int total = static_cast<int>(score.measure_map.size());
  const int longest = std::clamp(config.max_slice_measures, 1, total);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const int length = rng.uniformInt(1, longest);
    const int start = rng.uniformInt(0, total - length);
    MeasureSlice s = slice(score, start, length).withoutEmptyTracks();
    if (s.numTracks() > 0) return s;
  }
  // Sparse score: fall back to the window starting at the first note.
  int first = total - 1;
  for (const Track& t : score.tracks) {
    if (!t.notes.empty()) first = std::min(first, score.measure_map.measureIndexAt(t.notes.front().onset));
  }
  return slice(score, first, 1).withoutEmptyTracks();
}

}  // namespace

TrainingDraw sampleTrainingExample(const QuantizedScore& score, const ExampleContext& ctx,
                                   const TrainingConfig& config) {
  if (score.noteCount() == 0) throw std::invalid_argument("score has no notes");
  Rng rng(ctx.seed);
  TrainingDraw draw;
  draw.slice = drawTrainingSlice(score, rng, config);
  MeasureSlice& s = draw.slice;
  if (s.numTracks() > kMaxTracks) {
    std::vector<MeasureSlice::TrackInfo> infos(s.tracks().begin(), s.tracks().begin() + kMaxTracks);
    MeasureSlice cut(infos, s.measureLengths());
    for (int t = 0; t < kMaxTracks; ++t) {
      for (int m = 0; m < s.numMeasures(); ++m) cut.mutableCell(t, m) = s.cell(t, m);
    }
    cut.source_start_measure = s.source_start_measure;
    cut.source_start_tick = s.source_start_tick;
    s = std::move(cut);
  }

  const double rate = rng.uniform01();
  std::vector<Cell> cells;
  for (int t = 0; t < s.numTracks(); ++t) {
    for (int m = 0; m < s.numMeasures(); ++m) {
      if (rng.bernoulli(rate)) cells.push_back({t, m});
    }
  }
  if (cells.empty()) cells.push_back({rng.uniformInt(0, s.numTracks() - 1), rng.uniformInt(0, s.numMeasures() - 1)});
  while (static_cast<int>(cells.size()) > kMaxMasks) {
    cells.erase(cells.begin() + rng.uniformInt(0, static_cast<int>(cells.size()) - 1));
  }
  for (const Cell& c : cells) draw.mask.add(c.first, c.second, drawConditioning(rng, config));

  const double p = config.control_probability;
  for (const auto& [cell, cond] : draw.mask.cells) {
    const auto& notes = s.cell(cell.first, cell.second);
    CellControlRequest req;
    req.horiz = rng.bernoulli(p);
    const bool has_notes = !notes.empty();
    req.vert = rng.bernoulli(p) && has_notes;
    req.pcs = rng.bernoulli(p) && has_notes;
    req.dnoc = rng.bernoulli(p) && dnocFlag(s, cell.first, cell.second);
    req.strict_range = rng.bernoulli(p) && has_notes;
    if (req.any()) draw.controls.cells[cell] = req;
  }
  for (int t = 0; t < s.numTracks(); ++t) {
    const auto measures = maskedMeasures(draw.mask, t, s.numMeasures());
    if (measures.empty()) continue;
    const TrackExcerpt ex = excerptOfCells(s, t, measures);
    const bool has_notes = !ex.notes.empty();
    const bool has_chords = countOnsetTicks(ex.notes) >= 2;
    TrackControlRequest req;
    req.horiz = rng.bernoulli(p);
    req.interest = rng.bernoulli(p) && ex.length >= 2;
    req.vert = rng.bernoulli(p) && has_notes;
    req.pcs = rng.bernoulli(p) && has_notes;
    req.step = rng.bernoulli(p) && has_chords;
    req.leap = rng.bernoulli(p) && has_chords;
    req.strict_range = rng.bernoulli(p) && has_notes;
    req.loose_range = rng.bernoulli(p) && has_notes;
    if (req.any()) draw.controls.tracks[t] = req;
  }
  draw.example = makeExample(s, draw.mask, draw.controls, Task::kTrain, ctx);
  return draw;
}

std::vector<int> chooseSliceStarts(Rng& rng, int total, int length, int count) {
  const int k = std::min(count, total / length);
  if (k <= 0) return {};
  const int slack = total - k * length;
  std::vector<int> offsets;
  for (int i = 0; i < k; ++i) offsets.push_back(rng.uniformInt(0, slack));
  std::sort(offsets.begin(), offsets.end());
  std::vector<int> starts;
  for (int i = 0; i < k; ++i) starts.push_back(offsets[static_cast<std::size_t>(i)] + i * length);
  return starts;
}

double DatasetManifest::autoCreditedFraction() const {
  const int total = masked_cells + auto_credited_cells;
  return total == 0 ? 0.0 : static_cast<double>(auto_credited_cells) / total;
}

std::vector<std::string> listMidiFiles(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".mid" || ext == ".midi") out.push_back(fs::relative(entry.path(), dir).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct FileOutcome {
  std::vector<InfillExample> examples;
  std::vector<std::string> skips;  // in the order encountered
};

std::vector<std::uint8_t> readBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

FileOutcome processFile(const std::string& dir, const std::string& rel, const CorpusOptions& options) {
  FileOutcome out;
  std::vector<std::uint8_t> bytes;
  try {
    bytes = readBytes((std::filesystem::path(dir) / rel).string());
  } catch (const std::exception&) {
    out.skips.push_back("unreadable_file");
    return out;
  }

  QuantizedScore score;
  try {
    score = quantize(parseMidi(bytes)).score;
  } catch (const MidiParseError&) {
    out.skips.push_back("midi_parse_error");
    return out;
  } catch (const UnsupportedMeterError&) {
    out.skips.push_back("unsupported_meter");
    return out;
  }

  if (options.task == Task::kTrain) {
    if (score.noteCount() == 0) {
      out.skips.push_back("no_notes");
      return out;
    }
    for (int i = 0; i < options.slices_per_file; ++i) {
      const ExampleContext ctx{rel, i, exampleSeed(options.seed, rel, static_cast<std::uint64_t>(i))};
      out.examples.push_back(sampleTrainingExample(score, ctx, options.training).example);
    }
    return out;
  }

  Rng placement(exampleSeed(options.seed, rel, 0xFFFFFFFFULL));
  const auto starts = chooseSliceStarts(placement, static_cast<int>(score.measure_map.size()), kTestSliceMeasures,
                                        options.slices_per_file);
  if (starts.empty()) {
    out.skips.push_back("too_few_measures");
    return out;
  }
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const MeasureSlice s = slice(score, starts[i], kTestSliceMeasures).withoutEmptyTracks();
    const ExampleContext ctx{rel, static_cast<int>(i), exampleSeed(options.seed, rel, i)};
    BuildResult r;
    switch (options.task) {
      case Task::kRandom: r = buildRandomInfill(s, ctx, options.max_controls); break;
      case Task::kTrack: r = buildTrackInfill(s, ctx, options.max_controls); break;
      case Task::kLastBar: r = buildLastBar(s, ctx, options.max_controls); break;
      case Task::kTrain: break;
    }
    if (r.example) {
      out.examples.push_back(std::move(*r.example));
    } else {
      out.skips.push_back(r.skip_reason);
    }
  }
  return out;
}

}  // namespace

CorpusResult buildCorpus(const std::string& dir, const CorpusOptions& options) {
  const auto files = listMidiFiles(dir);
  CorpusResult result;
  DatasetManifest& man = result.manifest;
  man.task = options.task;
  man.seed = options.seed;
  man.requested = options.n;
  man.files_total = static_cast<int>(files.size());

  std::uint64_t fingerprint = fnv1a("");
  for (const auto& rel : files) {
    std::uint64_t content = 0;
    try {
      const auto bytes = readBytes((std::filesystem::path(dir) / rel).string());
      content = fnv1a(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    } catch (const std::exception&) {
    }
    fingerprint = splitmix64(fingerprint ^ fnv1a(rel)) ^ content;
  }
  man.corpus_fingerprint = fingerprint;

  const std::size_t jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  const std::size_t batch = jobs * 4;
  bool done = options.n <= 0;
  for (std::size_t begin = 0; begin < files.size() && !done; begin += batch) {
    const std::size_t end = std::min(files.size(), begin + batch);
    std::vector<FileOutcome> outcomes(end - begin);
    std::atomic<std::size_t> next{begin};
    auto worker = [&] {
      for (std::size_t i = next++; i < end; i = next++) outcomes[i - begin] = processFile(dir, files[i], options);
    };
    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < std::min(jobs, end - begin); ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (std::size_t i = 0; i < outcomes.size() && !done; ++i) {
      FileOutcome& o = outcomes[i];
      for (const auto& reason : o.skips) ++man.skip_reasons[reason];
      bool used = false;
      for (auto& ex : o.examples) {
        if (static_cast<int>(result.examples.size()) >= options.n) {
          done = true;
          break;
        }
        used = true;
        result.examples.push_back(std::move(ex));
      }
      if (used) ++man.files_used;
      if (static_cast<int>(result.examples.size()) >= options.n) done = true;
    }
  }
  man.examples = static_cast<int>(result.examples.size());
  for (const auto& ex : result.examples) {
    man.masked_cells += static_cast<int>(ex.masked.size());
    man.auto_credited_cells += static_cast<int>(ex.auto_credited.size());
  }
  return result;
}

}  // namespace infill
