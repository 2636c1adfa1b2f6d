// Training examples and the random / track / last-bar infilling test sets.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infill/codec.h"
#include "infill/rng.h"
#include "infill/score.h"

namespace infill {

enum class Task { kTrain, kRandom, kTrack, kLastBar };

std::string_view taskName(Task task);
/// Accepts "train", "random", "track", "last-bar" and "lastbar".
std::optional<Task> parseTask(std::string_view name);

struct GroundTruthNote {
  int track = 0;
  int measure = 0;
  int pitch = 0;
  Tick onset = 0;  // within the measure
  int duration = 0;

  friend bool operator==(const GroundTruthNote&, const GroundTruthNote&) = default;
  friend auto operator<=>(const GroundTruthNote&, const GroundTruthNote&) = default;
};

struct InfillExample {
  std::string id;
  Task task = Task::kRandom;
  std::string source;
  int slice_start = 0;     // first measure of the slice in the source score
  int slice_measures = 0;
  std::uint64_t seed = 0;
  std::vector<int> prompt_ids;
  std::vector<int> target_ids;
  /// Notes of every masked and auto-credited cell.
  std::vector<GroundTruthNote> ground_truth;
  std::vector<Cell> masked;         // in mask-index order
  std::vector<Cell> auto_credited;  // unmasked by max controls, scored as predicted

  friend bool operator==(const InfillExample&, const InfillExample&) = default;

  std::string promptText() const;
};

struct ExampleContext {
  std::string source;
  int slice_index = 0;
  std::uint64_t seed = 0;
};

/// Either an example or the reason the slice was skipped.
struct BuildResult {
  std::optional<InfillExample> example;
  std::string skip_reason;
};

struct TrainingConfig {
  int max_slice_measures = 8;
  double control_probability = 0.5;  // per control family and scope
  double conditioning_1d = 0.25;
  double conditioning_2d = 0.25;
};

/// What a training draw decided, for inspection by tests and tooling.
struct TrainingDraw {
  MeasureSlice slice;
  MaskSpec mask;
  ControlSpec controls;
  InfillExample example;
};

/// Throws std::invalid_argument when the score has no notes.
TrainingDraw sampleTrainingExample(const QuantizedScore& score, const ExampleContext& ctx,
                                   const TrainingConfig& config = {});

inline constexpr int kTestSliceMeasures = 8;
inline constexpr int kTrackInfillMinMeasures = 7;

BuildResult buildRandomInfill(const MeasureSlice& slice, const ExampleContext& ctx, bool max_controls = false);
BuildResult buildTrackInfill(const MeasureSlice& slice, const ExampleContext& ctx, bool max_controls = false);
BuildResult buildLastBar(const MeasureSlice& slice, const ExampleContext& ctx, bool max_controls = false);

/// Tracks with onsets in at least kTrackInfillMinMeasures measures.
std::vector<int> trackInfillEligible(const MeasureSlice& slice);

struct MaxControlPlan {
  MaskSpec mask;  // auto-credited cells removed, 2D conditioning everywhere
  ControlSpec controls;
  std::vector<Cell> auto_credited;
};

/// Controls describing the masked content as fully as possible. Masked cells
/// holding a single distinct pitch are unmasked and reported as credited.
MaxControlPlan maxControls(const MeasureSlice& slice, const MaskSpec& mask);

/// Encodes and records ground truth for the masked and credited cells.
InfillExample makeExample(const MeasureSlice& slice, const MaskSpec& mask, const ControlSpec& controls, Task task,
                          const ExampleContext& ctx, const std::vector<Cell>& auto_credited = {});

struct CorpusOptions {
  Task task = Task::kRandom;
  int n = 1000;
  std::uint64_t seed = 0;
  bool max_controls = false;
  int jobs = 1;
  int slices_per_file = 3;
  TrainingConfig training;
};

struct DatasetManifest {
  Task task = Task::kRandom;
  std::uint64_t seed = 0;
  int requested = 0;
  int examples = 0;
  int files_total = 0;
  int files_used = 0;  // contributed at least one emitted example
  int masked_cells = 0;
  int auto_credited_cells = 0;
  std::uint64_t corpus_fingerprint = 0;
  std::map<std::string, int> skip_reasons;

  double autoCreditedFraction() const;
};

struct CorpusResult {
  std::vector<InfillExample> examples;
  DatasetManifest manifest;
};

/// Sorted list of .mid / .midi files under `dir`, recursively.
std::vector<std::string> listMidiFiles(const std::string& dir);

/// Builds up to options.n examples from the files in `dir` processed in
/// sorted order. Output does not depend on options.jobs.
CorpusResult buildCorpus(const std::string& dir, const CorpusOptions& options);

/// Start measures of up to `count` non-overlapping windows of `length`
/// measures in a score of `total` measures.
std::vector<int> chooseSliceStarts(Rng& rng, int total, int length, int count);

}  // namespace infill
