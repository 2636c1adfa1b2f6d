// Objective infilling metrics: note precision / recall / F1, pitch-class
// histogram entropy difference and groove similarity.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "infill/codec.h"
#include "infill/example_gen.h"

namespace infill {

/// Whether note equivalence also requires equal durations.
enum class DurationPolicy { kIgnore, kMatch };

struct NoteMatchReport {
  int true_positives = 0;
  int predicted_count = 0;
  int truth_count = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
};

/// One-to-one matching on (track, measure, pitch, onset). Predicted notes in
/// auto-credited cells are replaced by the truth notes of those cells.
NoteMatchReport notePrf(const std::vector<GroundTruthNote>& truth, const std::vector<GroundTruthNote>& predicted,
                        const std::vector<Cell>& auto_credited = {},
                        DurationPolicy policy = DurationPolicy::kIgnore);

/// Shannon entropy in bits of the 12-bin pitch-class histogram, 0 when empty.
double pitchClassEntropy(const std::vector<GroundTruthNote>& notes);

/// |H(truth) - H(predicted)| / log2(12), as a percentage.
double pchEntropyDifference(const std::vector<GroundTruthNote>& truth, const std::vector<GroundTruthNote>& predicted);

/// Mean over the given cells of 1 - hamming(onsets) / measure length, as a
/// percentage. 100 when there are no cells.
double grooveSimilarity(const std::vector<GroundTruthNote>& truth, const std::vector<GroundTruthNote>& predicted,
                        const std::vector<MaskedCellGeometry>& cells);

struct ExampleScore {
  std::string id;
  std::string task;
  NoteMatchReport notes;
  double entropy_difference = 0.0;  // percent
  double groove_similarity = 100.0;  // percent
  bool complete = true;              // output ended with <eot>
  bool salvaged = false;             // output had a grammar error
};

/// Scores a target token sequence produced for `example`, decoding with
/// salvage against the example's prompt geometry.
ExampleScore scoreOutput(const InfillExample& example, const std::vector<int>& output_ids,
                         DurationPolicy policy = DurationPolicy::kIgnore);

/// Predicted notes for the masked cells of `example` from decoded cells.
std::vector<GroundTruthNote> predictedNotes(const InfillExample& example, const DecodeResult& decoded);

struct EvalReport {
  std::vector<ExampleScore> examples;
  double mean_precision = 0.0;  // percentages, stable summation order
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  double mean_entropy_difference = 0.0;
  double mean_groove_similarity = 0.0;
  int incomplete_outputs = 0;
  int salvaged_outputs = 0;

  static EvalReport of(std::vector<ExampleScore> scores);
  std::string perExampleCsv() const;
  std::string aggregateCsv() const;
};

inline constexpr const char* kPerExampleCsvHeader =
    "id,task,true_positives,predicted_count,truth_count,precision,recall,f1,entropy_difference,groove_similarity,"
    "complete,salvaged";
inline constexpr const char* kAggregateCsvHeader = "metric,mean,n";

}  // namespace infill
