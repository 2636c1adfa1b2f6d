// Control compliance: does an output fall in the bin (or satisfy the flag or
// range) a control token describes, and success rates over many outputs.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "infill/codec.h"
#include "infill/score.h"

namespace infill {

/// Which notes a control is checked against: one track over the listed
/// measures (one measure for track-measure controls).
struct ControlScope {
  int track = 0;
  std::vector<int> measures;
};

struct ComplianceResult {
  std::string control;          // token spelling
  std::optional<double> observed;  // measurement value, binned controls only
  int target_bin = -1;          // -1 for dnoc and ranges
  int observed_bin = -1;        // -1 when undefined or not binned
  bool satisfied = false;       // exact
  bool satisfied_within_one_bin = false;
  std::string reason;           // "undefined" when the measurement is undefined on the output

  bool satisfiedAt(int tolerance) const { return tolerance == 0 ? satisfied : satisfied_within_one_bin; }
};

/// `output` holds the full slice: context plus generated notes.
ComplianceResult checkCompliance(const MeasureSlice& output, const ControlScope& scope, const Control& control);

struct ComplianceSample {
  Control control;
  bool supplied = false;  // the control was in the prompt
  ComplianceResult result;
};

struct SuccessRateRow {
  std::string control;
  int supplied_n = 0;
  int supplied_exact = 0;
  int supplied_within_one = 0;
  int unconditioned_n = 0;
  int unconditioned_exact = 0;
  int unconditioned_within_one = 0;

  /// NaN when the corresponding sample count is zero.
  double rate(bool supplied, int tolerance) const;
};

/// One row per distinct control, ordered by token id (ranges by pitches).
std::vector<SuccessRateRow> successRateReport(const std::vector<ComplianceSample>& samples);

inline constexpr const char* kSuccessRateCsvHeader =
    "control,tolerance,supplied_n,supplied_rate,unconditioned_n,unconditioned_rate,supplied_rate_exact,"
    "supplied_rate_within_one,unconditioned_rate_exact,unconditioned_rate_within_one";

std::string successRateCsv(const std::vector<SuccessRateRow>& rows, int tolerance);

/// A control to check on one generated output.
struct ComplianceProbe {
  Control control;
  int track = 0;
  std::optional<int> measure;  // track-measure scope; nullopt = all masked measures of the track
  bool supplied = true;
};

/// The prompt's unmasked notes plus the decoded (salvaged) target notes.
MeasureSlice assembleOutput(const PromptLayout& layout, const DecodeResult& decoded);

/// Probes implied by a prompt: every control it carries, as supplied, plus an
/// unconditioned probe for each bin of every binned control (and dnoc) the
/// prompt leaves out at a masked scope.
std::vector<ComplianceProbe> derivedProbes(const PromptLayout& layout);

/// Decodes `target` against `prompt` and checks each probe. Probes default
/// to derivedProbes(parsePrompt(prompt)).
std::vector<ComplianceSample> checkOutput(const TokenSequence& prompt, const TokenSequence& target,
                                          const std::optional<std::vector<ComplianceProbe>>& probes = std::nullopt);

}  // namespace infill
