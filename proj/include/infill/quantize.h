// Conversion of parsed MIDI onto the 24-ticks-per-quarter mixed grid.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "infill/midi.h"
#include "infill/score.h"

namespace infill {

class UnsupportedMeterError : public std::runtime_error {
 public:
  UnsupportedMeterError(const std::string& what, int measure_index)
      : std::runtime_error(what), measure_index_(measure_index) {}
  int measureIndex() const { return measure_index_; }

 private:
  int measure_index_;
};

struct QuantizeDiagnostics {
  int snapped_onsets = 0;       // onsets that moved to reach a valid position
  int merged_duplicates = 0;    // (pitch, onset) collisions, parse and snap combined
  int clamped_durations = 0;    // durations raised to 1 or cut to the maximum
  int deferred_time_signatures = 0;
  std::vector<std::string> lines;  // human-readable listing

  std::string listing() const;
};

struct QuantizeResult {
  QuantizedScore score;
  QuantizeDiagnostics diagnostics;
};

/// Nearest valid onset tick (24 PPQ) for a source tick at `ppq`. Ties snap
/// to the earlier position.
Tick snapOnset(Tick source_tick, int ppq);

/// Duration rescaled to 24 PPQ, rounded half up, clamped to [1, max].
int rescaleDuration(Tick source_ticks, int ppq);

/// Measure length in grid ticks for a time signature; throws
/// UnsupportedMeterError when it does not fit the grid or exceeds 8 quarters.
int measureTicks(int numerator, int denominator, int measure_index);

/// Rescales, snaps, merges duplicates and builds the measure map. Time
/// signature changes take effect at the next measure boundary at or after
/// their tick. Files without time signatures are 4/4.
QuantizeResult quantize(const RawScore& raw);

/// Reads, parses and quantizes a MIDI file.
QuantizeResult loadScore(const std::string& path);

}  // namespace infill
