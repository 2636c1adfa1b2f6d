// Procedural multi-track scores with controlled density, range and rhythm
// statistics, for desk-scale corpora and tests.

#pragma once

#include <string>
#include <vector>

#include "infill/rng.h"
#include "infill/score.h"

namespace infill {

struct SynthConfig {
  int min_measures = 10;
  int max_measures = 24;
  int min_tracks = 1;
  int max_tracks = 4;
  double meter_change_probability = 0.2;
  double rest_measure_probability = 0.08;  // per track-measure
  double drum_probability = 0.15;          // per track
  double octave_double_probability = 0.15; // per track after the first: copy an earlier track an octave up
};

QuantizedScore synthScore(Rng& rng, const SynthConfig& config = {});

/// Writes `count` files named synth_0000.mid, ... into `dir` (created if
/// missing) with per-file seeds derived from `seed`. Returns the file names.
std::vector<std::string> writeSynthCorpus(const std::string& dir, int count, std::uint64_t seed,
                                          const SynthConfig& config = {});

}  // namespace infill
