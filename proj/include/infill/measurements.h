// Control measurements over collections of track-measures and their bins.
//
// Every function takes a TrackExcerpt: the notes of one track over some
// measures, concatenated in order, with onsets relative to the excerpt start.

#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "infill/score.h"

namespace infill {

class UndefinedMeasurement : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class MeasureKind {
  kHorizontalDensity,
  kRhythmicInterest,
  kVerticalDensity,
  kPitchClassesPerOnset,
  kStepPropensity,
  kLeapPropensity,
};

inline constexpr MeasureKind kAllMeasureKinds[] = {
    MeasureKind::kHorizontalDensity, MeasureKind::kRhythmicInterest,  MeasureKind::kVerticalDensity,
    MeasureKind::kPitchClassesPerOnset, MeasureKind::kStepPropensity, MeasureKind::kLeapPropensity,
};

std::string_view kindName(MeasureKind kind);
int binCount(MeasureKind kind);
std::string_view binLabel(MeasureKind kind, int bin);

/// Maps a measured value to its bin. Total on the value's declared range
/// and monotone non-decreasing.
int quantizeBin(MeasureKind kind, double value);

struct Measurement {
  MeasureKind kind;
  double value = 0.0;
  int bin = 0;

  static Measurement of(MeasureKind kind, double value) { return {kind, value, quantizeBin(kind, value)}; }
};

struct TrackExcerpt {
  std::vector<Note> notes;  // onsets relative to excerpt start
  Tick length = 0;          // total ticks covered
};

TrackExcerpt excerptOfTrack(const MeasureSlice& slice, int track);
TrackExcerpt excerptOfCell(const MeasureSlice& slice, int track, int measure);
/// Concatenates the listed measures of one track (in the given order).
TrackExcerpt excerptOfCells(const MeasureSlice& slice, int track, std::span<const int> measures);

/// 1 at every tick carrying at least one onset.
std::vector<std::uint8_t> rhythmVector(const TrackExcerpt& excerpt);

Measurement horizontalDensity(const TrackExcerpt& excerpt);

/// One minus the largest absolute cyclic autocorrelation of the centred
/// rhythm vector, normalised by its energy. A constant vector yields 0.
double rhythmicInterestOf(std::span<const std::uint8_t> rhythm);
Measurement rhythmicInterest(const TrackExcerpt& excerpt);

Measurement verticalDensity(const TrackExcerpt& excerpt);
Measurement pitchClassesPerOnset(const TrackExcerpt& excerpt);

struct Chord {
  Tick onset = 0;
  std::vector<int> pitches;  // distinct, ascending
};

/// Notes grouped by onset tick, in tick order.
std::vector<Chord> chordsOf(const TrackExcerpt& excerpt);

/// Mean over notes of `from` of the smallest pitch movement into `to`.
double chordDistance(std::span<const int> from, std::span<const int> to);
inline double chordDistance(const Chord& from, const Chord& to) { return chordDistance(from.pitches, to.pitches); }

struct StepLeap {
  Measurement step;
  Measurement leap;
  double repetition = 0.0;
};

StepLeap stepLeapPropensity(const TrackExcerpt& excerpt);
StepLeap stepLeapPropensity(std::span<const Chord> chords);

/// Dispatches to the measurement of `kind`; throws UndefinedMeasurement.
Measurement measure(MeasureKind kind, const TrackExcerpt& excerpt);

struct Chromagram {
  std::set<std::pair<int, Tick>> entries;  // (pitch class, onset within measure)

  bool empty() const { return entries.empty(); }
  friend bool operator==(const Chromagram&, const Chromagram&) = default;
};

Chromagram chromagram(std::span<const Note> cell_notes);

/// flags[t][m] is true iff cell (t, m) is non-empty and its chromagram
/// differs from every other non-empty cell in measure m.
std::vector<std::vector<bool>> dnocFlags(const MeasureSlice& slice);
bool dnocFlag(const MeasureSlice& slice, int track, int measure);

struct PitchRange {
  int low = 0;
  int high = 0;
  friend bool operator==(const PitchRange&, const PitchRange&) = default;
};

PitchRange pitchRange(std::span<const Note> notes);

enum class RhythmMode { k1D, k2D };

struct RhythmEntry {
  Tick onset = 0;
  int duration = 0;  // longest duration at the tick
  int n_onsets = 0;
  int n_pitch_classes = 0;
  friend bool operator==(const RhythmEntry&, const RhythmEntry&) = default;
};

struct RhythmInfo {
  RhythmMode mode = RhythmMode::k1D;
  std::vector<RhythmEntry> entries;  // sorted by onset, counts zero in 1D mode
};

RhythmInfo rhythmInfo(std::span<const Note> notes, RhythmMode mode);

}  // namespace infill
