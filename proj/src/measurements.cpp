#include "infill/measurements.h"

#include <algorithm>
#include <array>
#include <bitset>
#include <cstdlib>
#include <map>

namespace infill {

namespace {

constexpr std::array<double, 5> kHorizontalEdges = {1.0 / 48, 1.0 / 24, 1.0 / 12, 1.0 / 6, 0.1875};
constexpr std::array<double, 2> kInterestEdges = {0.14, 0.4};
constexpr std::array<double, 6> kPropensityEdges = {0.01, 0.2, 0.4, 0.6, 0.8, 0.99};
// Vertical bins are right-closed: {1}, (1,2], (2,3], (3,4], (4,inf).
constexpr std::array<double, 4> kVerticalUpper = {1.0, 2.0, 3.0, 4.0};

constexpr std::array<std::string_view, 6> kHorizontalLabels = {
    "less than half notes",           "[half notes, quarter notes)",          "[quarter notes, eighth notes)",
    "[eighth notes, 16th notes)",     "[16th notes, 4.5 onsets per quarter)", ">= 4.5 onsets per quarter",
};
constexpr std::array<std::string_view, 3> kInterestLabels = {"low", "medium", "high"};
constexpr std::array<std::string_view, 5> kVerticalLabels = {
    "1 note per onset", "(1, 2] notes per onset", "(2, 3] notes per onset", "(3, 4] notes per onset",
    "> 4 notes per onset",
};
constexpr std::array<std::string_view, 5> kPitchClassLabels = {
    "1 pitch class per onset",        "(1, 2] pitch classes per onset", "(2, 3] pitch classes per onset",
    "(3, 4] pitch classes per onset", "> 4 pitch classes per onset",
};
constexpr std::array<std::string_view, 7> kPropensityLabels = {
    "[0, 0.01)", "[0.01, 0.2)", "[0.2, 0.4)", "[0.4, 0.6)", "[0.6, 0.8)", "[0.8, 0.99)", "[0.99, 1]",
};

// Left-closed bins: number of edges at or below the value.
template <std::size_t N>
int countEdgesAtOrBelow(const std::array<double, N>& edges, double value) {
  int bin = 0;
  for (double edge : edges) {
    if (value >= edge) ++bin;
  }
  return bin;
}

std::size_t onsetTickCount(const std::vector<Note>& notes) {
  std::vector<Tick> ticks;
  ticks.reserve(notes.size());
  for (const Note& n : notes) ticks.push_back(n.onset);
  std::sort(ticks.begin(), ticks.end());
  return static_cast<std::size_t>(std::unique(ticks.begin(), ticks.end()) - ticks.begin());
}

}  // namespace

std::string_view kindName(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::kHorizontalDensity: return "horizontal_density";
    case MeasureKind::kRhythmicInterest: return "rhythmic_interest";
    case MeasureKind::kVerticalDensity: return "vertical_density";
    case MeasureKind::kPitchClassesPerOnset: return "pitch_classes_per_onset";
    case MeasureKind::kStepPropensity: return "step_propensity";
    case MeasureKind::kLeapPropensity: return "leap_propensity";
  }
  return "unknown";
}

int binCount(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::kHorizontalDensity: return 6;
    case MeasureKind::kRhythmicInterest: return 3;
    case MeasureKind::kVerticalDensity:
    case MeasureKind::kPitchClassesPerOnset: return 5;
    case MeasureKind::kStepPropensity:
    case MeasureKind::kLeapPropensity: return 7;
  }
  return 0;
}

std::string_view binLabel(MeasureKind kind, int bin) {
  if (bin < 0 || bin >= binCount(kind)) throw std::out_of_range("bin index out of range");
  const auto i = static_cast<std::size_t>(bin);
  switch (kind) {
    case MeasureKind::kHorizontalDensity: return kHorizontalLabels[i];
    case MeasureKind::kRhythmicInterest: return kInterestLabels[i];
    case MeasureKind::kVerticalDensity: return kVerticalLabels[i];
    case MeasureKind::kPitchClassesPerOnset: return kPitchClassLabels[i];
    case MeasureKind::kStepPropensity:
    case MeasureKind::kLeapPropensity: return kPropensityLabels[i];
  }
  return "";
}

int quantizeBin(MeasureKind kind, double value) {
  switch (kind) {
    case MeasureKind::kHorizontalDensity: return countEdgesAtOrBelow(kHorizontalEdges, value);
    case MeasureKind::kRhythmicInterest: return countEdgesAtOrBelow(kInterestEdges, value);
    case MeasureKind::kStepPropensity:
    case MeasureKind::kLeapPropensity: return countEdgesAtOrBelow(kPropensityEdges, value);
    case MeasureKind::kVerticalDensity:
    case MeasureKind::kPitchClassesPerOnset: {
      int bin = 0;
      for (double upper : kVerticalUpper) {
        if (value > upper) ++bin;
      }
      return bin;
    }
  }
  throw std::invalid_argument("unknown measurement kind");
}

TrackExcerpt excerptOfTrack(const MeasureSlice& slice, int track) {
  return {slice.trackNotes(track), slice.totalTicks()};
}

TrackExcerpt excerptOfCell(const MeasureSlice& slice, int track, int measure) {
  return {slice.cell(track, measure), slice.measureLength(measure)};
}

TrackExcerpt excerptOfCells(const MeasureSlice& slice, int track, std::span<const int> measures) {
  TrackExcerpt out;
  for (int m : measures) {
    for (Note n : slice.cell(track, m)) {
      n.onset += out.length;
      out.notes.push_back(n);
    }
    out.length += slice.measureLength(m);
  }
  return out;
}

std::vector<std::uint8_t> rhythmVector(const TrackExcerpt& excerpt) {
  std::vector<std::uint8_t> v(static_cast<std::size_t>(std::max<Tick>(excerpt.length, 0)), 0);
  for (const Note& n : excerpt.notes) {
    if (n.onset < 0 || n.onset >= excerpt.length) throw std::out_of_range("note onset outside excerpt");
    v[static_cast<std::size_t>(n.onset)] = 1;
  }
  return v;
}

Measurement horizontalDensity(const TrackExcerpt& excerpt) {
  if (excerpt.length < 1) throw UndefinedMeasurement("horizontal density needs at least one tick");
  const double value = static_cast<double>(onsetTickCount(excerpt.notes)) / static_cast<double>(excerpt.length);
  return Measurement::of(MeasureKind::kHorizontalDensity, value);
}

double rhythmicInterestOf(std::span<const std::uint8_t> rhythm) {
  const auto length = static_cast<std::int64_t>(rhythm.size());
  if (length < 2) throw UndefinedMeasurement("rhythmic interest needs at least two ticks");
  std::vector<std::int64_t> onsets;
  for (std::int64_t i = 0; i < length; ++i) {
    if (rhythm[static_cast<std::size_t>(i)]) onsets.push_back(i);
  }
  const auto k = static_cast<std::int64_t>(onsets.size());
  if (k == 0 || k == length) return 0.0;

  // For a binary vector with k ones, <v - mean, shift_s(v - mean)> = c(s) - k^2/L
  // where c(s) counts onset pairs s ticks apart (cyclically). Scaled by L to
  // stay in integers.
  std::vector<std::int64_t> pairs(static_cast<std::size_t>(length), 0);
  for (std::int64_t a : onsets) {
    for (std::int64_t b : onsets) {
      const std::int64_t s = (b - a + length) % length;
      ++pairs[static_cast<std::size_t>(s)];
    }
  }
  std::int64_t uniformity = 0;
  for (std::int64_t s = 1; s < length; ++s) {
    const std::int64_t dot = length * pairs[static_cast<std::size_t>(s)] - k * k;
    uniformity = std::max(uniformity, dot < 0 ? -dot : dot);
  }
  const std::int64_t energy = k * length - k * k;
  return 1.0 - static_cast<double>(uniformity) / static_cast<double>(energy);
}

Measurement rhythmicInterest(const TrackExcerpt& excerpt) {
  if (excerpt.length < 2) throw UndefinedMeasurement("rhythmic interest needs at least two ticks");
  return Measurement::of(MeasureKind::kRhythmicInterest, rhythmicInterestOf(rhythmVector(excerpt)));
}

Measurement verticalDensity(const TrackExcerpt& excerpt) {
  const std::size_t ticks = onsetTickCount(excerpt.notes);
  if (ticks == 0) throw UndefinedMeasurement("vertical density is undefined without onsets");
  return Measurement::of(MeasureKind::kVerticalDensity,
                         static_cast<double>(excerpt.notes.size()) / static_cast<double>(ticks));
}

Measurement pitchClassesPerOnset(const TrackExcerpt& excerpt) {
  std::map<Tick, std::bitset<12>> classes;
  for (const Note& n : excerpt.notes) classes[n.onset].set(static_cast<std::size_t>(n.pitch % 12));
  if (classes.empty()) throw UndefinedMeasurement("pitch classes per onset is undefined without onsets");
  std::size_t total = 0;
  for (const auto& [tick, bits] : classes) total += bits.count();
  return Measurement::of(MeasureKind::kPitchClassesPerOnset,
                         static_cast<double>(total) / static_cast<double>(classes.size()));
}

std::vector<Chord> chordsOf(const TrackExcerpt& excerpt) {
  std::map<Tick, std::vector<int>> by_tick;
  for (const Note& n : excerpt.notes) by_tick[n.onset].push_back(n.pitch);
  std::vector<Chord> chords;
  chords.reserve(by_tick.size());
  for (auto& [tick, pitches] : by_tick) {
    std::sort(pitches.begin(), pitches.end());
    pitches.erase(std::unique(pitches.begin(), pitches.end()), pitches.end());
    chords.push_back({tick, std::move(pitches)});
  }
  return chords;
}

namespace {

// Sum over `from` of the minimum absolute pitch movement into `to`.
int movementSum(std::span<const int> from, std::span<const int> to) {
  int sum = 0;
  for (int p : from) {
    int best = -1;
    for (int q : to) {
      const int d = std::abs(p - q);
      if (best < 0 || d < best) best = d;
    }
    sum += best;
  }
  return sum;
}

}  // namespace

double chordDistance(std::span<const int> from, std::span<const int> to) {
  if (from.empty() || to.empty()) throw std::invalid_argument("chord distance needs two non-empty chords");
  return static_cast<double>(movementSum(from, to)) / static_cast<double>(from.size());
}

StepLeap stepLeapPropensity(std::span<const Chord> chords) {
  if (chords.size() < 2) throw UndefinedMeasurement("step/leap propensity needs at least two chords");
  int steps = 0;
  int leaps = 0;
  int repeats = 0;
  for (std::size_t i = 1; i < chords.size(); ++i) {
    const auto& from = chords[i - 1].pitches;
    const auto& to = chords[i].pitches;
    if (from.empty() || to.empty()) throw std::invalid_argument("empty chord");
    // d = sum / |from|; compare against 2 without rounding.
    const int sum = movementSum(from, to);
    if (sum == 0) {
      ++repeats;
    } else if (sum <= 2 * static_cast<int>(from.size())) {
      ++steps;
    } else {
      ++leaps;
    }
  }
  const double pairs = static_cast<double>(chords.size() - 1);
  return {Measurement::of(MeasureKind::kStepPropensity, steps / pairs),
          Measurement::of(MeasureKind::kLeapPropensity, leaps / pairs), repeats / pairs};
}

StepLeap stepLeapPropensity(const TrackExcerpt& excerpt) {
  const auto chords = chordsOf(excerpt);
  return stepLeapPropensity(std::span<const Chord>(chords));
}

Chromagram chromagram(std::span<const Note> cell_notes) {
  Chromagram c;
  for (const Note& n : cell_notes) c.entries.emplace(n.pitch % 12, n.onset);
  return c;
}

std::vector<std::vector<bool>> dnocFlags(const MeasureSlice& slice) {
  std::vector<std::vector<bool>> flags(static_cast<std::size_t>(slice.numTracks()),
                                       std::vector<bool>(static_cast<std::size_t>(slice.numMeasures()), false));
  for (int m = 0; m < slice.numMeasures(); ++m) {
    std::vector<Chromagram> chromas;
    chromas.reserve(static_cast<std::size_t>(slice.numTracks()));
    for (int t = 0; t < slice.numTracks(); ++t) chromas.push_back(chromagram(slice.cell(t, m)));
    for (std::size_t t = 0; t < chromas.size(); ++t) {
      if (chromas[t].empty()) continue;
      bool distinct = true;
      for (std::size_t other = 0; other < chromas.size() && distinct; ++other) {
        if (other != t && !chromas[other].empty() && chromas[other] == chromas[t]) distinct = false;
      }
      flags[t][static_cast<std::size_t>(m)] = distinct;
    }
  }
  return flags;
}

bool dnocFlag(const MeasureSlice& slice, int track, int measure) {
  const Chromagram mine = chromagram(slice.cell(track, measure));
  if (mine.empty()) return false;
  for (int t = 0; t < slice.numTracks(); ++t) {
    if (t == track) continue;
    const Chromagram other = chromagram(slice.cell(t, measure));
    if (!other.empty() && other == mine) return false;
  }
  return true;
}

PitchRange pitchRange(std::span<const Note> notes) {
  if (notes.empty()) throw UndefinedMeasurement("pitch range is undefined without notes");
  PitchRange r{notes.front().pitch, notes.front().pitch};
  for (const Note& n : notes) {
    r.low = std::min(r.low, n.pitch);
    r.high = std::max(r.high, n.pitch);
  }
  return r;
}

RhythmInfo rhythmInfo(std::span<const Note> notes, RhythmMode mode) {
  struct Acc {
    int duration = 0;
    int count = 0;
    std::bitset<12> classes;
  };
  std::map<Tick, Acc> by_tick;
  for (const Note& n : notes) {
    Acc& a = by_tick[n.onset];
    a.duration = std::max(a.duration, n.duration);
    ++a.count;
    a.classes.set(static_cast<std::size_t>(n.pitch % 12));
  }
  RhythmInfo info;
  info.mode = mode;
  for (const auto& [tick, a] : by_tick) {
    RhythmEntry e{tick, a.duration, 0, 0};
    if (mode == RhythmMode::k2D) {
      e.n_onsets = a.count;
      e.n_pitch_classes = static_cast<int>(a.classes.count());
    }
    info.entries.push_back(e);
  }
  return info;
}

Measurement measure(MeasureKind kind, const TrackExcerpt& excerpt) {
  switch (kind) {
    case MeasureKind::kHorizontalDensity: return horizontalDensity(excerpt);
    case MeasureKind::kRhythmicInterest: return rhythmicInterest(excerpt);
    case MeasureKind::kVerticalDensity: return verticalDensity(excerpt);
    case MeasureKind::kPitchClassesPerOnset: return pitchClassesPerOnset(excerpt);
    case MeasureKind::kStepPropensity: return stepLeapPropensity(excerpt).step;
    case MeasureKind::kLeapPropensity: return stepLeapPropensity(excerpt).leap;
  }
  throw std::invalid_argument("unknown measurement kind");
}

}  // namespace infill
