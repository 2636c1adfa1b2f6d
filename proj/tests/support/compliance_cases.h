// Hand-constructed outputs that land in a chosen bin of every binned control,
// plus the two near-miss cases (eighth notes under a quarter-note density
// request, and an octave copy under dnoc).

#pragma once

#include <string>
#include <vector>

#include "infill/codec.h"
#include "infill/compliance.h"

namespace infill::test {

struct ComplianceCase {
  std::string name;
  MeasureSlice output;
  ControlScope scope;
  Control control;
  bool exact = true;       // expected at tolerance 0
  bool within_one = true;  // expected at tolerance 1
};

inline MeasureSlice singleTrack(int measures, int length) {
  return MeasureSlice({{0, ""}}, std::vector<int>(static_cast<std::size_t>(measures), length));
}

inline std::vector<int> allMeasures(const MeasureSlice& s) {
  std::vector<int> out;
  for (int m = 0; m < s.numMeasures(); ++m) out.push_back(m);
  return out;
}

/// One 8/4 measure (192 ticks) with `k` onsets on the first k valid ticks.
inline MeasureSlice withOnsetCount(int k) {
  MeasureSlice s = singleTrack(1, 192);
  int placed = 0;
  for (Tick t = 0; t < 192 && placed < k; ++t) {
    if (!isValidOnset(t)) continue;
    s.addNote(0, 0, {60, t, 1});
    ++placed;
  }
  return s;
}

inline MeasureSlice withOnsets(int length, const std::vector<Tick>& onsets) {
  MeasureSlice s = singleTrack(1, length);
  for (Tick t : onsets) s.addNote(0, 0, {60, t, 6});
  return s;
}

/// Quarter-note chords of the given pitches, one measure of 4/4.
inline MeasureSlice withChords(const std::vector<int>& chord) {
  MeasureSlice s = singleTrack(1, 96);
  for (Tick t = 0; t < 96; t += 24) {
    for (int p : chord) s.addNote(0, 0, {p, t, 24});
  }
  return s;
}

/// A melody of `moves.size() + 1` sixteenth notes in 8/4 measures starting on
/// pitch 60, each move a semitone offset from the previous note.
inline MeasureSlice withMelody(const std::vector<int>& moves) {
  const int notes = static_cast<int>(moves.size()) + 1;
  const int per_measure = 32;
  MeasureSlice s = singleTrack((notes + per_measure - 1) / per_measure, 192);
  int pitch = 60;
  for (int i = 0; i < notes; ++i) {
    if (i > 0) pitch += moves[static_cast<std::size_t>(i - 1)];
    s.addNote(0, i / per_measure, {pitch, (i % per_measure) * 6, 6});
  }
  return s;
}

/// n transitions: `hits` moves of `size` semitones (alternating direction),
/// the rest repetitions.
inline std::vector<int> moves(int n, int hits, int size) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) out.push_back(i < hits ? (i % 2 == 0 ? size : -size) : 0);
  return out;
}

inline ComplianceCase binnedCase(const std::string& name, MeasureSlice s, ControlKind kind, int bin) {
  ControlScope scope{0, allMeasures(s)};
  return {name, std::move(s), scope, Control{kind, bin, {}}, true, true};
}

/// One constructed output per binned control token (33 in all), each aimed at
/// its own bin.
inline std::vector<ComplianceCase> binnedCases() {
  std::vector<ComplianceCase> out;
  // Horizontal density over 192 ticks: k / 192 onsets per tick.
  const int horiz_counts[] = {1, 4, 8, 16, 32, 36};
  for (int b = 0; b < 6; ++b) {
    out.push_back(binnedCase("horiz onsets=" + std::to_string(horiz_counts[b]), withOnsetCount(horiz_counts[b]),
                             ControlKind::kHoriz, b));
  }
  out.push_back(binnedCase("interest quarters", withOnsets(96, {0, 24, 48, 72}), ControlKind::kInterest, 0));
  out.push_back(binnedCase("interest clave", withOnsets(96, {0, 36, 72}), ControlKind::kInterest, 1));
  out.push_back(binnedCase("interest tresillo", withOnsets(96, {0, 36, 72, 84}), ControlKind::kInterest, 2));
  // Stacks of distinct pitch classes.
  const std::vector<std::vector<int>> stacks = {{60}, {60, 64}, {60, 64, 67}, {60, 64, 67, 70}, {60, 62, 64, 67, 70}};
  for (int b = 0; b < 5; ++b) {
    out.push_back(binnedCase("vert notes=" + std::to_string(b + 1), withChords(stacks[static_cast<std::size_t>(b)]),
                             ControlKind::kVert, b));
    out.push_back(binnedCase("pcs classes=" + std::to_string(b + 1), withChords(stacks[static_cast<std::size_t>(b)]),
                             ControlKind::kPitchClasses, b));
  }
  // Ten transitions give proportions 0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.
  const int hits[] = {0, 1, 3, 5, 7, 9, 10};
  for (int b = 0; b < 7; ++b) {
    out.push_back(binnedCase("step hits=" + std::to_string(hits[b]), withMelody(moves(10, hits[b], 2)),
                             ControlKind::kStep, b));
    out.push_back(binnedCase("leap hits=" + std::to_string(hits[b]), withMelody(moves(10, hits[b], 5)),
                             ControlKind::kLeap, b));
  }
  return out;
}

/// Straight eighths under the "[quarter notes, eighth notes)" density bin.
inline ComplianceCase eighthNoteCase() {
  MeasureSlice s = withOnsets(96, {0, 12, 24, 36, 48, 60, 72, 84});
  ControlScope scope{0, {0}};
  return {"straight eighths under horiz bin 2", std::move(s), scope, Control{ControlKind::kHoriz, 2, {}}, false, true};
}

/// Viola and cello play an ostinato an octave apart; the generated violin
/// part copies it another octave up, so its chromagram is not distinct.
inline ComplianceCase octaveCopyCase() {
  MeasureSlice s({{40, "violin"}, {41, "viola"}, {42, "cello"}}, {96});
  const std::vector<Tick> onsets = {0, 12, 24, 36, 48, 60, 72, 84};
  const std::vector<int> line = {0, 7, 3, 7, 0, 7, 3, 7};
  for (std::size_t i = 0; i < onsets.size(); ++i) {
    s.addNote(0, 0, {72 + line[i], onsets[i], 12});
    s.addNote(1, 0, {60 + line[i], onsets[i], 12});
    s.addNote(2, 0, {48 + line[i], onsets[i], 12});
  }
  return {"octave copy under dnoc", std::move(s), ControlScope{0, {0}}, Control{ControlKind::kDnoc, 0, {}}, false,
          false};
}

/// A violin line with its own rhythm against the same accompaniment.
inline ComplianceCase distinctLineCase() {
  ComplianceCase c = octaveCopyCase();
  c.name = "distinct line under dnoc";
  c.output.mutableCell(0, 0).clear();
  for (Tick t : {0, 24, 48, 72}) c.output.addNote(0, 0, {76, t, 24});
  c.exact = c.within_one = true;
  return c;
}

}  // namespace infill::test
