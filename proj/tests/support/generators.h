// Random inputs for property tests.

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "infill/codec.h"
#include "infill/rng.h"
#include "infill/score.h"

namespace infill::test {

inline Tick randomValidOnset(Rng& rng, int length) {
  std::vector<Tick> valid;
  for (Tick t = 0; t < length; ++t) {
    if (isValidOnset(t)) valid.push_back(t);
  }
  return rng.pick(valid);
}

inline int randomMeasureLength(Rng& rng) {
  static const std::vector<int> lengths = {96, 96, 96, 72, 48, 120, 144, 192, 36, 24};
  return rng.pick(lengths);
}

struct SliceShape {
  int min_tracks = 1;
  int max_tracks = 4;
  int min_measures = 1;
  int max_measures = 8;
  double cell_fill = 0.7;  // probability that a cell has notes
  int max_notes_per_cell = 8;
  bool mixed_meters = true;
};

inline MeasureSlice randomSlice(Rng& rng, const SliceShape& shape = {}) {
  const int tracks = rng.uniformInt(shape.min_tracks, shape.max_tracks);
  const int measures = rng.uniformInt(shape.min_measures, shape.max_measures);
  std::vector<MeasureSlice::TrackInfo> infos;
  for (int t = 0; t < tracks; ++t) infos.push_back({rng.uniformInt(0, kDrumInstrument), ""});
  std::vector<int> lengths;
  for (int m = 0; m < measures; ++m) lengths.push_back(shape.mixed_meters ? randomMeasureLength(rng) : 96);
  MeasureSlice s(infos, lengths);
  for (int t = 0; t < tracks; ++t) {
    const int centre = rng.uniformInt(36, 84);
    for (int m = 0; m < measures; ++m) {
      if (!rng.bernoulli(shape.cell_fill)) continue;
      const int n = rng.uniformInt(1, shape.max_notes_per_cell);
      for (int i = 0; i < n; ++i) {
        const int pitch = std::clamp(centre + rng.uniformInt(-12, 12), 0, kMaxPitch);
        s.addNote(t, m, {pitch, randomValidOnset(rng, lengths[static_cast<std::size_t>(m)]),
                         rng.uniformInt(1, kMaxDurationTicks)});
      }
    }
  }
  return s;
}

inline MaskSpec randomMask(Rng& rng, const MeasureSlice& s, double rate = 0.5) {
  MaskSpec mask;
  for (int t = 0; t < s.numTracks(); ++t) {
    for (int m = 0; m < s.numMeasures(); ++m) {
      if (!rng.bernoulli(rate)) continue;
      const int c = rng.uniformInt(0, 3);
      mask.add(t, m, c < 2 ? Conditioning::kNone : (c == 2 ? Conditioning::k1D : Conditioning::k2D));
    }
  }
  if (mask.empty()) mask.add(rng.uniformInt(0, s.numTracks() - 1), rng.uniformInt(0, s.numMeasures() - 1));
  return mask;
}

inline std::vector<std::uint8_t> randomRhythm(Rng& rng, int length, double density) {
  std::vector<std::uint8_t> v(static_cast<std::size_t>(length));
  for (auto& x : v) x = rng.bernoulli(density) ? 1 : 0;
  return v;
}

// Control tokens of a prompt (everything that is not structure, notes or
// conditioning), with dnoc removed since it compares against unmasked cells.
inline std::vector<std::string> controlTokens(const TokenSequence& prompt) {
  const auto layout = parsePrompt(prompt);
  std::vector<std::string> out;
  for (const auto& cell : layout.masked) {
    for (const auto& c : cell.controls) {
      if (c.kind != ControlKind::kDnoc) out.push_back(c.text());
    }
  }
  for (const auto& [t, list] : layout.track_controls) {
    for (const auto& c : list) out.push_back(std::to_string(t) + c.text());
  }
  return out;
}

}  // namespace infill::test
