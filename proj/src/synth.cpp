#include "infill/synth.h"

#include <algorithm>
#include <filesystem>
#include <map>

#include "infill/midi.h"

namespace infill {

namespace {

constexpr int kGridSteps[] = {48, 24, 12, 6, 8};  // half, quarter, eighth, sixteenth, eighth triplet
constexpr int kMeterChoices[] = {96, 96, 96, 72, 72, 120, 48, 84};
constexpr int kMeterChoiceCount = static_cast<int>(std::size(kMeterChoices));
constexpr int kDrumPitches[] = {36, 38, 42, 46, 49};

enum class Role { kMelody, kChords, kBass, kDrums };

struct TrackStyle {
  Role role = Role::kMelody;
  int step = 24;
  double fill = 0.8;
  double leap_probability = 0.2;
  int center = 64;
  int max_chord = 1;
};

std::vector<Tick> drawPattern(Rng& rng, int length, const TrackStyle& style) {
  std::vector<Tick> onsets;
  for (int t = 0; t < length; t += style.step) {
    if (t == 0 || rng.bernoulli(style.fill)) onsets.push_back(t);
  }
  return onsets;
}

int clampPitch(int p) { return std::clamp(p, 21, 108); }

}  // namespace

QuantizedScore synthScore(Rng& rng, const SynthConfig& config) {
  const int n_measures = rng.uniformInt(config.min_measures, config.max_measures);
  std::vector<int> lengths;
  int meter = kMeterChoices[rng.uniformInt(0, kMeterChoiceCount - 1)];
  for (int m = 0; m < n_measures; ++m) {
    if (m > 0 && rng.bernoulli(config.meter_change_probability / 4)) {
      meter = kMeterChoices[rng.uniformInt(0, kMeterChoiceCount - 1)];
    }
    lengths.push_back(meter);
  }

  QuantizedScore score;
  score.measure_map = MeasureMap::fromLengths(lengths);
  const int n_tracks = rng.uniformInt(config.min_tracks, config.max_tracks);
  for (int t = 0; t < n_tracks; ++t) {
    Track track;
    if (t > 0 && rng.bernoulli(config.octave_double_probability)) {
      const Track& src = score.tracks[static_cast<std::size_t>(rng.uniformInt(0, t - 1))];
      if (!src.isDrum()) {
        track.instrument = rng.uniformInt(0, 127);
        for (const Note& n : src.notes) {
          if (n.pitch + 12 <= kMaxPitch) track.notes.push_back({n.pitch + 12, n.onset, n.duration});
        }
        score.tracks.push_back(std::move(track));
        continue;
      }
    }

    TrackStyle style;
    if (rng.bernoulli(config.drum_probability)) {
      style.role = Role::kDrums;
    } else {
      style.role = static_cast<Role>(rng.uniformInt(0, 2));
    }
    style.step = kGridSteps[rng.uniformInt(0, static_cast<int>(std::size(kGridSteps)) - 1)];
    style.fill = 0.4 + 0.6 * rng.uniform01();
    style.leap_probability = rng.uniform01();
    style.center = style.role == Role::kBass ? rng.uniformInt(36, 50) : rng.uniformInt(55, 80);
    style.max_chord = style.role == Role::kChords ? rng.uniformInt(2, 4) : 1;
    track.instrument = style.role == Role::kDrums ? kDrumInstrument : rng.uniformInt(0, 127);

    std::map<int, std::vector<Tick>> base;  // per measure length
    int pitch = style.center;
    for (int m = 0; m < n_measures; ++m) {
      if (rng.bernoulli(config.rest_measure_probability)) continue;
      const int length = lengths[static_cast<std::size_t>(m)];
      auto it = base.find(length);
      if (it == base.end() || rng.bernoulli(0.3)) it = base.insert_or_assign(length, drawPattern(rng, length, style)).first;
      const std::vector<Tick>& onsets = it->second;
      const bool static_pitch = style.role == Role::kBass && rng.bernoulli(0.3);
      const Tick start = score.measure_map[static_cast<std::size_t>(m)].start;
      for (std::size_t i = 0; i < onsets.size(); ++i) {
        const Tick next = i + 1 < onsets.size() ? onsets[i + 1] : length;
        const int duration = static_cast<int>(std::max<Tick>(1, next - onsets[i]));
        if (style.role == Role::kDrums) {
          const int k = rng.uniformInt(1, 2);
          for (int j = 0; j < k; ++j) {
            track.notes.push_back({kDrumPitches[rng.uniformInt(0, 4)], start + onsets[i], std::min(duration, 6)});
          }
          continue;
        }
        if (!static_pitch) {
          const int move = rng.bernoulli(style.leap_probability) ? rng.uniformInt(3, 7) : rng.uniformInt(0, 2);
          pitch += rng.bernoulli(0.5) ? move : -move;
          if (std::abs(pitch - style.center) > 12) pitch = style.center;
        }
        const int size = rng.uniformInt(1, style.max_chord);
        int p = clampPitch(pitch);
        for (int j = 0; j < size; ++j) {
          track.notes.push_back({clampPitch(p), start + onsets[i], duration});
          p += rng.uniformInt(3, 5);
        }
      }
    }
    score.tracks.push_back(std::move(track));
  }
  for (Track& t : score.tracks) {
    sortNotes(t.notes);
    t.notes.erase(std::unique(t.notes.begin(), t.notes.end(),
                              [](const Note& a, const Note& b) { return a.pitch == b.pitch && a.onset == b.onset; }),
                  t.notes.end());
  }
  return score;
}

std::vector<std::string> writeSynthCorpus(const std::string& dir, int count, std::uint64_t seed,
                                          const SynthConfig& config) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "synth_%04d.mid", i);
    Rng rng(exampleSeed(seed, name, static_cast<std::uint64_t>(i)));
    writeMidiFile(synthScore(rng, config), (std::filesystem::path(dir) / name).string());
    names.emplace_back(name);
  }
  return names;
}

}  // namespace infill
