// Core music types shared by every stage of the pipeline: notes on the
// 24-ticks-per-quarter grid, tracks, measure maps and measure slices.

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace infill {

using Tick = std::int64_t;

inline constexpr int kTicksPerQuarter = 24;
inline constexpr int kMaxMeasureTicks = 8 * kTicksPerQuarter;
inline constexpr int kDefaultMeasureTicks = 4 * kTicksPerQuarter;
inline constexpr int kDrumInstrument = 128;
inline constexpr int kMaxPitch = 127;

/// Durations are clamped to this many ticks on ingest so that every note
/// has a duration token (8 bars of 4/4).
inline constexpr int kMaxDurationTicks = 8 * kDefaultMeasureTicks;

/// Tick offsets within a quarter note that may carry an onset: the union of
/// the 32nd-note grid (every 3 ticks) and the 16th-triplet grid (every 4).
inline constexpr std::array<int, 12> kValidOnsetOffsets = {0, 3, 4, 6, 8, 9, 12, 15, 16, 18, 20, 21};

constexpr bool isValidOnset(Tick tick) {
  if (tick < 0) return false;
  const int offset = static_cast<int>(tick % kTicksPerQuarter);
  for (int valid : kValidOnsetOffsets) {
    if (valid == offset) return true;
  }
  return false;
}

struct Note {
  int pitch = 60;
  Tick onset = 0;
  int duration = 1;

  friend bool operator==(const Note&, const Note&) = default;
  friend auto operator<=>(const Note&, const Note&) = default;
};

/// Sort by (onset, pitch) which is the canonical storage order.
void sortNotes(std::vector<Note>& notes);

struct Track {
  int instrument = 0;  // General MIDI program, 128 = drums
  std::string name;
  std::vector<Note> notes;

  bool isDrum() const { return instrument == kDrumInstrument; }
};

struct Measure {
  Tick start = 0;
  int length = kDefaultMeasureTicks;

  friend bool operator==(const Measure&, const Measure&) = default;
};

class MeasureMap {
 public:
  MeasureMap() = default;
  explicit MeasureMap(std::vector<Measure> measures);

  /// Builds contiguous measures starting at tick 0 from a list of lengths.
  static MeasureMap fromLengths(const std::vector<int>& lengths);

  const std::vector<Measure>& measures() const { return measures_; }
  std::size_t size() const { return measures_.size(); }
  bool empty() const { return measures_.empty(); }
  const Measure& operator[](std::size_t i) const { return measures_[i]; }
  Tick endTick() const { return measures_.empty() ? 0 : measures_.back().start + measures_.back().length; }

  /// Index of the measure containing `tick`, or -1 when outside the map.
  int measureIndexAt(Tick tick) const;

 private:
  std::vector<Measure> measures_;
};

struct QuantizedScore {
  std::vector<Track> tracks;
  MeasureMap measure_map;

  std::size_t noteCount() const;
};

class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A rectangular window of measures over every track of a score. Notes are
/// stored per track-measure cell with onsets relative to the measure start.
class MeasureSlice {
 public:
  struct TrackInfo {
    int instrument = 0;
    std::string name;
    bool isDrum() const { return instrument == kDrumInstrument; }
  };

  MeasureSlice() = default;
  MeasureSlice(std::vector<TrackInfo> tracks, std::vector<int> measure_lengths);

  int numTracks() const { return static_cast<int>(tracks_.size()); }
  int numMeasures() const { return static_cast<int>(lengths_.size()); }
  const std::vector<TrackInfo>& tracks() const { return tracks_; }
  const TrackInfo& track(int t) const { return tracks_.at(static_cast<std::size_t>(t)); }
  const std::vector<int>& measureLengths() const { return lengths_; }
  int measureLength(int m) const { return lengths_.at(static_cast<std::size_t>(m)); }
  /// Tick offset of measure `m` from the slice start.
  Tick measureStart(int m) const { return starts_.at(static_cast<std::size_t>(m)); }
  Tick totalTicks() const;

  const std::vector<Note>& cell(int t, int m) const;
  std::vector<Note>& mutableCell(int t, int m);
  /// Adds a note whose onset is relative to the measure start. Cells stay
  /// sorted and merge duplicate (pitch, onset) pairs keeping the longer note.
  void addNote(int t, int m, const Note& note);

  /// All notes of a track with onsets relative to the slice start.
  std::vector<Note> trackNotes(int t) const;
  std::size_t noteCount() const;
  bool cellEmpty(int t, int m) const { return cell(t, m).empty(); }
  bool trackEmpty(int t) const;

  /// Copy without tracks that have no notes in the window.
  MeasureSlice withoutEmptyTracks() const;

  int source_start_measure = 0;
  Tick source_start_tick = 0;

 private:
  void checkCell(int t, int m) const;

  std::vector<TrackInfo> tracks_;
  std::vector<int> lengths_;
  std::vector<Tick> starts_;
  std::vector<std::vector<std::vector<Note>>> cells_;
};

/// Cuts measures [start, start + count) out of `score`; onsets are
/// re-expressed relative to each measure start.
MeasureSlice slice(const QuantizedScore& score, int start, int count);

/// Rebuilds a score (starting at tick 0) from a slice.
QuantizedScore toScore(const MeasureSlice& slice);

}  // namespace infill
