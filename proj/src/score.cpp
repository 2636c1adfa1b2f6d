#include "infill/score.h"

#include <algorithm>
#include <string>

namespace infill {

void sortNotes(std::vector<Note>& notes) {
  std::sort(notes.begin(), notes.end(), [](const Note& a, const Note& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    if (a.pitch != b.pitch) return a.pitch < b.pitch;
    return a.duration < b.duration;
  });
}

MeasureMap::MeasureMap(std::vector<Measure> measures) : measures_(std::move(measures)) {
  Tick expected = measures_.empty() ? 0 : measures_.front().start;
  for (std::size_t i = 0; i < measures_.size(); ++i) {
    const Measure& m = measures_[i];
    if (m.start != expected) {
      throw std::invalid_argument("measure " + std::to_string(i) + " is not contiguous with its predecessor");
    }
    if (m.length < 1 || m.length > kMaxMeasureTicks) {
      throw std::invalid_argument("measure " + std::to_string(i) + " has unsupported length " +
                                  std::to_string(m.length));
    }
    expected += m.length;
  }
}

MeasureMap MeasureMap::fromLengths(const std::vector<int>& lengths) {
  std::vector<Measure> measures;
  measures.reserve(lengths.size());
  Tick start = 0;
  for (int length : lengths) {
    measures.push_back({start, length});
    start += length;
  }
  return MeasureMap(std::move(measures));
}

int MeasureMap::measureIndexAt(Tick tick) const {
  if (measures_.empty() || tick < measures_.front().start || tick >= endTick()) return -1;
  auto it = std::upper_bound(measures_.begin(), measures_.end(), tick,
                             [](Tick t, const Measure& m) { return t < m.start; });
  return static_cast<int>(std::distance(measures_.begin(), it)) - 1;
}

std::size_t QuantizedScore::noteCount() const {
  std::size_t n = 0;
  for (const auto& track : tracks) n += track.notes.size();
  return n;
}

MeasureSlice::MeasureSlice(std::vector<TrackInfo> tracks, std::vector<int> measure_lengths)
    : tracks_(std::move(tracks)), lengths_(std::move(measure_lengths)) {
  starts_.reserve(lengths_.size());
  Tick start = 0;
  for (int length : lengths_) {
    if (length < 1 || length > kMaxMeasureTicks) {
      throw std::invalid_argument("unsupported measure length " + std::to_string(length));
    }
    starts_.push_back(start);
    start += length;
  }
  cells_.assign(tracks_.size(), std::vector<std::vector<Note>>(lengths_.size()));
}

Tick MeasureSlice::totalTicks() const {
  return lengths_.empty() ? 0 : starts_.back() + lengths_.back();
}

void MeasureSlice::checkCell(int t, int m) const {
  if (t < 0 || t >= numTracks() || m < 0 || m >= numMeasures()) {
    throw BoundsError("track-measure (" + std::to_string(t) + ", " + std::to_string(m) +
                      ") outside a " + std::to_string(numTracks()) + "x" + std::to_string(numMeasures()) +
                      " slice");
  }
}

const std::vector<Note>& MeasureSlice::cell(int t, int m) const {
  checkCell(t, m);
  return cells_[static_cast<std::size_t>(t)][static_cast<std::size_t>(m)];
}

std::vector<Note>& MeasureSlice::mutableCell(int t, int m) {
  checkCell(t, m);
  return cells_[static_cast<std::size_t>(t)][static_cast<std::size_t>(m)];
}

void MeasureSlice::addNote(int t, int m, const Note& note) {
  auto& notes = mutableCell(t, m);
  if (note.onset < 0 || note.onset >= measureLength(m)) {
    throw BoundsError("onset " + std::to_string(note.onset) + " outside measure " + std::to_string(m));
  }
  auto it = std::find_if(notes.begin(), notes.end(),
                         [&](const Note& n) { return n.pitch == note.pitch && n.onset == note.onset; });
  if (it != notes.end()) {
    it->duration = std::max(it->duration, note.duration);
    return;
  }
  notes.push_back(note);
  sortNotes(notes);
}

std::vector<Note> MeasureSlice::trackNotes(int t) const {
  std::vector<Note> out;
  for (int m = 0; m < numMeasures(); ++m) {
    for (Note n : cell(t, m)) {
      n.onset += measureStart(m);
      out.push_back(n);
    }
  }
  return out;
}

std::size_t MeasureSlice::noteCount() const {
  std::size_t n = 0;
  for (const auto& track : cells_) {
    for (const auto& c : track) n += c.size();
  }
  return n;
}

bool MeasureSlice::trackEmpty(int t) const {
  for (int m = 0; m < numMeasures(); ++m) {
    if (!cell(t, m).empty()) return false;
  }
  return true;
}

MeasureSlice MeasureSlice::withoutEmptyTracks() const {
  std::vector<TrackInfo> kept;
  std::vector<int> index;
  for (int t = 0; t < numTracks(); ++t) {
    if (!trackEmpty(t)) {
      kept.push_back(tracks_[static_cast<std::size_t>(t)]);
      index.push_back(t);
    }
  }
  MeasureSlice out(std::move(kept), lengths_);
  for (std::size_t i = 0; i < index.size(); ++i) {
    out.cells_[i] = cells_[static_cast<std::size_t>(index[i])];
  }
  out.source_start_measure = source_start_measure;
  out.source_start_tick = source_start_tick;
  return out;
}

MeasureSlice slice(const QuantizedScore& score, int start, int count) {
  const int total = static_cast<int>(score.measure_map.size());
  if (start < 0 || count < 0 || start + count > total) {
    throw BoundsError("slice [" + std::to_string(start) + ", " + std::to_string(start + count) +
                      ") outside a score of " + std::to_string(total) + " measures");
  }
  std::vector<MeasureSlice::TrackInfo> infos;
  infos.reserve(score.tracks.size());
  for (const auto& track : score.tracks) infos.push_back({track.instrument, track.name});
  std::vector<int> lengths;
  for (int m = start; m < start + count; ++m) lengths.push_back(score.measure_map[static_cast<std::size_t>(m)].length);

  MeasureSlice out(std::move(infos), std::move(lengths));
  out.source_start_measure = start;
  out.source_start_tick = count > 0 ? score.measure_map[static_cast<std::size_t>(start)].start : 0;
  for (std::size_t t = 0; t < score.tracks.size(); ++t) {
    for (const Note& note : score.tracks[t].notes) {
      const int m = score.measure_map.measureIndexAt(note.onset);
      if (m < start || m >= start + count) continue;
      Note rel = note;
      rel.onset -= score.measure_map[static_cast<std::size_t>(m)].start;
      out.mutableCell(static_cast<int>(t), m - start).push_back(rel);
    }
  }
  return out;
}

QuantizedScore toScore(const MeasureSlice& s) {
  QuantizedScore score;
  score.measure_map = MeasureMap::fromLengths(s.measureLengths());
  for (int t = 0; t < s.numTracks(); ++t) {
    Track track;
    track.instrument = s.track(t).instrument;
    track.name = s.track(t).name;
    track.notes = s.trackNotes(t);
    sortNotes(track.notes);
    score.tracks.push_back(std::move(track));
  }
  return score;
}

}  // namespace infill
