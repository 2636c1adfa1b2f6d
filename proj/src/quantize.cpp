#include "infill/quantize.h"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <string>

namespace infill {

std::string QuantizeDiagnostics::listing() const {
  std::ostringstream out;
  out << "snapped_onsets " << snapped_onsets << "\n"
      << "merged_duplicates " << merged_duplicates << "\n"
      << "clamped_durations " << clamped_durations << "\n"
      << "deferred_time_signatures " << deferred_time_signatures << "\n";
  for (const auto& line : lines) out << line << "\n";
  return out.str();
}

Tick snapOnset(Tick source_tick, int ppq) {
  const Tick scaled = source_tick * kTicksPerQuarter;  // in units of 1/ppq grid ticks
  const Tick quarter = scaled / (Tick{kTicksPerQuarter} * ppq);
  Tick best = quarter * kTicksPerQuarter;
  Tick best_dist = -1;
  auto consider = [&](Tick candidate) {
    const Tick dist = std::llabs(candidate * ppq - scaled);
    if (best_dist < 0 || dist < best_dist) {
      best = candidate;
      best_dist = dist;
    }
  };
  for (int offset : kValidOnsetOffsets) consider(quarter * kTicksPerQuarter + offset);
  consider((quarter + 1) * kTicksPerQuarter);
  return best;
}

int rescaleDuration(Tick source_ticks, int ppq) {
  const Tick scaled = (source_ticks * kTicksPerQuarter * 2 + ppq) / (Tick{2} * ppq);
  return static_cast<int>(std::clamp<Tick>(scaled, 1, kMaxDurationTicks));
}

int measureTicks(int numerator, int denominator, int measure_index) {
  const std::string name = std::to_string(numerator) + "/" + std::to_string(denominator);
  const int whole = 4 * kTicksPerQuarter;
  if (numerator < 1 || denominator < 1 || (numerator * whole) % denominator != 0) {
    throw UnsupportedMeterError("measure " + std::to_string(measure_index) + ": time signature " + name +
                                    " does not fit the 24-tick grid",
                                measure_index);
  }
  const int ticks = numerator * whole / denominator;
  if (ticks > kMaxMeasureTicks) {
    throw UnsupportedMeterError("measure " + std::to_string(measure_index) + ": time signature " + name + " spans " +
                                    std::to_string(ticks) + " ticks, more than 8 quarter notes",
                                measure_index);
  }
  return ticks;
}

namespace {

MeasureMap buildMeasureMap(const RawScore& raw, Tick last_onset, QuantizeDiagnostics& diag) {
  struct Change {
    Tick tick;
    int numerator;
    int denominator;
  };
  std::vector<Change> changes;
  for (const auto& ts : raw.time_signatures) {
    const Tick tick = (ts.tick * kTicksPerQuarter * 2 + raw.ppq) / (Tick{2} * raw.ppq);
    changes.push_back({tick, ts.numerator, ts.denominator});
  }

  std::vector<Measure> measures;
  Tick start = 0;
  int length = kDefaultMeasureTicks;
  std::size_t next = 0;
  do {
    bool changed = false;
    int numerator = 4;
    int denominator = 4;
    while (next < changes.size() && changes[next].tick <= start) {
      if (changes[next].tick < start) {
        ++diag.deferred_time_signatures;
        diag.lines.push_back("time signature at tick " + std::to_string(changes[next].tick) +
                             " deferred to measure boundary " + std::to_string(start));
      }
      numerator = changes[next].numerator;
      denominator = changes[next].denominator;
      changed = true;
      ++next;
    }
    if (changed) length = measureTicks(numerator, denominator, static_cast<int>(measures.size()));
    measures.push_back({start, length});
    start += length;
  } while (start <= last_onset);
  return MeasureMap(std::move(measures));
}

}  // namespace

QuantizeResult quantize(const RawScore& raw) {
  if (raw.ppq <= 0) throw std::invalid_argument("ppq must be positive");
  QuantizeResult result;
  QuantizeDiagnostics& diag = result.diagnostics;
  diag.merged_duplicates = raw.merged_duplicates;

  Tick last_onset = 0;
  for (const RawTrack& rt : raw.tracks) {
    Track track;
    track.instrument = rt.is_drum ? kDrumInstrument : std::clamp(rt.program, 0, 127);
    track.name = rt.name;
    for (const RawNote& rn : rt.notes) {
      Note n;
      n.pitch = rn.pitch;
      n.onset = snapOnset(rn.onset, raw.ppq);
      if (n.onset * raw.ppq != rn.onset * kTicksPerQuarter) {
        ++diag.snapped_onsets;
        if (diag.lines.size() < 1000) {
          diag.lines.push_back("snap: track " + std::to_string(rt.smf_track) + " channel " +
                               std::to_string(rt.channel) + " pitch " + std::to_string(rn.pitch) + " source tick " +
                               std::to_string(rn.onset) + " -> " + std::to_string(n.onset));
        }
      }
      const Tick unclamped = (rn.duration * kTicksPerQuarter * 2 + raw.ppq) / (Tick{2} * raw.ppq);
      n.duration = rescaleDuration(rn.duration, raw.ppq);
      if (unclamped != n.duration) ++diag.clamped_durations;
      track.notes.push_back(n);
    }
    sortNotes(track.notes);
    std::vector<Note> merged;
    for (const Note& n : track.notes) {
      if (!merged.empty() && merged.back().onset == n.onset && merged.back().pitch == n.pitch) {
        merged.back().duration = std::max(merged.back().duration, n.duration);
        ++diag.merged_duplicates;
        continue;
      }
      merged.push_back(n);
    }
    track.notes = std::move(merged);
    if (!track.notes.empty()) last_onset = std::max(last_onset, track.notes.back().onset);
    result.score.tracks.push_back(std::move(track));
  }
  if (diag.merged_duplicates > 0) {
    diag.lines.push_back("merged " + std::to_string(diag.merged_duplicates) + " duplicate (pitch, onset) notes");
  }

  result.score.measure_map = buildMeasureMap(raw, last_onset, diag);
  return result;
}

QuantizeResult loadScore(const std::string& path) { return quantize(readMidiFile(path)); }

}  // namespace infill
