#include <algorithm>
#include <fstream>
#include <tuple>

#include "infill/midi.h"

namespace infill {

namespace {

void putU16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void putU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void putVlq(std::vector<std::uint8_t>& out, std::uint32_t v) {
  std::uint8_t buf[5];
  int n = 0;
  buf[n++] = static_cast<std::uint8_t>(v & 0x7F);
  while (v >>= 7) buf[n++] = static_cast<std::uint8_t>((v & 0x7F) | 0x80);
  while (n > 0) out.push_back(buf[--n]);
}

struct Event {
  Tick tick;
  int order;  // note-offs before metas before note-ons at equal ticks
  std::vector<std::uint8_t> bytes;
};

void appendTrackChunk(std::vector<std::uint8_t>& out, std::vector<Event> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return std::tie(a.tick, a.order) < std::tie(b.tick, b.order); });
  std::vector<std::uint8_t> body;
  Tick last = 0;
  for (const Event& e : events) {
    putVlq(body, static_cast<std::uint32_t>(e.tick - last));
    last = e.tick;
    body.insert(body.end(), e.bytes.begin(), e.bytes.end());
  }
  putVlq(body, 0);
  body.insert(body.end(), {0xFF, 0x2F, 0x00});
  out.insert(out.end(), {'M', 'T', 'r', 'k'});
  putU32(out, static_cast<std::uint32_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
}

/// Smallest power-of-two denominator that expresses `ticks` exactly.
std::pair<int, int> timeSignatureFor(int ticks) {
  for (int den = 4, exp = 2; exp <= 6; den *= 2, ++exp) {
    // one beat of 1/den lasts 96/den ticks
    if ((ticks * den) % (4 * kTicksPerQuarter) == 0) return {ticks * den / (4 * kTicksPerQuarter), exp};
  }
  for (int den = 2, exp = 1; exp >= 0; den /= 2, --exp) {
    if ((ticks * den) % (4 * kTicksPerQuarter) == 0) return {ticks * den / (4 * kTicksPerQuarter), exp};
  }
  throw std::invalid_argument("measure of " + std::to_string(ticks) + " ticks has no time signature");
}

}  // namespace

std::vector<std::uint8_t> writeMidi(const QuantizedScore& score) {
  std::vector<std::uint8_t> out = {'M', 'T', 'h', 'd'};
  putU32(out, 6);
  putU16(out, 1);
  putU16(out, static_cast<std::uint32_t>(score.tracks.size() + 1));
  putU16(out, kTicksPerQuarter);

  std::vector<Event> conductor;
  int previous = -1;
  for (const Measure& m : score.measure_map.measures()) {
    if (m.length == previous) continue;
    previous = m.length;
    auto [num, exp] = timeSignatureFor(m.length);
    conductor.push_back({m.start, 1,
                         {0xFF, 0x58, 0x04, static_cast<std::uint8_t>(num), static_cast<std::uint8_t>(exp), 24, 8}});
  }
  appendTrackChunk(out, std::move(conductor));

  int next_channel = 0;
  for (const Track& track : score.tracks) {
    int channel = 9;
    if (!track.isDrum()) {
      channel = next_channel;
      next_channel = (next_channel + 1) % 16;
      if (next_channel == 9) next_channel = 10;
    }
    std::vector<Event> events;
    if (!track.name.empty()) {
      std::vector<std::uint8_t> meta = {0xFF, 0x03};
      putVlq(meta, static_cast<std::uint32_t>(track.name.size()));
      meta.insert(meta.end(), track.name.begin(), track.name.end());
      events.push_back({0, 1, std::move(meta)});
    }
    if (!track.isDrum()) {
      events.push_back({0, 1, {static_cast<std::uint8_t>(0xC0 | channel), static_cast<std::uint8_t>(track.instrument)}});
    }
    for (const Note& n : track.notes) {
      const auto pitch = static_cast<std::uint8_t>(n.pitch);
      events.push_back({n.onset, 2, {static_cast<std::uint8_t>(0x90 | channel), pitch, 80}});
      events.push_back({n.onset + n.duration, 0, {static_cast<std::uint8_t>(0x80 | channel), pitch, 0}});
    }
    appendTrackChunk(out, std::move(events));
  }
  return out;
}

void writeMidiFile(const QuantizedScore& score, const std::string& path) {
  const auto bytes = writeMidi(score);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

RawScore toRaw(const QuantizedScore& score) {
  RawScore raw;
  raw.ppq = kTicksPerQuarter;
  int previous = -1;
  for (const Measure& m : score.measure_map.measures()) {
    if (m.length == previous) continue;
    previous = m.length;
    auto [num, exp] = timeSignatureFor(m.length);
    raw.time_signatures.push_back({m.start, num, 1 << exp});
  }
  for (std::size_t i = 0; i < score.tracks.size(); ++i) {
    const Track& t = score.tracks[i];
    RawTrack rt;
    rt.smf_track = static_cast<int>(i);
    rt.is_drum = t.isDrum();
    rt.channel = rt.is_drum ? 9 : 0;
    rt.program = rt.is_drum ? 0 : t.instrument;
    rt.name = t.name;
    for (const Note& n : t.notes) rt.notes.push_back({n.pitch, n.onset, n.duration, 80});
    raw.tracks.push_back(std::move(rt));
  }
  return raw;
}

}  // namespace infill
