#include <algorithm>
#include <deque>
#include <fstream>
#include <iterator>
#include <map>
#include <utility>

#include "infill/midi.h"

namespace infill {

MidiParseError::MidiParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}

namespace {

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::size_t pos, std::size_t end)
      : bytes_(bytes), pos_(pos), end_(end) {}

  std::size_t pos() const { return pos_; }
  bool atEnd() const { return pos_ >= end_; }

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint8_t peek() {
    need(1);
    return bytes_[pos_];
  }
  std::uint32_t u16() {
    need(2);
    std::uint32_t v = (std::uint32_t{bytes_[pos_]} << 8) | bytes_[pos_ + 1];
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }
  std::uint32_t vlq() {
    const std::size_t start = pos_;
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7F);
      if ((b & 0x80) == 0) return v;
    }
    throw MidiParseError("variable-length quantity longer than 4 bytes", start);
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  void skip(std::size_t n) { take(n); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > end_) throw MidiParseError("unexpected end of data", pos_);
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
  std::size_t end_;
};

struct OpenNote {
  Tick onset;
  int velocity;
};

struct ChannelState {
  RawTrack track;
  bool has_program = false;
  std::map<int, std::deque<OpenNote>> open;  // pitch -> FIFO of sounding notes
};

void mergeDuplicates(RawTrack& track, int& merged) {
  std::sort(track.notes.begin(), track.notes.end(), [](const RawNote& a, const RawNote& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    if (a.pitch != b.pitch) return a.pitch < b.pitch;
    return a.duration > b.duration;
  });
  std::vector<RawNote> out;
  out.reserve(track.notes.size());
  for (const RawNote& n : track.notes) {
    if (!out.empty() && out.back().onset == n.onset && out.back().pitch == n.pitch) {
      ++merged;  // sorted longest first, keep the survivor
      continue;
    }
    out.push_back(n);
  }
  track.notes = std::move(out);
}

void parseTrack(ByteReader& r, int smf_track, RawScore& score, std::map<std::pair<int, int>, ChannelState>& states) {
  Tick tick = 0;
  std::uint8_t running = 0;
  std::string track_name;
  bool ended = false;

  auto state_for = [&](int channel) -> ChannelState& {
    auto [it, inserted] = states.try_emplace({smf_track, channel});
    if (inserted) {
      it->second.track.smf_track = smf_track;
      it->second.track.channel = channel;
      it->second.track.is_drum = channel == 9;
    }
    return it->second;
  };

  auto close_note = [&](ChannelState& st, int pitch) {
    auto it = st.open.find(pitch);
    if (it == st.open.end() || it->second.empty()) return;  // stray note-off
    const OpenNote on = it->second.front();
    it->second.pop_front();
    st.track.notes.push_back({pitch, on.onset, tick - on.onset, on.velocity});
  };

  while (!r.atEnd() && !ended) {
    tick += r.vlq();
    const std::size_t event_pos = r.pos();
    std::uint8_t status = r.peek();
    if (status & 0x80) {
      r.u8();
    } else {
      if (running == 0) throw MidiParseError("data byte without running status", event_pos);
      status = running;
    }

    if (status == 0xFF) {
      running = 0;
      const std::uint8_t type = r.u8();
      const std::uint32_t len = r.vlq();
      auto data = r.take(len);
      if (type == 0x03) {
        track_name.assign(data.begin(), data.end());
      } else if (type == 0x58) {
        if (len < 2) throw MidiParseError("truncated time signature", event_pos);
        if (data[1] > 6) throw MidiParseError("time signature denominator exponent too large", event_pos);
        score.time_signatures.push_back({tick, data[0], 1 << data[1]});
      } else if (type == 0x2F) {
        ended = true;
      }
      continue;
    }
    if (status == 0xF0 || status == 0xF7) {
      running = 0;
      r.skip(r.vlq());
      continue;
    }
    if (status >= 0xF0) throw MidiParseError("unexpected system message in track", event_pos);

    running = status;
    const int channel = status & 0x0F;
    const int kind = status & 0xF0;
    const std::uint8_t d1 = r.u8();
    if (d1 & 0x80) throw MidiParseError("data byte out of range", r.pos() - 1);
    std::uint8_t d2 = 0;
    if (kind != 0xC0 && kind != 0xD0) {
      d2 = r.u8();
      if (d2 & 0x80) throw MidiParseError("data byte out of range", r.pos() - 1);
    }

    if (kind == 0x90 && d2 > 0) {
      state_for(channel).open[d1].push_back({tick, d2});
    } else if (kind == 0x80 || kind == 0x90) {
      close_note(state_for(channel), d1);
    } else if (kind == 0xC0) {
      ChannelState& st = state_for(channel);
      if (!st.has_program) {
        st.track.program = d1;
        st.has_program = true;
      }
    }
  }
  if (!ended) {
    score.warnings.push_back("track " + std::to_string(smf_track) + " has no end-of-track event");
  }

  for (auto& [key, st] : states) {
    if (key.first != smf_track) continue;
    st.track.name = track_name;
    for (auto& [pitch, fifo] : st.open) {
      for (const OpenNote& on : fifo) {
        st.track.notes.push_back({pitch, on.onset, tick - on.onset, on.velocity});
        score.warnings.push_back("unpaired note-on (pitch " + std::to_string(pitch) + ", tick " +
                                 std::to_string(on.onset) + ") in track " + std::to_string(smf_track) +
                                 " closed at track end");
      }
      fifo.clear();
    }
  }
}

}  // namespace

RawScore parseMidi(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, 0, bytes.size());
  if (bytes.size() < 14) throw MidiParseError("file too short for an SMF header", 0);
  auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), "MThd")) throw MidiParseError("missing MThd header", 0);
  const std::uint32_t header_len = r.u32();
  if (header_len < 6) throw MidiParseError("header chunk too short", 4);
  const std::size_t header_body = r.pos();

  RawScore score;
  score.format = static_cast<int>(r.u16());
  const int ntracks = static_cast<int>(r.u16());
  const std::uint32_t division = r.u16();
  if (score.format != 0 && score.format != 1) {
    throw MidiParseError("unsupported SMF format " + std::to_string(score.format), header_body);
  }
  if (division & 0x8000) throw MidiParseError("SMPTE time division is not supported", header_body + 4);
  if (division == 0) throw MidiParseError("zero ticks per quarter note", header_body + 4);
  score.ppq = static_cast<int>(division);
  r.skip(header_len - 6);

  std::map<std::pair<int, int>, ChannelState> states;
  int track_index = 0;
  while (!r.atEnd() && track_index < ntracks) {
    const std::size_t chunk_pos = r.pos();
    auto id = r.take(4);
    const std::uint32_t len = r.u32();
    if (r.pos() + len > bytes.size()) throw MidiParseError("chunk length exceeds file size", chunk_pos + 4);
    if (std::equal(id.begin(), id.end(), "MTrk")) {
      ByteReader tr(bytes, r.pos(), r.pos() + len);
      parseTrack(tr, track_index, score, states);
      ++track_index;
    }
    r.skip(len);
  }
  if (track_index < ntracks) {
    score.warnings.push_back("header declares " + std::to_string(ntracks) + " tracks, found " +
                             std::to_string(track_index));
  }

  for (auto& [key, st] : states) {
    if (st.track.notes.empty()) continue;
    mergeDuplicates(st.track, score.merged_duplicates);
    score.tracks.push_back(std::move(st.track));
  }
  std::stable_sort(score.time_signatures.begin(), score.time_signatures.end(),
                   [](const TimeSignature& a, const TimeSignature& b) { return a.tick < b.tick; });
  return score;
}

RawScore readMidiFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parseMidi(bytes);
}

}  // namespace infill
