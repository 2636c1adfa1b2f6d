// Standard MIDI File (type 0/1) reading and a minimal type-1 writer.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "infill/score.h"

namespace infill {

class MidiParseError : public std::runtime_error {
 public:
  MidiParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct RawNote {
  int pitch = 0;
  Tick onset = 0;     // source ticks
  Tick duration = 0;  // source ticks, may be 0
  int velocity = 0;
};

struct RawTrack {
  int smf_track = 0;
  int channel = 0;
  int program = 0;  // first program change seen for the channel, 0 if none
  std::string name;
  bool is_drum = false;
  std::vector<RawNote> notes;
};

struct TimeSignature {
  Tick tick = 0;  // source ticks
  int numerator = 4;
  int denominator = 4;
};

struct RawScore {
  int ppq = 480;
  int format = 1;
  std::vector<RawTrack> tracks;
  std::vector<TimeSignature> time_signatures;
  std::vector<std::string> warnings;
  int merged_duplicates = 0;
};

RawScore parseMidi(std::span<const std::uint8_t> bytes);
RawScore readMidiFile(const std::string& path);

/// Serializes a quantized score as SMF type 1 at 24 PPQ: one conductor track
/// with time signatures, then one track per score track. Drums go to
/// channel 10, melodic tracks take the remaining channels in order.
std::vector<std::uint8_t> writeMidi(const QuantizedScore& score);
void writeMidiFile(const QuantizedScore& score, const std::string& path);

/// Inverse of the grid conversion: a quantized score as a 24 PPQ raw score.
RawScore toRaw(const QuantizedScore& score);

}  // namespace infill
