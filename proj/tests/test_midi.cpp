#include <gtest/gtest.h>

#include "infill/midi.h"
#include "infill/quantize.h"
#include "support/smf_builder.h"

namespace infill {
namespace {

using test::buildSmf;
using test::SmfTrackBuilder;

TEST(ParseMidi, SingleQuarterNote) {
  SmfTrackBuilder t;
  t.noteOn(0, 0, 60).noteOff(480, 0, 60).end();
  const RawScore raw = parseMidi(buildSmf(0, 480, {t}));
  ASSERT_EQ(raw.tracks.size(), 1u);
  ASSERT_EQ(raw.tracks[0].notes.size(), 1u);
  EXPECT_EQ(raw.tracks[0].notes[0].pitch, 60);
  EXPECT_EQ(raw.tracks[0].notes[0].onset, 0);
  EXPECT_EQ(raw.tracks[0].notes[0].duration, 480);
  EXPECT_EQ(raw.tracks[0].notes[0].velocity, 100);
  EXPECT_FALSE(raw.tracks[0].is_drum);
  EXPECT_EQ(raw.ppq, 480);
}

TEST(ParseMidi, ChannelTenIsDrums) {
  SmfTrackBuilder t;
  t.noteOn(0, 9, 36).noteOff(120, 9, 36).noteOn(0, 0, 60).noteOff(120, 0, 60).end();
  const RawScore raw = parseMidi(buildSmf(1, 480, {t}));
  ASSERT_EQ(raw.tracks.size(), 2u);
  int drums = 0;
  for (const auto& tr : raw.tracks) {
    if (tr.is_drum) {
      ++drums;
      EXPECT_EQ(tr.channel, 9);
      EXPECT_EQ(tr.notes.at(0).pitch, 36);
    }
  }
  EXPECT_EQ(drums, 1);
}

TEST(ParseMidi, OverlappingDuplicatesKeepLonger) {
  SmfTrackBuilder t;
  t.noteOn(0, 0, 60).noteOn(0, 0, 60).noteOff(240, 0, 60).noteOff(240, 0, 60).end();
  const RawScore raw = parseMidi(buildSmf(0, 480, {t}));
  ASSERT_EQ(raw.tracks.size(), 1u);
  ASSERT_EQ(raw.tracks[0].notes.size(), 1u);
  EXPECT_EQ(raw.tracks[0].notes[0].duration, 480);
  EXPECT_EQ(raw.merged_duplicates, 1);
}

TEST(ParseMidi, RunningStatusAndVelocityZeroNoteOff) {
  SmfTrackBuilder t;
  // 90 3C 64, then running-status data bytes: 3C 00 (note off), 3E 64, 3E 00.
  t.event(0, {0x90, 60, 100}).event(96, {60, 0}).event(0, {62, 100}).event(96, {62, 0}).end();
  const RawScore raw = parseMidi(buildSmf(0, 96, {t}));
  ASSERT_EQ(raw.tracks.size(), 1u);
  ASSERT_EQ(raw.tracks[0].notes.size(), 2u);
  EXPECT_EQ(raw.tracks[0].notes[1].pitch, 62);
  EXPECT_EQ(raw.tracks[0].notes[1].onset, 96);
  EXPECT_EQ(raw.tracks[0].notes[1].duration, 96);
}

TEST(ParseMidi, FirstProgramChangeWinsAndNameKept) {
  SmfTrackBuilder t;
  t.name("Violin").program(0, 2, 40).noteOn(0, 2, 67).program(10, 2, 41).noteOff(100, 2, 67).end();
  const RawScore raw = parseMidi(buildSmf(1, 480, {t}));
  ASSERT_EQ(raw.tracks.size(), 1u);
  EXPECT_EQ(raw.tracks[0].program, 40);
  EXPECT_EQ(raw.tracks[0].name, "Violin");
}

TEST(ParseMidi, UnpairedNoteClosedAtTrackEndWithWarning) {
  SmfTrackBuilder t;
  t.noteOn(0, 0, 64).end(960);
  const RawScore raw = parseMidi(buildSmf(0, 480, {t}));
  ASSERT_EQ(raw.tracks.at(0).notes.size(), 1u);
  EXPECT_EQ(raw.tracks[0].notes[0].duration, 960);
  EXPECT_FALSE(raw.warnings.empty());
}

TEST(ParseMidi, TimeSignaturesExtractedInOrder) {
  SmfTrackBuilder conductor;
  conductor.timeSignature(0, 3, 2).timeSignature(1440, 6, 3).end();
  SmfTrackBuilder t;
  t.noteOn(0, 0, 60).noteOff(10, 0, 60).end();
  const RawScore raw = parseMidi(buildSmf(1, 480, {conductor, t}));
  ASSERT_EQ(raw.time_signatures.size(), 2u);
  EXPECT_EQ(raw.time_signatures[0].numerator, 3);
  EXPECT_EQ(raw.time_signatures[0].denominator, 4);
  EXPECT_EQ(raw.time_signatures[1].tick, 1440);
  EXPECT_EQ(raw.time_signatures[1].numerator, 6);
  EXPECT_EQ(raw.time_signatures[1].denominator, 8);
  EXPECT_EQ(raw.tracks.size(), 1u);  // conductor has no notes
}

TEST(ParseMidi, SysexAndMetaSkipped) {
  SmfTrackBuilder t;
  t.event(0, {0xF0, 0x03, 0x7E, 0x7F, 0xF7}).event(0, {0xFF, 0x51, 0x03, 0x07, 0xA1, 0x20});
  t.noteOn(0, 0, 60).noteOff(24, 0, 60).end();
  const RawScore raw = parseMidi(buildSmf(0, 24, {t}));
  ASSERT_EQ(raw.tracks.size(), 1u);
  EXPECT_EQ(raw.tracks[0].notes.at(0).duration, 24);
}

TEST(ParseMidi, MalformedHeaderReportsOffset) {
  std::vector<std::uint8_t> bytes = {'M', 'T', 'h', 'x', 0, 0, 0, 6, 0, 0, 0, 1, 1, 0xE0};
  try {
    parseMidi(bytes);
    FAIL() << "expected MidiParseError";
  } catch (const MidiParseError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(ParseMidi, TruncatedChunkReportsOffset) {
  SmfTrackBuilder t;
  t.noteOn(0, 0, 60).noteOff(24, 0, 60).end();
  auto bytes = buildSmf(0, 24, {t});
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(parseMidi(bytes), MidiParseError);
}

TEST(ParseMidi, DataByteWithoutStatusIsError) {
  SmfTrackBuilder t;
  t.raw({0x00, 0x3C, 0x40}).end();
  try {
    parseMidi(buildSmf(0, 24, {t}));
    FAIL() << "expected MidiParseError";
  } catch (const MidiParseError& e) {
    EXPECT_EQ(e.offset(), 14u + 8u + 1u);  // header, chunk header, delta byte
  }
}

TEST(ParseMidi, FormatTwoAndSmpteRejected) {
  SmfTrackBuilder t;
  t.end();
  EXPECT_THROW(parseMidi(buildSmf(2, 480, {t})), MidiParseError);
  auto smpte = buildSmf(1, 480, {t});
  smpte[12] = 0xE7;
  smpte[13] = 0x28;
  EXPECT_THROW(parseMidi(smpte), MidiParseError);
}

TEST(WriteMidi, RoundTripsThroughParserAndQuantizer) {
  QuantizedScore score;
  score.measure_map = MeasureMap::fromLengths({96, 72, 96});
  Track piano{0, "piano", {{60, 0, 24}, {64, 0, 24}, {67, 100, 12}, {72, 180, 768}}};
  Track drums{kDrumInstrument, "drums", {{36, 0, 6}, {38, 24, 6}, {42, 99, 3}}};
  score.tracks = {piano, drums};
  const QuantizeResult back = quantize(parseMidi(writeMidi(score)));
  ASSERT_EQ(back.score.tracks.size(), 2u);
  EXPECT_EQ(back.score.tracks[0].instrument, 0);
  EXPECT_EQ(back.score.tracks[0].notes, piano.notes);
  EXPECT_EQ(back.score.tracks[1].instrument, kDrumInstrument);
  EXPECT_EQ(back.score.tracks[1].notes, drums.notes);
  EXPECT_EQ(back.score.measure_map.measures(), score.measure_map.measures());
  EXPECT_EQ(back.diagnostics.snapped_onsets, 0);
}

}  // namespace
}  // namespace infill
