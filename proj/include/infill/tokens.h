// Token vocabulary of the infilling language, integer ids and text spelling.
//
// Ids are assigned family by family in the order of TokenKind, each family
// enumerating its payload range in ascending order:
//
//   family            spelling          payload              count
//   instrument        <inst:N>          0..128               129
//   measure separator <sep>                                    1
//   measure length    <mlen:N>          1..192               192
//   position          <pos:N>           0..191               192
//   note-on           <non:N>           0..127               128
//   duration          <dur:N>           1..768               768
//   mask              <mask:N>          0..255               256
//   fill              <fill:N>          0..255               256
//   end of target     <eot>                                    1
//   horizontal        <horiz:N>         0..5                   6
//   rhythmic interest <interest:N>      0..2                   3
//   vertical          <vert:N>          0..4                   5
//   pitch classes     <pcs:N>           0..4                   5
//   step propensity   <step:N>          0..6                   7
//   leap propensity   <leap:N>          0..6                   7
//   dnoc              <dnoc>                                   1
//   range markers     <hi_strict> <lo_strict> <hi_loose> <lo_loose>  4
//   track reference   <track:N>         0..63                 64
//   masked pitch 1D   <mp1d>                                   1
//   masked pitch 2D   <mp2d:O:P>        1<=P<=O<=8            36
//
// for a total of 2062 tokens.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "infill/score.h"

namespace infill {

inline constexpr int kMaxMasks = 256;
inline constexpr int kMaxTracks = 64;
inline constexpr int kMax2DCount = 8;

enum class TokenKind : std::uint8_t {
  kInstrument,
  kMeasureSep,
  kMeasureLength,
  kPosition,
  kNoteOn,
  kDuration,
  kMask,
  kFill,
  kEndOfTarget,
  kHoriz,
  kInterest,
  kVert,
  kPitchClasses,
  kStep,
  kLeap,
  kDnoc,
  kRangeHighStrict,
  kRangeLowStrict,
  kRangeHighLoose,
  kRangeLowLoose,
  kTrackRef,
  kMaskedPitch1D,
  kMaskedPitch2D,
};

struct Token {
  TokenKind kind = TokenKind::kEndOfTarget;
  int a = 0;  // primary payload
  int b = 0;  // pitch-class count of a 2D masked pitch

  friend bool operator==(const Token&, const Token&) = default;

  static constexpr Token instrument(int program) { return {TokenKind::kInstrument, program}; }
  static constexpr Token measureSep() { return {TokenKind::kMeasureSep}; }
  static constexpr Token measureLength(int ticks) { return {TokenKind::kMeasureLength, ticks}; }
  static constexpr Token position(int tick) { return {TokenKind::kPosition, tick}; }
  static constexpr Token noteOn(int pitch) { return {TokenKind::kNoteOn, pitch}; }
  static constexpr Token duration(int ticks) { return {TokenKind::kDuration, ticks}; }
  static constexpr Token mask(int k) { return {TokenKind::kMask, k}; }
  static constexpr Token fill(int k) { return {TokenKind::kFill, k}; }
  static constexpr Token endOfTarget() { return {TokenKind::kEndOfTarget}; }
  static constexpr Token trackRef(int track) { return {TokenKind::kTrackRef, track}; }
  static constexpr Token maskedPitch1D() { return {TokenKind::kMaskedPitch1D}; }
  static constexpr Token maskedPitch2D(int onsets, int classes) { return {TokenKind::kMaskedPitch2D, onsets, classes}; }
};

using TokenSequence = std::vector<Token>;

class TokenError : public std::runtime_error {
 public:
  TokenError(const std::string& what, std::size_t index)
      : std::runtime_error(what + " (token " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

bool isValid(const Token& token);

int vocabularySize();
/// Every token in id order.
const std::vector<Token>& vocabulary();
int tokenId(const Token& token);
Token tokenFromId(int id);
/// FNV-1a over the newline-joined spellings of the whole vocabulary.
std::uint64_t vocabularyHash();

std::vector<int> toIds(const TokenSequence& seq);
TokenSequence fromIds(const std::vector<int>& ids);

std::string spelling(const Token& token);
Token parseSpelling(std::string_view text, std::size_t index = 0);
std::string renderText(const TokenSequence& seq);
TokenSequence parseText(std::string_view text);

}  // namespace infill
