// Mapping between measure slices (with masks and controls) and prompt /
// target token sequences.
//
// Prompt layout, per track in order:
//
//   <inst:I> <mlen:L> cell <sep> <mlen:L> cell ...
//
// where an unmasked cell is its notes as <pos> (<non> <dur>)+ groups and a
// masked cell is <mask:k>, its per-cell control tokens, then optional
// rhythmic conditioning as <pos> <mp1d|mp2d> <dur> triples. Track-level
// control blocks follow all tracks: <track:t> and that track's controls.
//
// Target layout: <fill:k> followed by the notes of masked cell k, for k
// ascending, then <eot>.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "infill/measurements.h"
#include "infill/score.h"
#include "infill/tokens.h"

namespace infill {

enum class Conditioning { kNone, k1D, k2D };

using Cell = std::pair<int, int>;  // (track, measure)

/// Masked cells; iteration order of `cells` (track-major) is the mask index.
struct MaskSpec {
  std::map<Cell, Conditioning> cells;

  void add(int track, int measure, Conditioning conditioning = Conditioning::kNone) {
    cells[{track, measure}] = conditioning;
  }
  bool contains(int track, int measure) const { return cells.count({track, measure}) > 0; }
  bool empty() const { return cells.empty(); }
  std::size_t size() const { return cells.size(); }
  std::vector<Cell> ordered() const;
  /// Mask index of a cell, -1 when not masked.
  int indexOf(int track, int measure) const;
};

struct TrackControlRequest {
  bool horiz = false;
  bool interest = false;
  bool vert = false;
  bool pcs = false;
  bool step = false;
  bool leap = false;
  bool strict_range = false;
  bool loose_range = false;

  bool any() const { return horiz || interest || vert || pcs || step || leap || strict_range || loose_range; }
};

struct CellControlRequest {
  bool horiz = false;
  bool vert = false;
  bool pcs = false;
  bool dnoc = false;
  bool strict_range = false;

  bool any() const { return horiz || vert || pcs || dnoc || strict_range; }
};

/// Which controls to emit. Values are always computed from masked content.
struct ControlSpec {
  std::map<int, TrackControlRequest> tracks;
  std::map<Cell, CellControlRequest> cells;
};

enum class ControlKind { kHoriz, kInterest, kVert, kPitchClasses, kStep, kLeap, kDnoc, kStrictRange, kLooseRange };

/// A control value as it appears in a prompt: a bin, the dnoc flag, or a
/// pitch range.
struct Control {
  ControlKind kind = ControlKind::kHoriz;
  int bin = 0;
  PitchRange range{};

  friend bool operator==(const Control&, const Control&) = default;

  TokenSequence tokens() const;
  std::string text() const { return renderText(tokens()); }
  /// The measurement a binned control refers to; throws for dnoc and ranges.
  MeasureKind measureKind() const;
  bool isBinned() const;
};

/// Parses a control from its token spelling, e.g. "<horiz:2>" or
/// "<hi_strict> <non:72> <lo_strict> <non:60>".
Control parseControl(const std::string& text);

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EncodeDiagnostics {
  int clamped_2d = 0;  // masked-pitch counts capped at 8
};

struct PromptTargetPair {
  TokenSequence prompt;
  TokenSequence target;
  EncodeDiagnostics diagnostics;
};

PromptTargetPair encode(const MeasureSlice& slice, const MaskSpec& masks, const ControlSpec& controls = {});

/// Note tokens for one cell: positions ascending, pitches descending.
void appendNoteTokens(TokenSequence& out, const std::vector<Note>& notes);

struct MaskedCellGeometry {
  int track = 0;
  int measure = 0;
  int length = 0;
};

/// Masked cells in mask-index order with their measure lengths.
struct MaskGeometry {
  std::vector<MaskedCellGeometry> cells;
  static MaskGeometry of(const MeasureSlice& slice, const MaskSpec& masks);
};

class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at token " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct DecodeResult {
  std::vector<std::vector<Note>> cells;  // indexed by mask index, onsets within the measure
  bool complete = false;                 // saw <eot>
  int blocks = 0;                        // fill blocks decoded
  std::optional<std::string> error;      // set by salvage only
};

/// Strict decode. A target without <eot> decodes its closed fill blocks and
/// reports complete = false; grammar violations throw DecodeError.
DecodeResult decodeTarget(const TokenSequence& target, const MaskGeometry& geometry);

/// Never throws: keeps the fill blocks closed before the first violation.
DecodeResult salvageTarget(const TokenSequence& target, const MaskGeometry& geometry);

struct MaskedCellLayout {
  int track = 0;
  int measure = 0;
  Conditioning conditioning = Conditioning::kNone;
  std::vector<RhythmEntry> rhythm;  // masked-pitch conditioning, if any
  std::vector<Control> controls;
};

/// What a prompt says about the slice it was built from.
struct PromptLayout {
  std::vector<int> instruments;
  std::vector<int> measure_lengths;
  std::vector<MaskedCellLayout> masked;  // in mask-index order
  std::map<int, std::vector<Control>> track_controls;

  /// Slice holding the prompt's unmasked notes.
  MeasureSlice context;

  MaskGeometry geometry() const;
  MaskSpec maskSpec() const;
};

PromptLayout parsePrompt(const TokenSequence& prompt);

/// Strict range: a note at each extreme, none outside.
bool satisfiesStrictRange(std::span<const Note> notes, PitchRange range);
/// Loose range: a note within 7 semitones of each extreme, none outside.
bool satisfiesLooseRange(std::span<const Note> notes, PitchRange range);

}  // namespace infill
