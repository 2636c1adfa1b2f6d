#include "infill/codec.h"

#include <algorithm>
#include <map>
#include <optional>
#include <span>

namespace infill {

std::vector<Cell> MaskSpec::ordered() const {
  std::vector<Cell> out;
  out.reserve(cells.size());
  for (const auto& [cell, cond] : cells) out.push_back(cell);
  return out;
}

int MaskSpec::indexOf(int track, int measure) const {
  auto it = cells.find({track, measure});
  if (it == cells.end()) return -1;
  return static_cast<int>(std::distance(cells.begin(), it));
}

TokenSequence Control::tokens() const {
  switch (kind) {
    case ControlKind::kHoriz: return {{TokenKind::kHoriz, bin}};
    case ControlKind::kInterest: return {{TokenKind::kInterest, bin}};
    case ControlKind::kVert: return {{TokenKind::kVert, bin}};
    case ControlKind::kPitchClasses: return {{TokenKind::kPitchClasses, bin}};
    case ControlKind::kStep: return {{TokenKind::kStep, bin}};
    case ControlKind::kLeap: return {{TokenKind::kLeap, bin}};
    case ControlKind::kDnoc: return {{TokenKind::kDnoc}};
    case ControlKind::kStrictRange:
      return {{TokenKind::kRangeHighStrict}, Token::noteOn(range.high), {TokenKind::kRangeLowStrict},
              Token::noteOn(range.low)};
    case ControlKind::kLooseRange:
      return {{TokenKind::kRangeHighLoose}, Token::noteOn(range.high), {TokenKind::kRangeLowLoose},
              Token::noteOn(range.low)};
  }
  return {};
}

bool Control::isBinned() const {
  return kind != ControlKind::kDnoc && kind != ControlKind::kStrictRange && kind != ControlKind::kLooseRange;
}

MeasureKind Control::measureKind() const {
  switch (kind) {
    case ControlKind::kHoriz: return MeasureKind::kHorizontalDensity;
    case ControlKind::kInterest: return MeasureKind::kRhythmicInterest;
    case ControlKind::kVert: return MeasureKind::kVerticalDensity;
    case ControlKind::kPitchClasses: return MeasureKind::kPitchClassesPerOnset;
    case ControlKind::kStep: return MeasureKind::kStepPropensity;
    case ControlKind::kLeap: return MeasureKind::kLeapPropensity;
    default: throw std::invalid_argument("control " + text() + " is not binned");
  }
}

namespace {

std::optional<ControlKind> binnedKind(TokenKind kind) {
  switch (kind) {
    case TokenKind::kHoriz: return ControlKind::kHoriz;
    case TokenKind::kInterest: return ControlKind::kInterest;
    case TokenKind::kVert: return ControlKind::kVert;
    case TokenKind::kPitchClasses: return ControlKind::kPitchClasses;
    case TokenKind::kStep: return ControlKind::kStep;
    case TokenKind::kLeap: return ControlKind::kLeap;
    default: return std::nullopt;
  }
}

bool startsControl(const Token& t) {
  return binnedKind(t.kind).has_value() || t.kind == TokenKind::kDnoc || t.kind == TokenKind::kRangeHighStrict ||
         t.kind == TokenKind::kRangeHighLoose;
}

// Reads one control starting at seq[i]; advances i past it.
Control readControl(const TokenSequence& seq, std::size_t& i) {
  const Token& t = seq[i];
  if (auto kind = binnedKind(t.kind)) {
    ++i;
    return {*kind, t.a, {}};
  }
  if (t.kind == TokenKind::kDnoc) {
    ++i;
    return {ControlKind::kDnoc, 0, {}};
  }
  const bool strict = t.kind == TokenKind::kRangeHighStrict;
  if (!strict && t.kind != TokenKind::kRangeHighLoose) throw DecodeError("expected a control token", i);
  const TokenKind low_marker = strict ? TokenKind::kRangeLowStrict : TokenKind::kRangeLowLoose;
  if (i + 3 >= seq.size() || seq[i + 1].kind != TokenKind::kNoteOn || seq[i + 2].kind != low_marker ||
      seq[i + 3].kind != TokenKind::kNoteOn) {
    throw DecodeError("malformed pitch range control", i);
  }
  Control c{strict ? ControlKind::kStrictRange : ControlKind::kLooseRange, 0, {seq[i + 3].a, seq[i + 1].a}};
  if (c.range.low > c.range.high) throw DecodeError("pitch range low above high", i);
  i += 4;
  return c;
}

bool isTrackControl(ControlKind kind) { return kind != ControlKind::kDnoc; }

bool isCellControl(ControlKind kind) {
  return kind == ControlKind::kHoriz || kind == ControlKind::kVert || kind == ControlKind::kPitchClasses ||
         kind == ControlKind::kDnoc || kind == ControlKind::kStrictRange;
}

std::string cellName(int t, int m) { return "track-measure (" + std::to_string(t) + ", " + std::to_string(m) + ")"; }

template <typename Fn>
Control measured(ControlKind kind, const std::string& control, const std::string& where, Fn&& fn) {
  try {
    return fn(kind);
  } catch (const UndefinedMeasurement& e) {
    throw EncodeError("control " + control + " is undefined for " + where + ": " + e.what());
  }
}

Control binnedControl(ControlKind kind, const Measurement& m) { return {kind, m.bin, {}}; }

void appendCellControls(TokenSequence& out, const MeasureSlice& slice, int t, int m, const CellControlRequest& req) {
  const TrackExcerpt ex = excerptOfCell(slice, t, m);
  const std::string where = cellName(t, m);
  auto push = [&](const Control& c) {
    const auto toks = c.tokens();
    out.insert(out.end(), toks.begin(), toks.end());
  };
  if (req.horiz) push(measured(ControlKind::kHoriz, "horiz", where, [&](ControlKind k) {
    return binnedControl(k, horizontalDensity(ex));
  }));
  if (req.vert) push(measured(ControlKind::kVert, "vert", where, [&](ControlKind k) {
    return binnedControl(k, verticalDensity(ex));
  }));
  if (req.pcs) push(measured(ControlKind::kPitchClasses, "pcs", where, [&](ControlKind k) {
    return binnedControl(k, pitchClassesPerOnset(ex));
  }));
  if (req.dnoc) {
    if (!dnocFlag(slice, t, m)) {
      throw EncodeError("control dnoc is undefined for " + where + ": chromagram is empty or shared");
    }
    push({ControlKind::kDnoc, 0, {}});
  }
  if (req.strict_range) push(measured(ControlKind::kStrictRange, "strict range", where, [&](ControlKind k) {
    return Control{k, 0, pitchRange(ex.notes)};
  }));
}

void appendTrackControls(TokenSequence& out, const MeasureSlice& slice, const MaskSpec& masks, int t,
                         const TrackControlRequest& req) {
  std::vector<int> measures;
  for (int m = 0; m < slice.numMeasures(); ++m) {
    if (masks.contains(t, m)) measures.push_back(m);
  }
  const std::string where = "track " + std::to_string(t);
  if (measures.empty()) throw EncodeError("track controls requested for " + where + " which has no masked cells");
  const TrackExcerpt ex = excerptOfCells(slice, t, measures);

  out.push_back(Token::trackRef(t));
  auto push = [&](const Control& c) {
    const auto toks = c.tokens();
    out.insert(out.end(), toks.begin(), toks.end());
  };
  if (req.horiz) push(measured(ControlKind::kHoriz, "horiz", where, [&](ControlKind k) {
    return binnedControl(k, horizontalDensity(ex));
  }));
  if (req.interest) push(measured(ControlKind::kInterest, "interest", where, [&](ControlKind k) {
    return binnedControl(k, rhythmicInterest(ex));
  }));
  if (req.vert) push(measured(ControlKind::kVert, "vert", where, [&](ControlKind k) {
    return binnedControl(k, verticalDensity(ex));
  }));
  if (req.pcs) push(measured(ControlKind::kPitchClasses, "pcs", where, [&](ControlKind k) {
    return binnedControl(k, pitchClassesPerOnset(ex));
  }));
  if (req.step || req.leap) {
    auto sl = [&]() {
      try {
        return stepLeapPropensity(ex);
      } catch (const UndefinedMeasurement& e) {
        throw EncodeError(std::string("control ") + (req.step ? "step" : "leap") + " is undefined for " + where +
                          ": " + e.what());
      }
    }();
    if (req.step) push(binnedControl(ControlKind::kStep, sl.step));
    if (req.leap) push(binnedControl(ControlKind::kLeap, sl.leap));
  }
  if (req.strict_range) push(measured(ControlKind::kStrictRange, "strict range", where, [&](ControlKind k) {
    return Control{k, 0, pitchRange(ex.notes)};
  }));
  if (req.loose_range) push(measured(ControlKind::kLooseRange, "loose range", where, [&](ControlKind k) {
    return Control{k, 0, pitchRange(ex.notes)};
  }));
}

void checkNotes(const MeasureSlice& slice, int t, int m) {
  for (const Note& n : slice.cell(t, m)) {
    if (n.pitch < 0 || n.pitch > kMaxPitch || n.duration < 1 || n.duration > kMaxDurationTicks || n.onset < 0 ||
        n.onset >= slice.measureLength(m)) {
      throw EncodeError("note outside the token ranges in " + cellName(t, m));
    }
  }
}

}  // namespace

Control parseControl(const std::string& text) {
  const TokenSequence seq = parseText(text);
  if (seq.empty()) throw DecodeError("empty control", 0);
  std::size_t i = 0;
  if (!startsControl(seq[0])) throw DecodeError("not a control token", 0);
  Control c = readControl(seq, i);
  if (i != seq.size()) throw DecodeError("trailing tokens after control", i);
  return c;
}

void appendNoteTokens(TokenSequence& out, const std::vector<Note>& notes) {
  std::vector<Note> sorted = notes;
  std::sort(sorted.begin(), sorted.end(), [](const Note& a, const Note& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    return a.pitch > b.pitch;
  });
  Tick current = -1;
  for (const Note& n : sorted) {
    if (n.onset != current) {
      out.push_back(Token::position(static_cast<int>(n.onset)));
      current = n.onset;
    }
    out.push_back(Token::noteOn(n.pitch));
    out.push_back(Token::duration(n.duration));
  }
}

PromptTargetPair encode(const MeasureSlice& slice, const MaskSpec& masks, const ControlSpec& controls) {
  if (slice.numTracks() > kMaxTracks) {
    throw EncodeError("slice has " + std::to_string(slice.numTracks()) + " tracks, more than " +
                      std::to_string(kMaxTracks));
  }
  if (static_cast<int>(masks.size()) > kMaxMasks) {
    throw EncodeError(std::to_string(masks.size()) + " masked cells exceed the " + std::to_string(kMaxMasks) +
                      " mask tokens");
  }
  for (const auto& [cell, cond] : masks.cells) {
    if (cell.first < 0 || cell.first >= slice.numTracks() || cell.second < 0 || cell.second >= slice.numMeasures()) {
      throw EncodeError("masked " + cellName(cell.first, cell.second) + " is outside the slice");
    }
  }
  for (const auto& [cell, req] : controls.cells) {
    if (req.any() && !masks.contains(cell.first, cell.second)) {
      throw EncodeError("controls requested for unmasked " + cellName(cell.first, cell.second));
    }
  }
  for (const auto& [t, req] : controls.tracks) {
    if (t < 0 || t >= slice.numTracks()) throw EncodeError("track controls for unknown track " + std::to_string(t));
  }

  PromptTargetPair out;
  int k = 0;
  for (int t = 0; t < slice.numTracks(); ++t) {
    out.prompt.push_back(Token::instrument(slice.track(t).instrument));
    for (int m = 0; m < slice.numMeasures(); ++m) {
      checkNotes(slice, t, m);
      if (m > 0) out.prompt.push_back(Token::measureSep());
      out.prompt.push_back(Token::measureLength(slice.measureLength(m)));
      auto mask_it = masks.cells.find({t, m});
      if (mask_it == masks.cells.end()) {
        appendNoteTokens(out.prompt, slice.cell(t, m));
        continue;
      }
      out.prompt.push_back(Token::mask(k++));
      if (auto it = controls.cells.find({t, m}); it != controls.cells.end()) {
        appendCellControls(out.prompt, slice, t, m, it->second);
      }
      const Conditioning cond = mask_it->second;
      if (cond == Conditioning::kNone) continue;
      const RhythmInfo info =
          rhythmInfo(slice.cell(t, m), cond == Conditioning::k2D ? RhythmMode::k2D : RhythmMode::k1D);
      for (const RhythmEntry& e : info.entries) {
        out.prompt.push_back(Token::position(static_cast<int>(e.onset)));
        if (cond == Conditioning::k1D) {
          out.prompt.push_back(Token::maskedPitch1D());
        } else {
          const int onsets = std::min(e.n_onsets, kMax2DCount);
          const int classes = std::min(e.n_pitch_classes, kMax2DCount);
          if (onsets != e.n_onsets || classes != e.n_pitch_classes) ++out.diagnostics.clamped_2d;
          out.prompt.push_back(Token::maskedPitch2D(onsets, classes));
        }
        out.prompt.push_back(Token::duration(e.duration));
      }
    }
  }
  for (const auto& [t, req] : controls.tracks) {
    if (req.any()) appendTrackControls(out.prompt, slice, masks, t, req);
  }

  k = 0;
  for (const auto& [cell, cond] : masks.cells) {
    out.target.push_back(Token::fill(k++));
    appendNoteTokens(out.target, slice.cell(cell.first, cell.second));
  }
  out.target.push_back(Token::endOfTarget());
  return out;
}

MaskGeometry MaskGeometry::of(const MeasureSlice& slice, const MaskSpec& masks) {
  MaskGeometry g;
  for (const auto& [cell, cond] : masks.cells) {
    g.cells.push_back({cell.first, cell.second, slice.measureLength(cell.second)});
  }
  return g;
}

namespace {

DecodeResult decodeImpl(const TokenSequence& target, const MaskGeometry& geometry, bool salvage) {
  DecodeResult result;
  result.cells.assign(geometry.cells.size(), {});
  int block = -1;
  std::vector<Note> pending_notes;
  int position = -1;  // -1: none yet
  int pitch = -1;

  auto commit = [&](std::size_t at) {
    if (block < 0) return;
    if (pitch >= 0) throw DecodeError("note-on without duration", at);
    std::vector<Note> merged;
    std::sort(pending_notes.begin(), pending_notes.end());
    for (const Note& n : pending_notes) {
      if (!merged.empty() && merged.back().onset == n.onset && merged.back().pitch == n.pitch) {
        merged.back().duration = std::max(merged.back().duration, n.duration);
      } else {
        merged.push_back(n);
      }
    }
    sortNotes(merged);
    result.cells[static_cast<std::size_t>(block)] = std::move(merged);
    ++result.blocks;
    pending_notes.clear();
  };

  try {
    for (std::size_t i = 0; i < target.size(); ++i) {
      const Token& tok = target[i];
      switch (tok.kind) {
        case TokenKind::kEndOfTarget:
          commit(i);
          result.complete = true;
          return result;
        case TokenKind::kFill:
          commit(i);
          if (tok.a != block + 1) throw DecodeError("fill " + std::to_string(tok.a) + " out of order", i);
          if (tok.a >= static_cast<int>(geometry.cells.size())) {
            throw DecodeError("fill " + std::to_string(tok.a) + " has no masked cell", i);
          }
          block = tok.a;
          position = -1;
          pitch = -1;
          break;
        case TokenKind::kPosition:
          if (block < 0) throw DecodeError("position before the first fill", i);
          if (pitch >= 0) throw DecodeError("note-on without duration", i);
          if (tok.a >= geometry.cells[static_cast<std::size_t>(block)].length) {
            throw DecodeError("position " + std::to_string(tok.a) + " beyond measure length", i);
          }
          position = tok.a;
          break;
        case TokenKind::kNoteOn:
          if (position < 0) throw DecodeError("note-on without position", i);
          if (pitch >= 0) throw DecodeError("note-on without duration", i);
          pitch = tok.a;
          break;
        case TokenKind::kDuration:
          if (pitch < 0) throw DecodeError("duration before note-on", i);
          pending_notes.push_back({pitch, position, tok.a});
          pitch = -1;
          break;
        default:
          throw DecodeError("unexpected token " + spelling(tok) + " in target", i);
      }
    }
  } catch (const DecodeError& e) {
    if (!salvage) throw;
    result.error = e.what();
    return result;
  }
  return result;  // truncated: the open block is dropped
}

}  // namespace

DecodeResult decodeTarget(const TokenSequence& target, const MaskGeometry& geometry) {
  return decodeImpl(target, geometry, false);
}

DecodeResult salvageTarget(const TokenSequence& target, const MaskGeometry& geometry) {
  return decodeImpl(target, geometry, true);
}

MaskGeometry PromptLayout::geometry() const {
  MaskGeometry g;
  for (const auto& cell : masked) {
    g.cells.push_back({cell.track, cell.measure, measure_lengths.at(static_cast<std::size_t>(cell.measure))});
  }
  return g;
}

MaskSpec PromptLayout::maskSpec() const {
  MaskSpec spec;
  for (const auto& cell : masked) spec.add(cell.track, cell.measure, cell.conditioning);
  return spec;
}

PromptLayout parsePrompt(const TokenSequence& prompt) {
  PromptLayout layout;
  std::vector<std::vector<std::vector<Note>>> notes;
  std::size_t i = 0;
  const std::size_t n = prompt.size();
  auto at = [&](std::size_t j) -> const Token& { return prompt[j]; };
  auto is = [&](std::size_t j, TokenKind kind) { return j < n && prompt[j].kind == kind; };

  if (!is(0, TokenKind::kInstrument)) throw DecodeError("prompt must start with an instrument token", 0);
  while (is(i, TokenKind::kInstrument)) {
    const int t = static_cast<int>(layout.instruments.size());
    layout.instruments.push_back(at(i).a);
    notes.emplace_back();
    ++i;
    int m = 0;
    while (true) {
      if (!is(i, TokenKind::kMeasureLength)) throw DecodeError("expected a measure length", i);
      const int length = at(i).a;
      if (t == 0) {
        layout.measure_lengths.push_back(length);
      } else if (m >= static_cast<int>(layout.measure_lengths.size()) ||
                 layout.measure_lengths[static_cast<std::size_t>(m)] != length) {
        throw DecodeError("measure geometry differs between tracks", i);
      }
      ++i;
      std::vector<Note> cell_notes;
      if (is(i, TokenKind::kMask)) {
        if (at(i).a != static_cast<int>(layout.masked.size())) throw DecodeError("mask index out of order", i);
        MaskedCellLayout cell{t, m, Conditioning::kNone, {}, {}};
        ++i;
        while (i < n && startsControl(at(i))) {
          const std::size_t start = i;
          Control c = readControl(prompt, i);
          if (!isCellControl(c.kind)) throw DecodeError("control not allowed on a track-measure", start);
          cell.controls.push_back(c);
        }
        while (is(i, TokenKind::kPosition)) {
          const std::size_t start = i;
          if (at(i).a >= length) throw DecodeError("position beyond measure length", i);
          if (i + 2 >= n || !is(i + 2, TokenKind::kDuration)) throw DecodeError("malformed masked pitch", start);
          const Token& mp = at(i + 1);
          const Conditioning mode = mp.kind == TokenKind::kMaskedPitch1D   ? Conditioning::k1D
                                    : mp.kind == TokenKind::kMaskedPitch2D ? Conditioning::k2D
                                                                           : Conditioning::kNone;
          if (mode == Conditioning::kNone) throw DecodeError("expected a masked pitch token", i + 1);
          if (cell.conditioning != Conditioning::kNone && cell.conditioning != mode) {
            throw DecodeError("mixed 1D and 2D conditioning", i + 1);
          }
          cell.conditioning = mode;
          RhythmEntry e{at(i).a, at(i + 2).a, mode == Conditioning::k2D ? mp.a : 0,
                        mode == Conditioning::k2D ? mp.b : 0};
          if (!cell.rhythm.empty() && cell.rhythm.back().onset >= e.onset) {
            throw DecodeError("conditioning positions must increase", i);
          }
          cell.rhythm.push_back(e);
          i += 3;
        }
        layout.masked.push_back(std::move(cell));
      } else {
        int position = -1;
        while (is(i, TokenKind::kPosition) || is(i, TokenKind::kNoteOn)) {
          if (is(i, TokenKind::kPosition)) {
            if (at(i).a >= length) throw DecodeError("position beyond measure length", i);
            position = at(i).a;
            ++i;
            if (!is(i, TokenKind::kNoteOn)) throw DecodeError("position without notes", i);
            continue;
          }
          if (position < 0) throw DecodeError("note-on without position", i);
          if (!is(i + 1, TokenKind::kDuration)) throw DecodeError("note-on without duration", i + 1);
          cell_notes.push_back({at(i).a, position, at(i + 1).a});
          i += 2;
        }
      }
      notes.back().push_back(std::move(cell_notes));
      ++m;
      if (is(i, TokenKind::kMeasureSep)) {
        ++i;
        continue;
      }
      break;
    }
    if (m != static_cast<int>(layout.measure_lengths.size())) {
      throw DecodeError("track " + std::to_string(t) + " has a different measure count", i);
    }
  }

  while (is(i, TokenKind::kTrackRef)) {
    const int t = at(i).a;
    if (t >= static_cast<int>(layout.instruments.size())) throw DecodeError("track reference to unknown track", i);
    if (layout.track_controls.count(t)) throw DecodeError("duplicate track control block", i);
    ++i;
    auto& list = layout.track_controls[t];
    while (i < n && startsControl(at(i))) {
      const std::size_t start = i;
      Control c = readControl(prompt, i);
      if (!isTrackControl(c.kind)) throw DecodeError("control not allowed at track level", start);
      list.push_back(c);
    }
  }
  if (i != n) throw DecodeError("unexpected token " + spelling(at(i)) + " in prompt", i);

  std::vector<MeasureSlice::TrackInfo> infos;
  for (int inst : layout.instruments) infos.push_back({inst, {}});
  layout.context = MeasureSlice(std::move(infos), layout.measure_lengths);
  for (std::size_t t = 0; t < notes.size(); ++t) {
    for (std::size_t m = 0; m < notes[t].size(); ++m) {
      for (const Note& note : notes[t][m]) layout.context.addNote(static_cast<int>(t), static_cast<int>(m), note);
    }
  }
  return layout;
}

bool satisfiesStrictRange(std::span<const Note> notes, PitchRange range) {
  bool low = false;
  bool high = false;
  for (const Note& n : notes) {
    if (n.pitch < range.low || n.pitch > range.high) return false;
    low = low || n.pitch == range.low;
    high = high || n.pitch == range.high;
  }
  return low && high;
}

bool satisfiesLooseRange(std::span<const Note> notes, PitchRange range) {
  bool low = false;
  bool high = false;
  for (const Note& n : notes) {
    if (n.pitch < range.low || n.pitch > range.high) return false;
    low = low || n.pitch - range.low <= 7;
    high = high || range.high - n.pitch <= 7;
  }
  return low && high;
}

}  // namespace infill
