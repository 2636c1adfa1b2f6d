#include "infill/tokens.h"

#include <array>
#include <cctype>
#include <charconv>
#include <optional>

namespace infill {

namespace {

struct Family {
  TokenKind kind;
  std::string_view name;  // spelling stem
  int min;                // payload range, unused for flag tokens
  int max;
  bool has_payload;
};

constexpr std::array<Family, 23> kFamilies = {{
    {TokenKind::kInstrument, "inst", 0, kDrumInstrument, true},
    {TokenKind::kMeasureSep, "sep", 0, 0, false},
    {TokenKind::kMeasureLength, "mlen", 1, kMaxMeasureTicks, true},
    {TokenKind::kPosition, "pos", 0, kMaxMeasureTicks - 1, true},
    {TokenKind::kNoteOn, "non", 0, kMaxPitch, true},
    {TokenKind::kDuration, "dur", 1, kMaxDurationTicks, true},
    {TokenKind::kMask, "mask", 0, kMaxMasks - 1, true},
    {TokenKind::kFill, "fill", 0, kMaxMasks - 1, true},
    {TokenKind::kEndOfTarget, "eot", 0, 0, false},
    {TokenKind::kHoriz, "horiz", 0, 5, true},
    {TokenKind::kInterest, "interest", 0, 2, true},
    {TokenKind::kVert, "vert", 0, 4, true},
    {TokenKind::kPitchClasses, "pcs", 0, 4, true},
    {TokenKind::kStep, "step", 0, 6, true},
    {TokenKind::kLeap, "leap", 0, 6, true},
    {TokenKind::kDnoc, "dnoc", 0, 0, false},
    {TokenKind::kRangeHighStrict, "hi_strict", 0, 0, false},
    {TokenKind::kRangeLowStrict, "lo_strict", 0, 0, false},
    {TokenKind::kRangeHighLoose, "hi_loose", 0, 0, false},
    {TokenKind::kRangeLowLoose, "lo_loose", 0, 0, false},
    {TokenKind::kTrackRef, "track", 0, kMaxTracks - 1, true},
    {TokenKind::kMaskedPitch1D, "mp1d", 0, 0, false},
    {TokenKind::kMaskedPitch2D, "mp2d", 1, kMax2DCount, true},
}};

constexpr int kTwoDCount = kMax2DCount * (kMax2DCount + 1) / 2;

constexpr int familySize(const Family& f) {
  if (f.kind == TokenKind::kMaskedPitch2D) return kTwoDCount;
  return f.has_payload ? f.max - f.min + 1 : 1;
}

constexpr std::array<int, kFamilies.size() + 1> kOffsets = [] {
  std::array<int, kFamilies.size() + 1> offsets{};
  for (std::size_t i = 0; i < kFamilies.size(); ++i) offsets[i + 1] = offsets[i] + familySize(kFamilies[i]);
  return offsets;
}();

int twoDIndex(int onsets, int classes) { return onsets * (onsets - 1) / 2 + (classes - 1); }

std::optional<int> parseInt(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

bool isValid(const Token& token) {
  const auto index = static_cast<std::size_t>(token.kind);
  if (index >= kFamilies.size()) return false;
  const Family& f = kFamilies[index];
  if (token.kind == TokenKind::kMaskedPitch2D) {
    return token.a >= 1 && token.a <= kMax2DCount && token.b >= 1 && token.b <= token.a;
  }
  if (!f.has_payload) return token.a == 0 && token.b == 0;
  return token.a >= f.min && token.a <= f.max && token.b == 0;
}

int vocabularySize() { return kOffsets.back(); }

const std::vector<Token>& vocabulary() {
  static const std::vector<Token> vocab = [] {
    std::vector<Token> out;
    out.reserve(static_cast<std::size_t>(vocabularySize()));
    for (const Family& f : kFamilies) {
      if (f.kind == TokenKind::kMaskedPitch2D) {
        for (int o = 1; o <= kMax2DCount; ++o) {
          for (int p = 1; p <= o; ++p) out.push_back(Token::maskedPitch2D(o, p));
        }
      } else if (f.has_payload) {
        for (int v = f.min; v <= f.max; ++v) out.push_back({f.kind, v});
      } else {
        out.push_back({f.kind});
      }
    }
    return out;
  }();
  return vocab;
}

int tokenId(const Token& token) {
  if (!isValid(token)) throw std::invalid_argument("invalid token " + spelling(token));
  const auto index = static_cast<std::size_t>(token.kind);
  const Family& f = kFamilies[index];
  if (token.kind == TokenKind::kMaskedPitch2D) return kOffsets[index] + twoDIndex(token.a, token.b);
  return kOffsets[index] + (f.has_payload ? token.a - f.min : 0);
}

Token tokenFromId(int id) {
  if (id < 0 || id >= vocabularySize()) throw std::out_of_range("token id " + std::to_string(id) + " out of range");
  return vocabulary()[static_cast<std::size_t>(id)];
}

std::uint64_t vocabularyHash() {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Token& t : vocabulary()) {
    for (char c : spelling(t) + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::vector<int> toIds(const TokenSequence& seq) {
  std::vector<int> ids;
  ids.reserve(seq.size());
  for (const Token& t : seq) ids.push_back(tokenId(t));
  return ids;
}

TokenSequence fromIds(const std::vector<int>& ids) {
  TokenSequence seq;
  seq.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= vocabularySize()) {
      throw TokenError("token id " + std::to_string(ids[i]) + " out of range", i);
    }
    seq.push_back(tokenFromId(ids[i]));
  }
  return seq;
}

std::string spelling(const Token& token) {
  const auto index = static_cast<std::size_t>(token.kind);
  if (index >= kFamilies.size()) return "<?>";
  const Family& f = kFamilies[index];
  std::string out = "<";
  out += f.name;
  if (token.kind == TokenKind::kMaskedPitch2D) {
    out += ":" + std::to_string(token.a) + ":" + std::to_string(token.b);
  } else if (f.has_payload) {
    out += ":" + std::to_string(token.a);
  }
  out += ">";
  return out;
}

Token parseSpelling(std::string_view text, std::size_t index) {
  if (text.size() < 3 || text.front() != '<' || text.back() != '>') {
    throw TokenError("malformed token '" + std::string(text) + "'", index);
  }
  std::string_view body = text.substr(1, text.size() - 2);
  const auto colon = body.find(':');
  const std::string_view stem = body.substr(0, colon);
  for (const Family& f : kFamilies) {
    if (f.name != stem) continue;
    Token token{f.kind};
    if (!f.has_payload) {
      if (colon != std::string_view::npos) throw TokenError("token '" + std::string(text) + "' takes no value", index);
      return token;
    }
    if (colon == std::string_view::npos) throw TokenError("token '" + std::string(text) + "' needs a value", index);
    std::string_view rest = body.substr(colon + 1);
    if (f.kind == TokenKind::kMaskedPitch2D) {
      const auto second = rest.find(':');
      if (second == std::string_view::npos) throw TokenError("token '" + std::string(text) + "' needs two values", index);
      auto o = parseInt(rest.substr(0, second));
      auto p = parseInt(rest.substr(second + 1));
      if (!o || !p) throw TokenError("bad value in '" + std::string(text) + "'", index);
      token.a = *o;
      token.b = *p;
    } else {
      auto v = parseInt(rest);
      if (!v) throw TokenError("bad value in '" + std::string(text) + "'", index);
      token.a = *v;
    }
    if (!isValid(token)) throw TokenError("value out of range in '" + std::string(text) + "'", index);
    return token;
  }
  throw TokenError("unknown token '" + std::string(text) + "'", index);
}

std::string renderText(const TokenSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i > 0) out += ' ';
    out += spelling(seq[i]);
  }
  return out;
}

TokenSequence parseText(std::string_view text) {
  TokenSequence seq;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    seq.push_back(parseSpelling(text.substr(pos, end - pos), seq.size()));
    pos = end;
  }
  return seq;
}

}  // namespace infill
