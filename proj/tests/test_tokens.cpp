#include <gtest/gtest.h>

#include <set>

#include "infill/rng.h"
#include "infill/tokens.h"

namespace infill {
namespace {

// The documented enumeration, family by family.
std::vector<std::string> expectedSpellings() {
  std::vector<std::string> out;
  auto range = [&](const std::string& stem, int lo, int hi) {
    for (int v = lo; v <= hi; ++v) out.push_back("<" + stem + ":" + std::to_string(v) + ">");
  };
  range("inst", 0, 128);
  out.push_back("<sep>");
  range("mlen", 1, 192);
  range("pos", 0, 191);
  range("non", 0, 127);
  range("dur", 1, 768);
  range("mask", 0, 255);
  range("fill", 0, 255);
  out.push_back("<eot>");
  range("horiz", 0, 5);
  range("interest", 0, 2);
  range("vert", 0, 4);
  range("pcs", 0, 4);
  range("step", 0, 6);
  range("leap", 0, 6);
  for (const char* flag : {"<dnoc>", "<hi_strict>", "<lo_strict>", "<hi_loose>", "<lo_loose>"}) out.push_back(flag);
  range("track", 0, 63);
  out.push_back("<mp1d>");
  for (int o = 1; o <= 8; ++o) {
    for (int p = 1; p <= o; ++p) out.push_back("<mp2d:" + std::to_string(o) + ":" + std::to_string(p) + ">");
  }
  return out;
}

TEST(Vocabulary, SizeMatchesFamilyCardinalities) {
  const int closed_form = 129 + 1 + 192 + 192 + 128 + 768 + 256 + 256 + 1 + 6 + 3 + 5 + 5 + 7 + 7 + 1 + 4 + 64 + 1 + 36;
  EXPECT_EQ(closed_form, 2062);
  EXPECT_EQ(vocabularySize(), closed_form);
  EXPECT_EQ(static_cast<int>(vocabulary().size()), closed_form);
}

TEST(Vocabulary, DocumentedOrdering) {
  const auto expected = expectedSpellings();
  ASSERT_EQ(expected.size(), vocabulary().size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(spelling(vocabulary()[i]), expected[i]) << i;
  EXPECT_EQ(tokenId(Token::instrument(0)), 0);
  EXPECT_EQ(tokenId(Token::measureSep()), 129);
  EXPECT_EQ(tokenId(Token::endOfTarget()), 1922);
  EXPECT_EQ(tokenId(Token::maskedPitch2D(8, 8)), 2061);
}

TEST(Vocabulary, HashIsFnvOfNewlineJoinedSpellings) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& s : expectedSpellings()) {
    for (char c : s + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
  }
  EXPECT_EQ(vocabularyHash(), h);
}

TEST(Vocabulary, IdRoundTrip) {
  for (int id = 0; id < vocabularySize(); ++id) {
    const Token t = tokenFromId(id);
    EXPECT_TRUE(isValid(t));
    EXPECT_EQ(tokenId(t), id);
    EXPECT_EQ(parseSpelling(spelling(t)), t);
  }
  EXPECT_THROW(tokenFromId(-1), std::out_of_range);
  EXPECT_THROW(tokenFromId(vocabularySize()), std::out_of_range);
}

TEST(Vocabulary, SpellingsUnique) {
  std::set<std::string> seen;
  for (const Token& t : vocabulary()) EXPECT_TRUE(seen.insert(spelling(t)).second);
}

TEST(TokenText, RenderExample) {
  const TokenSequence seq = {Token::instrument(40), Token::measureLength(96), Token::position(0), Token::noteOn(60),
                             Token::duration(24)};
  EXPECT_EQ(renderText(seq), "<inst:40> <mlen:96> <pos:0> <non:60> <dur:24>");
}

TEST(TokenText, ParseExample) {
  const auto seq = parseText("<mask:0> <vert:2>");
  ASSERT_EQ(seq.size(), 2u);
  EXPECT_EQ(seq[0], Token::mask(0));
  EXPECT_EQ(seq[1], (Token{TokenKind::kVert, 2}));
}

TEST(TokenText, RandomRoundTrip) {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    TokenSequence seq;
    for (int i = rng.uniformInt(0, 60); i > 0; --i) seq.push_back(tokenFromId(rng.uniformInt(0, vocabularySize() - 1)));
    EXPECT_EQ(parseText(renderText(seq)), seq);
    EXPECT_EQ(fromIds(toIds(seq)), seq);
  }
}

TEST(TokenText, Errors) {
  auto index_of = [](const std::string& text) -> long {
    try {
      parseText(text);
    } catch (const TokenError& e) {
      return static_cast<long>(e.index());
    }
    return -1;
  };
  EXPECT_EQ(index_of("<non:200>"), 0);
  EXPECT_EQ(index_of("<inst:1> <sep> <bogus>"), 2);
  EXPECT_EQ(index_of("<pos:1> <non>"), 1);
  EXPECT_EQ(index_of("<eot:1>"), 0);
  EXPECT_EQ(index_of("<mp2d:2:3>"), 0);
  EXPECT_EQ(index_of("<mp2d:9:1>"), 0);
  EXPECT_EQ(index_of("<dur:0>"), 0);
  EXPECT_EQ(index_of("<pos:-1>"), 0);
  EXPECT_EQ(index_of("<pos:1x>"), 0);
  EXPECT_EQ(index_of("pos:1"), 0);
  EXPECT_EQ(index_of("  <sep>\t<eot>\n"), -1);
  EXPECT_THROW(fromIds({0, 5000}), TokenError);
  try {
    fromIds({0, 1, -3});
  } catch (const TokenError& e) {
    EXPECT_EQ(e.index(), 2u);
  }
}

}  // namespace
}  // namespace infill
