#include <gtest/gtest.h>

#include <cmath>
#include <iostream>
#include <map>
#include <string>

#include "dmark/alphabet.hpp"
#include "dmark/corpus.hpp"
#include "dmark/render.hpp"
#include "dmark/toy_models.hpp"
#include "dmark/unicode.hpp"

using namespace dmark;

TEST(ToyOcr, CleanChannelAllPrintables) {
  std::string all;
  for (char c = 0x21; c <= 0x7E; ++c) all.push_back(c);
  const Canvas cv = render(all, static_cast<unsigned>(all.size()));
  EXPECT_EQ(toy_ocr(cv), all);
}

TEST(ToyOcr, CleanChannelSentences) {
  for (const CorpusSentence& s : kOcrCorpus) {
    const ChunkPlan plan = chunk(s.text, 40);
    ASSERT_EQ(plan.chunks.size(), 1u) << s.id << " does not fit one canvas";
    EXPECT_EQ(toy_ocr(render(plan.chunks[0], 40)), s.text) << s.id;
  }
}

TEST(ToyOcr, TrailingBlanksDropLeadingStay) {
  const Canvas cv = render("ab", 5);
  EXPECT_EQ(toy_ocr(cv), "ab");
  const Canvas gap = render("a b", 3);
  EXPECT_EQ(toy_ocr(gap), "a b");
}

TEST(ToyOcr, TieBreaksToLowestCodePoint) {
  // A blank cell is equidistant from nothing; space must win as the lowest
  // code point whose template is empty.
  Canvas cv = render(" ", 1);
  EXPECT_EQ(toy_ocr(cv), "");
}

// The designed confusions: a handful of marks land a base letter exactly on
// another template. These anchor the whole attack, so pin them.
TEST(ToyOcr, DesignedConfusions) {
  const std::map<std::string, std::string> expected = {
      {"o̵", "e"}, {"a̦", "q"}, {"i̩", "j"},
      {"v̩", "y"}, {"l̩", "|"}, {".̩", ","},
      {":̩", ";"}, {"i̍", "l"}, {"o̮", "g"},
      {"c̵", "e"}, {"c̶", "e"}, {"o̶", "e"},
      {".̣", ","},
  };
  for (const auto& [input, want] : expected) {
    const Canvas cv = render(input, 1);
    EXPECT_EQ(toy_ocr(cv), want) << "input bytes: " << escape_non_ascii(input);
  }
}

// Survey the whole attack surface: count (base, mark) pairs where a single
// mark changes what the recognizer reads back. The optimizer needs this set
// to be rich; a thin surface starves the search.
TEST(ToyOcr, SingleMarkFlipSurface) {
  const DiacriticAlphabet alpha = DiacriticAlphabet::standard();
  int flips = 0;
  int pairs = 0;
  std::map<char, int> per_base;
  for (char base = 0x21; base <= 0x7E; ++base) {
    for (char32_t mark : alpha.marks()) {
      std::string text(1, base);
      append_utf8(text, mark);
      const Canvas cv = render(text, 1);
      const std::string got = toy_ocr(cv);
      ++pairs;
      if (got != std::string(1, base)) {
        ++flips;
        ++per_base[base];
      }
    }
  }
  std::cout << "flip surface: " << flips << "/" << pairs << " pairs, "
            << per_base.size() << "/94 bases flippable\n";
  for (const auto& [base, n] : per_base)
    std::cout << "  '" << base << "': " << n << " marks\n";
  EXPECT_GT(flips, 0);
  // Common lowercase letters must be attackable or realistic prose has no
  // entry points.
  for (char c : {'a', 'c', 'i', 'l', 'o', 'v'}) {
    EXPECT_GT(per_base[c], 0) << "no flip for '" << c << "'";
  }
}

TEST(ToyToxic, ScoreMatchesLogistic) {
  const ToxicLexicon lex = toxic_lexicon();
  const double none = toy_toxic("a fine day", lex);
  EXPECT_NEAR(none, 1.0 / (1.0 + std::exp(2.0)), 1e-12);
  const double one = toy_toxic("a stupid day", lex);
  EXPECT_NEAR(one, 1.0 / (1.0 + std::exp(-2.0)), 1e-12);
  const double two = toy_toxic("stupid awful day", lex);
  EXPECT_NEAR(two, 1.0 / (1.0 + std::exp(-6.0)), 1e-12);
}

TEST(ToyToxic, CaseInsensitiveWholeToken) {
  const ToxicLexicon lex = toxic_lexicon();
  EXPECT_GT(toy_toxic("STUPID", lex), 0.5);
  // Substrings do not match; tokens are whitespace-delimited.
  EXPECT_LT(toy_toxic("stupidity", lex), 0.5);
  EXPECT_LT(toy_toxic("stupid.", lex), 0.5);
}

TEST(ToyToxic, GarbledTokenDropsBelowThreshold) {
  const ToxicLexicon lex = toxic_lexicon();
  EXPECT_GT(toy_toxic("you are stupid", lex), 0.5);
  EXPECT_LT(toy_toxic("you are stupid̵", lex), 0.5);
}

TEST(ToyToxic, LabelThreshold) {
  EXPECT_EQ(toxic_label(0.5), kToxicLabel);
  EXPECT_EQ(toxic_label(0.4999), kNonToxicLabel);
}

TEST(ToyToxic, CorpusLabelsConsistent) {
  const ToxicLexicon lex = toxic_lexicon();
  for (const LabeledExample& e : kToxicCorpus) {
    EXPECT_EQ(toxic_label(toy_toxic(e.text, lex)), e.label) << e.id;
  }
}

TEST(ToyTranslate, KnownWords) {
  EXPECT_EQ(toy_translate("the cat"), "le chat");
  EXPECT_EQ(toy_translate("hello world"), "bonjour monde");
}

TEST(ToyTranslate, CasePreservedOnFirstLetter) {
  EXPECT_EQ(toy_translate("The cat"), "Le chat");
}

TEST(ToyTranslate, UnknownTokensPassThrough) {
  EXPECT_EQ(toy_translate("the zzz"), "le zzz");
  // A mark glued to a word breaks dictionary lookup: that is the damage
  // a generate-task attack measures.
  EXPECT_EQ(toy_translate("the ca̵t"), "le ca̵t");
}

TEST(ToyTranslate, WhitespaceNormalizes) {
  EXPECT_EQ(toy_translate("  the   cat "), "le chat");
}
