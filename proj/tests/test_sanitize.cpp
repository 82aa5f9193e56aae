#include <gtest/gtest.h>

#include <random>
#include <string>

#include "dmark/alphabet.hpp"
#include "dmark/sanitize.hpp"
#include "dmark/unicode.hpp"

using namespace dmark;

TEST(StripOnly, RemovesBlockMarksOnly) {
  EXPECT_EQ(sanitize("abc"), "abc");
  EXPECT_EQ(sanitize("ábc"), "abc");
  EXPECT_EQ(sanitize("̵̀ͯ"), "");
  // Precomposed characters carry no separate mark; strip-only keeps them.
  EXPECT_EQ(sanitize("café"), "café");
  // Marks outside the block stay too.
  EXPECT_EQ(sanitize("a֑"), "a֑");
}

TEST(StripOnly, CustomRange) {
  SanitizePolicy narrow;
  narrow.range_first = 0x0301;
  narrow.range_last = 0x0301;
  EXPECT_EQ(sanitize("àb́c", narrow), "àbc");
}

TEST(StripOnly, Idempotent) {
  const std::string once = sanitize("x̵́y͠");
  EXPECT_EQ(sanitize(once), once);
}

TEST(Decompose, PrecomposedLosesItsMark) {
  SanitizePolicy deep{SanitizePolicy::Mode::DecomposeStripRecompose};
  EXPECT_EQ(sanitize("café", deep), "cafe");
  // U+1EBF: e with circumflex and acute, both marks stripped.
  EXPECT_EQ(sanitize("ế", deep), "e");
  EXPECT_EQ(sanitize("naïve", deep), "naive");
}

TEST(Decompose, RecomposesSurvivors) {
  // With the strip range narrowed away from U+0302, decomposition followed
  // by recomposition must restore the precomposed form.
  SanitizePolicy deep{SanitizePolicy::Mode::DecomposeStripRecompose};
  deep.range_first = 0x0350;
  deep.range_last = 0x036F;
  EXPECT_EQ(sanitize("ê", deep), "ê");
  EXPECT_EQ(sanitize("ê", deep), "ê");
}

TEST(Decompose, CanonicalOrderAppliedBeforeStrip) {
  // U+0323 (class 220) sorts before U+0301 (class 230); stripping the block
  // still leaves the base regardless of input order.
  SanitizePolicy deep{SanitizePolicy::Mode::DecomposeStripRecompose};
  EXPECT_EQ(sanitize("ạ́", deep), "a");
  EXPECT_EQ(sanitize("ạ́", deep), "a");
}

TEST(Decompose, MarksOutsideRangeReorderButSurvive) {
  SanitizePolicy deep{SanitizePolicy::Mode::DecomposeStripRecompose};
  // U+0591 (class 220) is outside the strip range; the in-block acute is
  // removed and the survivor stays attached to its base.
  const std::string out = sanitize("á֑", deep);
  EXPECT_EQ(out, "a֑");
}

TEST(Detect, CountsAndPositions) {
  const DetectResult none = detect("plain text");
  EXPECT_EQ(none.count, 0u);
  EXPECT_TRUE(none.positions.empty());

  const DetectResult two = detect("áb̂");
  EXPECT_EQ(two.count, 2u);
  ASSERT_EQ(two.positions.size(), 2u);
  EXPECT_EQ(two.positions[0], 1u);
  EXPECT_EQ(two.positions[1], 3u);
}

TEST(Detect, PositionsAreScalarIndices) {
  // The two-byte U+00E9 occupies one scalar slot before the mark.
  const DetectResult r = detect("é̀");
  EXPECT_EQ(r.count, 1u);
  ASSERT_EQ(r.positions.size(), 1u);
  EXPECT_EQ(r.positions[0], 1u);
}

// The defense must neutralize the attack exactly: for any clean input,
// perturbing then stripping is the identity.
TEST(Neutralization, PerturbThenStripRoundTrip) {
  const DiacriticAlphabet alpha = DiacriticAlphabet::standard();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> d_dist(0.0, 73.0);
  for (int iter = 0; iter < 500; ++iter) {
    std::string base;
    const std::size_t len = rng() % 40;
    for (std::size_t i = 0; i < len; ++i)
      base.push_back(static_cast<char>(' ' + rng() % 95));
    Genome g;
    std::uniform_real_distribution<double> i_dist(-1.0, static_cast<double>(len));
    const std::size_t n_genes = rng() % 8;
    for (std::size_t k = 0; k < n_genes; ++k)
      g.genes.push_back({d_dist(rng), i_dist(rng)});
    const std::string attacked = perturb(base, g, alpha);
    EXPECT_EQ(sanitize(attacked), base);
    EXPECT_EQ(detect(attacked).count, count_marks(attacked, alpha));
  }
}
