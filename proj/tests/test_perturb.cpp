#include <gtest/gtest.h>

#include <random>
#include <string>

#include "dmark/alphabet.hpp"
#include "dmark/unicode.hpp"

using namespace dmark;

namespace {

Genome make_genome(std::initializer_list<Gene> genes) {
  Genome g;
  g.genes.assign(genes);
  return g;
}

}  // namespace

TEST(Alphabet, StandardContents) {
  const DiacriticAlphabet alpha = DiacriticAlphabet::standard();
  EXPECT_EQ(alpha.size(), 73u);
  EXPECT_EQ(alpha.at(0), 0x0300u);
  EXPECT_EQ(alpha.at(70), 0x0346u);
  EXPECT_EQ(alpha.at(71), 0x0360u);
  EXPECT_EQ(alpha.at(72), 0x0361u);
  EXPECT_TRUE(alpha.contains(0x0335));
  EXPECT_FALSE(alpha.contains(0x0347));
  EXPECT_FALSE(alpha.contains(U'a'));
}

TEST(Alphabet, RejectsBadConstruction) {
  EXPECT_THROW(DiacriticAlphabet({}), std::invalid_argument);
  EXPECT_THROW(DiacriticAlphabet({0x300, 0x300}), std::invalid_argument);
  EXPECT_THROW(DiacriticAlphabet({0x2FF}), std::invalid_argument);
  EXPECT_THROW(DiacriticAlphabet({U'a'}), std::invalid_argument);
}

TEST(Perturb, SelectorProjection) {
  EXPECT_EQ(mark_index(0.0, 73), 0u);
  EXPECT_EQ(mark_index(3.7, 73), 3u);
  EXPECT_EQ(mark_index(72.999, 73), 72u);
  EXPECT_EQ(mark_index(73.0, 73), 72u);   // clamp high
  EXPECT_EQ(mark_index(500.0, 73), 72u);  // clamp far
  EXPECT_EQ(mark_index(-2.0, 73), 0u);    // clamp low
}

TEST(Perturb, RoundHalfAwayFromZero) {
  EXPECT_EQ(round_position(0.5), 1);
  EXPECT_EQ(round_position(1.5), 2);
  EXPECT_EQ(round_position(2.5), 3);
  EXPECT_EQ(round_position(-0.5), -1);
  EXPECT_EQ(round_position(-0.4), 0);
  EXPECT_EQ(round_position(0.49), 0);
}

TEST(Perturb, AllNegativePositionsSkip) {
  const DiacriticAlphabet alpha = DiacriticAlphabet::standard();
  const Genome g = make_genome({{5.0, -1.0}, {12.0, -0.6}, {0.0, -100.0}});
  EXPECT_EQ(perturb("abc", g, alpha), "abc");
}

TEST(Perturb, SingleInsertion) {
  const DiacriticAlphabet alpha = DiacriticAlphabet::standard();
  // Selector 1.x picks the second mark, U+0301; position 1.2 rounds to 1.
  const Genome g = make_genome({{1.2, 1.2}});
  EXPECT_EQ(perturb("abc", g, alpha), "ábc");
}

TEST(Perturb, SequentialInsertionIndexesEvolvingString) {
  const DiacriticAlphabet alpha = DiacriticAlphabet::standard();
  // First gene appends U+0300 at the end of "ab". The second gene's index 2
  // now lands *inside* the lengthened string, before the first mark.
  const Genome g = make_genome({{0.0, 2.0}, {1.0, 2.0}});
  EXPECT_EQ(perturb("ab", g, alpha), "ab́̀");
}

TEST(Perturb, PositionClampsToEnd) {
  const DiacriticAlphabet alpha = DiacriticAlphabet::standard();
  const Genome g = make_genome({{0.0, 99.0}});
  EXPECT_EQ(perturb("ab", g, alpha), "ab̀");
}

TEST(Perturb, IndexZeroAllowed) {
  const DiacriticAlphabet alpha = DiacriticAlphabet::standard();
  const Genome g = make_genome({{0.0, 0.0}});
  EXPECT_EQ(perturb("ab", g, alpha), "̀ab");
}

TEST(Perturb, EmptyInput) {
  const DiacriticAlphabet alpha = DiacriticAlphabet::standard();
  const Genome g = make_genome({{0.0, 0.0}, {1.0, 0.3}});
  EXPECT_EQ(perturb("", g, alpha), "́̀");
}

TEST(Perturb, PositionsAreScalarIndicesNotBytes) {
  const DiacriticAlphabet alpha = DiacriticAlphabet::standard();
  // U+0300 in the input occupies two bytes but one scalar slot; inserting at
  // index 2 must land after 'b', not inside the mark's encoding.
  const Genome g = make_genome({{1.0, 2.0}});
  EXPECT_EQ(perturb("àb", g, alpha), "à́b");
}

TEST(Perturb, BudgetAndPreservationProperties) {
  const DiacriticAlphabet alpha = DiacriticAlphabet::standard();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d_dist(0.0, 73.0);
  for (int iter = 0; iter < 200; ++iter) {
    std::string base;
    const size_t len = rng() % 20;
    for (size_t i = 0; i < len; ++i)
      base.push_back(static_cast<char>(' ' + rng() % 95));
    Genome g;
    const size_t n_genes = rng() % 6;
    std::uniform_real_distribution<double> i_dist(-1.0, static_cast<double>(len));
    for (size_t k = 0; k < n_genes; ++k)
      g.genes.push_back({d_dist(rng), i_dist(rng)});

    const std::string out = perturb(base, g, alpha);
    EXPECT_LE(count_marks(out, alpha), g.size());

    // Dropping every alphabet mark recovers the input exactly.
    std::string recovered;
    for (CodePoint cp : decode_utf8(out))
      if (!alpha.contains(cp)) append_utf8(recovered, cp);
    EXPECT_EQ(recovered, base);
  }
}

TEST(Perturb, CountMarks) {
  const DiacriticAlphabet alpha = DiacriticAlphabet::standard();
  EXPECT_EQ(count_marks("abc", alpha), 0u);
  EXPECT_EQ(count_marks("áb̀", alpha), 2u);
  // U+034F is in the combining block but outside the default alphabet.
  EXPECT_EQ(count_marks("a͏", alpha), 0u);
}
