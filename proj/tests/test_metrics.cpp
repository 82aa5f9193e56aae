#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dmark/metrics.hpp"
#include "dmark/unicode.hpp"

using namespace dmark;

namespace {

// Full-matrix reference edit distance, kept deliberately independent of the
// two-row implementation under test.
std::size_t reference_levenshtein(const CodePoints& a, const CodePoints& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

// Reference chrF built on full count maps and min() intersection instead of
// the decrement-based clipping in the implementation.
double reference_chrf(const std::string& hyp_s, const std::string& ref_s,
                      std::size_t order, double beta) {
  auto strip = [](const std::string& s) {
    std::u32string out;
    for (CodePoint cp : decode_utf8(s))
      if (!is_ascii_whitespace(cp)) out.push_back(cp);
    return out;
  };
  const std::u32string hyp = strip(hyp_s);
  const std::u32string ref = strip(ref_s);
  double psum = 0, rsum = 0;
  int eff = 0;
  for (std::size_t n = 1; n <= order; ++n) {
    if (hyp.size() < n || ref.size() < n) continue;
    std::map<std::u32string, int> hc, rc;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) ++hc[hyp.substr(i, n)];
    for (std::size_t i = 0; i + n <= ref.size(); ++i) ++rc[ref.substr(i, n)];
    int matched = 0;
    for (const auto& [gram, cnt] : hc) {
      auto it = rc.find(gram);
      if (it != rc.end()) matched += std::min(cnt, it->second);
    }
    psum += double(matched) / double(hyp.size() - n + 1);
    rsum += double(matched) / double(ref.size() - n + 1);
    ++eff;
  }
  if (eff == 0) return 0.0;
  const double p = psum / eff, r = rsum / eff, b2 = beta * beta;
  if (b2 * p + r == 0.0) return 0.0;
  return 100.0 * (1 + b2) * p * r / (b2 * p + r);
}

std::string random_ascii(std::mt19937_64& rng, std::size_t max_len) {
  // Narrow pool so repeats and near-matches are common.
  static const std::string pool = "aabbcde  ";
  std::string s;
  const std::size_t len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) s.push_back(pool[rng() % pool.size()]);
  return s;
}

}  // namespace

TEST(Levenshtein, KnownDistances) {
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
  EXPECT_EQ(levenshtein("", ""), 0u);
  EXPECT_EQ(levenshtein("", "abc"), 3u);
  EXPECT_EQ(levenshtein("abc", ""), 3u);
  EXPECT_EQ(levenshtein("same", "same"), 0u);
  EXPECT_EQ(levenshtein("flaw", "lawn"), 2u);
}

TEST(Levenshtein, CountsScalarsNotBytes) {
  EXPECT_EQ(levenshtein("café", "cafe"), 1u);
  EXPECT_EQ(levenshtein("á", "a"), 1u);
  EXPECT_EQ(levenshtein("á̵bc", "abc"), 2u);
}

TEST(Levenshtein, MatchesReferenceOnRandomPairs) {
  std::mt19937_64 rng(42);
  for (int iter = 0; iter < 500; ++iter) {
    const std::string a = random_ascii(rng, 24);
    const std::string b = random_ascii(rng, 24);
    EXPECT_EQ(levenshtein(a, b),
              reference_levenshtein(decode_utf8(a), decode_utf8(b)))
        << "a=\"" << a << "\" b=\"" << b << "\"";
  }
}

TEST(Chrf, KnownValues) {
  // Hand-derived: orders 1..4 effective, P = R = 23/48.
  EXPECT_NEAR(chrf("abcd", "abce"), 100.0 * 23.0 / 48.0, 1e-9);
  EXPECT_NEAR(chrf("identical text", "identical text"), 100.0, 1e-9);
  // P = 1, R = 5/12 against the longer reference.
  EXPECT_NEAR(chrf("ab", "abcd"), 100.0 * 25.0 / 53.0, 1e-9);
  // Swapped: recall dominates under beta = 2.
  EXPECT_NEAR(chrf("abcd", "ab"), 78.125, 1e-9);
}

TEST(Chrf, EmptyAndDisjoint) {
  EXPECT_EQ(chrf("", "abc"), 0.0);
  EXPECT_EQ(chrf("abc", ""), 0.0);
  EXPECT_EQ(chrf("", ""), 0.0);
  EXPECT_EQ(chrf("xyz", "abc"), 0.0);
}

TEST(Chrf, WhitespaceStripped) {
  EXPECT_NEAR(chrf("a b c", "abc"), 100.0, 1e-9);
  EXPECT_NEAR(chrf("the cat", "thecat"), 100.0, 1e-9);
}

TEST(Chrf, ParameterValidation) {
  EXPECT_THROW(chrf("a", "a", 0), std::invalid_argument);
  EXPECT_THROW(chrf("a", "a", 6, 0.0), std::invalid_argument);
  EXPECT_THROW(chrf("a", "a", 6, -1.0), std::invalid_argument);
}

TEST(Chrf, MatchesReferenceOnRandomPairs) {
  std::mt19937_64 rng(43);
  for (int iter = 0; iter < 500; ++iter) {
    const std::string a = random_ascii(rng, 30);
    const std::string b = random_ascii(rng, 30);
    EXPECT_NEAR(chrf(a, b), reference_chrf(a, b, 6, 2.0), 1e-9)
        << "a=\"" << a << "\" b=\"" << b << "\"";
  }
}

TEST(TokenF1, KnownValues) {
  EXPECT_NEAR(token_f1("cat sat mat", "cat ran"), 0.4, 1e-12);
  EXPECT_NEAR(token_f1("The Cat!", "cat"), 1.0, 1e-12);
  EXPECT_NEAR(token_f1("an answer", "answer"), 1.0, 1e-12);
  EXPECT_EQ(token_f1("dog", "cat"), 0.0);
}

TEST(TokenF1, EmptyNormalizations) {
  EXPECT_EQ(token_f1("", ""), 1.0);
  EXPECT_EQ(token_f1("a an the", ""), 1.0);  // normalizes to empty
  EXPECT_EQ(token_f1("", "cat"), 0.0);
  EXPECT_EQ(token_f1("cat", ""), 0.0);
}

TEST(TokenF1, MultisetClipping) {
  // "the the the" normalizes away entirely; repeated tokens clip.
  EXPECT_NEAR(token_f1("cat cat", "cat"), 2.0 / 3.0, 1e-12);
}

TEST(Accuracy, Basics) {
  EXPECT_EQ(accuracy({{"a", "a"}, {"b", "b"}}), 1.0);
  EXPECT_EQ(accuracy({{"a", "a"}, {"b", "c"}}), 0.5);
  EXPECT_THROW(accuracy({}), std::invalid_argument);
}

TEST(Registry, Direction) {
  EXPECT_FALSE(metric_higher_is_better("levenshtein"));
  EXPECT_TRUE(metric_higher_is_better("neg-levenshtein"));
  EXPECT_TRUE(metric_higher_is_better("chrf"));
  EXPECT_TRUE(metric_higher_is_better("token-f1"));
  EXPECT_TRUE(metric_higher_is_better("accuracy"));
  EXPECT_THROW(metric_higher_is_better("bleu"), std::invalid_argument);
}

TEST(Registry, DispatchMatchesDirectCalls) {
  EXPECT_EQ(similarity_metric("levenshtein", "kitten", "sitting"), 3.0);
  EXPECT_EQ(similarity_metric("neg-levenshtein", "kitten", "sitting"), -3.0);
  EXPECT_EQ(similarity_metric("chrf", "abcd", "abce"), chrf("abcd", "abce"));
  EXPECT_EQ(similarity_metric("token-f1", "cat sat", "cat"),
            token_f1("cat sat", "cat"));
  // Accuracy aggregates labels; it is not a pairwise text similarity.
  EXPECT_THROW(similarity_metric("accuracy", "a", "a"), std::invalid_argument);
}
