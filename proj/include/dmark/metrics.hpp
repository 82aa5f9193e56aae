#pragma once

// Similarity metrics used as attack fitness and report statistics:
// Levenshtein distance over scalar values, chrF, SQuAD-style token F1 and
// label accuracy.

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dmark/unicode.hpp"

namespace dmark {

struct MetricValue {
  std::string name;
  double value = 0.0;
  bool higher_is_better = true;
};

// Minimum insert/delete/substitute edits between the scalar sequences of a
// and b. A combining mark counts as one scalar, matching how the attack
// perturbs text.
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  const CodePoints sa = decode_utf8(a);
  const CodePoints sb = decode_utf8(b);
  if (sa.empty()) return sb.size();
  if (sb.empty()) return sa.size();

  std::vector<std::size_t> prev(sb.size() + 1), cur(sb.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= sa.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= sb.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (sa[i - 1] == sb[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[sb.size()];
}

namespace detail {

inline CodePoints strip_whitespace(std::string_view s) {
  CodePoints out;
  for (CodePoint cp : decode_utf8(s))
    if (!is_ascii_whitespace(cp)) out.push_back(cp);
  return out;
}

// Clipped multiset overlap plus the two totals for order-n character n-grams.
struct NgramStats {
  std::size_t hyp_total = 0;
  std::size_t ref_total = 0;
  std::size_t matched = 0;
};

inline NgramStats ngram_overlap(const CodePoints& hyp, const CodePoints& ref,
                                std::size_t n) {
  NgramStats stats;
  std::map<std::u32string, std::size_t> ref_counts;
  if (ref.size() >= n) {
    for (std::size_t i = 0; i + n <= ref.size(); ++i)
      ++ref_counts[std::u32string(ref.begin() + i, ref.begin() + i + n)];
    stats.ref_total = ref.size() - n + 1;
  }
  if (hyp.size() >= n) {
    stats.hyp_total = hyp.size() - n + 1;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
      auto it = ref_counts.find(std::u32string(hyp.begin() + i, hyp.begin() + i + n));
      if (it != ref_counts.end() && it->second > 0) {
        --it->second;
        ++stats.matched;
      }
    }
  }
  return stats;
}

} // namespace detail

// Character F-score. Whitespace is removed from both strings; precision and
// recall are macro-averaged over the n-gram orders where both strings have
// n-grams (the aggregation the common scoring tools use), then combined as
// an F_beta score scaled to [0, 100].
inline double chrf(std::string_view hypothesis, std::string_view reference,
                   std::size_t char_order = 6, double beta = 2.0) {
  if (char_order < 1) throw std::invalid_argument("chrf char_order must be >= 1");
  if (beta <= 0.0) throw std::invalid_argument("chrf beta must be > 0");
  const CodePoints hyp = detail::strip_whitespace(hypothesis);
  const CodePoints ref = detail::strip_whitespace(reference);

  double prec_sum = 0.0, rec_sum = 0.0;
  std::size_t effective_orders = 0;
  for (std::size_t n = 1; n <= char_order; ++n) {
    const auto stats = detail::ngram_overlap(hyp, ref, n);
    if (stats.hyp_total == 0 || stats.ref_total == 0) continue;
    prec_sum += static_cast<double>(stats.matched) / static_cast<double>(stats.hyp_total);
    rec_sum += static_cast<double>(stats.matched) / static_cast<double>(stats.ref_total);
    ++effective_orders;
  }
  if (effective_orders == 0) return 0.0;
  const double precision = prec_sum / static_cast<double>(effective_orders);
  const double recall = rec_sum / static_cast<double>(effective_orders);
  const double factor = beta * beta;
  const double denom = factor * precision + recall;
  if (denom == 0.0) return 0.0;
  return 100.0 * (1.0 + factor) * precision * recall / denom;
}

namespace detail {

inline bool is_ascii_punct(CodePoint cp) {
  return cp < 0x80 && std::ispunct(static_cast<unsigned char>(cp)) != 0;
}

// SQuAD answer normalization: lowercase, drop punctuation, drop the articles
// a/an/the, collapse whitespace.
inline std::vector<std::string> normalize_tokens(std::string_view s) {
  CodePoints cleaned;
  for (CodePoint cp : decode_utf8(s)) {
    if (is_ascii_punct(cp)) continue;
    if (cp >= U'A' && cp <= U'Z') cp = cp - U'A' + U'a';
    cleaned.push_back(cp);
  }
  std::vector<std::string> tokens;
  std::string token;
  auto flush = [&] {
    if (!token.empty() && token != "a" && token != "an" && token != "the")
      tokens.push_back(token);
    token.clear();
  };
  for (CodePoint cp : cleaned) {
    if (is_ascii_whitespace(cp)) {
      flush();
    } else {
      append_utf8(token, cp);
    }
  }
  flush();
  return tokens;
}

} // namespace detail

inline double token_f1(std::string_view prediction, std::string_view gold) {
  const auto pred = detail::normalize_tokens(prediction);
  const auto goldt = detail::normalize_tokens(gold);
  if (pred.empty() && goldt.empty()) return 1.0;
  if (pred.empty() || goldt.empty()) return 0.0;
  std::map<std::string, std::size_t> gold_counts;
  for (const auto& t : goldt) ++gold_counts[t];
  std::size_t common = 0;
  for (const auto& t : pred) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(common) / static_cast<double>(goldt.size());
  return 2.0 * precision * recall / (precision + recall);
}

inline double accuracy(const std::vector<std::pair<std::string, std::string>>& labels) {
  if (labels.empty()) throw std::invalid_argument("accuracy of an empty sequence");
  std::size_t hits = 0;
  for (const auto& [predicted, gold] : labels)
    if (predicted == gold) ++hits;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

// Metric names accepted on the CLI and in campaign configs.
inline bool metric_higher_is_better(std::string_view name) {
  if (name == "levenshtein") return false;
  if (name == "neg-levenshtein" || name == "chrf" || name == "token-f1" ||
      name == "accuracy")
    return true;
  throw std::invalid_argument("unknown metric: " + std::string(name));
}

// Similarity value for a (model output, reference) pair under a named metric.
inline double similarity_metric(std::string_view name, std::string_view output,
                                std::string_view reference) {
  if (name == "levenshtein")
    return static_cast<double>(levenshtein(output, reference));
  if (name == "neg-levenshtein")
    return -static_cast<double>(levenshtein(output, reference));
  if (name == "chrf") return chrf(output, reference);
  if (name == "token-f1") return token_f1(output, reference);
  throw std::invalid_argument("unknown metric: " + std::string(name));
}

} // namespace dmark
