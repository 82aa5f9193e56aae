#pragma once

// Defense: detect and remove combining diacritical marks before inference.
//
// strip-only removes every scalar inside the configured range and touches
// nothing else. decompose-strip-recompose first applies canonical
// decomposition (so precomposed diacritics like U+00E9 also lose their
// marks), strips, then recomposes what remains.

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dmark/unicode.hpp"
#include "dmark/unicode_data.hpp"

namespace dmark {

struct SanitizePolicy {
  enum class Mode { StripOnly, DecomposeStripRecompose };
  Mode mode = Mode::StripOnly;
  CodePoint range_first = kCombiningBlockFirst;
  CodePoint range_last = kCombiningBlockLast;

  bool in_range(CodePoint cp) const { return cp >= range_first && cp <= range_last; }
};

namespace sanitize_detail {

inline int combining_class(CodePoint cp) {
  const auto* begin = std::begin(ucd::kCombiningClass);
  const auto* end = std::end(ucd::kCombiningClass);
  const auto* it = std::lower_bound(begin, end, cp,
                                    [](const ucd::CccEntry& e, CodePoint v) { return e.cp < v; });
  return it != end && it->cp == cp ? it->ccc : 0;
}

// Full canonical decomposition; the generated table stores complete
// expansions, so one lookup per scalar suffices.
inline void decompose_into(CodePoint cp, CodePoints& out) {
  const auto* begin = std::begin(ucd::kDecompIndex);
  const auto* end = std::end(ucd::kDecompIndex);
  const auto* it = std::lower_bound(begin, end, cp,
                                    [](const ucd::DecompEntry& e, CodePoint v) { return e.cp < v; });
  if (it != end && it->cp == cp) {
    for (std::size_t i = 0; i < it->length; ++i)
      out.push_back(ucd::kDecompData[it->offset + i]);
  } else {
    out.push_back(cp);
  }
}

// Canonical ordering: stable-sort runs of nonzero-ccc scalars by class.
inline void canonical_order(CodePoints& scalars) {
  std::size_t i = 0;
  while (i < scalars.size()) {
    if (combining_class(scalars[i]) == 0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < scalars.size() && combining_class(scalars[j]) != 0) ++j;
    std::stable_sort(scalars.begin() + static_cast<std::ptrdiff_t>(i),
                     scalars.begin() + static_cast<std::ptrdiff_t>(j),
                     [](CodePoint a, CodePoint b) { return combining_class(a) < combining_class(b); });
    i = j;
  }
}

inline bool compose_pair(CodePoint first, CodePoint second, CodePoint& composed) {
  const auto* begin = std::begin(ucd::kComposePairs);
  const auto* end = std::end(ucd::kComposePairs);
  const auto* it = std::lower_bound(begin, end, std::pair<CodePoint, CodePoint>{first, second},
                                    [](const ucd::ComposeEntry& e, const std::pair<CodePoint, CodePoint>& v) {
                                      return e.first != v.first ? e.first < v.first : e.second < v.second;
                                    });
  if (it == end || it->first != first || it->second != second) return false;
  composed = it->composed;
  return true;
}

// Canonical composition over a canonically ordered sequence.
inline CodePoints compose(const CodePoints& scalars) {
  CodePoints out;
  std::ptrdiff_t last_starter = -1;
  for (CodePoint cp : scalars) {
    if (last_starter >= 0) {
      const bool unblocked =
          out.size() == static_cast<std::size_t>(last_starter) + 1 ||
          combining_class(out.back()) < combining_class(cp);
      CodePoint composed = 0;
      if (unblocked && compose_pair(out[static_cast<std::size_t>(last_starter)], cp, composed)) {
        out[static_cast<std::size_t>(last_starter)] = composed;
        continue;
      }
    }
    out.push_back(cp);
    if (combining_class(cp) == 0) last_starter = static_cast<std::ptrdiff_t>(out.size()) - 1;
  }
  return out;
}

} // namespace sanitize_detail

inline std::string sanitize(std::string_view text, const SanitizePolicy& policy = {}) {
  CodePoints scalars = decode_utf8(text);
  if (policy.mode == SanitizePolicy::Mode::DecomposeStripRecompose) {
    CodePoints decomposed;
    decomposed.reserve(scalars.size());
    for (CodePoint cp : scalars) sanitize_detail::decompose_into(cp, decomposed);
    sanitize_detail::canonical_order(decomposed);
    scalars = std::move(decomposed);
  }
  CodePoints kept;
  kept.reserve(scalars.size());
  for (CodePoint cp : scalars)
    if (!policy.in_range(cp)) kept.push_back(cp);
  if (policy.mode == SanitizePolicy::Mode::DecomposeStripRecompose)
    kept = sanitize_detail::compose(kept);
  return encode_utf8(kept);
}

struct DetectResult {
  std::size_t count = 0;
  std::vector<std::size_t> positions; // scalar indices
};

inline DetectResult detect(std::string_view text, const SanitizePolicy& policy = {}) {
  DetectResult result;
  const CodePoints scalars = decode_utf8(text);
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (policy.in_range(scalars[i])) {
      ++result.count;
      result.positions.push_back(i);
    }
  }
  return result;
}

} // namespace dmark
