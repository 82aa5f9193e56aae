#pragma once

// Diacritic alphabet and genome application. A genome is a fixed-length list
// of (mark selector, insertion position) real-valued pairs; applying it to a
// text inserts combining marks one gene at a time into the evolving string.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dmark/unicode.hpp"

namespace dmark {

class DiacriticAlphabet {
 public:
  // Default alphabet: U+0300..U+0346 plus U+0360..U+0361 (73 marks), the
  // subset of the combining block supported by the font the attack targets.
  static DiacriticAlphabet standard() {
    std::vector<CodePoint> marks;
    for (char32_t cp = 0x0300; cp <= 0x0346; ++cp) marks.push_back(cp);
    marks.push_back(0x0360);
    marks.push_back(0x0361);
    return DiacriticAlphabet(std::move(marks));
  }

  explicit DiacriticAlphabet(std::vector<CodePoint> marks) : marks_(std::move(marks)) {
    if (marks_.empty()) throw std::invalid_argument("alphabet must not be empty");
    std::vector<CodePoint> sorted = marks_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("alphabet marks must be unique");
    for (CodePoint cp : marks_)
      if (!is_combining_mark(cp))
        throw std::invalid_argument("alphabet mark outside U+0300..U+036F");
  }

  std::size_t size() const { return marks_.size(); }
  CodePoint at(std::size_t d) const { return marks_[d]; }
  const std::vector<CodePoint>& marks() const { return marks_; }

  bool contains(CodePoint cp) const {
    return std::find(marks_.begin(), marks_.end(), cp) != marks_.end();
  }

 private:
  std::vector<CodePoint> marks_;
};

// One candidate insertion: d selects the mark (index floor(d), clamped to the
// alphabet), i the scalar position (round half away from zero; negative after
// rounding means the gene is skipped).
struct Gene {
  double mark_selector = 0.0;
  double position = -1.0;
};

struct Genome {
  std::vector<Gene> genes;

  std::size_t size() const { return genes.size(); }
};

inline std::size_t mark_index(double d, std::size_t alphabet_size) {
  const double floored = std::floor(d);
  if (floored < 0.0) return 0;
  if (floored >= static_cast<double>(alphabet_size)) return alphabet_size - 1;
  return static_cast<std::size_t>(floored);
}

// Half away from zero, the convention used everywhere insertion positions
// are realized.
inline long round_position(double i) { return static_cast<long>(std::lround(i)); }

inline CodePoints perturb_scalars(const CodePoints& input, const Genome& genome,
                                  const DiacriticAlphabet& alphabet) {
  CodePoints text = input;
  for (const Gene& gene : genome.genes) {
    const long rounded = round_position(gene.position);
    if (rounded < 0) continue;
    const std::size_t pos =
        std::min(static_cast<std::size_t>(rounded), text.size());
    const CodePoint mark = alphabet.at(mark_index(gene.mark_selector, alphabet.size()));
    text.insert(text.begin() + static_cast<std::ptrdiff_t>(pos), mark);
  }
  return text;
}

inline std::string perturb(std::string_view text, const Genome& genome,
                           const DiacriticAlphabet& alphabet) {
  return encode_utf8(perturb_scalars(decode_utf8(text), genome, alphabet));
}

inline std::size_t count_marks(std::string_view text, const DiacriticAlphabet& alphabet) {
  std::size_t n = 0;
  for (CodePoint cp : decode_utf8(text))
    if (alphabet.contains(cp)) ++n;
  return n;
}

} // namespace dmark
