#pragma once

// Deterministic stand-in models: a template-matching OCR, a lexicon
// toxicity classifier, and a dictionary translator. They exist so the whole
// attack loop can run without external services; they make no attempt to
// imitate production model quality.

#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dmark/font.hpp"
#include "dmark/render.hpp"

namespace dmark {

namespace toy_detail {

// Templates are the renderer's own clean glyphs, one per printable ASCII
// character, diacritic zone blank.
inline const std::array<CellBits, 95>& ocr_templates() {
  static const std::array<CellBits, 95> templates = [] {
    std::array<CellBits, 95> t{};
    for (int c = 0x20; c <= 0x7E; ++c) t[static_cast<std::size_t>(c - 0x20)] = glyph_cell(static_cast<char>(c));
    return t;
  }();
  return templates;
}

} // namespace toy_detail

// Per-cell nearest-template classification; ties go to the lowest code
// point. Trailing spaces (blank tail cells) are stripped.
inline std::string toy_ocr(const Canvas& canvas) {
  const auto& templates = toy_detail::ocr_templates();
  std::string out;
  for (int cell = 0; cell < canvas.width_cells; ++cell) {
    const CellBits bits = canvas.cell_bits(cell);
    int best = 0;
    int best_dist = bits.hamming(templates[0]);
    for (int i = 1; i < 95; ++i) {
      const int d = bits.hamming(templates[static_cast<std::size_t>(i)]);
      if (d < best_dist) {
        best = i;
        best_dist = d;
      }
    }
    out.push_back(static_cast<char>(0x20 + best));
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

struct ToxicLexicon {
  std::vector<std::string> words;
  double weight = 4.0;
  double bias = -2.0;
};

// Weights make a single hit decisive: logistic(-2) ~ 0.12 with no hits,
// logistic(+2) ~ 0.88 with one, so garbling one character of a flagged word
// flips the label.
inline const ToxicLexicon& toxic_lexicon() {
  static const ToxicLexicon lexicon{
      {"stupid", "idiot", "awful", "trash", "garbage", "horrible", "nasty", "moron",
       "dumb", "pathetic", "disgusting", "loser", "ugly", "worthless", "annoying", "terrible"},
      4.0,
      -2.0};
  return lexicon;
}

// Logistic score over whitespace-tokenized, lowercased input; every
// occurrence of a lexicon word adds its weight.
inline double toy_toxic(std::string_view text, const ToxicLexicon& lexicon = toxic_lexicon()) {
  double score = lexicon.bias;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      for (const std::string& w : lexicon.words)
        if (token == w) score += lexicon.weight;
    }
    token.clear();
  };
  for (char ch : text) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v') {
      flush();
    } else {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  flush();
  return 1.0 / (1.0 + std::exp(-score));
}

inline const char* kToxicLabel = "toxic";
inline const char* kNonToxicLabel = "non-toxic";

inline const char* toxic_label(double probability) {
  return probability >= 0.5 ? kToxicLabel : kNonToxicLabel;
}

inline const std::map<std::string, std::string>& translation_dictionary() {
  static const std::map<std::string, std::string> dict = {
      {"the", "le"},       {"a", "un"},         {"and", "et"},      {"or", "ou"},
      {"is", "est"},       {"was", "etait"},    {"with", "avec"},   {"under", "sous"},
      {"over", "sur"},     {"here", "ici"},     {"there", "la-bas"},{"yes", "oui"},
      {"no", "non"},       {"you", "vous"},     {"we", "nous"},     {"cat", "chat"},
      {"dog", "chien"},    {"house", "maison"}, {"tree", "arbre"},  {"water", "eau"},
      {"fire", "feu"},     {"sun", "soleil"},   {"moon", "lune"},   {"star", "etoile"},
      {"day", "jour"},     {"night", "nuit"},   {"good", "bon"},    {"bad", "mauvais"},
      {"big", "grand"},    {"small", "petit"},  {"old", "vieux"},   {"new", "nouveau"},
      {"hello", "bonjour"},{"world", "monde"},  {"friend", "ami"},  {"book", "livre"},
      {"road", "route"},   {"city", "ville"},   {"river", "riviere"},{"mountain", "montagne"},
      {"bird", "oiseau"},  {"fish", "poisson"}, {"bread", "pain"},  {"milk", "lait"},
      {"red", "rouge"},    {"green", "vert"},   {"blue", "bleu"},   {"white", "blanc"},
      {"black", "noir"},   {"one", "un"},       {"two", "deux"},    {"three", "trois"},
      {"morning", "matin"},{"evening", "soir"},
  };
  return dict;
}

// Word-by-word lookup; unknown words (including punctuated tokens) pass
// through unchanged; an uppercase first letter is preserved. Whitespace runs
// normalize to single spaces.
inline std::string toy_translate(std::string_view text) {
  const auto& dict = translation_dictionary();
  std::string out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::string key;
    key.reserve(token.size());
    for (char ch : token) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    std::string translated;
    const auto it = dict.find(key);
    if (it != dict.end()) {
      translated = it->second;
      if (std::isupper(static_cast<unsigned char>(token.front())) && !translated.empty())
        translated.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(translated.front())));
    } else {
      translated = token;
    }
    if (!out.empty()) out.push_back(' ');
    out += translated;
    token.clear();
  };
  for (char ch : text) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v') flush();
    else token.push_back(ch);
  }
  flush();
  return out;
}

} // namespace dmark
