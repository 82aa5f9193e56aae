#pragma once

// Embedded fixed bitmap font.
//
// Every printable ASCII character (0x20..0x7E) has an 8x14 cell. Rows 0-3
// form the diacritic zone and stay empty in base glyphs; the glyph body uses
// rows 4-13. Caps and ascenders sit in rows 5-11, the x-height band is rows
// 7-11, the baseline is row 11, descenders reach rows 12-13.
//
// Combining marks paint patterns into an existing cell: above-marks in the
// diacritic zone, tall above-marks reaching down into body rows 4-5, overlay
// marks (U+0334..U+0338) in rows 7-9, below-marks in rows 12-13, and the
// double marks U+0360/U+0361 spilling into the following cell. Marks without
// a designed shape get a deterministic 4x3 pattern from the low bits of
// their code point, so every mark has a nonempty, distinct pixel effect.
//
// Art strings use '.' for blank and '#' for ink, 8 columns per row, rows
// separated by '/'.

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dmark/unicode.hpp"

namespace dmark {

inline constexpr int kCellWidth = 8;
inline constexpr int kCellHeight = 14;
inline constexpr int kDiacriticZoneRows = 4;

// One 8x14 pixel cell, one byte per row, column c stored in bit (7 - c).
struct CellBits {
  std::array<std::uint8_t, kCellHeight> rows{};

  bool get(int row, int col) const {
    return (rows[static_cast<std::size_t>(row)] >> (7 - col)) & 1;
  }
  void set(int row, int col) {
    rows[static_cast<std::size_t>(row)] |= static_cast<std::uint8_t>(1u << (7 - col));
  }
  void merge(const CellBits& other) {
    for (int r = 0; r < kCellHeight; ++r) rows[static_cast<std::size_t>(r)] |= other.rows[static_cast<std::size_t>(r)];
  }
  int hamming(const CellBits& other) const {
    int d = 0;
    for (int r = 0; r < kCellHeight; ++r)
      d += std::popcount(static_cast<unsigned>(rows[static_cast<std::size_t>(r)] ^ other.rows[static_cast<std::size_t>(r)]));
    return d;
  }
  bool operator==(const CellBits&) const = default;
};

namespace font_detail {

struct GlyphArt {
  char ch;
  const char* art; // 10 rows (cell rows 4..13), '/'-separated
};

// clang-format off
inline constexpr GlyphArt kGlyphArt[] = {
  {' ',  "......../......../......../......../......../......../......../......../......../........"},
  {'!',  "......../...#..../...#..../...#..../...#..../......../...#..../...#..../......../........"},
  {'"',  "......../..#.#.../..#.#.../......../......../......../......../......../......../........"},
  {'#',  "......../......../..#.#.../.#####../..#.#.../.#####../..#.#.../......../......../........"},
  {'$',  "......../...#..../..####../.#....../..###.../.....#../.####.../...#..../......../........"},
  {'%',  "......../.##...../.##..#../....#.../...#..../..#...../.#..##../....##../......../........"},
  {'&',  "......../..##..../.#..#.../.#..#.../..##..../.#.#.#../.#..#.../..##.#../......../........"},
  {'\'', "......../...#..../...#..../......../......../......../......../......../......../........"},
  {'(',  "......../....#.../...#..../..#...../..#...../..#...../...#..../....#.../......../........"},
  {')',  "......../..#...../...#..../....#.../....#.../....#.../...#..../..#...../......../........"},
  {'*',  "......../......../......../.#.#.#../..###.../.#.#.#../......../......../......../........"},
  {'+',  "......../......../......../...#..../...#..../.#####../...#..../...#..../......../........"},
  {',',  "......../......../......../......../......../......../...##.../...##.../...#..../...#...."},
  {'-',  "......../......../......../......../......../.#####../......../......../......../........"},
  {'.',  "......../......../......../......../......../......../...##.../...##.../......../........"},
  {'/',  "......../.....#../.....#../....#.../...#..../..#...../.#....../.#....../......../........"},
  {'0',  "......../..###.../.#...#../.#..##../.#.#.#../.##..#../.#...#../..###.../......../........"},
  {'1',  "......../...#..../..##..../...#..../...#..../...#..../...#..../..###.../......../........"},
  {'2',  "......../..###.../.#...#../.....#../....#.../...#..../..#...../.#####../......../........"},
  {'3',  "......../.#####../....#.../...#..../....#.../.....#../.#...#../..###.../......../........"},
  {'4',  "......../....#.../...##.../..#.#.../.#..#.../.#####../....#.../....#.../......../........"},
  {'5',  "......../.#####../.#....../.####.../.....#../.....#../.#...#../..###.../......../........"},
  {'6',  "......../...##.../..#...../.#....../.####.../.#...#../.#...#../..###.../......../........"},
  {'7',  "......../.#####../.....#../....#.../...#..../..#...../..#...../..#...../......../........"},
  {'8',  "......../..###.../.#...#../.#...#../..###.../.#...#../.#...#../..###.../......../........"},
  {'9',  "......../..###.../.#...#../.#...#../..####../.....#../....#.../..##..../......../........"},
  {':',  "......../......../......../...##.../...##.../......../...##.../...##.../......../........"},
  {';',  "......../......../......../...##.../...##.../......../...##.../...##.../...#..../...#...."},
  {'<',  "......../......../....#.../...#..../..#...../...#..../....#.../......../......../........"},
  {'=',  "......../......../......../.#####../......../.#####../......../......../......../........"},
  {'>',  "......../......../..#...../...#..../....#.../...#..../..#...../......../......../........"},
  {'?',  "......../..###.../.#...#../....#.../...#..../...#..../......../...#..../......../........"},
  {'@',  "......../..###.../.#...#../.#.###../.#.#.#../.#.###../.#....../..###.../......../........"},
  {'A',  "......../..###.../.#...#../.#...#../.#####../.#...#../.#...#../.#...#../......../........"},
  {'B',  "......../.####.../.#...#../.#...#../.####.../.#...#../.#...#../.####.../......../........"},
  {'C',  "......../..###.../.#...#../.#....../.#....../.#....../.#...#../..###.../......../........"},
  {'D',  "......../.####.../.#...#../.#...#../.#...#../.#...#../.#...#../.####.../......../........"},
  {'E',  "......../.#####../.#....../.#....../.####.../.#....../.#....../.#####../......../........"},
  {'F',  "......../.#####../.#....../.#....../.####.../.#....../.#....../.#....../......../........"},
  {'G',  "......../..###.../.#...#../.#....../.#....../.#..##../.#...#../..####../......../........"},
  {'H',  "......../.#...#../.#...#../.#...#../.#####../.#...#../.#...#../.#...#../......../........"},
  {'I',  "......../..###.../...#..../...#..../...#..../...#..../...#..../..###.../......../........"},
  {'J',  "......../...###../....#.../....#.../....#.../....#.../.#..#.../..##..../......../........"},
  {'K',  "......../.#...#../.#..#.../.#.#..../.##...../.#.#..../.#..#.../.#...#../......../........"},
  {'L',  "......../.#....../.#....../.#....../.#....../.#....../.#....../.#####../......../........"},
  {'M',  "......../.#...#../.##.##../.#.#.#../.#.#.#../.#...#../.#...#../.#...#../......../........"},
  {'N',  "......../.#...#../.##..#../.#.#.#../.#..##../.#...#../.#...#../.#...#../......../........"},
  {'O',  "......../..###.../.#...#../.#...#../.#...#../.#...#../.#...#../..###.../......../........"},
  {'P',  "......../.####.../.#...#../.#...#../.####.../.#....../.#....../.#....../......../........"},
  {'Q',  "......../..###.../.#...#../.#...#../.#...#../.#.#.#../.#..#.../..##.#../......../........"},
  {'R',  "......../.####.../.#...#../.#...#../.####.../.#.#..../.#..#.../.#...#../......../........"},
  {'S',  "......../..####../.#....../.#....../..###.../.....#../.....#../.####.../......../........"},
  {'T',  "......../.#####../...#..../...#..../...#..../...#..../...#..../...#..../......../........"},
  {'U',  "......../.#...#../.#...#../.#...#../.#...#../.#...#../.#...#../..###.../......../........"},
  {'V',  "......../.#...#../.#...#../.#...#../.#...#../..#.#.../..#.#.../...#..../......../........"},
  {'W',  "......../.#...#../.#...#../.#...#../.#.#.#../.#.#.#../.##.##../.#...#../......../........"},
  {'X',  "......../.#...#../.#...#../..#.#.../...#..../..#.#.../.#...#../.#...#../......../........"},
  {'Y',  "......../.#...#../.#...#../..#.#.../...#..../...#..../...#..../...#..../......../........"},
  {'Z',  "......../.#####../.....#../....#.../...#..../..#...../.#....../.#####../......../........"},
  {'[',  "......../..##..../..#...../..#...../..#...../..#...../..#...../..##..../......../........"},
  {'\\', "......../.#....../.#....../..#...../...#..../....#.../.....#../.....#../......../........"},
  {']',  "......../...##.../....#.../....#.../....#.../....#.../....#.../...##.../......../........"},
  {'^',  "......../...#..../..#.#.../.#...#../......../......../......../......../......../........"},
  {'_',  "......../......../......../......../......../......../......../......../#######./........"},
  {'`',  "......../...#..../....#.../......../......../......../......../......../......../........"},
  {'a',  "......../......../......../..###.../.....#../..####../.#...#../..####../......../........"},
  {'b',  "......../.#....../.#....../.#.##.../.##..#../.#...#../.##..#../.#.##.../......../........"},
  {'c',  "......../......../......../..###.../.#...#../.#....../.#...#../..###.../......../........"},
  {'d',  "......../.....#../.....#../..##.#../.#..##../.#...#../.#..##../..##.#../......../........"},
  {'e',  "......../......../......../..###.../.#...#../.#####../.#...#../..###.../......../........"},
  {'f',  "......../..##..../.#....../####..../.#....../.#....../.#....../.#....../......../........"},
  {'g',  "......../......../......../..###.../.#...#../.#...#../.#...#../..###.../.....#../..###..."},
  {'h',  "......../.#....../.#....../.#.##.../.##..#../.#...#../.#...#../.#...#../......../........"},
  {'i',  "......../......../...#..../......../...#..../...#..../...#..../...#..../......../........"},
  {'j',  "......../......../...#..../......../...#..../...#..../...#..../...#..../...#..../...#...."},
  {'k',  "......../.#....../.#....../.#..#.../.#.#..../.##...../.#.#..../.#..#.../......../........"},
  {'l',  "...#..../...#..../...#..../...#..../...#..../...#..../...#..../...#..../......../........"},
  {'m',  "......../......../......../.##.#.../.#.#.#../.#.#.#../.#.#.#../.#.#.#../......../........"},
  {'n',  "......../......../......../.#.##.../.##..#../.#...#../.#...#../.#...#../......../........"},
  {'o',  "......../......../......../..###.../.#...#../.#...#../.#...#../..###.../......../........"},
  {'p',  "......../......../......../.#.##.../.##..#../.#...#../.##..#../.#.##.../.#....../.#......"},
  {'q',  "......../......../......../..###.../.....#../..####../.#...#../..####../.....#../.....#.."},
  {'r',  "......../......../......../.#.##.../.##..#../.#....../.#....../.#....../......../........"},
  {'s',  "......../......../......../..####../.#....../..###.../.....#../.####.../......../........"},
  {'t',  "......../..#...../..#...../.###..../..#...../..#...../..#...../...##.../......../........"},
  {'u',  "......../......../......../.#...#../.#...#../.#...#../.#...#../..###.../......../........"},
  {'v',  "......../......../......../.#...#../.#...#../..#.#.../..#.#.../...#..../......../........"},
  {'w',  "......../......../......../.#...#../.#.#.#../.#.#.#../.#.#.#../..#.#.../......../........"},
  {'x',  "......../......../......../.#...#../..#.#.../...#..../..#.#.../.#...#../......../........"},
  {'y',  "......../......../......../.#...#../.#...#../..#.#.../..#.#.../...#..../...#..../...#...."},
  {'z',  "......../......../......../.#####../....#.../...#..../..#...../.#####../......../........"},
  {'{',  "......../....##../...#..../...#..../..#...../...#..../...#..../....##../......../........"},
  {'|',  "...#..../...#..../...#..../...#..../...#..../...#..../...#..../...#..../...#..../...#...."},
  {'}',  "......../..##..../....#.../....#.../.....#../....#.../....#.../..##..../......../........"},
  {'~',  "......../......../......../..##..../.#..#.../......../......../......../......../........"},
};
// clang-format on

// Rectangle outline shown for code points with no glyph.
inline constexpr const char* kTofuArt =
    "......../.#####../.#...#../.#...#../.#...#../.#...#../.#...#../.#####../......../........";

struct MarkArt {
  char32_t cp;
  int top_row;          // cell row of the first art row
  const char* art;      // 1..4 rows, '/'-separated
  const char* next_art; // pattern for the following cell (double marks), or nullptr
};

// Designed mark shapes. Classic above-marks stay inside the diacritic zone;
// the vertical/tall family reaches into body rows 4-5; overlays occupy rows
// 7-9; below-marks rows 12-13. Alphabet members absent from this table fall
// back to the bit-pattern rule below.
// clang-format off
inline constexpr MarkArt kMarkArt[] = {
  {0x0300, 1, "..#...../...#..../....#...", nullptr},              // grave
  {0x0301, 1, "....#.../...#..../..#.....", nullptr},              // acute
  {0x0302, 1, "...#..../..#.#...", nullptr},                       // circumflex
  {0x0303, 1, "..##..../.#..#...", nullptr},                       // tilde
  {0x0304, 2, ".#####..", nullptr},                                // macron
  {0x0306, 1, ".#...#../..###...", nullptr},                       // breve
  {0x0307, 2, "...#....", nullptr},                                // dot above
  {0x0308, 2, "..#.#...", nullptr},                                // diaeresis
  {0x0309, 1, "...##.../....#.../...#....", nullptr},              // hook above
  {0x030A, 1, "...#..../..#.#.../...#....", nullptr},              // ring above
  {0x030B, 1, "...#.#../..#.#...", nullptr},                       // double acute
  {0x030C, 1, "..#.#.../...#....", nullptr},                       // caron
  {0x030D, 2, "...#..../...#..../...#..../...#....", nullptr},     // vertical line above (tall)
  {0x030E, 2, "..#.#.../..#.#.../..#.#.../..#.#...", nullptr},     // double vertical line above (tall)
  {0x030F, 1, ".#..#.../..#..#..", nullptr},                       // double grave
  {0x0310, 1, "...#..../.#...#../..###...", nullptr},              // candrabindu
  {0x0311, 1, "..###.../.#...#..", nullptr},                       // inverted breve
  {0x0323, 12, "...#....", nullptr},                               // dot below
  {0x0324, 12, "..#.#...", nullptr},                               // diaeresis below
  {0x0325, 12, "..#.#.../...#....", nullptr},                      // ring below
  {0x0326, 12, ".....#../.....#..", nullptr},                      // comma below
  {0x0327, 12, "...#..../..##....", nullptr},                      // cedilla
  {0x0328, 12, "....#.../....##..", nullptr},                      // ogonek
  {0x0329, 12, "...#..../...#....", nullptr},                      // vertical line below
  {0x032E, 12, ".#...#../..###...", nullptr},                      // breve below
  {0x0330, 12, "..##..../....##..", nullptr},                      // tilde below
  {0x0331, 12, ".#####..", nullptr},                               // macron below
  {0x0334, 7, "..##..../.#..#...", nullptr},                       // tilde overlay
  {0x0335, 9, "..###...", nullptr},                                // short stroke overlay
  {0x0336, 9, "#######.", nullptr},                                // long stroke overlay
  {0x0337, 7, "....#.../...#..../..#.....", nullptr},              // short solidus overlay
  {0x0338, 7, "....##../..##..../##......", nullptr},              // long solidus overlay
  {0x0339, 12, "....#.../...#....", nullptr},                      // right half ring below
  {0x033A, 12, ".#...#../.#####..", nullptr},                      // inverted bridge below
  {0x033B, 12, "..###.../..#.#...", nullptr},                      // square below
  {0x033C, 12, ".#.#.#../..#.#...", nullptr},                      // seagull below
  {0x033E, 2, "...#..../....#.../...#..../..#.....", nullptr},     // vertical tilde (tall)
  {0x0342, 3, "...#..../..#.#.../.#...#..", nullptr},              // perispomeni (tall)
  {0x0345, 12, "...#..../...##...", nullptr},                      // iota below
  {0x0360, 0, "....##../...#....", "##....../..#....."},           // double tilde
  {0x0361, 0, "......#./....##..", "#......./.##....."},           // double inverted breve
};
// clang-format on

inline CellBits parse_art(std::string_view art, int top_row) {
  CellBits cell;
  int row = top_row;
  std::size_t col = 0;
  for (char ch : art) {
    if (ch == '/') {
      if (col != kCellWidth) throw std::logic_error("font art row is not 8 columns");
      ++row;
      col = 0;
      continue;
    }
    if (row < 0 || row >= kCellHeight || col >= kCellWidth)
      throw std::logic_error("font art outside the cell");
    if (ch == '#') cell.set(row, static_cast<int>(col));
    else if (ch != '.') throw std::logic_error("font art uses only '.' and '#'");
    ++col;
  }
  if (col != kCellWidth) throw std::logic_error("font art row is not 8 columns");
  return cell;
}

struct GlyphTable {
  std::array<CellBits, 95> cells{};
  CellBits tofu;
};

inline const GlyphTable& glyph_table() {
  static const GlyphTable table = [] {
    GlyphTable t;
    std::array<bool, 95> seen{};
    for (const GlyphArt& g : kGlyphArt) {
      const int idx = g.ch - 0x20;
      if (idx < 0 || idx >= 95 || seen[static_cast<std::size_t>(idx)])
        throw std::logic_error("glyph table entry out of range or duplicated");
      seen[static_cast<std::size_t>(idx)] = true;
      t.cells[static_cast<std::size_t>(idx)] = parse_art(g.art, kDiacriticZoneRows);
    }
    for (bool s : seen)
      if (!s) throw std::logic_error("glyph table incomplete");
    t.tofu = parse_art(kTofuArt, kDiacriticZoneRows);
    return t;
  }();
  return table;
}

} // namespace font_detail

inline bool has_glyph(CodePoint cp) { return cp >= 0x20 && cp <= 0x7E; }

inline const CellBits& glyph_cell(char ch) {
  if (!has_glyph(static_cast<CodePoint>(static_cast<unsigned char>(ch))))
    throw std::out_of_range("no glyph for this code point");
  return font_detail::glyph_table().cells[static_cast<std::size_t>(ch - 0x20)];
}

inline const CellBits& tofu_cell() { return font_detail::glyph_table().tofu; }

// Pixel effect of one combining mark: pattern for the decorated cell plus,
// for the two-cell double marks, a pattern for the following cell.
struct MarkCells {
  CellBits base;
  CellBits next;
  bool spills = false;
};

inline MarkCells mark_cells(CodePoint cp) {
  static const std::vector<std::pair<char32_t, MarkCells>> designed = [] {
    std::vector<std::pair<char32_t, MarkCells>> v;
    for (const font_detail::MarkArt& m : font_detail::kMarkArt) {
      MarkCells mc;
      mc.base = font_detail::parse_art(m.art, m.top_row);
      if (m.next_art != nullptr) {
        mc.next = font_detail::parse_art(m.next_art, m.top_row);
        mc.spills = true;
      }
      v.emplace_back(m.cp, mc);
    }
    return v;
  }();
  for (const auto& [designed_cp, cells] : designed)
    if (designed_cp == cp) return cells;

  // Fallback: 12 low bits of the code point light a 4x3 block at columns
  // 2..5. Bit 3 selects a tall placement (rows 3-5, reaching into the glyph
  // body) over the plain diacritic-zone placement (rows 1-3). Code points in
  // the combining block always have a nonzero low byte except U+0300, which
  // is designed above, so the pattern is never empty.
  MarkCells mc;
  const int top = (cp & 0x8) ? 3 : 1;
  const std::uint32_t bits = cp & 0xFFF;
  for (int b = 0; b < 12; ++b)
    if ((bits >> b) & 1) mc.base.set(top + b / 4, 2 + b % 4);
  return mc;
}

} // namespace dmark
