#pragma once

// Text rendering onto fixed-size canvases, plus the chunking/reassembly
// policy that splits long inputs across canvases and reverses the split.
//
// A cluster is one base scalar plus the combining marks that follow it; it
// occupies exactly one cell. Chunks break only at cluster boundaries, so a
// mark is never separated from its base. Whitespace between words is
// recorded verbatim in the chunk plan's joins: joins[i] is the separator
// inserted before chunks[i], joins back() the trailing separator, giving
// joins.size() == chunks.size() + 1 and an exact round trip for any input.
// A whitespace scalar that carries marks is word content, not a separator.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dmark/font.hpp"
#include "dmark/unicode.hpp"

namespace dmark {

class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Canvas {
  int width_cells = 0;
  // Row-major (width_cells * 8) x 14 grid, one byte per pixel, 1 = ink.
  std::vector<std::uint8_t> pixels;
  std::string source_chunk;

  int width_px() const { return width_cells * kCellWidth; }
  int height_px() const { return kCellHeight; }
  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width_px()) + static_cast<std::size_t>(col)];
  }
  void paint(int cell, const CellBits& bits) {
    for (int r = 0; r < kCellHeight; ++r)
      for (int c = 0; c < kCellWidth; ++c)
        if (bits.get(r, c))
          pixels[static_cast<std::size_t>(r) * static_cast<std::size_t>(width_px()) +
                 static_cast<std::size_t>(cell * kCellWidth + c)] = 1;
  }
  CellBits cell_bits(int cell) const {
    CellBits bits;
    for (int r = 0; r < kCellHeight; ++r)
      for (int c = 0; c < kCellWidth; ++c)
        if (at(r, cell * kCellWidth + c)) bits.set(r, c);
    return bits;
  }
  bool operator==(const Canvas&) const = default;
};

// A substituted code point: no glyph existed, a tofu box was drawn.
struct TofuSubstitution {
  std::size_t cell = 0;
  CodePoint code_point = 0;
};

struct RenderReport {
  std::vector<TofuSubstitution> substitutions;
};

struct Join {
  enum class Kind { Whitespace, IntraWord } kind = Kind::IntraWord;
  std::string separator; // exact source text the join stands for

  bool operator==(const Join&) const = default;
};

struct ChunkPlan {
  std::vector<std::string> chunks;
  std::vector<Join> joins; // joins.size() == chunks.size() + 1
  int width_cells = 0;
};

namespace render_detail {

struct Cluster {
  std::size_t begin = 0; // scalar index range [begin, end)
  std::size_t end = 0;
  bool plain_whitespace = false; // single whitespace scalar, no marks
};

inline std::vector<Cluster> clusterize(const CodePoints& scalars) {
  std::vector<Cluster> clusters;
  std::size_t i = 0;
  while (i < scalars.size()) {
    Cluster cl;
    cl.begin = i;
    if (!is_combining_mark(scalars[i])) ++i; // defective leading marks have no base
    while (i < scalars.size() && is_combining_mark(scalars[i])) ++i;
    cl.end = i;
    cl.plain_whitespace = cl.end - cl.begin == 1 && is_ascii_whitespace(scalars[cl.begin]);
    clusters.push_back(cl);
  }
  return clusters;
}

inline std::string slice(const CodePoints& scalars, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) append_utf8(out, scalars[i]);
  return out;
}

} // namespace render_detail

// Number of cells the text occupies when rendered (one per cluster).
inline std::size_t cell_width(std::string_view text) {
  const CodePoints scalars = decode_utf8(text);
  return render_detail::clusterize(scalars).size();
}

inline Canvas render(std::string_view chunk, int width_cells, RenderReport* report = nullptr) {
  if (width_cells < 1) throw RenderError("canvas width must be at least one cell");
  const CodePoints scalars = decode_utf8(chunk);
  const auto clusters = render_detail::clusterize(scalars);
  if (clusters.size() > static_cast<std::size_t>(width_cells))
    throw RenderError("chunk of " + std::to_string(clusters.size()) + " cells exceeds canvas width " +
                      std::to_string(width_cells));

  Canvas canvas;
  canvas.width_cells = width_cells;
  canvas.pixels.assign(static_cast<std::size_t>(width_cells * kCellWidth) * kCellHeight, 0);
  canvas.source_chunk.assign(chunk);

  for (std::size_t cell = 0; cell < clusters.size(); ++cell) {
    const auto& cl = clusters[cell];
    std::size_t i = cl.begin;
    if (!is_combining_mark(scalars[i])) {
      const CodePoint base = scalars[i];
      if (has_glyph(base)) {
        canvas.paint(static_cast<int>(cell), glyph_cell(static_cast<char>(base)));
      } else {
        canvas.paint(static_cast<int>(cell), tofu_cell());
        if (report != nullptr) report->substitutions.push_back({cell, base});
      }
      ++i;
    }
    for (; i < cl.end; ++i) {
      const MarkCells mc = mark_cells(scalars[i]);
      canvas.paint(static_cast<int>(cell), mc.base);
      if (mc.spills && cell + 1 < static_cast<std::size_t>(width_cells))
        canvas.paint(static_cast<int>(cell + 1), mc.next);
    }
  }
  return canvas;
}

// Greedy word wrap at cluster granularity. Words are kept whole while they
// fit; a word wider than the canvas is split into width-sized pieces. Only a
// single plain space may sit between two words inside one chunk; any other
// separator (runs, tabs, newlines) forces a chunk boundary and is carried by
// the join verbatim.
inline ChunkPlan chunk(std::string_view text, int width_cells) {
  if (width_cells < 2) throw RenderError("chunk width must be at least two cells");
  const CodePoints scalars = decode_utf8(text);
  const auto clusters = render_detail::clusterize(scalars);

  struct Word {
    std::size_t first_cluster = 0;
    std::size_t cluster_count = 0;
    std::string separator_before; // plain whitespace run preceding the word
  };
  std::vector<Word> words;
  std::string trailing;
  {
    std::string pending_sep;
    std::size_t i = 0;
    while (i < clusters.size()) {
      if (clusters[i].plain_whitespace) {
        pending_sep += render_detail::slice(scalars, clusters[i].begin, clusters[i].end);
        ++i;
        continue;
      }
      Word w;
      w.first_cluster = i;
      w.separator_before = std::move(pending_sep);
      pending_sep.clear();
      while (i < clusters.size() && !clusters[i].plain_whitespace) ++i;
      w.cluster_count = i - w.first_cluster;
      words.push_back(std::move(w));
    }
    trailing = std::move(pending_sep);
  }

  ChunkPlan plan;
  plan.width_cells = width_cells;
  const std::size_t width = static_cast<std::size_t>(width_cells);

  std::string cur;              // text of the open chunk
  std::size_t cur_cells = 0;    // cells used by the open chunk
  Join cur_join;                // join preceding the open chunk
  auto close_chunk = [&](Join next_join) {
    plan.joins.push_back(std::move(cur_join));
    plan.chunks.push_back(std::move(cur));
    cur.clear();
    cur_cells = 0;
    cur_join = std::move(next_join);
  };

  for (const Word& w : words) {
    const std::string word_text =
        render_detail::slice(scalars, clusters[w.first_cluster].begin,
                             clusters[w.first_cluster + w.cluster_count - 1].end);
    const Join sep_join{w.separator_before.empty() ? Join::Kind::IntraWord : Join::Kind::Whitespace,
                        w.separator_before};

    if (w.cluster_count <= width) {
      if (cur_cells == 0) {
        if (!plan.chunks.empty() || !w.separator_before.empty()) cur_join = sep_join;
        cur = word_text;
        cur_cells = w.cluster_count;
      } else if (w.separator_before == " " && cur_cells + 1 + w.cluster_count <= width) {
        cur += " " + word_text;
        cur_cells += 1 + w.cluster_count;
      } else {
        close_chunk(sep_join);
        cur = word_text;
        cur_cells = w.cluster_count;
      }
      continue;
    }

    // Oversized word: flush whatever is open, then emit width-sized pieces.
    if (cur_cells > 0) close_chunk(sep_join);
    else if (!plan.chunks.empty() || !w.separator_before.empty()) cur_join = sep_join;
    std::size_t taken = 0;
    while (w.cluster_count - taken > width) {
      const std::size_t first = w.first_cluster + taken;
      cur = render_detail::slice(scalars, clusters[first].begin, clusters[first + width - 1].end);
      cur_cells = width;
      taken += width;
      close_chunk(Join{Join::Kind::IntraWord, ""});
    }
    const std::size_t first = w.first_cluster + taken;
    cur = render_detail::slice(scalars, clusters[first].begin,
                               clusters[w.first_cluster + w.cluster_count - 1].end);
    cur_cells = w.cluster_count - taken;
  }

  if (cur_cells > 0) close_chunk(Join{});
  plan.joins.push_back(Join{trailing.empty() ? Join::Kind::IntraWord : Join::Kind::Whitespace,
                            std::move(trailing)});
  if (plan.joins.size() != plan.chunks.size() + 1)
    throw std::logic_error("chunk plan join fencepost broken");
  return plan;
}

namespace render_detail {

// Drops the plain-whitespace edges a model may hallucinate around a chunk. A
// whitespace scalar followed by a combining mark is a decorated cluster, not
// padding, and survives.
inline std::string strip_edge_blanks(std::string_view text) {
  CodePoints scalars = decode_utf8(text);
  std::size_t begin = 0, end = scalars.size();
  while (end > begin && is_ascii_whitespace(scalars[end - 1])) --end;
  while (begin < end && is_ascii_whitespace(scalars[begin]) &&
         !(begin + 1 < end && is_combining_mark(scalars[begin + 1])))
    ++begin;
  return slice(scalars, begin, end);
}

} // namespace render_detail

inline std::string reassemble(const std::vector<std::string>& outputs, const ChunkPlan& plan) {
  if (outputs.size() != plan.chunks.size())
    throw std::invalid_argument("reassemble: " + std::to_string(outputs.size()) + " outputs for " +
                                std::to_string(plan.chunks.size()) + " chunks");
  std::string result = plan.joins.front().separator;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    result += render_detail::strip_edge_blanks(outputs[i]);
    result += plan.joins[i + 1].separator;
  }
  return result;
}

// ---- Image formats ----

// Binary PBM: 1 = black = ink.
inline std::string encode_pbm(const Canvas& canvas) {
  std::string out = "P4\n" + std::to_string(canvas.width_px()) + " " + std::to_string(canvas.height_px()) + "\n";
  for (int r = 0; r < canvas.height_px(); ++r) {
    for (int byte = 0; byte < (canvas.width_px() + 7) / 8; ++byte) {
      std::uint8_t packed = 0;
      for (int bit = 0; bit < 8; ++bit) {
        const int col = byte * 8 + bit;
        if (col < canvas.width_px() && canvas.at(r, col)) packed |= static_cast<std::uint8_t>(0x80u >> bit);
      }
      out.push_back(static_cast<char>(packed));
    }
  }
  return out;
}

// Binary PGM, maxval 255. Ink is 0 (black) on a white (255) background; the
// convention is recorded in the header comment.
inline std::string encode_pgm(const Canvas& canvas) {
  std::string out = "P5\n# ink=0 (black) on white=255\n" + std::to_string(canvas.width_px()) + " " +
                    std::to_string(canvas.height_px()) + "\n255\n";
  for (int r = 0; r < canvas.height_px(); ++r)
    for (int c = 0; c < canvas.width_px(); ++c)
      out.push_back(static_cast<char>(canvas.at(r, c) ? 0 : 255));
  return out;
}

inline Canvas decode_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      const char ch = bytes[pos];
      if (ch == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && bytes[pos] != ' ' && bytes[pos] != '\t' && bytes[pos] != '\r' &&
           bytes[pos] != '\n' && bytes[pos] != '#')
      ++pos;
    if (start == pos) throw RenderError("truncated PGM header");
    return std::string(bytes.substr(start, pos - start));
  };

  if (next_token() != "P5") throw RenderError("not a binary PGM");
  const int width = std::stoi(next_token());
  const int height = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (width <= 0 || width % kCellWidth != 0 || height != kCellHeight)
    throw RenderError("PGM dimensions do not match a canvas");
  if (maxval != 255) throw RenderError("unsupported PGM maxval");
  ++pos; // single whitespace byte after maxval
  if (bytes.size() - pos < static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw RenderError("truncated PGM payload");

  Canvas canvas;
  canvas.width_cells = width / kCellWidth;
  canvas.pixels.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  for (std::size_t i = 0; i < canvas.pixels.size(); ++i)
    canvas.pixels[i] = static_cast<std::uint8_t>(bytes[pos + i]) < 128 ? 1 : 0;
  return canvas;
}

} // namespace dmark
