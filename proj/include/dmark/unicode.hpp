#pragma once

// UTF-8 <-> scalar-value codec and the ASCII-safe escaping used in result
// files. All string positions in this library are indices into the decoded
// scalar sequence, never byte offsets.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dmark {

using CodePoint = char32_t;
using CodePoints = std::vector<char32_t>;

constexpr CodePoint kCombiningBlockFirst = 0x0300;
constexpr CodePoint kCombiningBlockLast = 0x036F;

inline bool is_combining_mark(CodePoint cp) {
  return cp >= kCombiningBlockFirst && cp <= kCombiningBlockLast;
}

inline bool is_ascii_whitespace(CodePoint cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == U'\f' || cp == U'\v';
}

class Utf8Error : public std::runtime_error {
 public:
  Utf8Error(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Strict decoder: rejects overlong forms, surrogates and values above
// U+10FFFF so that perturbed outputs always re-encode byte-identically.
inline CodePoints decode_utf8(std::string_view s) {
  CodePoints out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      throw Utf8Error("invalid UTF-8 lead byte", i);
    }
    if (i + len > s.size()) throw Utf8Error("truncated UTF-8 sequence", i);
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) throw Utf8Error("invalid UTF-8 continuation", i + k);
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (len > 1 && cp < kMinByLen[len]) throw Utf8Error("overlong UTF-8 sequence", i);
    if (cp >= 0xD800 && cp <= 0xDFFF) throw Utf8Error("surrogate in UTF-8", i);
    if (cp > 0x10FFFF) throw Utf8Error("code point above U+10FFFF", i);
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append_utf8(std::string& out, CodePoint cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode_utf8(const CodePoints& cps) {
  std::string out;
  out.reserve(cps.size());
  for (CodePoint cp : cps) append_utf8(out, cp);
  return out;
}

inline std::size_t scalar_length(std::string_view s) { return decode_utf8(s).size(); }

// Escapes every non-ASCII scalar as \u{XXXX} (uppercase hex, no padding) so
// result files stay ASCII-only and diffable. Backslash itself becomes "\\"
// to keep the escaping invertible.
inline std::string escape_non_ascii(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (CodePoint cp : decode_utf8(s)) {
    if (cp == U'\\') {
      out += "\\\\";
    } else if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else {
      char buf[16];
      std::snprintf(buf, sizeof buf, "\\u{%X}", static_cast<unsigned>(cp));
      out += buf;
    }
  }
  return out;
}

inline std::string unescape_non_ascii(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '\\') {
      out.push_back(s[i++]);
      continue;
    }
    if (i + 1 < s.size() && s[i + 1] == '\\') {
      out.push_back('\\');
      i += 2;
      continue;
    }
    if (i + 2 < s.size() && s[i + 1] == 'u' && s[i + 2] == '{') {
      const auto close = s.find('}', i + 3);
      if (close == std::string_view::npos)
        throw std::invalid_argument("unterminated \\u{...} escape");
      const std::string hex(s.substr(i + 3, close - (i + 3)));
      if (hex.empty()) throw std::invalid_argument("empty \\u{} escape");
      char32_t cp = 0;
      for (char c : hex) {
        cp <<= 4;
        if (c >= '0' && c <= '9') cp |= static_cast<char32_t>(c - '0');
        else if (c >= 'A' && c <= 'F') cp |= static_cast<char32_t>(c - 'A' + 10);
        else if (c >= 'a' && c <= 'f') cp |= static_cast<char32_t>(c - 'a' + 10);
        else throw std::invalid_argument("bad hex digit in \\u{...} escape");
      }
      append_utf8(out, cp);
      i = close + 1;
      continue;
    }
    throw std::invalid_argument("stray backslash in escaped string");
  }
  return out;
}

} // namespace dmark
