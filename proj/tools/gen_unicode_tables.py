#!/usr/bin/env python3
"""Regenerates include/dmark/unicode_data.hpp from Python's unicodedata.

Emits three tables covering code points below 0x3000:
  * full canonical decompositions (NFD expansion per code point)
  * nonzero canonical combining classes
  * primary composition pairs (starter, combiner) -> composed

Run from the repository root:  python3 tools/gen_unicode_tables.py
"""
import sys
import unicodedata

LIMIT = 0x3000


def nfd(cp):
    return [ord(c) for c in unicodedata.normalize("NFD", chr(cp))]


def main():
    decomp = {}
    for cp in range(LIMIT):
        d = unicodedata.decomposition(chr(cp))
        if d and not d.startswith("<"):
            decomp[cp] = nfd(cp)

    ccc = {}
    seen = set(range(LIMIT))
    for seq in decomp.values():
        seen.update(seq)
    for cp in sorted(seen):
        c = unicodedata.combining(chr(cp))
        if c:
            ccc[cp] = c

    # A pair (a, b) composes to cp iff cp's canonical decomposition is exactly
    # [a, b] with a a starter, and NFC maps that sequence back to cp (this
    # filters the composition exclusions without an explicit exclusion list).
    pairs = {}
    for cp in sorted(decomp):
        raw = unicodedata.decomposition(chr(cp)).split()
        if len(raw) != 2:
            continue
        a, b = (int(x, 16) for x in raw)
        if unicodedata.combining(chr(a)) != 0:
            continue
        if unicodedata.normalize("NFC", chr(a) + chr(b)) == chr(cp):
            pairs[(a, b)] = cp

    out = sys.stdout
    out.write("#pragma once\n\n")
    out.write("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit.\n"
              % unicodedata.unidata_version)
    out.write("// Canonical decomposition / combining-class / composition data for\n")
    out.write("// code points below U+3000.\n\n")
    out.write("#include <cstdint>\n\n")
    out.write("namespace dmark::ucd {\n\n")

    flat = []
    index = []  # (cp, offset, len)
    for cp in sorted(decomp):
        seq = decomp[cp]
        index.append((cp, len(flat), len(seq)))
        flat.extend(seq)

    out.write("// Flattened NFD expansions, addressed by kDecompIndex.\n")
    out.write("inline constexpr char32_t kDecompData[] = {\n")
    for i in range(0, len(flat), 10):
        out.write("    " + ", ".join("0x%04X" % v for v in flat[i:i + 10]) + ",\n")
    out.write("};\n\n")

    out.write("struct DecompEntry { char32_t cp; std::uint16_t offset; std::uint8_t length; };\n")
    out.write("inline constexpr DecompEntry kDecompIndex[] = {\n")
    for i in range(0, len(index), 4):
        row = ", ".join("{0x%04X, %d, %d}" % e for e in index[i:i + 4])
        out.write("    " + row + ",\n")
    out.write("};\n\n")

    out.write("struct CccEntry { char32_t cp; std::uint8_t ccc; };\n")
    out.write("inline constexpr CccEntry kCombiningClass[] = {\n")
    items = sorted(ccc.items())
    for i in range(0, len(items), 6):
        row = ", ".join("{0x%04X, %d}" % e for e in items[i:i + 6])
        out.write("    " + row + ",\n")
    out.write("};\n\n")

    out.write("struct ComposeEntry { char32_t first; char32_t second; char32_t composed; };\n")
    out.write("inline constexpr ComposeEntry kComposePairs[] = {\n")
    citems = sorted((a, b, c) for (a, b), c in pairs.items())
    for i in range(0, len(citems), 4):
        row = ", ".join("{0x%04X, 0x%04X, 0x%04X}" % e for e in citems[i:i + 4])
        out.write("    " + row + ",\n")
    out.write("};\n\n")

    out.write("} // namespace dmark::ucd\n")


if __name__ == "__main__":
    main()
