"""Rasterize DejaVu Sans Mono Bold into the 8x16 glyph table used by ocrlab.

Run once; the output module is checked in so rendering never needs a font file.

    python3 tools/make_font.py > src/ocrlab/synthline/font_data.py
"""
import sys

import numpy as np
from PIL import Image, ImageDraw, ImageFont

FONT = "/usr/share/fonts/truetype/dejavu/DejaVuSansMono-Bold.ttf"
EXTRA = "äöüÄÖÜßſ"


def rasterize(ch, font):
    img = Image.new("L", (8 * 4, 16 * 4), 0)
    ImageDraw.Draw(img).text((0, 0), ch, fill=255, font=font)
    # supersample then box-downscale to the 8x16 cell
    arr = np.asarray(img, dtype=float).reshape(16, 4, 8, 4).mean(axis=(1, 3))
    return arr > 100


def main():
    font = ImageFont.truetype(FONT, 52)
    chars = [chr(c) for c in range(0x20, 0x7F)] + list(EXTRA)
    out = sys.stdout
    out.write('"""8x16 bitmap glyphs, one hex string of 16 row bytes per character.\n\n'
              'Generated by tools/make_font.py from DejaVu Sans Mono Bold.\n"""\n\n')
    out.write("GLYPHS = {\n")
    for ch in chars:
        bits = rasterize(ch, font)
        rows = np.packbits(bits, axis=1)[:, 0]
        out.write(f"    {ch!r}: {bytes(rows).hex()!r},\n")
    out.write("}\n")


if __name__ == "__main__":
    main()
