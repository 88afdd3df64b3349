import numpy as np

from ..errors import DatasetError
from .font_data import GLYPHS

GLYPH_HEIGHT = 16
GLYPH_WIDTH = 8


def _decode(hexrows):
    rows = np.frombuffer(bytes.fromhex(hexrows), dtype=np.uint8)
    return np.unpackbits(rows[:, None], axis=1).astype(np.float64)


class Font:
    """Fixed-pitch 8x16 bitmap font; glyphs are float arrays with ink = 1."""

    def __init__(self, glyphs=None):
        table = GLYPHS if glyphs is None else glyphs
        self.glyphs = {ch: _decode(h) if isinstance(h, str) else np.asarray(h, float)
                       for ch, h in table.items()}

    def with_glyphs(self, extra):
        """Copy of this font extended by ``{char: 16x8 array or hex string}``."""
        font = Font({})
        font.glyphs = dict(self.glyphs)
        for ch, g in extra.items():
            g = _decode(g) if isinstance(g, str) else np.asarray(g, float)
            if g.shape != (GLYPH_HEIGHT, GLYPH_WIDTH):
                raise DatasetError(f"glyph for {ch!r} must be 16x8, got {g.shape}")
            font.glyphs[ch] = g
        return font

    def glyph(self, ch):
        try:
            return self.glyphs[ch]
        except KeyError:
            raise DatasetError(f"character {ch!r} (U+{ord(ch):04X}) is not in the font") from None

    def __contains__(self, ch):
        return ch in self.glyphs


DEFAULT_FONT = Font()
