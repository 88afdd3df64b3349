"""Rendering of synthetic text lines with controllable degradations."""

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.ndimage import uniform_filter

from ..errors import ConfigurationError, DatasetError
from .font import DEFAULT_FONT, GLYPH_HEIGHT, GLYPH_WIDTH

LINE_HEIGHT = 32
MARGIN = 4


@dataclass
class LineSample:
    """A normalized grayscale line image (ink = 1, background = 0) and its text."""

    image: np.ndarray
    text: str

    @property
    def width(self):
        return self.image.shape[1]


@dataclass(frozen=True)
class DegradationParams:
    jitter: int = 0  # max horizontal glyph offset, px
    wave_amplitude: float = 0.0  # baseline sine amplitude, px
    wave_period: float = 48.0  # px
    noise_std: float = 0.0
    salt_pepper: float = 0.0  # per-pixel flip probability
    smoothing: int = 1  # box filter width, 1 = off
    seed: int = 0

    def __post_init__(self):
        for name in ("jitter", "wave_amplitude", "noise_std", "salt_pepper"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0")
        if self.wave_period <= 0 or self.smoothing < 1 or self.salt_pepper > 1:
            raise ConfigurationError("invalid degradation parameters")

    @classmethod
    def degraded(cls, seed=0):
        """The mildly noisy preset used for the deep-vs-shallow experiments."""
        return cls(jitter=1, wave_amplitude=1.5, wave_period=40.0, noise_std=0.08,
                   salt_pepper=0.01, smoothing=2, seed=seed)

    def to_dict(self):
        return asdict(self)


def render_line(text, params=None, font=None, line_index=0):
    """Render ``text`` into a ``32 x W`` image with ``W = 8 * len(text) + 8``.

    Every line draws from its own random stream seeded by
    ``(params.seed, line_index)``, so lines can be generated independently.
    Pixel values are quantized to multiples of 1/255.
    """
    params = params or DegradationParams()
    font = font or DEFAULT_FONT
    glyphs = [font.glyph(ch) for ch in text]  # fails early on unknown characters
    if not text:
        raise DatasetError("cannot render an empty line")
    rng = np.random.default_rng([params.seed, line_index])

    width = GLYPH_WIDTH * len(text) + 2 * MARGIN
    img = np.zeros((LINE_HEIGHT, width))
    phase = rng.uniform(0, 2 * math.pi)
    top = (LINE_HEIGHT - GLYPH_HEIGHT) // 2
    for k, g in enumerate(glyphs):
        dx = int(rng.integers(-params.jitter, params.jitter + 1)) if params.jitter else 0
        x0 = min(max(MARGIN + GLYPH_WIDTH * k + dx, 0), width - GLYPH_WIDTH)
        dy = params.wave_amplitude * math.sin(2 * math.pi * x0 / params.wave_period + phase)
        y0 = min(max(top + int(round(dy)), 0), LINE_HEIGHT - GLYPH_HEIGHT)
        region = img[y0 : y0 + GLYPH_HEIGHT, x0 : x0 + GLYPH_WIDTH]
        np.maximum(region, g, out=region)

    if params.smoothing > 1:
        img = uniform_filter(img, size=params.smoothing, mode="constant")
    if params.noise_std > 0:
        img = np.clip(img + rng.normal(0.0, params.noise_std, img.shape), 0.0, 1.0)
    if params.salt_pepper > 0:
        flip = rng.random(img.shape) < params.salt_pepper
        img[flip] = 1.0 - img[flip]
    img = np.round(img * 255.0) / 255.0
    return LineSample(img, text)
