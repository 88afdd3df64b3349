"""Deterministic synthetic text-line corpora, codecs and fold splits."""

from .corpus import (
    DOUBLED_WORDS,
    PLAIN_WORDS,
    WORDS,
    Codec,
    FoldSplit,
    WordSampler,
    build_codec,
    generate_corpus,
    has_double,
    load_dataset,
    read_pgm,
    save_dataset,
    split_dataset,
    write_pgm,
)
from .font import DEFAULT_FONT, Font
from .render import LINE_HEIGHT, DegradationParams, LineSample, render_line

__all__ = [
    "DOUBLED_WORDS",
    "PLAIN_WORDS",
    "WORDS",
    "Codec",
    "DEFAULT_FONT",
    "DegradationParams",
    "FoldSplit",
    "Font",
    "LINE_HEIGHT",
    "LineSample",
    "WordSampler",
    "build_codec",
    "generate_corpus",
    "has_double",
    "load_dataset",
    "read_pgm",
    "render_line",
    "save_dataset",
    "split_dataset",
    "write_pgm",
]
