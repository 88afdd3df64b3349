"""Corpus generation, dataset directories, codecs and fold splits."""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DatasetError
from .render import LINE_HEIGHT, DegradationParams, LineSample, render_line

DOUBLED_WORDS = (
    "letter", "coffee", "error", "little", "better", "summer", "apple", "happy",
    "running", "hello", "all", "will", "good", "book", "see", "tree", "off",
    "ball", "bell", "full", "grass", "class", "need", "feel", "added", "too",
    "street", "matter", "yellow", "bottle", "dinner", "pass", "less", "moon",
)
PLAIN_WORDS = (
    "the", "and", "of", "to", "in", "is", "it", "that", "was", "for", "on",
    "are", "as", "with", "his", "they", "at", "be", "this", "from", "have",
    "or", "by", "one", "had", "not", "but", "what", "some", "we", "can", "out",
    "other", "were", "your", "when", "up", "use", "word", "how", "said", "an",
    "each", "she", "which", "do", "their", "time", "if", "way", "about",
    "many", "then", "them", "write", "would", "like", "so", "these", "her",
    "long", "make", "thing", "him", "two", "has", "look", "more", "day",
    "could", "go", "come", "did", "number", "sound", "no", "most", "people",
    "my", "over", "know", "water", "than", "call", "first", "who", "may",
    "down", "side", "been", "now", "find", "any", "new", "work", "part",
    "take", "get", "place", "made", "live", "where", "after", "back", "only",
    "round", "man", "year", "came", "show", "every", "name", "just", "print",
    "early", "books", "line", "text", "page", "type", "press", "ink",
)
WORDS = DOUBLED_WORDS + PLAIN_WORDS


def has_double(text):
    return any(a == b and a != " " for a, b in zip(text, text[1:]))


class WordSampler:
    """Draws words from a fixed list, or invents pseudo-words over an alphabet.

    With ``alphabet`` given, words from the built-in list that use only those
    letters are kept and topped up with random pseudo-words (a third of them
    containing a doubled letter) until ``pool_size`` words are available.
    """

    def __init__(self, alphabet=None, words=None, pool_size=200, seed=0):
        words = list(WORDS if words is None else words)
        if alphabet is None:
            self.words = words
        else:
            letters = sorted(set(alphabet) - {" "})
            if len(letters) < 2:
                raise DatasetError("alphabet needs at least two letters")
            keep = [w for w in words if set(w) <= set(letters)]
            rng = np.random.default_rng([seed, 7919])
            seen = set(keep)
            while len(keep) < pool_size:
                n = int(rng.integers(2, 7))
                w = [letters[i] for i in rng.integers(0, len(letters), n)]
                if rng.random() < 1 / 3:
                    k = int(rng.integers(0, n))
                    w.insert(k, w[k])
                w = "".join(w)
                if w not in seen:
                    seen.add(w)
                    keep.append(w)
            self.words = keep
        self.doubled = [w for w in self.words if has_double(w)]
        if not self.doubled:
            raise DatasetError("word source contains no doubled-letter words")

    def line(self, rng, n_words, force_double=False):
        words = [self.words[i] for i in rng.integers(0, len(self.words), n_words)]
        if force_double and not any(has_double(w) for w in words):
            words[int(rng.integers(0, n_words))] = self.doubled[int(rng.integers(0, len(self.doubled)))]
        return " ".join(words)


def generate_corpus(line_count, params=None, alphabet=None, words=None, out_dir=None,
                    min_words=2, max_words=3, font=None):
    """Generate ``line_count`` rendered lines; optionally write a dataset directory.

    Every tenth line is forced to contain a doubled-letter word, so at least
    10% of the ground truth exercises repeated characters.
    """
    if line_count < 1:
        raise DatasetError("line_count must be >= 1")
    params = params or DegradationParams()
    sampler = WordSampler(alphabet=alphabet, words=words, seed=params.seed)
    samples = []
    for i in range(line_count):
        rng = np.random.default_rng([params.seed, i, 1])
        n_words = int(rng.integers(min_words, max_words + 1))
        text = sampler.line(rng, n_words, force_double=i % 10 == 0)
        samples.append(render_line(text, params, font=font, line_index=i))
    if out_dir is not None:
        save_dataset(samples, out_dir, manifest={"seed": params.seed, "params": params.to_dict(),
                                                 "alphabet": alphabet})
    return samples


# ---------------------------------------------------------------------------
# dataset directories


def write_pgm(path, image):
    """Binary PGM, maxval 255, dark ink (the inverse of the in-memory polarity)."""
    q = np.round(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8)
    h, w = q.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write((255 - q).tobytes())


def read_pgm(path):
    data = Path(path).read_bytes()
    fields, pos = [], 0
    while len(fields) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            pos = data.index(b"\n", pos)
            continue
        end = pos
        while end < len(data) and not data[end : end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    if fields[0] != b"P5" or int(fields[3]) != 255:
        raise DatasetError(f"{path}: not a binary 8-bit PGM")
    w, h = int(fields[1]), int(fields[2])
    raw = np.frombuffer(data[pos + 1 : pos + 1 + w * h], dtype=np.uint8)
    if raw.size != w * h:
        raise DatasetError(f"{path}: truncated pixel data")
    return (255 - raw.reshape(h, w).astype(np.int64)) / 255.0


def save_dataset(samples, out_dir, manifest=None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, s in enumerate(samples):
        write_pgm(out / f"line{i:06d}.pgm", s.image)
        (out / f"line{i:06d}.gt.txt").write_text(s.text, encoding="utf-8")
    info = {"count": len(samples), "height": LINE_HEIGHT}
    info.update(manifest or {})
    (out / "manifest.json").write_text(json.dumps(info, indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")


def load_dataset(path):
    path = Path(path)
    images = sorted(path.glob("line*.pgm"))
    if not images:
        raise DatasetError(f"{path}: no line*.pgm files")
    samples = []
    for img in images:
        gt = img.with_name(img.name[: -len(".pgm")] + ".gt.txt")
        if not gt.exists():
            raise DatasetError(f"{img}: missing ground truth {gt.name}")
        samples.append(LineSample(read_pgm(img), gt.read_text(encoding="utf-8")))
    return samples


# ---------------------------------------------------------------------------
# codec


class Codec:
    """Character <-> label bijection; label 0 is the blank."""

    def __init__(self, chars):
        chars = list(chars)
        if len(set(chars)) != len(chars):
            raise DatasetError("codec characters must be unique")
        self.chars = chars
        self._index = {ch: i + 1 for i, ch in enumerate(chars)}

    @property
    def size(self):
        return len(self.chars) + 1

    def encode(self, text):
        try:
            return [self._index[ch] for ch in text]
        except KeyError as e:
            raise DatasetError(f"character {e.args[0]!r} is not in the codec") from None

    def decode(self, labels):
        return "".join(self.chars[k - 1] for k in labels if k > 0)

    def __eq__(self, other):
        return isinstance(other, Codec) and self.chars == other.chars

    def __repr__(self):
        return f"Codec({''.join(self.chars)!r})"


def build_codec(texts):
    chars = sorted(set("".join(texts)))
    if not chars:
        raise DatasetError("cannot build a codec from empty texts")
    return Codec(chars)


# ---------------------------------------------------------------------------
# fold splits


@dataclass
class FoldSplit:
    folds: list  # k disjoint lists of sample indices

    @property
    def k(self):
        return len(self.folds)

    def validation_indices(self, i):
        return list(self.folds[i])

    def train_indices(self, i):
        return [j for f, fold in enumerate(self.folds) if f != i for j in fold]

    def all_indices(self):
        return [j for fold in self.folds for j in fold]


def split_dataset(samples, train_size, eval_size, k=5, seed=0):
    """Shuffle once, take an evaluation set, then ``train_size`` lines cut into ``k`` folds.

    The same seed always yields the same evaluation set, and smaller training
    sets are prefixes of larger ones. ``samples`` may be a sequence or a count.
    """
    n = samples if isinstance(samples, int) else len(samples)
    if train_size + eval_size > n:
        raise DatasetError(
            f"insufficient samples: need {train_size} train + {eval_size} eval, have {n}"
        )
    if train_size < k:
        raise DatasetError(f"train_size {train_size} is smaller than the fold count {k}")
    perm = np.random.default_rng(seed).permutation(n)
    eval_idx = [int(i) for i in perm[:eval_size]]
    train = perm[eval_size : eval_size + train_size]
    folds = [[int(i) for i in part] for part in np.array_split(train, k)]
    return FoldSplit(folds), eval_idx
