"""Binary model files.

Layout (all integers little-endian uint32)::

    b"OCRL" | version | len + UTF-8 JSON header | len + UTF-8 codec characters
    | tensor count | per tensor: len + UTF-8 name, rank, extents..., float32 LE data

The header carries the network description and checkpoint metadata. Weights
are stored as float32; models keep float32-representable values in memory,
so a roundtrip reproduces predictions bit for bit.
"""

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import (
    BadMagicError,
    ConfigurationError,
    ModelFormatError,
    TruncatedFileError,
    UnsupportedVersionError,
)
from ..nn import NetworkSpec
from ..synthline import Codec
from .training import FoldModel

MAGIC = b"OCRL"
VERSION = 1


def _u32(n):
    return struct.pack("<I", n)


def _text(s):
    b = s.encode("utf-8")
    return _u32(len(b)) + b


def dumps_model(model):
    header = {
        "spec": json.loads(model.spec.to_json()),
        "best_cer": model.best_cer,
        "best_iteration": model.best_iteration,
        "config_hash": model.config_hash,
        "height": model.height,
        "n_classes": model.codec.size,
    }
    parts = [MAGIC, _u32(VERSION), _text(json.dumps(header, sort_keys=True)),
             _text("".join(model.codec.chars)), _u32(len(model.weights))]
    for name in sorted(model.weights):
        arr = np.asarray(model.weights[name])
        parts.append(_text(name))
        parts.append(_u32(arr.ndim))
        parts.extend(_u32(d) for d in arr.shape)
        parts.append(arr.astype("<f4").tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.data):
            raise TruncatedFileError(
                f"model file truncated at byte {len(self.data)} (needed {self.pos + n})"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self):
        return struct.unpack("<I", self.take(4))[0]

    def text(self):
        try:
            return self.take(self.u32()).decode("utf-8")
        except UnicodeDecodeError as e:
            raise ModelFormatError(f"invalid UTF-8 in model file: {e}") from None


def loads_model(data):
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise BadMagicError("bad magic: not an OCRL model file")
    version = r.u32()
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported version {version} (expected {VERSION})")
    try:
        header = json.loads(r.text())
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"corrupt model header: {e}") from None
    codec = Codec(r.text())
    weights = {}
    for _ in range(r.u32()):
        name = r.text()
        shape = tuple(r.u32() for _ in range(r.u32()))
        count = int(np.prod(shape, dtype=np.int64))
        arr = np.frombuffer(r.take(4 * count), dtype="<f4").reshape(shape)
        weights[name] = arr.astype(np.float64)
    if r.pos != len(data):
        raise ModelFormatError(f"{len(data) - r.pos} trailing bytes after model data")
    if header.get("n_classes") != codec.size:
        raise ModelFormatError("codec size does not match the projection width")
    spec = NetworkSpec.from_json(json.dumps(header["spec"]))
    model = FoldModel(
        spec=spec,
        codec=codec,
        weights=weights,
        best_cer=header["best_cer"],
        best_iteration=header["best_iteration"],
        config_hash=header["config_hash"],
        height=header["height"],
    )
    try:
        model.network()
    except ConfigurationError as e:
        raise ModelFormatError(f"weights do not fit the network: {e}") from None
    return model


def save_model(model, path):
    Path(path).write_bytes(dumps_model(model))


def load_model(path):
    return loads_model(Path(path).read_bytes())
