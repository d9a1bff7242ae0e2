"""Portable bitmap (P1 plain / P4 raw) reading and writing.

Foreground pixels are stored as 1 (black), as the format prescribes.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import FormatError


def encode_pbm(pixels: np.ndarray, plain: bool = False) -> bytes:
    bits = np.asarray(pixels, dtype=bool)
    if bits.ndim != 2:
        raise FormatError("PBM data must be two-dimensional")
    h, w = bits.shape
    if plain:
        rows = []
        for row in bits.astype(np.uint8):
            text = " ".join(map(str, row.tolist()))
            # plain PBM lines must stay under 70 characters
            rows.extend(text[i:i + 70].strip() for i in range(0, len(text), 70))
        return f"P1\n{w} {h}\n".encode("ascii") + "\n".join(rows).encode("ascii") + b"\n"
    packed = np.packbits(bits, axis=1)
    return f"P4\n{w} {h}\n".encode("ascii") + packed.tobytes()


def _tokens(data: bytes, start: int, count: int):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    out = []
    i = start
    n = len(data)
    while len(out) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i:i + 1] == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < n and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
            j += 1
        if j == i:
            raise FormatError("truncated PBM header")
        out.append(data[i:j])
        i = j
    return out, i


def decode_pbm(data: bytes) -> np.ndarray:
    if len(data) < 2 or data[:2] not in (b"P1", b"P4"):
        raise FormatError("not a PBM file (expected P1 or P4 magic)")
    (ws, hs), pos = _tokens(data, 2, 2)
    try:
        w, h = int(ws), int(hs)
    except ValueError:
        raise FormatError("bad PBM dimensions") from None
    if w < 1 or h < 1:
        raise FormatError("PBM dimensions must be positive")
    if data[:2] == b"P4":
        # exactly one whitespace byte separates header from raster
        pos += 1
        stride = (w + 7) // 8
        raw = np.frombuffer(data, dtype=np.uint8, count=stride * h, offset=pos) \
            if len(data) - pos >= stride * h else None
        if raw is None:
            raise FormatError("truncated P4 raster")
        bits = np.unpackbits(raw.reshape(h, stride), axis=1)[:, :w]
        return bits.astype(bool)
    digits = [c for c in data[pos:].decode("ascii") if c in "01"]
    if len(digits) < w * h:
        raise FormatError("truncated P1 raster")
    return np.array(digits[: w * h], dtype=np.uint8).reshape(h, w).astype(bool)


def write_pbm(path, pixels, plain: bool = False) -> None:
    Path(path).write_bytes(encode_pbm(pixels, plain=plain))


def read_pbm(path) -> np.ndarray:
    return decode_pbm(Path(path).read_bytes())
