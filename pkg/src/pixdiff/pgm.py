"""Binary PGM (P5) image I/O, 8-bit only.

The header is the P5 magic, width, height, and maxval as whitespace
separated tokens with '#' comments allowed between them, then a single
whitespace byte, then width*height raster bytes. Only maxval <= 255
(one byte per pixel) is supported. Writes are atomic: data lands in a
temp file that is renamed over the target.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np


def _tokens(data: bytes):
    """Header tokens, skipping whitespace and # comments."""
    i = 0
    n = len(data)
    while i < n:
        byte = data[i : i + 1]
        if byte.isspace():
            i += 1
            continue
        if byte == b"#":
            while i < n and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace():
            i += 1
        yield data[start:i], i
        i += 1  # exactly one whitespace byte separates maxval from raster


def read_pgm(path: str | Path) -> np.ndarray:
    """Read a binary PGM file into a (height, width) uint8 array."""
    data = Path(path).read_bytes()
    fields = []
    raster_start = None
    for token, end in _tokens(data):
        fields.append(token)
        if len(fields) == 4:
            raster_start = end + 1
            break
    if len(fields) < 4:
        raise ValueError(f"{path}: truncated PGM header")
    magic, *dims = fields
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r}, expected P5)")
    try:
        width, height, maxval = (int(v) for v in dims)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric PGM header field") from exc
    if width < 1 or height < 1:
        raise ValueError(f"{path}: invalid dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise ValueError(f"{path}: maxval {maxval} unsupported, need 1..255")
    raster = data[raster_start : raster_start + width * height]
    if len(raster) < width * height:
        raise ValueError(
            f"{path}: raster holds {len(raster)} bytes, expected {width * height}"
        )
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_atomic(path: str | Path, data: bytes) -> None:
    """Write bytes to a temp file in the target directory, then rename."""
    target = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=target.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def write_pgm(path: str | Path, image: np.ndarray) -> None:
    """Write a 2-d uint8 array as binary PGM, atomically."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError(f"image must be 2-d, got rank {image.ndim}")
    if image.dtype != np.uint8:
        raise ValueError(f"image must be uint8, got {image.dtype}")
    height, width = image.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    write_atomic(path, header + image.tobytes())
