"""Local binary pattern codes, code maps, mappings, and histograms.

A code thresholds p samples on a radius-r ring against the center
pixel: bit i is set when sample i is >= the center. Samples are taken
anticlockwise starting from east; the sign convention uses comparisons,
never subtraction, so codes are invariant to any strictly increasing
pixel transform. Angular offsets for sample i are
(-r*sin(2*pi*i/p), r*cos(2*pi*i/p)) in (row, col) with rows pointing
down, snapped to 9 decimals so axis-aligned samples hit exact integers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

INTERPOLATIONS = ("nearest", "bilinear")
MAPPING_KINDS = ("raw", "ri", "u2", "riu2")
BORDER_MODES = ("replicate", "crop")

_MAX_POINTS = 24
_MAX_TABLE_POINTS = 16


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Ring geometry: radius, sample count, and sampling mode."""

    radius: float = 1.0
    points: int = 8
    interpolation: str = "nearest"
    start_angle: float = 0.0

    def __post_init__(self) -> None:
        if not self.radius >= 1.0:
            raise ValueError(f"radius must be >= 1, got {self.radius}")
        if not 1 <= self.points <= _MAX_POINTS:
            raise ValueError(f"points must lie in [1, {_MAX_POINTS}], got {self.points}")
        if self.interpolation not in INTERPOLATIONS:
            raise ValueError(
                f"interpolation must be one of {INTERPOLATIONS}, got {self.interpolation!r}"
            )

    def offsets(self) -> np.ndarray:
        """(points, 2) float offsets (drow, dcol), anticlockwise from east."""
        angles = self.start_angle + 2.0 * math.pi * np.arange(self.points) / self.points
        offs = np.stack([-self.radius * np.sin(angles), self.radius * np.cos(angles)], axis=1)
        return np.round(offs, 9)


def _bilinear_scalar(plane: np.ndarray, row: float, col: float) -> float:
    """Lerp-form bilinear sample; exact on constants and integer coords."""
    fr, fc = math.floor(row), math.floor(col)
    ar, ac = row - fr, col - fc
    r1 = fr + 1 if ar > 0 else fr
    c1 = fc + 1 if ac > 0 else fc
    h, w = plane.shape
    if fr < 0 or fc < 0 or r1 > h - 1 or c1 > w - 1:
        raise ValueError(f"sample at ({row}, {col}) falls outside the image")
    x00 = float(plane[fr, fc])
    x01 = float(plane[fr, c1])
    x10 = float(plane[r1, fc])
    x11 = float(plane[r1, c1])
    top = x00 + ac * (x01 - x00)
    bottom = x10 + ac * (x11 - x10)
    return top + ar * (bottom - top)


def _nearest_scalar(plane: np.ndarray, row: float, col: float) -> float:
    ri, ci = math.floor(row + 0.5), math.floor(col + 0.5)
    h, w = plane.shape
    if not (0 <= ri < h and 0 <= ci < w):
        raise ValueError(f"sample at ({row}, {col}) falls outside the image")
    return float(plane[ri, ci])


def sample_ring(
    plane: np.ndarray, center: tuple[int, int], spec: NeighborhoodSpec
) -> np.ndarray:
    """The p ring samples around one pixel, as float64.

    ``center`` is an in-bounds (row, col) index; any ring sample that
    lands outside the image raises ValueError.
    """
    plane = np.asarray(plane)
    if plane.ndim != 2:
        raise ValueError(f"plane must be 2-d, got rank {plane.ndim}")
    row0, col0 = int(center[0]), int(center[1])
    h, w = plane.shape
    if not (0 <= row0 < h and 0 <= col0 < w):
        raise ValueError(f"center {center} outside image of shape {plane.shape}")
    gather = _nearest_scalar if spec.interpolation == "nearest" else _bilinear_scalar
    return np.array(
        [gather(plane, row0 + dr, col0 + dc) for dr, dc in spec.offsets()],
        dtype=np.float64,
    )


def lbp_code(samples: np.ndarray, center_value: float) -> int:
    """Threshold samples against the center: bit i set iff sample_i >= center."""
    samples = np.asarray(samples)
    if samples.ndim != 1 or not 1 <= samples.size <= _MAX_POINTS:
        raise ValueError(f"samples must be a vector of 1..{_MAX_POINTS} values")
    code = 0
    for i, value in enumerate(samples):
        if value >= center_value:
            code |= 1 << i
    return code


def cslbp_code(samples: np.ndarray, threshold: float = 0.0) -> int:
    """Center-symmetric code: bit i set iff sample_i - sample_{i+p/2} >= threshold."""
    samples = np.asarray(samples)
    p = samples.size
    if samples.ndim != 1 or p < 2 or p % 2:
        raise ValueError(f"center-symmetric codes need an even sample count, got {p}")
    half = p // 2
    code = 0
    for i in range(half):
        if samples[i] - samples[i + half] >= threshold:
            code |= 1 << i
    return code


def elbp_angular_code(
    plane: np.ndarray, center: tuple[int, int], spec: NeighborhoodSpec
) -> int:
    """Bit i set iff the next anticlockwise ring sample >= sample i."""
    samples = sample_ring(plane, center, spec)
    p = samples.size
    code = 0
    for i in range(p):
        if samples[(i + 1) % p] >= samples[i]:
            code |= 1 << i
    return code


def elbp_radial_code(
    plane: np.ndarray,
    center: tuple[int, int],
    inner: NeighborhoodSpec,
    outer: NeighborhoodSpec,
) -> int:
    """Bit i set iff the outer-ring sample >= the aligned inner-ring sample."""
    if inner.points != outer.points:
        raise ValueError(
            f"rings must share the sample count, got {inner.points} and {outer.points}"
        )
    if not outer.radius > inner.radius:
        raise ValueError(
            f"outer radius {outer.radius} must exceed inner radius {inner.radius}"
        )
    inner_samples = sample_ring(plane, center, inner)
    outer_samples = sample_ring(plane, center, outer)
    code = 0
    for i in range(inner.points):
        if outer_samples[i] >= inner_samples[i]:
            code |= 1 << i
    return code


def rotation_min(code: int, points: int) -> int:
    """Minimum value of the code over all circular bit rotations."""
    _check_code(code, points)
    mask = (1 << points) - 1
    return min(((code >> i) | (code << (points - i))) & mask for i in range(points))


def uniform_transitions(code: int, points: int) -> int:
    """Number of circular 0/1 transitions in the code's bit pattern."""
    _check_code(code, points)
    rotated = ((code >> 1) | (code << (points - 1))) & ((1 << points) - 1)
    return (code ^ rotated).bit_count()


def _check_code(code: int, points: int) -> None:
    if not 1 <= points <= _MAX_POINTS:
        raise ValueError(f"points must lie in [1, {_MAX_POINTS}], got {points}")
    if not 0 <= code < (1 << points):
        raise ValueError(f"code {code} outside [0, 2**{points})")


@dataclass(frozen=True, eq=False)
class LbpMapping:
    """Lookup table from raw codes to compact bin indices."""

    kind: str
    points: int
    table: np.ndarray = field(repr=False)
    bins: int


@lru_cache(maxsize=None)
def build_mapping(kind: str, points: int) -> LbpMapping:
    """Code-to-bin table for one mapping family.

    raw keeps all 2**p codes; ri buckets codes equal up to rotation
    (bins ranked by their rotation-minimal value); u2 gives every
    uniform code (<= 2 transitions) its own bin in code order plus one
    shared bin for the rest; riu2 bins uniform codes by popcount (p+1
    bins) plus one shared bin, p+2 total.
    """
    if kind not in MAPPING_KINDS:
        raise ValueError(f"kind must be one of {MAPPING_KINDS}, got {kind!r}")
    if not 1 <= points <= _MAX_TABLE_POINTS:
        raise ValueError(
            f"mapping tables support points in [1, {_MAX_TABLE_POINTS}], got {points}"
        )
    size = 1 << points
    if kind == "raw":
        table = np.arange(size, dtype=np.int32)
        bins = size
    elif kind == "ri":
        minima = [rotation_min(code, points) for code in range(size)]
        rank = {value: i for i, value in enumerate(sorted(set(minima)))}
        table = np.array([rank[m] for m in minima], dtype=np.int32)
        bins = len(rank)
    elif kind == "u2":
        uniform = [c for c in range(size) if uniform_transitions(c, points) <= 2]
        bins = len(uniform) + 1
        table = np.full(size, bins - 1, dtype=np.int32)
        for i, code in enumerate(uniform):
            table[code] = i
    else:  # riu2
        bins = points + 2
        table = np.full(size, points + 1, dtype=np.int32)
        for code in range(size):
            if uniform_transitions(code, points) <= 2:
                table[code] = code.bit_count()
    table.setflags(write=False)
    return LbpMapping(kind=kind, points=points, table=table, bins=bins)


def _shifted(padded: np.ndarray, margin: int, dr: int, dc: int, h: int, w: int) -> np.ndarray:
    return padded[margin + dr : margin + dr + h, margin + dc : margin + dc + w]


def lbp_image(
    plane: np.ndarray,
    spec: NeighborhoodSpec,
    mapping: LbpMapping | None = None,
    border: str = "replicate",
) -> np.ndarray:
    """Per-pixel codes for a whole image, optionally mapped to bins.

    ``border`` chooses how ring samples beyond the image are handled:
    replicate extends edge pixels and returns a full-size map; crop
    drops the ceil(radius) margin and returns only interior codes.
    """
    if border not in BORDER_MODES:
        raise ValueError(f"border must be one of {BORDER_MODES}, got {border!r}")
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError(f"plane must be 2-d, got rank {plane.ndim}")
    h, w = plane.shape
    margin = math.ceil(spec.radius) + 1
    if min(h, w) <= 2 * math.ceil(spec.radius) and border == "crop":
        raise ValueError(
            f"image {plane.shape} too small to crop a radius-{spec.radius} margin"
        )
    padded = np.pad(plane, margin, mode="edge")
    codes = np.zeros((h, w), dtype=np.int32)
    for i, (dr, dc) in enumerate(spec.offsets()):
        if spec.interpolation == "nearest":
            sample = _shifted(
                padded, margin, math.floor(dr + 0.5), math.floor(dc + 0.5), h, w
            )
        else:
            fr, fc = math.floor(dr), math.floor(dc)
            ar, ac = dr - fr, dc - fc
            x00 = _shifted(padded, margin, fr, fc, h, w)
            x01 = _shifted(padded, margin, fr, fc + 1, h, w)
            x10 = _shifted(padded, margin, fr + 1, fc, h, w)
            x11 = _shifted(padded, margin, fr + 1, fc + 1, h, w)
            top = x00 + ac * (x01 - x00)
            bottom = x10 + ac * (x11 - x10)
            sample = top + ar * (bottom - top)
        codes |= (sample >= plane).astype(np.int32) << i
    if border == "crop":
        edge = math.ceil(spec.radius)
        codes = codes[edge : h - edge, edge : w - edge]
    if mapping is not None:
        if mapping.points != spec.points:
            raise ValueError(
                f"mapping built for {mapping.points} points, ring has {spec.points}"
            )
        codes = mapping.table[codes]
    return codes


@dataclass(frozen=True, eq=False)
class Histogram:
    """Bin counts with on-demand normalized frequencies."""

    counts: np.ndarray
    normalized: bool = True

    @property
    def bins(self) -> int:
        return int(self.counts.size)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.counts.sum()

    @property
    def values(self) -> np.ndarray:
        return self.frequencies if self.normalized else self.counts

    def to_csv(self) -> str:
        freq = self.frequencies
        lines = ["bin,count,frequency"]
        for b in range(self.bins):
            lines.append(f"{b},{int(self.counts[b])},{float(freq[b])!r}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "bins": self.bins,
                "total": self.total,
                "normalized": self.normalized,
                "counts": [int(c) for c in self.counts],
                "frequencies": [float(f) for f in self.frequencies],
            }
        )


def histogram(
    codes: np.ndarray,
    mapping: LbpMapping | None = None,
    bins: int | None = None,
    normalize: bool = True,
) -> Histogram:
    """Bin raw codes through a mapping, or pre-binned indices directly.

    With ``mapping`` the codes are raw pattern codes in [0, 2**p) and
    are sent through the lookup table; with ``bins`` the codes are
    already bin indices. Exactly one of the two must be given.
    """
    if (mapping is None) == (bins is None):
        raise ValueError("pass exactly one of mapping or bins")
    codes = np.asarray(codes)
    if codes.size == 0:
        raise ValueError("cannot build a histogram from zero codes")
    flat = codes.reshape(-1)
    if mapping is not None:
        limit = 1 << mapping.points
        if flat.min() < 0 or flat.max() >= limit:
            raise ValueError(f"codes outside [0, {limit}) for {mapping.points} points")
        flat = mapping.table[flat]
        bins = mapping.bins
    else:
        if flat.min() < 0 or flat.max() >= bins:
            raise ValueError(f"bin indices outside [0, {bins})")
    counts = np.bincount(flat, minlength=bins).astype(np.int64)
    counts.setflags(write=False)
    return Histogram(counts=counts, normalized=normalize)
