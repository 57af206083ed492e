"""Pixel-pair topologies used by the difference convolutions.

A pair set fixes, inside a k x k window, an ordered list of
(minuend, subtrahend) offset pairs; a difference convolution computes a
weighted sum of the sampled differences. Offsets are (drow, dcol) with
the row axis pointing down. Ring offsets are enumerated anticlockwise
from east: E, NE, N, NW, W, SW, S, SE.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .rng import SplitMix64

Offset = tuple[int, int]

RING8: tuple[Offset, ...] = (
    (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1),
)
CROSS_HV: tuple[Offset, ...] = ((-1, 0), (1, 0), (0, 1), (0, -1))
CROSS_DG: tuple[Offset, ...] = ((-1, 1), (-1, -1), (1, -1), (1, 1))
CENTER: Offset = (0, 0)

PAIR_SET_KINDS = ("central", "angular", "radial", "cross_hv", "cross_dg", "random")


@dataclass(frozen=True)
class PairSet:
    """Window extent plus ordered (minuend, subtrahend) offset pairs."""

    window: int
    pairs: tuple[tuple[Offset, Offset], ...]

    def __post_init__(self) -> None:
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and positive, got {self.window}")
        pairs = tuple(
            (tuple(int(v) for v in a), tuple(int(v) for v in b)) for a, b in self.pairs
        )
        if not pairs:
            raise ValueError("pair set must contain at least one pair")
        radius = (self.window - 1) // 2
        for minuend, subtrahend in pairs:
            for off in (minuend, subtrahend):
                if len(off) != 2 or any(abs(v) > radius for v in off):
                    raise ValueError(
                        f"offset {off} outside window radius {radius}"
                    )
            if minuend == subtrahend:
                raise ValueError(f"degenerate pair at offset {minuend}")
        object.__setattr__(self, "pairs", pairs)

    @property
    def m(self) -> int:
        return len(self.pairs)

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "pairs": [[*a, *b] for a, b in self.pairs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PairSet":
        try:
            window = data["window"]
            raw = data["pairs"]
        except (TypeError, KeyError) as exc:
            raise ValueError(f"pair set description missing field: {exc}") from exc
        pairs = []
        for entry in raw:
            if len(entry) != 4:
                raise ValueError(f"pair entry must have 4 offsets, got {entry}")
            du, dv, du2, dv2 = entry
            pairs.append(((du, dv), (du2, dv2)))
        return cls(window=window, pairs=tuple(pairs))

    @classmethod
    def from_json(cls, text: str) -> "PairSet":
        return cls.from_dict(json.loads(text))


def central_pairs() -> PairSet:
    """Eight ring samples each differenced against the window center."""
    return PairSet(3, tuple((off, CENTER) for off in RING8))


def angular_pairs() -> PairSet:
    """Anticlockwise consecutive ring samples differenced pairwise."""
    pairs = tuple(
        (RING8[(i + 1) % len(RING8)], RING8[i]) for i in range(len(RING8))
    )
    return PairSet(3, pairs)


def radial_pairs() -> PairSet:
    """Outer ring samples differenced against aligned inner ring samples."""
    pairs = tuple(((2 * dr, 2 * dc), (dr, dc)) for dr, dc in RING8)
    return PairSet(5, pairs)


def cross_pairs(direction: str) -> PairSet:
    """Four-neighbor cross differenced against the center.

    ``direction`` selects the horizontal/vertical arms ("hv", order
    N, S, E, W) or the diagonal arms ("dg", anticlockwise from NE).
    """
    if direction == "hv":
        arms = CROSS_HV
    elif direction == "dg":
        arms = CROSS_DG
    else:
        raise ValueError(f"direction must be 'hv' or 'dg', got {direction!r}")
    return PairSet(3, tuple((off, CENTER) for off in arms))


def random_pairs(window: int, m: int, seed: int) -> PairSet:
    """Seeded uniform sample of ``m`` distinct ordered offset pairs.

    Enumerates every ordered pair of distinct offsets in the window in
    row-major order, then takes the first ``m`` entries of a seeded
    shuffle, so equal seeds give identical pair sets on any platform.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and positive, got {window}")
    radius = (window - 1) // 2
    span = range(-radius, radius + 1)
    offsets = [(r, c) for r in span for c in span]
    candidates = [(a, b) for a in offsets for b in offsets if a != b]
    if m < 1 or m > len(candidates):
        raise ValueError(
            f"pair count must be in [1, {len(candidates)}] for window {window}, got {m}"
        )
    chosen = SplitMix64(seed).sample_prefix(candidates, m)
    return PairSet(window, tuple(chosen))


def build_pair_set(kind: str, **params) -> PairSet:
    """Construct a named pair set; ``random`` needs window, m, and seed."""
    if kind == "central":
        return central_pairs()
    if kind == "angular":
        return angular_pairs()
    if kind == "radial":
        return radial_pairs()
    if kind == "cross_hv":
        return cross_pairs("hv")
    if kind == "cross_dg":
        return cross_pairs("dg")
    if kind == "random":
        missing = {"window", "m", "seed"} - params.keys()
        if missing:
            raise ValueError(f"random pair set needs parameters {sorted(missing)}")
        return random_pairs(params["window"], params["m"], params["seed"])
    raise ValueError(f"unknown pair set kind {kind!r}; expected one of {PAIR_SET_KINDS}")
