"""Named, seeded operator instances shared by the CLI and the checkers.

An operator bundles a difference-convolution family with concrete
weights so the same object can be run (forward), folded (dense_kernel),
and timed. Weights are drawn from the portable seeded generator with
scale 1/sqrt(fan_in), so instances are reproducible bit-for-bit from
(name, channels, seed) alone.
"""

from __future__ import annotations

import math

import numpy as np

from . import diffconv
from .pairs import (
    CROSS_DG,
    CROSS_HV,
    RING8,
    PairSet,
    build_pair_set,
)
from .reparam import UnsupportedOperationError, mixed_kernel, pairs_to_kernel
from .rng import SplitMix64
from .tensor import PadSpec

OP_NAMES = (
    "cpdc",
    "cdc",
    "apdc",
    "rpdc",
    "gcdc",
    "ccdc-hv",
    "ccdc-dg",
    "mediconv",
    "lbc",
    "custom",
)

_PAIR_KIND = {"cpdc": "central", "cdc": "central", "apdc": "angular", "rpdc": "radial"}


def seeded_uniform(shape: tuple[int, ...], seed: int, scale: float) -> np.ndarray:
    """Portable uniform draw in [-scale, scale), identical on any platform."""
    stream = SplitMix64(seed)
    flat = np.empty(int(np.prod(shape)), dtype=np.float64)
    for i in range(flat.size):
        flat[i] = (2.0 * stream.uniform() - 1.0) * scale
    return flat.reshape(shape)


class PairDiffOp:
    """Pure pair-difference convolution with fixed weights."""

    def __init__(self, name: str, pair_set: PairSet, weights: np.ndarray) -> None:
        self.name = name
        self.pair_set = pair_set
        self.weights = diffconv.as_pair_weights(weights, pair_set.m)

    @property
    def out_channels(self) -> int:
        return self.weights.shape[0]

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1]

    @property
    def window(self) -> int:
        return self.pair_set.window

    def forward(self, x: np.ndarray, padding: PadSpec | None = None, stride: int = 1):
        return diffconv.pdc_forward(x, self.pair_set, self.weights, padding, stride)

    def dense_kernel(self) -> np.ndarray:
        return pairs_to_kernel(self.pair_set, self.weights)

    def astype(self, dtype) -> "PairDiffOp":
        return PairDiffOp(self.name, self.pair_set, self.weights.astype(dtype))


class MixedDiffOp:
    """Theta-blend of central differences and a dense 3x3 convolution."""

    def __init__(
        self,
        name: str,
        arms: str,
        weights: np.ndarray,
        center_weight: np.ndarray,
        theta: float,
    ) -> None:
        if arms not in ("ring", "hv", "dg"):
            raise ValueError(f"arms must be ring, hv, or dg, got {arms!r}")
        self.name = name
        self.arms = arms
        offsets = {"ring": RING8, "hv": CROSS_HV, "dg": CROSS_DG}[arms]
        self.offsets = offsets
        self.weights = diffconv.as_pair_weights(weights, len(offsets))
        self.center_weight = np.asarray(center_weight)
        self.theta = float(theta)

    @property
    def out_channels(self) -> int:
        return self.weights.shape[0]

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1]

    @property
    def window(self) -> int:
        return 3

    def forward(self, x: np.ndarray, padding: PadSpec | None = None, stride: int = 1):
        if self.arms == "ring":
            return diffconv.gcdc_forward(
                x, self.weights, self.center_weight, self.theta, padding, stride
            )
        return diffconv.ccdc_forward(
            x, self.weights, self.center_weight, self.theta, self.arms, padding, stride
        )

    def dense_kernel(self) -> np.ndarray:
        return mixed_kernel(self.offsets, self.weights, self.center_weight, self.theta)

    def astype(self, dtype) -> "MixedDiffOp":
        return MixedDiffOp(
            self.name,
            self.arms,
            self.weights.astype(dtype),
            self.center_weight.astype(dtype),
            self.theta,
        )


class MedianDiffOp:
    """Window samples differenced against the window median."""

    def __init__(self, name: str, weights: np.ndarray) -> None:
        self.name = name
        self.weights = np.asarray(weights)
        if self.weights.ndim != 4:
            raise ValueError(f"weights must be (c_out, c_in, k, k), got {self.weights.shape}")

    @property
    def out_channels(self) -> int:
        return self.weights.shape[0]

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1]

    @property
    def window(self) -> int:
        return self.weights.shape[2]

    def forward(self, x: np.ndarray, padding: PadSpec | None = None, stride: int = 1):
        return diffconv.mediconv_forward(x, self.weights, padding, stride)

    def dense_kernel(self) -> np.ndarray:
        raise UnsupportedOperationError(
            "median reference is data dependent; no dense kernel exists"
        )

    def astype(self, dtype) -> "MedianDiffOp":
        return MedianDiffOp(self.name, self.weights.astype(dtype))


class LbcOp:
    """Fixed sparse binary convolution with learnable pooling."""

    def __init__(
        self,
        name: str,
        kernels: np.ndarray,
        nonlinearity: str,
        pooling: np.ndarray,
    ) -> None:
        self.name = name
        self.kernels = np.asarray(kernels)
        self.nonlinearity = nonlinearity
        self.pooling = np.asarray(pooling)

    @property
    def out_channels(self) -> int:
        return self.pooling.shape[0]

    @property
    def in_channels(self) -> int:
        return self.kernels.shape[1]

    @property
    def window(self) -> int:
        return self.kernels.shape[2]

    def forward(self, x: np.ndarray, padding: PadSpec | None = None, stride: int = 1):
        return diffconv.lbc_forward(
            x, self.kernels, self.nonlinearity, self.pooling, padding, stride
        )

    def dense_kernel(self) -> np.ndarray:
        raise UnsupportedOperationError(
            "thresholded responses are nonlinear; no dense kernel exists"
        )

    def astype(self, dtype) -> "LbcOp":
        return LbcOp(
            self.name,
            self.kernels.astype(dtype),
            self.nonlinearity,
            self.pooling.astype(dtype),
        )


def build_operator(
    name: str,
    in_channels: int = 1,
    out_channels: int = 1,
    theta: float = 0.5,
    seed: int = 0,
    pair_set: PairSet | None = None,
    window: int = 3,
    maps: int = 8,
):
    """Instantiate a named operator with seeded weights.

    ``custom`` requires an explicit pair set; all other names fix their
    own topology. ``theta`` only affects the mixed operators.
    """
    if name in _PAIR_KIND:
        ps = build_pair_set(_PAIR_KIND[name])
        scale = 1.0 / math.sqrt(in_channels * ps.m)
        w = seeded_uniform((out_channels, in_channels, ps.m), seed, scale)
        return PairDiffOp(name, ps, w)
    if name == "custom":
        if pair_set is None:
            raise ValueError("custom operator needs an explicit pair set")
        scale = 1.0 / math.sqrt(in_channels * pair_set.m)
        w = seeded_uniform((out_channels, in_channels, pair_set.m), seed, scale)
        return PairDiffOp(name, pair_set, w)
    if name in ("gcdc", "ccdc-hv", "ccdc-dg"):
        arms = {"gcdc": "ring", "ccdc-hv": "hv", "ccdc-dg": "dg"}[name]
        m = 8 if arms == "ring" else 4
        scale = 1.0 / math.sqrt(in_channels * (m + 1))
        w = seeded_uniform((out_channels, in_channels, m), seed, scale)
        w_c = seeded_uniform((out_channels, in_channels), seed + 1, scale)
        return MixedDiffOp(name, arms, w, w_c, theta)
    if name == "mediconv":
        scale = 1.0 / math.sqrt(in_channels * window * window)
        w = seeded_uniform((out_channels, in_channels, window, window), seed, scale)
        return MedianDiffOp(name, w)
    if name == "lbc":
        spec = diffconv.LbcSpec(maps=maps, window=window, seed=seed)
        kernels = diffconv.lbc_make_kernels(spec, in_channels)
        pooling = seeded_uniform((out_channels, maps), seed + 1, 1.0 / math.sqrt(maps))
        return LbcOp(name, kernels, spec.nonlinearity, pooling)
    raise ValueError(f"unknown operator {name!r}; expected one of {OP_NAMES}")
