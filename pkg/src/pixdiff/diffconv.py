"""Difference convolutions over pixel pair sets.

A difference convolution computes, at every output position,
``y = sum_i w_i * (x[minuend_i] - x[subtrahend_i])`` over a pair set.
Differences are always formed sample-against-sample before weighting,
so a constant input yields exactly 0.0 wherever the window (after
padding) holds only the constant value; the equivalent dense kernel is
a separate code path (see reparam).

Pair weights have shape ``(c_out, c_in, m)``; a 1-d weight of length m
is promoted to a single-channel ``(1, 1, m)``. Mixed operators blend a
pure difference term with a dense term: ``theta`` = 1 keeps only the
differences, ``theta`` = 0 only the dense convolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .pairs import CENTER, CROSS_DG, CROSS_HV, RING8, Offset, PairSet, central_pairs
from .rng import SplitMix64
from .tensor import PadSpec, as_batched, conv2d, conv_extent, pad, tap_view

NONLINEARITIES = ("sigmoid", "relu")


def as_pair_weights(weights: np.ndarray, m: int) -> np.ndarray:
    """Normalize pair weights to ``(c_out, c_in, m)``."""
    w = np.asarray(weights)
    if w.ndim == 1:
        w = w[np.newaxis, np.newaxis, :]
    if w.ndim != 3:
        raise ValueError(f"pair weights must have rank 1 or 3, got rank {w.ndim}")
    if w.shape[-1] != m:
        raise ValueError(f"weights cover {w.shape[-1]} pairs, pair set has {m}")
    return w


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    return theta


def windowed_setup(
    x: np.ndarray, window: int, padding: PadSpec | None, stride: int
) -> tuple[np.ndarray, bool, np.ndarray, PadSpec, tuple[int, int]]:
    """Shared geometry setup: batched view, padded buffer, output extents."""
    if stride < 1:
        raise ValueError(f"stride must be positive, got {stride}")
    xb, batched = as_batched(x, 4)
    spec = padding if padding is not None else PadSpec.same(window)
    if len(spec.amount) != 2:
        raise ValueError("difference ops pad exactly the two spatial axes")
    out_shape = tuple(
        conv_extent(extent, window, amount, stride)
        for extent, amount in zip(xb.shape[2:], spec.amount)
    )
    return xb, batched, pad(xb, spec), spec, out_shape


def pdc_forward(
    x: np.ndarray,
    pair_set: PairSet,
    weights: np.ndarray,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> np.ndarray:
    """Weighted sum of sampled differences over an arbitrary pair set."""
    w = as_pair_weights(weights, pair_set.m)
    xb, batched, xp, _, (oh, ow) = windowed_setup(x, pair_set.window, padding, stride)
    n, in_c = xb.shape[:2]
    if in_c != w.shape[1]:
        raise ValueError(f"input channels {in_c} do not match weights c_in {w.shape[1]}")
    radius = (pair_set.window - 1) // 2
    acc = np.zeros((n, w.shape[0], oh * ow), dtype=np.result_type(xb.dtype, w.dtype))
    for i, (minuend, subtrahend) in enumerate(pair_set.pairs):
        a = tap_view(xp, minuend, (radius, radius), (oh, ow), stride)
        b = tap_view(xp, subtrahend, (radius, radius), (oh, ow), stride)
        diff = (a - b).reshape(n, in_c, oh * ow)
        acc += w[:, :, i] @ diff
    out = acc.reshape(n, w.shape[0], oh, ow)
    return out if batched else out[0]


def cdc_forward(
    x: np.ndarray,
    weights: np.ndarray,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> np.ndarray:
    """Central differences: each ring sample minus the window center."""
    return pdc_forward(x, central_pairs(), weights, padding, stride)


def stamp_kernel(
    offsets: tuple[Offset, ...],
    weights: np.ndarray,
    center_weight: np.ndarray | float | None = None,
    window: int = 3,
) -> np.ndarray:
    """Dense kernel with ``weights[..., i]`` placed at ``offsets[i]``.

    Offsets hitting the same cell accumulate. ``center_weight`` (scalar
    or ``(c_out, c_in)``) is added at the window center.
    """
    w = as_pair_weights(weights, len(offsets))
    radius = (window - 1) // 2
    dtype = w.dtype if center_weight is None else np.result_type(w, center_weight)
    kernel = np.zeros(w.shape[:2] + (window, window), dtype=dtype)
    for i, (dr, dc) in enumerate(offsets):
        kernel[:, :, radius + dr, radius + dc] += w[:, :, i]
    if center_weight is not None:
        kernel[:, :, radius, radius] += center_weight
    return kernel


def _mixed_forward(
    x: np.ndarray,
    offsets: tuple[Offset, ...],
    weights: np.ndarray,
    center_weight: np.ndarray | float,
    theta: float,
    padding: PadSpec | None,
    stride: int,
) -> np.ndarray:
    theta = _check_theta(theta)
    pair_set = PairSet(3, tuple((off, CENTER) for off in offsets))
    grad_term = pdc_forward(x, pair_set, weights, padding, stride)
    kernel = stamp_kernel(offsets, weights, center_weight, window=3)
    dense_term = conv2d(x, kernel, padding, stride)
    return theta * grad_term + (1.0 - theta) * dense_term


def gcdc_forward(
    x: np.ndarray,
    weights: np.ndarray,
    center_weight: np.ndarray | float,
    theta: float,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> np.ndarray:
    """Blend of ring central differences and the dense 3x3 convolution.

    ``theta`` = 1 reproduces cdc_forward (the center weight drops out);
    ``theta`` = 0 reproduces conv2d with weights on the ring and
    ``center_weight`` at the center.
    """
    return _mixed_forward(x, RING8, weights, center_weight, theta, padding, stride)


def ccdc_forward(
    x: np.ndarray,
    weights: np.ndarray,
    center_weight: np.ndarray | float,
    theta: float,
    direction: str,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> np.ndarray:
    """Mixed central differences restricted to a four-neighbor cross."""
    if direction == "hv":
        arms = CROSS_HV
    elif direction == "dg":
        arms = CROSS_DG
    else:
        raise ValueError(f"direction must be 'hv' or 'dg', got {direction!r}")
    return _mixed_forward(x, arms, weights, center_weight, theta, padding, stride)


def window_median_strided(
    xp: np.ndarray, window: int, out_shape: tuple[int, int], stride: int
) -> np.ndarray:
    """Median of each stride-spaced window of an already padded array."""
    win = sliding_window_view(xp, (window, window), axis=(-2, -1))
    win = win[..., ::stride, ::stride, :, :]
    win = win[..., : out_shape[0], : out_shape[1], :, :]
    return np.median(win, axis=(-2, -1))


def mediconv_forward(
    x: np.ndarray,
    weights: np.ndarray,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> np.ndarray:
    """Every window sample differenced against the window median.

    ``weights`` has shape ``(c_out, c_in, k, k)``; entry (u, v) weighs
    the difference between the sample at window position (u, v) and the
    median of the whole k x k window. The median is data dependent, so
    this operator has no equivalent dense kernel.
    """
    w = np.asarray(weights)
    if w.ndim != 4 or w.shape[2] != w.shape[3]:
        raise ValueError(f"weights must be (c_out, c_in, k, k), got {w.shape}")
    window = w.shape[2]
    if window % 2 == 0:
        raise ValueError(f"window must be odd, got {window}")
    xb, batched, xp, _, (oh, ow) = windowed_setup(x, window, padding, stride)
    n, in_c = xb.shape[:2]
    if in_c != w.shape[1]:
        raise ValueError(f"input channels {in_c} do not match weights c_in {w.shape[1]}")
    radius = (window - 1) // 2
    median = window_median_strided(xp, window, (oh, ow), stride)
    acc = np.zeros((n, w.shape[0], oh * ow), dtype=np.result_type(xb.dtype, w.dtype))
    for u in range(window):
        for v in range(window):
            a = tap_view(xp, (u - radius, v - radius), (radius, radius), (oh, ow), stride)
            diff = (a - median).reshape(n, in_c, oh * ow)
            acc += w[:, :, u, v] @ diff
    out = acc.reshape(n, w.shape[0], oh, ow)
    return out if batched else out[0]


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    out = np.empty_like(z, dtype=np.result_type(z.dtype, np.float32))
    positive = z >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-z[positive]))
    ez = np.exp(z[~positive])
    out[~positive] = ez / (1.0 + ez)
    return out


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, np.zeros((), dtype=z.dtype))


def apply_nonlinearity(z: np.ndarray, name: str) -> np.ndarray:
    if name == "sigmoid":
        return sigmoid(z)
    if name == "relu":
        return relu(z)
    raise ValueError(f"nonlinearity must be one of {NONLINEARITIES}, got {name!r}")


@dataclass(frozen=True)
class LbcSpec:
    """Shape and sampling parameters for fixed sparse binary kernels."""

    maps: int
    window: int = 3
    sparsity: float = 0.5
    nonlinearity: str = "sigmoid"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.maps < 1:
            raise ValueError(f"maps must be positive, got {self.maps}")
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and positive, got {self.window}")
        if not 0.0 < self.sparsity <= 1.0:
            raise ValueError(f"sparsity must lie in (0, 1], got {self.sparsity}")
        if self.nonlinearity not in NONLINEARITIES:
            raise ValueError(
                f"nonlinearity must be one of {NONLINEARITIES}, got {self.nonlinearity!r}"
            )


_KERNEL_ATTEMPTS = 100


def lbc_make_kernels(spec: LbcSpec, in_channels: int) -> np.ndarray:
    """Seeded sparse binary kernels, shape ``(maps, in_channels, k, k)``.

    Each entry is +1 with probability sparsity/2, -1 with probability
    sparsity/2, else 0, drawn from one SplitMix64 stream so equal seeds
    give bit-identical kernels everywhere. A kernel missing either sign
    is redrawn; if the sparsity is too low to place both signs within
    the retry budget, raises ValueError.
    """
    if in_channels < 1:
        raise ValueError(f"in_channels must be positive, got {in_channels}")
    stream = SplitMix64(spec.seed)
    half = spec.sparsity / 2.0
    shape = (in_channels, spec.window, spec.window)
    kernels = np.zeros((spec.maps,) + shape, dtype=np.float64)
    for j in range(spec.maps):
        for _ in range(_KERNEL_ATTEMPTS):
            draw = np.zeros(shape, dtype=np.float64)
            flat = draw.reshape(-1)
            for idx in range(flat.size):
                u = stream.uniform()
                if u < half:
                    flat[idx] = 1.0
                elif u < spec.sparsity:
                    flat[idx] = -1.0
            if (flat == 1.0).any() and (flat == -1.0).any():
                kernels[j] = draw
                break
        else:
            raise ValueError(
                f"could not place both signs in {_KERNEL_ATTEMPTS} draws; "
                f"sparsity {spec.sparsity} too low for window {spec.window}"
            )
    return kernels


def lbc_forward(
    x: np.ndarray,
    kernels: np.ndarray,
    nonlinearity: str,
    pooling: np.ndarray,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> np.ndarray:
    """Fixed binary convolution, nonlinearity, then learnable 1x1 pooling.

    ``kernels`` is the fixed ``(maps, c_in, k, k)`` stack from
    lbc_make_kernels; ``pooling`` is the learnable ``(c_out, maps)``
    mixing matrix. Only the pooling weights are trainable.
    """
    kernels = np.asarray(kernels)
    pooling = np.asarray(pooling)
    if kernels.ndim != 4:
        raise ValueError(f"kernels must be (maps, c_in, k, k), got {kernels.shape}")
    if pooling.ndim != 2 or pooling.shape[1] != kernels.shape[0]:
        raise ValueError(
            f"pooling must be (c_out, maps={kernels.shape[0]}), got {pooling.shape}"
        )
    z = conv2d(x, kernels, padding, stride)
    a = apply_nonlinearity(z, nonlinearity)
    batched = np.asarray(x).ndim == 4
    ab = a if batched else a[np.newaxis]
    out = np.einsum("om,nmhw->nohw", pooling, ab, optimize=True)
    return out if batched else out[0]


PARAM_KINDS = ("dense", "pdc", "lbc")


def param_count(
    kind: str,
    in_channels: int,
    out_channels: int,
    window: int = 3,
    m: int | None = None,
) -> tuple[int, int]:
    """(learnable, fixed) parameter counts for one layer of each family.

    Dense layers learn window**2 * c_in * c_out weights; a difference
    convolution learns one weight per pair per channel pair; binary
    layers learn only the pooling matrix while the m * c_in * k * k
    binary entries stay fixed.
    """
    if in_channels < 1 or out_channels < 1 or window < 1:
        raise ValueError("channel counts and window must be positive")
    if kind == "dense":
        return (window * window * in_channels * out_channels, 0)
    if kind == "pdc":
        if m is None or m < 1:
            raise ValueError("pdc parameter count needs the pair count m")
        return (m * in_channels * out_channels, 0)
    if kind == "lbc":
        if m is None or m < 1:
            raise ValueError("lbc parameter count needs the map count m")
        return (m * out_channels, m * in_channels * window * window)
    raise ValueError(f"kind must be one of {PARAM_KINDS}, got {kind!r}")
