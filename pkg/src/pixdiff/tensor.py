"""Padding, tap extraction, and reference dense convolutions.

Arrays are plain NumPy ndarrays in row-major channels-first layout:
planar data is ``(C, H, W)`` or ``(N, C, H, W)``, sequence data is
``(C, T, H, W)`` or ``(N, C, T, H, W)``. Kernels are
``(c_out, c_in, kh, kw)`` or ``(c_out, c_in, kt, kh, kw)`` with odd
spatial extents. All functions are pure: inputs are never mutated and
float32 inputs produce float32 outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

PAD_MODES = ("zero", "replicate")


@dataclass(frozen=True)
class PadSpec:
    """Padding mode plus per-spatial-axis amounts, innermost axis last.

    ``amount`` applies to the trailing axes of the operand, so a
    two-entry amount pads (H, W) and a three-entry amount pads
    (T, H, W) regardless of leading batch/channel axes.
    """

    mode: str = "zero"
    amount: tuple[int, ...] = (1, 1)

    def __post_init__(self) -> None:
        if self.mode not in PAD_MODES:
            raise ValueError(f"pad mode must be one of {PAD_MODES}, got {self.mode!r}")
        amount = tuple(int(a) for a in self.amount)
        if not amount:
            raise ValueError("pad amount must cover at least one axis")
        if any(a < 0 for a in amount):
            raise ValueError(f"pad amounts must be non-negative, got {amount}")
        object.__setattr__(self, "amount", amount)

    @classmethod
    def same(cls, window: int | tuple[int, ...], rank: int = 2, mode: str = "zero") -> "PadSpec":
        """Amounts that keep output extents equal to input extents at stride 1."""
        extents = (window,) * rank if isinstance(window, int) else tuple(window)
        return cls(mode=mode, amount=tuple((k - 1) // 2 for k in extents))


def pad(x: np.ndarray, spec: PadSpec) -> np.ndarray:
    """Pad the trailing ``len(spec.amount)`` axes of ``x``.

    Zero mode inserts zeros; replicate mode repeats the edge sample and
    requires every pad amount to be smaller than the padded extent.
    """
    x = np.asarray(x)
    rank = len(spec.amount)
    if x.ndim < rank:
        raise ValueError(f"array rank {x.ndim} below padded rank {rank}")
    if spec.mode == "replicate":
        for axis_amount, extent in zip(spec.amount, x.shape[-rank:]):
            if axis_amount >= extent and axis_amount > 0:
                raise ValueError(
                    f"replicate pad {axis_amount} must be smaller than extent {extent}"
                )
    widths = [(0, 0)] * (x.ndim - rank) + [(a, a) for a in spec.amount]
    if spec.mode == "zero":
        return np.pad(x, widths, mode="constant", constant_values=0)
    return np.pad(x, widths, mode="edge")


def as_batched(x: np.ndarray, ndim: int) -> tuple[np.ndarray, bool]:
    """View ``x`` with a leading batch axis, reporting whether one was added."""
    x = np.asarray(x)
    if x.ndim == ndim:
        return x, True
    if x.ndim == ndim - 1:
        return x[np.newaxis], False
    raise ValueError(f"expected rank {ndim - 1} or {ndim} array, got rank {x.ndim}")


def conv_extent(extent: int, window: int, amount: int, stride: int) -> int:
    """Output extent of a windowed scan; rejects degenerate geometry."""
    out = (extent + 2 * amount - window) // stride + 1
    if out <= 0:
        raise ValueError(
            f"window {window} with pad {amount} exceeds extent {extent}"
        )
    return out


def tap_view(
    padded: np.ndarray,
    offset: tuple[int, ...],
    radius: tuple[int, ...],
    out_extents: tuple[int, ...],
    stride: int = 1,
) -> np.ndarray:
    """Strided window of ``padded`` at a fixed offset from each window center.

    The trailing ``len(offset)`` axes are sliced; the view at offset
    ``o`` holds, for every output position, the sample displaced by
    ``o`` from that position's window center. No data is copied.
    """
    slices = [slice(None)] * (padded.ndim - len(offset))
    for off, rad, out in zip(offset, radius, out_extents):
        start = rad + off
        stop = start + (out - 1) * stride + 1
        slices.append(slice(start, stop, stride))
    return padded[tuple(slices)]


def _check_kernel(kernel: np.ndarray, spatial_rank: int) -> np.ndarray:
    kernel = np.asarray(kernel)
    if kernel.ndim != 2 + spatial_rank:
        raise ValueError(
            f"kernel must have rank {2 + spatial_rank} (c_out, c_in, spatial...), "
            f"got rank {kernel.ndim}"
        )
    if any(k % 2 == 0 for k in kernel.shape[2:]):
        raise ValueError(f"kernel spatial extents must be odd, got {kernel.shape[2:]}")
    return kernel


def _conv_nd(
    x: np.ndarray,
    kernel: np.ndarray,
    padding: PadSpec | None,
    stride: int,
    spatial_rank: int,
    subscripts: str,
) -> np.ndarray:
    if stride < 1:
        raise ValueError(f"stride must be positive, got {stride}")
    kernel = _check_kernel(kernel, spatial_rank)
    xb, batched = as_batched(x, 2 + spatial_rank)
    if xb.shape[1] != kernel.shape[1]:
        raise ValueError(
            f"input channels {xb.shape[1]} do not match kernel c_in {kernel.shape[1]}"
        )
    spec = padding if padding is not None else PadSpec.same(kernel.shape[2:])
    if len(spec.amount) != spatial_rank:
        raise ValueError(
            f"pad amount covers {len(spec.amount)} axes, expected {spatial_rank}"
        )
    xp = pad(xb, spec)
    for extent, window, amount in zip(xb.shape[2:], kernel.shape[2:], spec.amount):
        conv_extent(extent, window, amount, stride)
    axes = tuple(range(2, 2 + spatial_rank))
    windows = sliding_window_view(xp, kernel.shape[2:], axis=axes)
    strider = (slice(None), slice(None)) + (slice(None, None, stride),) * spatial_rank
    windows = windows[strider]
    out = np.einsum(subscripts, windows, kernel, optimize=True)
    return out if batched else out[0]


def conv2d(
    x: np.ndarray,
    kernel: np.ndarray,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> np.ndarray:
    """Dense cross-correlation over (H, W); default padding keeps extents.

    ``kernel[o, i, u, v]`` multiplies the sample at window row u, column
    v (top-left origin), summed over c_in and window positions.
    """
    return _conv_nd(x, kernel, padding, stride, 2, "nihwuv,oiuv->nohw")


def conv3d(
    x: np.ndarray,
    kernel: np.ndarray,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> np.ndarray:
    """Dense cross-correlation over (T, H, W) with shared stride per axis."""
    return _conv_nd(x, kernel, padding, stride, 3, "nidhwabc,oiabc->nodhw")


def window_median(x: np.ndarray, window: int, padding: PadSpec | None = None) -> np.ndarray:
    """Median of each window x window neighborhood over the last two axes.

    The window extent must be odd so the median is the exact middle
    order statistic of window**2 samples, never an average of two.
    """
    x = np.asarray(x)
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and positive, got {window}")
    if x.ndim < 2:
        raise ValueError("window_median needs at least two spatial axes")
    spec = padding if padding is not None else PadSpec.same(window)
    if len(spec.amount) != 2:
        raise ValueError("window_median pads exactly the last two axes")
    xp = pad(x, spec)
    for extent, amount in zip(x.shape[-2:], spec.amount):
        conv_extent(extent, window, amount, 1)
    win = sliding_window_view(xp, (window, window), axis=(-2, -1))
    return np.median(win, axis=(-2, -1))
