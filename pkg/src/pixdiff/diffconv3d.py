"""Central difference convolutions on a 3x3x3 spatio-temporal window.

Input is ``(C, T, H, W)`` or ``(N, C, T, H, W)``; kernels are
``(c_out, c_in, 3, 3, 3)`` indexed (dt, dr, dc) with the middle entry
at the current time step and window center. Three sampling variants
choose which taps contribute differences and what they are differenced
against:

- ``st``: all 26 non-center taps minus the window center.
- ``t``: the 18 taps on the previous/next time slice minus the window
  center; spatial-only differences are dropped.
- ``tr``: the same 18 taps minus the average of the three slice
  centers.

The output blends the difference term with the dense convolution:
``theta * grad + (1 - theta) * conv3d(x, kernel)``. Differences are
formed sample-against-sample (tr averages three individual
differences), so constant windows contribute exactly 0.0 at theta = 1.
"""

from __future__ import annotations

import numpy as np

from .tensor import PadSpec, as_batched, conv3d, conv_extent, pad, tap_view

VARIANTS_3D = ("st", "t", "tr")

_CENTER = (0, 0, 0)
ALL_OFFSETS = tuple(
    (dt, dr, dc)
    for dt in (-1, 0, 1)
    for dr in (-1, 0, 1)
    for dc in (-1, 0, 1)
)
SLICE_CENTERS = ((-1, 0, 0), (0, 0, 0), (1, 0, 0))


def support_offsets(kind: str) -> tuple[tuple[int, int, int], ...]:
    """Taps whose differences enter the gradient term of one variant."""
    if kind == "st":
        return tuple(off for off in ALL_OFFSETS if off != _CENTER)
    if kind in ("t", "tr"):
        return tuple(off for off in ALL_OFFSETS if off[0] != 0)
    raise ValueError(f"kind must be one of {VARIANTS_3D}, got {kind!r}")


def _check_kernel3d(kernel: np.ndarray) -> np.ndarray:
    kernel = np.asarray(kernel)
    if kernel.ndim != 5 or kernel.shape[2:] != (3, 3, 3):
        raise ValueError(f"kernel must be (c_out, c_in, 3, 3, 3), got {kernel.shape}")
    return kernel


def cdc3d_forward(
    x: np.ndarray,
    kernel: np.ndarray,
    theta: float,
    kind: str,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> np.ndarray:
    """Mixed spatio-temporal difference convolution.

    The temporal variants (t, tr) difference across neighboring time
    steps, so they require a temporal extent of at least 3.
    """
    kernel = _check_kernel3d(kernel)
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    offsets = support_offsets(kind)
    xb, batched = as_batched(x, 5)
    n, in_c, t_ext = xb.shape[:3]
    if in_c != kernel.shape[1]:
        raise ValueError(
            f"input channels {in_c} do not match kernel c_in {kernel.shape[1]}"
        )
    if kind in ("t", "tr") and t_ext < 3:
        raise ValueError(
            f"temporal variant {kind!r} needs temporal extent >= 3, got {t_ext}"
        )
    if stride < 1:
        raise ValueError(f"stride must be positive, got {stride}")
    spec = padding if padding is not None else PadSpec.same(3, rank=3)
    if len(spec.amount) != 3:
        raise ValueError("3-d difference ops pad exactly the three spatial axes")
    out_shape = tuple(
        conv_extent(extent, 3, amount, stride)
        for extent, amount in zip(xb.shape[2:], spec.amount)
    )
    xp = pad(xb, spec)
    radius = (1, 1, 1)

    def tap(offset):
        return tap_view(xp, offset, radius, out_shape, stride)

    center = tap(_CENTER)
    out_c = kernel.shape[0]
    flat = int(np.prod(out_shape))
    acc = np.zeros((n, out_c, flat), dtype=np.result_type(xb.dtype, kernel.dtype))
    if kind == "tr":
        refs = [tap(off) for off in SLICE_CENTERS]
    for dt, dr, dc in offsets:
        sample = tap((dt, dr, dc))
        if kind == "tr":
            diff = sum(sample - ref for ref in refs) / 3.0
        else:
            diff = sample - center
        acc += kernel[:, :, dt + 1, dr + 1, dc + 1] @ diff.reshape(n, in_c, flat)
    grad_term = acc.reshape((n, out_c) + out_shape)
    dense_term = conv3d(xb, kernel, spec, stride)
    out = theta * grad_term + (1.0 - theta) * dense_term
    return out if batched else out[0]


def cdc3d_reparam(kernel: np.ndarray, theta: float, kind: str) -> np.ndarray:
    """Dense 3x3x3 kernel whose conv3d equals cdc3d_forward.

    Folding the differences into the kernel keeps gradient-term taps at
    their weight, scales dense-only taps by (1 - theta), and routes the
    reference mass -theta * sum(support weights) onto the window center
    (st, t) or split equally across the three slice centers (tr).
    """
    kernel = _check_kernel3d(kernel)
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    offsets = support_offsets(kind)
    folded = kernel.astype(np.result_type(kernel.dtype, np.float32), copy=True)
    support = set(offsets)
    for dt, dr, dc in ALL_OFFSETS:
        if (dt, dr, dc) not in support:
            folded[:, :, dt + 1, dr + 1, dc + 1] *= 1.0 - theta
    mass = np.zeros(kernel.shape[:2], dtype=folded.dtype)
    for dt, dr, dc in offsets:
        mass += kernel[:, :, dt + 1, dr + 1, dc + 1]
    if kind == "tr":
        for dt, dr, dc in SLICE_CENTERS:
            folded[:, :, dt + 1, dr + 1, dc + 1] -= theta * mass / 3.0
    else:
        folded[:, :, 1, 1, 1] -= theta * mass
    return folded
