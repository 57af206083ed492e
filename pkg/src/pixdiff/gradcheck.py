"""Analytic adjoints for the difference operators, checked against
central finite differences.

Backward functions return a GradBundle holding the gradient of a scalar
loss (the upstream-weighted sum of the forward output) with respect to
each parameter group. Input gradients scatter upstream mass back
through the taps and then through the padding adjoint: zero padding
crops the halo, replicate padding folds it onto the edge samples.

The checker compares each analytic gradient entry against
(f(p + h) - f(p - h)) / (2 h). Every operator here is multilinear in
its parameters and piecewise linear in the input, so away from median
ties and relu kinks the comparison is exact up to roundoff.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .diffconv import (
    LbcSpec,
    apply_nonlinearity,
    as_pair_weights,
    ccdc_forward,
    gcdc_forward,
    lbc_forward,
    lbc_make_kernels,
    mediconv_forward,
    pdc_forward,
    stamp_kernel,
    windowed_setup,
)
from .diffconv3d import ALL_OFFSETS, SLICE_CENTERS, cdc3d_forward, support_offsets
from .pairs import CENTER, CROSS_DG, CROSS_HV, RING8, PairSet, build_pair_set, random_pairs
from .tensor import PadSpec, as_batched, conv2d, conv_extent, pad, tap_view


@dataclass
class GradBundle:
    """Gradients of one scalar loss, grouped by parameter."""

    grad_input: np.ndarray | None = None
    grad_weights: np.ndarray | None = None
    grad_center: np.ndarray | float | None = None
    grad_theta: float | None = None


def _fold_axis(g: np.ndarray, amount: int, extent: int, mode: str, axis: int) -> np.ndarray:
    if amount == 0:
        return g
    if mode == "zero":
        index = [slice(None)] * g.ndim
        index[axis] = slice(amount, amount + extent)
        return g[tuple(index)]
    idx = np.clip(np.arange(extent + 2 * amount) - amount, 0, extent - 1)
    moved = np.moveaxis(g, axis, 0)
    out = np.zeros((extent,) + moved.shape[1:], dtype=g.dtype)
    np.add.at(out, idx, moved)
    return np.moveaxis(out, 0, axis)


def pad_adjoint(gpad: np.ndarray, spec: PadSpec, extents: tuple[int, ...]) -> np.ndarray:
    """Adjoint of pad: crop zero halos, fold replicate halos onto edges."""
    g = gpad
    rank = len(spec.amount)
    for j, (amount, extent) in enumerate(zip(spec.amount, extents)):
        g = _fold_axis(g, amount, extent, spec.mode, g.ndim - rank + j)
    return g


def _backward_setup(x, window, padding, stride, upstream, out_channels):
    xb, batched, xp, spec, (oh, ow) = windowed_setup(x, window, padding, stride)
    ub, _ = as_batched(upstream, 4)
    expected = (xb.shape[0], out_channels, oh, ow)
    if ub.shape != expected:
        raise ValueError(f"upstream shape {ub.shape} does not match output {expected}")
    return xb, batched, xp, spec, (oh, ow), ub


def pdc_backward(
    x: np.ndarray,
    pair_set: PairSet,
    weights: np.ndarray,
    upstream: np.ndarray,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> GradBundle:
    """Adjoint of pdc_forward for the input and the pair weights.

    The input gradient is built pair by pair (+w at the minuend, -w at
    the subtrahend), not by transposing the folded dense kernel, so it
    stays an independent route from conv2d's adjoint.
    """
    w = as_pair_weights(weights, pair_set.m)
    xb, batched, xp, spec, (oh, ow), ub = _backward_setup(
        x, pair_set.window, padding, stride, upstream, w.shape[0]
    )
    n, in_c = xb.shape[:2]
    radius = (pair_set.window - 1) // 2
    dtype = np.result_type(xb.dtype, ub.dtype, w.dtype)
    uflat = ub.reshape(n, w.shape[0], oh * ow)
    grad_w = np.zeros(w.shape, dtype=dtype)
    gpad = np.zeros(xp.shape, dtype=dtype)
    geom = ((radius, radius), (oh, ow), stride)
    for i, (minuend, subtrahend) in enumerate(pair_set.pairs):
        a = tap_view(xp, minuend, *geom)
        b = tap_view(xp, subtrahend, *geom)
        diff = (a - b).reshape(n, in_c, oh * ow)
        grad_w[:, :, i] = np.einsum("nop,nip->oi", uflat, diff)
        g = np.einsum("oi,nop->nip", w[:, :, i], uflat).reshape(n, in_c, oh, ow)
        tap_view(gpad, minuend, *geom)[...] += g
        tap_view(gpad, subtrahend, *geom)[...] -= g
    grad_x = pad_adjoint(gpad, spec, xb.shape[2:])
    return GradBundle(
        grad_input=grad_x if batched else grad_x[0], grad_weights=grad_w
    )


def conv2d_input_grad(
    upstream: np.ndarray,
    kernel: np.ndarray,
    x_shape: tuple[int, ...],
    padding: PadSpec | None = None,
    stride: int = 1,
) -> np.ndarray:
    """Input gradient of conv2d by scattering each kernel tap."""
    kernel = np.asarray(kernel)
    if kernel.ndim != 4:
        raise ValueError(f"kernel must be (c_out, c_in, kh, kw), got {kernel.shape}")
    out_c, in_c, kh, kw = kernel.shape
    batched = len(x_shape) == 4
    full = tuple(x_shape) if batched else (1,) + tuple(x_shape)
    if full[1] != in_c:
        raise ValueError(f"x channels {full[1]} do not match kernel c_in {in_c}")
    spec = padding if padding is not None else PadSpec.same((kh, kw))
    oh = conv_extent(full[2], kh, spec.amount[0], stride)
    ow = conv_extent(full[3], kw, spec.amount[1], stride)
    ub, _ = as_batched(upstream, 4)
    if ub.shape != (full[0], out_c, oh, ow):
        raise ValueError(
            f"upstream shape {ub.shape} does not match output {(full[0], out_c, oh, ow)}"
        )
    uflat = ub.reshape(full[0], out_c, oh * ow)
    rh, rw = (kh - 1) // 2, (kw - 1) // 2
    gpad = np.zeros(
        (full[0], in_c, full[2] + 2 * spec.amount[0], full[3] + 2 * spec.amount[1]),
        dtype=np.result_type(ub.dtype, kernel.dtype),
    )
    for u in range(kh):
        for v in range(kw):
            g = np.einsum("oi,nop->nip", kernel[:, :, u, v], uflat)
            view = tap_view(gpad, (u - rh, v - rw), (rh, rw), (oh, ow), stride)
            view[...] += g.reshape(full[0], in_c, oh, ow)
    grad_x = pad_adjoint(gpad, spec, full[2:])
    return grad_x if batched else grad_x[0]


def _mixed_backward(x, offsets, weights, center_weight, theta, upstream, padding, stride):
    w = as_pair_weights(weights, len(offsets))
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    xb, batched, xp, spec, (oh, ow), ub = _backward_setup(
        x, 3, padding, stride, upstream, w.shape[0]
    )
    n, in_c = xb.shape[:2]
    dtype = np.result_type(xb.dtype, ub.dtype, w.dtype)
    uflat = ub.reshape(n, w.shape[0], oh * ow)
    geom = ((1, 1), (oh, ow), stride)
    pair_set = PairSet(3, tuple((off, CENTER) for off in offsets))
    grad_term = pdc_forward(xb, pair_set, w, spec, stride)
    dense_term = conv2d(xb, stamp_kernel(offsets, w, center_weight), spec, stride)
    grad_theta = float(np.sum(ub * (grad_term - dense_term)))
    cflat = tap_view(xp, CENTER, *geom).reshape(n, in_c, oh * ow)
    grad_w = np.zeros(w.shape, dtype=dtype)
    gpad = np.zeros(xp.shape, dtype=dtype)
    for i, off in enumerate(offsets):
        aflat = tap_view(xp, off, *geom).reshape(n, in_c, oh * ow)
        grad_w[:, :, i] = theta * np.einsum("nop,nip->oi", uflat, aflat - cflat) + (
            1.0 - theta
        ) * np.einsum("nop,nip->oi", uflat, aflat)
        g = np.einsum("oi,nop->nip", w[:, :, i], uflat).reshape(n, in_c, oh, ow)
        tap_view(gpad, off, *geom)[...] += g
        tap_view(gpad, CENTER, *geom)[...] -= theta * g
    cw = np.asarray(center_weight)
    center_corr = np.einsum("nop,nip->oi", uflat, cflat)
    grad_center = (1.0 - theta) * (center_corr if cw.ndim == 2 else center_corr.sum())
    g_c = np.einsum(
        "oi,nop->nip", np.broadcast_to(cw, w.shape[:2]), uflat
    ).reshape(n, in_c, oh, ow)
    tap_view(gpad, CENTER, *geom)[...] += (1.0 - theta) * g_c
    grad_x = pad_adjoint(gpad, spec, xb.shape[2:])
    return GradBundle(
        grad_input=grad_x if batched else grad_x[0],
        grad_weights=grad_w,
        grad_center=grad_center,
        grad_theta=grad_theta,
    )


def gcdc_backward(
    x, weights, center_weight, theta, upstream, padding=None, stride=1
) -> GradBundle:
    """Adjoint of gcdc_forward, including the blend parameter theta."""
    return _mixed_backward(x, RING8, weights, center_weight, theta, upstream, padding, stride)


def ccdc_backward(
    x, weights, center_weight, theta, direction, upstream, padding=None, stride=1
) -> GradBundle:
    """Adjoint of ccdc_forward for either cross direction."""
    if direction == "hv":
        arms = CROSS_HV
    elif direction == "dg":
        arms = CROSS_DG
    else:
        raise ValueError(f"direction must be 'hv' or 'dg', got {direction!r}")
    return _mixed_backward(x, arms, weights, center_weight, theta, upstream, padding, stride)


def mediconv_backward(
    x: np.ndarray,
    weights: np.ndarray,
    upstream: np.ndarray,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> GradBundle:
    """Adjoint of mediconv_forward.

    The median subgradient routes the pooled -sum(w) mass to the
    element attaining the median; ties go to the lowest window index
    (row-major), matching how np.argmax breaks ties.
    """
    w = np.asarray(weights)
    if w.ndim != 4 or w.shape[2] != w.shape[3]:
        raise ValueError(f"weights must be (c_out, c_in, k, k), got {w.shape}")
    window = w.shape[2]
    xb, batched, xp, spec, (oh, ow), ub = _backward_setup(
        x, window, padding, stride, upstream, w.shape[0]
    )
    n, in_c = xb.shape[:2]
    radius = (window - 1) // 2
    dtype = np.result_type(xb.dtype, ub.dtype, w.dtype)
    geom = ((radius, radius), (oh, ow), stride)
    windows = sliding_window_view(xp, (window, window), axis=(-2, -1))
    windows = windows[:, :, ::stride, ::stride, :, :]
    flatwin = windows.reshape(windows.shape[:4] + (window * window,))
    med = np.median(flatwin, axis=-1)
    argmed = np.argmax(flatwin == med[..., None], axis=-1)
    uflat = ub.reshape(n, w.shape[0], oh * ow)
    grad_w = np.zeros(w.shape, dtype=dtype)
    gpad = np.zeros(xp.shape, dtype=dtype)
    for u in range(window):
        for v in range(window):
            a = tap_view(xp, (u - radius, v - radius), *geom)
            diff = (a - med).reshape(n, in_c, oh * ow)
            grad_w[:, :, u, v] = np.einsum("nop,nip->oi", uflat, diff)
            g = np.einsum("oi,nop->nip", w[:, :, u, v], uflat)
            view = tap_view(gpad, (u - radius, v - radius), *geom)
            view[...] += g.reshape(n, in_c, oh, ow)
    pooled = np.einsum("oi,nop->nip", w.sum(axis=(2, 3)), uflat).reshape(n, in_c, oh, ow)
    rows = (np.arange(oh) * stride).reshape(1, 1, oh, 1) + argmed // window
    cols = (np.arange(ow) * stride).reshape(1, 1, 1, ow) + argmed % window
    nidx, iidx, _, _ = np.indices((n, in_c, oh, ow), sparse=True)
    np.add.at(gpad, (nidx, iidx, rows, cols), -pooled)
    grad_x = pad_adjoint(gpad, spec, xb.shape[2:])
    return GradBundle(
        grad_input=grad_x if batched else grad_x[0], grad_weights=grad_w
    )


def lbc_backward(
    x: np.ndarray,
    kernels: np.ndarray,
    nonlinearity: str,
    pooling: np.ndarray,
    upstream: np.ndarray,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> GradBundle:
    """Gradients of the pooled binary-convolution output.

    Only the pooling matrix is learnable; grad_weights holds its
    gradient. The input gradient flows through the nonlinearity and the
    fixed binary kernels.
    """
    pooling = np.asarray(pooling)
    z = conv2d(x, kernels, padding, stride)
    zb, batched = as_batched(z, 4)
    a = apply_nonlinearity(zb, nonlinearity)
    ub, _ = as_batched(upstream, 4)
    if ub.shape != (zb.shape[0], pooling.shape[0]) + zb.shape[2:]:
        raise ValueError(f"upstream shape {ub.shape} does not match pooled output")
    grad_pool = np.einsum("nohw,nmhw->om", ub, a)
    upool = np.einsum("om,nohw->nmhw", pooling, ub)
    if nonlinearity == "sigmoid":
        dz = upool * a * (1.0 - a)
    else:
        dz = upool * (zb > 0)
    if not batched:
        dz = dz[0]
    grad_x = conv2d_input_grad(dz, kernels, np.asarray(x).shape, padding, stride)
    return GradBundle(grad_input=grad_x, grad_weights=grad_pool)


def cdc3d_backward(
    x: np.ndarray,
    kernel: np.ndarray,
    theta: float,
    kind: str,
    upstream: np.ndarray,
    padding: PadSpec | None = None,
    stride: int = 1,
) -> GradBundle:
    """Adjoint of cdc3d_forward for the kernel, theta, and the input."""
    kernel = np.asarray(kernel)
    theta = float(theta)
    offsets = support_offsets(kind)
    grad_term = cdc3d_forward(x, kernel, 1.0, kind, padding, stride)
    dense_term = cdc3d_forward(x, kernel, 0.0, kind, padding, stride)
    xb, batched = as_batched(x, 5)
    ub, _ = as_batched(upstream, 5)
    spec = padding if padding is not None else PadSpec.same(3, rank=3)
    out_shape = tuple(
        conv_extent(extent, 3, amount, stride)
        for extent, amount in zip(xb.shape[2:], spec.amount)
    )
    n, in_c = xb.shape[:2]
    out_c = kernel.shape[0]
    if ub.shape != (n, out_c) + out_shape:
        raise ValueError(f"upstream shape {ub.shape} does not match output")
    gb, _ = as_batched(grad_term, 5)
    db, _ = as_batched(dense_term, 5)
    grad_theta = float(np.sum(ub * (gb - db)))
    xp = pad(xb, spec)
    geom = ((1, 1, 1), out_shape, stride)
    flat = int(np.prod(out_shape))
    uflat = ub.reshape(n, out_c, flat)
    dtype = np.result_type(xb.dtype, ub.dtype, kernel.dtype)
    grad_k = np.zeros(kernel.shape, dtype=dtype)
    gpad = np.zeros(xp.shape, dtype=dtype)
    center = tap_view(xp, (0, 0, 0), *geom)
    refs = [tap_view(xp, off, *geom) for off in SLICE_CENTERS] if kind == "tr" else None
    for dt, dr, dc in ALL_OFFSETS:
        aflat = tap_view(xp, (dt, dr, dc), *geom).reshape(n, in_c, flat)
        grad_k[:, :, dt + 1, dr + 1, dc + 1] += (1.0 - theta) * np.einsum(
            "nop,nip->oi", uflat, aflat
        )
        g = np.einsum("oi,nop->nip", kernel[:, :, dt + 1, dr + 1, dc + 1], uflat)
        view = tap_view(gpad, (dt, dr, dc), *geom)
        view[...] += (1.0 - theta) * g.reshape((n, in_c) + out_shape)
    for dt, dr, dc in offsets:
        sample = tap_view(xp, (dt, dr, dc), *geom)
        if kind == "tr":
            diff = sum(sample - ref for ref in refs) / 3.0
        else:
            diff = sample - center
        grad_k[:, :, dt + 1, dr + 1, dc + 1] += theta * np.einsum(
            "nop,nip->oi", uflat, diff.reshape(n, in_c, flat)
        )
        g = np.einsum("oi,nop->nip", kernel[:, :, dt + 1, dr + 1, dc + 1], uflat)
        g = g.reshape((n, in_c) + out_shape)
        tap_view(gpad, (dt, dr, dc), *geom)[...] += theta * g
        if kind == "tr":
            for c_off in SLICE_CENTERS:
                tap_view(gpad, c_off, *geom)[...] -= (theta / 3.0) * g
        else:
            tap_view(gpad, (0, 0, 0), *geom)[...] -= theta * g
    grad_x = pad_adjoint(gpad, spec, xb.shape[2:])
    return GradBundle(
        grad_input=grad_x if batched else grad_x[0],
        grad_weights=grad_k,
        grad_theta=grad_theta,
    )


def finite_diff_grad(f, param: np.ndarray, h: float = 1e-3) -> np.ndarray:
    """Central-difference gradient of a scalar function, entry by entry."""
    base = np.array(param, dtype=np.float64)
    grad = np.empty_like(base)
    flat = base.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        f_plus = float(f(base))
        flat[i] = orig - h
        f_minus = float(f(base))
        flat[i] = orig
        gflat[i] = (f_plus - f_minus) / (2.0 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Max absolute deviation scaled by the numeric gradient's magnitude."""
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    denom = max(float(np.max(np.abs(n))) if n.size else 0.0, 1e-8)
    return float(np.max(np.abs(a - n)) / denom)


@dataclass(frozen=True)
class GradCheckResult:
    """Worst relative error for one (operator, parameter group) pair."""

    op: str
    group: str
    seeds: int
    h: float
    tol: float
    max_rel_err: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "group": self.group,
            "seeds": self.seeds,
            "h": self.h,
            "tol": self.tol,
            "max_rel_err": self.max_rel_err,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


GRADCHECK_OPS = (
    "cpdc",
    "apdc",
    "rpdc",
    "random-pdc",
    "gcdc",
    "ccdc-hv",
    "ccdc-dg",
    "mediconv",
    "lbc",
    "cdc3d-st",
    "cdc3d-t",
    "cdc3d-tr",
)

_PDC_SETS = {"cpdc": "central", "apdc": "angular", "rpdc": "radial"}


def _seed_errors_pdc(pair_set: PairSet, seed: int, h: float) -> dict[str, float]:
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, (1, 2, pair_set.window + 3, pair_set.window + 2))
    w = rng.uniform(-1.0, 1.0, (2, 2, pair_set.m))
    up = rng.uniform(-1.0, 1.0, (1, 2) + x.shape[2:])
    bundle = pdc_backward(x, pair_set, w, up)
    fd_w = finite_diff_grad(lambda wv: np.sum(up * pdc_forward(x, pair_set, wv)), w, h)
    fd_x = finite_diff_grad(lambda xv: np.sum(up * pdc_forward(xv, pair_set, w)), x, h)
    return {
        "weights": relative_error(bundle.grad_weights, fd_w),
        "input": relative_error(bundle.grad_input, fd_x),
    }


def _seed_errors_mixed(arms: str, seed: int, h: float) -> dict[str, float]:
    rng = np.random.default_rng(seed)
    m = 8 if arms == "ring" else 4
    x = rng.uniform(-1.0, 1.0, (1, 2, 6, 5))
    w = rng.uniform(-1.0, 1.0, (2, 2, m))
    w_c = rng.uniform(-1.0, 1.0, (2, 2))
    theta = float(rng.uniform(0.1, 0.9))
    up = rng.uniform(-1.0, 1.0, (1, 2) + x.shape[2:])

    if arms == "ring":
        def fwd(xv, wv, cv, tv):
            return gcdc_forward(xv, wv, cv, float(tv))

        bundle = gcdc_backward(x, w, w_c, theta, up)
    else:
        def fwd(xv, wv, cv, tv):
            return ccdc_forward(xv, wv, cv, float(tv), arms)

        bundle = ccdc_backward(x, w, w_c, theta, arms, up)
    fd_w = finite_diff_grad(lambda wv: np.sum(up * fwd(x, wv, w_c, theta)), w, h)
    fd_c = finite_diff_grad(lambda cv: np.sum(up * fwd(x, w, cv, theta)), w_c, h)
    fd_t = finite_diff_grad(lambda tv: np.sum(up * fwd(x, w, w_c, tv)), np.float64(theta), h)
    fd_x = finite_diff_grad(lambda xv: np.sum(up * fwd(xv, w, w_c, theta)), x, h)
    return {
        "weights": relative_error(bundle.grad_weights, fd_w),
        "center": relative_error(bundle.grad_center, fd_c),
        "theta": relative_error(bundle.grad_theta, fd_t),
        "input": relative_error(bundle.grad_input, fd_x),
    }


def _seed_errors_mediconv(seed: int, h: float) -> dict[str, float]:
    rng = np.random.default_rng(seed)
    shape = (1, 2, 6, 5)
    # distinct integers keep every window tie-free: gaps of 1 dwarf h
    x = rng.permutation(int(np.prod(shape))).astype(np.float64).reshape(shape)
    w = rng.uniform(-1.0, 1.0, (2, 2, 3, 3))
    up = rng.uniform(-1.0, 1.0, (1, 2) + shape[2:])
    bundle = mediconv_backward(x, w, up)
    fd_w = finite_diff_grad(lambda wv: np.sum(up * mediconv_forward(x, wv)), w, h)
    fd_x = finite_diff_grad(lambda xv: np.sum(up * mediconv_forward(xv, w)), x, h)
    return {
        "weights": relative_error(bundle.grad_weights, fd_w),
        "input": relative_error(bundle.grad_input, fd_x),
    }


def _seed_errors_lbc(seed: int, h: float) -> dict[str, float]:
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, (1, 2, 6, 5))
    kernels = lbc_make_kernels(LbcSpec(maps=4, seed=seed), 2)
    pooling = rng.uniform(-1.0, 1.0, (2, 4))
    up = rng.uniform(-1.0, 1.0, (1, 2) + x.shape[2:])
    bundle = lbc_backward(x, kernels, "sigmoid", pooling, up)
    fd_p = finite_diff_grad(
        lambda pv: np.sum(up * lbc_forward(x, kernels, "sigmoid", pv)), pooling, h
    )
    fd_x = finite_diff_grad(
        lambda xv: np.sum(up * lbc_forward(xv, kernels, "sigmoid", pooling)), x, h
    )
    return {
        "pooling": relative_error(bundle.grad_weights, fd_p),
        "input": relative_error(bundle.grad_input, fd_x),
    }


def _seed_errors_cdc3d(kind: str, seed: int, h: float) -> dict[str, float]:
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, (1, 2, 4, 5, 4))
    kernel = rng.uniform(-1.0, 1.0, (2, 2, 3, 3, 3))
    theta = float(rng.uniform(0.1, 0.9))
    up = rng.uniform(-1.0, 1.0, (1, 2) + x.shape[2:])
    bundle = cdc3d_backward(x, kernel, theta, kind, up)
    fd_k = finite_diff_grad(
        lambda kv: np.sum(up * cdc3d_forward(x, kv, theta, kind)), kernel, h
    )
    fd_t = finite_diff_grad(
        lambda tv: np.sum(up * cdc3d_forward(x, kernel, float(tv), kind)),
        np.float64(theta),
        h,
    )
    fd_x = finite_diff_grad(
        lambda xv: np.sum(up * cdc3d_forward(xv, kernel, theta, kind)), x, h
    )
    return {
        "kernel": relative_error(bundle.grad_weights, fd_k),
        "theta": relative_error(bundle.grad_theta, fd_t),
        "input": relative_error(bundle.grad_input, fd_x),
    }


def _seed_errors(op: str, seed: int, h: float) -> dict[str, float]:
    if op in _PDC_SETS:
        return _seed_errors_pdc(build_pair_set(_PDC_SETS[op]), seed, h)
    if op == "random-pdc":
        return _seed_errors_pdc(random_pairs(5, 11, seed=1000 + seed), seed, h)
    if op == "gcdc":
        return _seed_errors_mixed("ring", seed, h)
    if op == "ccdc-hv":
        return _seed_errors_mixed("hv", seed, h)
    if op == "ccdc-dg":
        return _seed_errors_mixed("dg", seed, h)
    if op == "mediconv":
        return _seed_errors_mediconv(seed, h)
    if op == "lbc":
        return _seed_errors_lbc(seed, h)
    if op.startswith("cdc3d-"):
        kind = op.split("-", 1)[1]
        return _seed_errors_cdc3d(kind, seed, h)
    raise ValueError(f"unknown gradcheck op {op!r}; expected one of {GRADCHECK_OPS}")


def grad_check(
    op: str, seeds: int = 20, h: float = 1e-3, tol: float = 1e-4
) -> list[GradCheckResult]:
    """Worst-case FD comparison for one operator over many seeds.

    Returns one result per parameter group; a result passes when the
    worst relative error over all seeds stays within ``tol``.
    """
    if seeds < 1:
        raise ValueError(f"seeds must be positive, got {seeds}")
    worst: dict[str, float] = {}
    for seed in range(seeds):
        for group, err in _seed_errors(op, seed, h).items():
            worst[group] = max(worst.get(group, 0.0), err)
    return [
        GradCheckResult(
            op=op,
            group=group,
            seeds=seeds,
            h=h,
            tol=tol,
            max_rel_err=err,
            passed=err <= tol,
        )
        for group, err in worst.items()
    ]


def grad_check_all(
    ops: tuple[str, ...] = GRADCHECK_OPS,
    seeds: int = 20,
    h: float = 1e-3,
    tol: float = 1e-4,
) -> list[GradCheckResult]:
    """grad_check over a list of operators, flattened."""
    results: list[GradCheckResult] = []
    for op in ops:
        results.extend(grad_check(op, seeds=seeds, h=h, tol=tol))
    return results
