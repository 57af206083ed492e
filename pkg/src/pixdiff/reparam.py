"""Folding pair differences into dense kernels, with checks and timings.

Every pair-based difference convolution is linear in the input, so its
effect collapses into one dense kernel: each pair adds +w at its
minuend offset and -w at its subtrahend offset. Running conv2d with the
folded kernel must match the pair-loop forward; verify_equivalence
measures the worst deviation over random trials and bench_compare times
the two routes against a plain dense convolution of the same geometry.

Operators whose reference value depends on the data (the window median)
have no folded form and raise UnsupportedOperationError.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from statistics import median

import numpy as np
from threadpoolctl import threadpool_limits

from .diffconv import as_pair_weights, stamp_kernel
from .pairs import Offset, PairSet
from .tensor import conv2d


class UnsupportedOperationError(RuntimeError):
    """The operator's reference is data dependent; no dense kernel exists."""


def pairs_to_kernel(pair_set: PairSet, weights: np.ndarray) -> np.ndarray:
    """Dense ``(c_out, c_in, k, k)`` kernel equivalent to the pair loop.

    Pair i contributes +w_i at its minuend offset and -w_i at its
    subtrahend offset; offsets shared by several pairs accumulate.
    """
    w = as_pair_weights(weights, pair_set.m)
    radius = (pair_set.window - 1) // 2
    kernel = np.zeros(w.shape[:2] + (pair_set.window, pair_set.window), dtype=w.dtype)
    for i, (minuend, subtrahend) in enumerate(pair_set.pairs):
        kernel[:, :, radius + minuend[0], radius + minuend[1]] += w[:, :, i]
        kernel[:, :, radius + subtrahend[0], radius + subtrahend[1]] -= w[:, :, i]
    return kernel


def mixed_kernel(
    offsets: tuple[Offset, ...],
    weights: np.ndarray,
    center_weight: np.ndarray | float,
    theta: float,
) -> np.ndarray:
    """Dense kernel for a theta-blend of central differences and conv2d.

    Neighbor taps keep their weight (theta*w + (1-theta)*w); the center
    collects (1-theta)*w_c - theta*sum(w).
    """
    w = as_pair_weights(weights, len(offsets))
    folded_center = (1.0 - theta) * np.asarray(center_weight) - theta * w.sum(axis=-1)
    return stamp_kernel(offsets, w, folded_center, window=3)


@dataclass(frozen=True)
class ReparamReport:
    """Equivalence and timing summary for one operator."""

    op: str
    shape: tuple[int, ...]
    dtype: str = "float64"
    trials: int = 0
    tolerance: float | None = None
    max_abs_error: float | None = None
    passed: bool | None = None
    naive_ns: float | None = None
    reparam_ns: float | None = None
    dense_ns: float | None = None

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "shape": list(self.shape),
            "dtype": self.dtype,
            "trials": self.trials,
            "tolerance": self.tolerance,
            "max_abs_error": self.max_abs_error,
            "passed": self.passed,
            "naive_ns": self.naive_ns,
            "reparam_ns": self.reparam_ns,
            "dense_ns": self.dense_ns,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def verify_equivalence(
    op,
    trials: int = 100,
    shape: tuple[int, ...] = (1, 16, 64, 64),
    tolerance: float = 1e-5,
    dtype: np.dtype = np.float32,
    seed: int = 0,
) -> ReparamReport:
    """Worst |pair-loop - folded-kernel| deviation over random inputs.

    Both routes run at the operator's default padding and stride; the
    report passes when every trial stays within ``tolerance``.
    """
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    cast = op.astype(dtype)
    kernel = cast.dense_kernel()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        x = rng.uniform(-1.0, 1.0, size=shape).astype(dtype)
        direct = cast.forward(x)
        folded = conv2d(x, kernel)
        worst = max(worst, float(np.max(np.abs(direct - folded))))
    return ReparamReport(
        op=op.name,
        shape=tuple(shape),
        dtype=np.dtype(dtype).name,
        trials=trials,
        tolerance=tolerance,
        max_abs_error=worst,
        passed=worst <= tolerance,
    )


def thread_limit(default: int = 1) -> int:
    """Benchmark thread cap: PIXDIFF_THREADS env var, else ``default``."""
    raw = os.environ.get("PIXDIFF_THREADS", "")
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"PIXDIFF_THREADS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"PIXDIFF_THREADS must be positive, got {value}")
    return value


def _time_ns(fn, repetitions: int, warmup: int) -> float:
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(repetitions):
        start = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - start)
    return float(median(samples))


def bench_compare(
    op,
    shape: tuple[int, ...] = (1, 16, 256, 256),
    repetitions: int = 50,
    warmup: int = 5,
    threads: int | None = None,
    dtype: np.dtype = np.float32,
    seed: int = 0,
) -> ReparamReport:
    """Median wall time of pair-loop, folded-kernel, and dense routes.

    Runs under a BLAS thread cap (default single-threaded, overridable
    via PIXDIFF_THREADS) so medians are comparable across machines.
    The dense baseline is a random kernel of the folded kernel's shape.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be positive, got {repetitions}")
    threads = thread_limit() if threads is None else threads
    cast = op.astype(dtype)
    kernel = cast.dense_kernel()
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=shape).astype(dtype)
    baseline = rng.uniform(-1.0, 1.0, size=kernel.shape).astype(dtype)
    with threadpool_limits(limits=threads):
        deviation = float(np.max(np.abs(cast.forward(x) - conv2d(x, kernel))))
        naive_ns = _time_ns(lambda: cast.forward(x), repetitions, warmup)
        reparam_ns = _time_ns(lambda: conv2d(x, kernel), repetitions, warmup)
        dense_ns = _time_ns(lambda: conv2d(x, baseline), repetitions, warmup)
    return ReparamReport(
        op=op.name,
        shape=tuple(shape),
        dtype=np.dtype(dtype).name,
        trials=repetitions,
        max_abs_error=deviation,
        naive_ns=naive_ns,
        reparam_ns=reparam_ns,
        dense_ns=dense_ns,
    )
