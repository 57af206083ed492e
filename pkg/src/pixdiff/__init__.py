"""Local binary patterns, pixel difference convolutions, and their
dense reparameterizations, on plain NumPy arrays."""

from .diffconv import (
    LbcSpec,
    ccdc_forward,
    cdc_forward,
    gcdc_forward,
    lbc_forward,
    lbc_make_kernels,
    mediconv_forward,
    param_count,
    pdc_forward,
    stamp_kernel,
)
from .diffconv3d import cdc3d_forward, cdc3d_reparam
from .gradcheck import (
    GradBundle,
    GradCheckResult,
    cdc3d_backward,
    ccdc_backward,
    finite_diff_grad,
    gcdc_backward,
    grad_check,
    grad_check_all,
    lbc_backward,
    mediconv_backward,
    pdc_backward,
)
from .lbp import (
    Histogram,
    LbpMapping,
    NeighborhoodSpec,
    build_mapping,
    cslbp_code,
    elbp_angular_code,
    elbp_radial_code,
    histogram,
    lbp_code,
    lbp_image,
    rotation_min,
    sample_ring,
    uniform_transitions,
)
from .operators import build_operator
from .pairs import (
    PairSet,
    angular_pairs,
    build_pair_set,
    central_pairs,
    cross_pairs,
    radial_pairs,
    random_pairs,
)
from .pgm import read_pgm, write_pgm
from .reparam import (
    ReparamReport,
    UnsupportedOperationError,
    bench_compare,
    mixed_kernel,
    pairs_to_kernel,
    verify_equivalence,
)
from .tensor import PadSpec, conv2d, conv3d, pad, window_median

__version__ = "0.1.0"

__all__ = [
    "PadSpec",
    "pad",
    "conv2d",
    "conv3d",
    "window_median",
    "PairSet",
    "build_pair_set",
    "central_pairs",
    "angular_pairs",
    "radial_pairs",
    "cross_pairs",
    "random_pairs",
    "pdc_forward",
    "cdc_forward",
    "gcdc_forward",
    "ccdc_forward",
    "mediconv_forward",
    "LbcSpec",
    "lbc_make_kernels",
    "lbc_forward",
    "param_count",
    "stamp_kernel",
    "cdc3d_forward",
    "cdc3d_reparam",
    "NeighborhoodSpec",
    "sample_ring",
    "lbp_code",
    "cslbp_code",
    "elbp_angular_code",
    "elbp_radial_code",
    "lbp_image",
    "LbpMapping",
    "build_mapping",
    "rotation_min",
    "uniform_transitions",
    "Histogram",
    "histogram",
    "UnsupportedOperationError",
    "pairs_to_kernel",
    "mixed_kernel",
    "ReparamReport",
    "verify_equivalence",
    "bench_compare",
    "GradBundle",
    "GradCheckResult",
    "pdc_backward",
    "gcdc_backward",
    "ccdc_backward",
    "mediconv_backward",
    "lbc_backward",
    "cdc3d_backward",
    "finite_diff_grad",
    "grad_check",
    "grad_check_all",
    "build_operator",
    "read_pgm",
    "write_pgm",
]
