"""Exact-arithmetic workbench for topological recursion and x-y duality.

Two independent engines over genus-zero spectral curves with exact rational
data: the Eynard-Orantin recursion producing correlator tensors, and the
universal x-y duality evaluators (cycle sum, graph sum, and the general
bicoloured-graph sum with Bernoulli-corrected dual families for exponential
variables).  Both are cross-verified on the preset catalogue, and residue
extractors turn the correlators into psi-class intersection numbers, linear
and triple Hodge integrals and stationary Gromov-Witten invariants of the
projective line.  All arithmetic is exact over Q.
"""

from .curves import (
    LogRationalFunction,
    RamificationData,
    SpectralCurve,
    UnsupportedCurveError,
    load_curve_file,
    make_preset,
    preset_names,
    ramification,
    rescale_y,
    swap_xy,
)
from .invariants import (
    InvariantRecord,
    extract_gw_p1,
    extract_hodge_linear,
    extract_psi,
    extract_rspin,
    extract_triple_hodge,
)
from .rationals import Rat, bernoulli_half, bernoulli_numbers, r_factorial, rat_from_str, rat_to_str, s_coefficients
from .series import Jet, MultiSeries, PoleCollisionError, RationalFunction1, Series1, TruncationError
from .tr import CorrelatorTensor, normalize, omega, recursion_kernel, tensor_from_json, tensor_to_json
from .wave import quantum_curve_check, wave_function
from .xy import (
    connected_part,
    default_base_points,
    dual_correction,
    enumerate_bicoloured,
    enumerate_connected_graphs,
    enumerate_n_cycles,
    operator_residual,
    xy_cycles,
    xy_general,
    xy_graphs,
    xy_w,
)

__version__ = "0.1.0"
