"""Power-partible reduction for holonomic sequences and the Schroeder-polynomial congruences."""

from .exact import K, KZ, Z, KPoly, ModInt, Rational, ZPoly, parse_poly, poly_eval_mod, poly_reflect_k, poly_shift_k
from .harness import (
    GridSpec,
    verify_divisibility,
    verify_lemma32,
    verify_theorem1,
    verify_via_certificate,
    weighted_sum_mod,
)
from .reduction import build_basis, check_symmetry, reduce_power, schroder_certificate, verify_certificate
from .sequences import SYMBOLIC, central_delannoy, large_schroder, little_schroder, seq_by_recurrence
from .shiftops import (
    ShiftOp,
    op_adjoint_apply,
    op_apply,
    op_degenerate_roots,
    op_degree,
    op_find_gamma,
    op_telescope,
    schroder_operator,
    verify_telescope,
)

__version__ = "0.1.0"
