"""Barnes double zeta-function: evaluation, diagonal series and mean squares."""

__version__ = "0.1.0"

from .core import (
    BarnesParams,
    ComplexPoint,
    RegionTag,
    Tolerance,
    classify_region,
    validate_params,
)
from .evaluator import (
    EvalResult,
    Method,
    TruncationPlan,
    complex_power,
    direct_series,
    em_row_sum,
    euler_maclaurin_eval,
    hurwitz_oracle,
    theorem3_eval,
    verify_exp_sum_lemma,
)
from .hurwitz import hurwitz_zeta
from .diagonal import (
    DiagonalValue,
    MultiplicityTable,
    brute_force_diagonal,
    build_multiplicity_table,
    diagonal_value,
)
from .meansquare import (
    LatticeTable,
    MeanSquareCurve,
    QuadSettings,
    build_lattice_table,
    eval_truncated,
    integrand,
    mean_square_curve,
)
from .analysis import ExponentFit, TheoremVerdict, fit_exponent, verdict
