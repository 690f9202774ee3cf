"""Convexity certification for determinant-composed energies on the cone
of symmetric positive definite matrices."""

__version__ = "0.1.0"

from .certifier import (
    CERTIFIED,
    INCONCLUSIVE,
    REFUTED,
    CertificationReport,
    GridSpec,
    Witness,
    certify,
    diff_ineq_lhs,
    reduction_check,
    sample_convexity,
    sigma_checks,
    witness_positive_fprime,
    witness_second_order,
)
from .detcalculus import (
    condition_lhs_diag,
    condition_lhs_full,
    fd_second_directional,
    g_grad_form,
    g_hess_form,
    g_value,
    oracle_sweep,
)
from .linalg import (
    EigenDecomposition,
    PosDefMatrix,
    SymMatrix,
    adjugate,
    det,
    frob_inner,
    jacobi_eigen,
    random_posdef,
    random_sym,
)
from .odelimit import (
    CurveTable,
    IvpSpec,
    comparison_check,
    export_family_curves,
    f_limit,
    solve_livp_numeric,
    y_limit,
)
from .scalarfun import (
    Expr,
    FamilyA,
    Jet2,
    LogFamily,
    NeoHookeVolumetric,
    PowerLaw,
    eval_jet,
    family_f_a,
    parse,
)

__all__ = [
    "CERTIFIED",
    "INCONCLUSIVE",
    "REFUTED",
    "CertificationReport",
    "CurveTable",
    "EigenDecomposition",
    "Expr",
    "FamilyA",
    "GridSpec",
    "IvpSpec",
    "Jet2",
    "LogFamily",
    "NeoHookeVolumetric",
    "PosDefMatrix",
    "PowerLaw",
    "SymMatrix",
    "Witness",
    "adjugate",
    "certify",
    "comparison_check",
    "condition_lhs_diag",
    "condition_lhs_full",
    "det",
    "diff_ineq_lhs",
    "eval_jet",
    "export_family_curves",
    "f_limit",
    "family_f_a",
    "fd_second_directional",
    "frob_inner",
    "g_grad_form",
    "g_hess_form",
    "g_value",
    "jacobi_eigen",
    "oracle_sweep",
    "parse",
    "random_posdef",
    "random_sym",
    "reduction_check",
    "sample_convexity",
    "sigma_checks",
    "solve_livp_numeric",
    "witness_positive_fprime",
    "witness_second_order",
    "y_limit",
]
