"""Iterative solvers: proximal gradient descent and damped CGLS."""

from randtomo.solvers.cgls import RidgeSolution, cgls_ridge
from randtomo.solvers.pgd import SolveResult, apriori_check, bb_step, objective, pgd_solve

__all__ = [
    "RidgeSolution",
    "SolveResult",
    "apriori_check",
    "bb_step",
    "cgls_ridge",
    "objective",
    "pgd_solve",
]
