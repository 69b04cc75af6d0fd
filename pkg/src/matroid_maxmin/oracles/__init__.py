"""Exact oracles used to check the solver at desk scale."""
from .brute import BruteResult, brute_force_matroid_maxmin, brute_force_santa_opt
from .lp import lp_feasible_compact, lp_feasible_Q, q_contains
from .simplex import EQ, GE, LE, FeasibilityResult, RationalTableau, feasible
from .verify import VerificationReport, verify_solution

__all__ = [
    "BruteResult",
    "EQ",
    "FeasibilityResult",
    "GE",
    "LE",
    "RationalTableau",
    "VerificationReport",
    "brute_force_matroid_maxmin",
    "brute_force_santa_opt",
    "feasible",
    "lp_feasible_Q",
    "lp_feasible_compact",
    "q_contains",
    "verify_solution",
]
