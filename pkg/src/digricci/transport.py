"""Wasserstein distance for the directed hop metric.

W(nu0, nu1) is the least total cost of moving nu0 onto nu1 where moving
unit mass from x to y costs d(x, y).  Because d is non-symmetric, so is
W.  The dual formulation maximises sum f (nu1 - nu0) over functions
with f(w) - f(z) <= d(z, w) for every ordered pair; solving both sides
and comparing them certifies each distance computed in verify mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lp
from .digraph import DistanceMatrix
from .errors import LpFailureError, MarginalMismatchError, NumericsError

# probability vectors must carry this close to unit mass
MASS_TOL = 1e-12


@dataclass(frozen=True)
class TransportPlan:
    """Optimal coupling with its certificate.

    dual_f and duality_gap are filled in verify mode; fast mode solves
    the primal only and leaves them None.
    """

    value: float
    pi: np.ndarray
    marginal_residual: float
    dual_f: np.ndarray | None = None
    duality_gap: float | None = None


def _check_probability(nu: np.ndarray, n: int, name: str) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (n,):
        raise MarginalMismatchError(f"{name} must have length {n}")
    if nu.min(initial=0.0) < 0:
        raise MarginalMismatchError(f"{name} has a negative entry")
    if abs(nu.sum() - 1.0) > MASS_TOL:
        raise MarginalMismatchError(f"{name} has mass {nu.sum():.17g}, expected 1")
    return nu


def kantorovich_dual(
    nu0: np.ndarray, nu1: np.ndarray, dm: DistanceMatrix
) -> tuple[float, np.ndarray]:
    """Best Lipschitz potential: max sum f (nu1 - nu0), f(w)-f(z) <= d(z,w).

    The potential is pinned at f(0) = 0; the objective is invariant
    under adding constants because the two measures carry equal mass.
    All n(n-1) ordered-pair constraints are kept, never only the arcs:
    the hop metric makes many of them redundant but the program stays
    tiny at this scale and the full set is immune to bookkeeping slips.
    """
    d = dm.d
    n = d.shape[0]
    nu0 = _check_probability(nu0, n, "nu0")
    nu1 = _check_probability(nu1, n, "nu1")
    if n == 1:
        return 0.0, np.zeros(1)
    weight = nu1 - nu0
    rows = []
    rhs = []
    for z in range(n):
        for w in range(n):
            if z == w:
                continue
            row = np.zeros(n - 1)
            if w > 0:
                row[w - 1] += 1.0
            if z > 0:
                row[z - 1] -= 1.0
            rows.append(row)
            rhs.append(float(d[z, w]))
    problem = lp.LinearProgram(
        c=weight[1:],
        A=np.asarray(rows),
        b=np.asarray(rhs),
        senses=("<=",) * len(rows),
        bounds=((None, None),) * (n - 1),
        maximize=True,
    )
    solution = lp.solve_lp(problem)
    if solution.status != "optimal":
        raise LpFailureError(f"dual potential solve ended with status {solution.status!r}")
    f = np.concatenate([[0.0], solution.x])
    return float(solution.value), f


def wasserstein(
    nu0: np.ndarray,
    nu1: np.ndarray,
    dm: DistanceMatrix,
    verify: bool = True,
) -> TransportPlan:
    """Directed transport distance between two probability vectors.

    verify=True also solves the dual program and records the gap,
    raising if primal and dual disagree beyond lp.GAP_TOL; fast mode
    skips the second solve for the inner loops that call this often.
    """
    n = dm.d.shape[0]
    nu0 = _check_probability(nu0, n, "nu0")
    nu1 = _check_probability(nu1, n, "nu1")
    solution = lp.solve_transport(dm.d.astype(float), nu0, nu1)
    dual_f = None
    gap = None
    if verify:
        dual_value, dual_f = kantorovich_dual(nu0, nu1, dm)
        gap = abs(solution.value - dual_value)
        if gap > lp.GAP_TOL:
            raise NumericsError(
                f"transport duality gap {gap:.3e} exceeds {lp.GAP_TOL:.1e}"
            )
    return TransportPlan(
        value=solution.value,
        pi=solution.pi,
        marginal_residual=solution.marginal_residual,
        dual_f=dual_f,
        duality_gap=gap,
    )
