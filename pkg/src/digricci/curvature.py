"""Coarse Ricci curvature of ordered vertex pairs, two independent ways.

kappa(x, y) compares how fast lazy random-walk clouds started at x and
at y approach each other relative to d(x, y).  The smoothing route
computes kappa_eps(x, y) = 1 - W(nu_x_eps, nu_y_eps) / d(x, y) with
nu_x_eps = (1 - eps) delta_x + eps Pbar(x, .) and divides by eps; the
exact route solves a single linear program

    kappa(x, y) = inf { grad_xy (L f) : Lip f <= 1, grad_xy f = 1 }

whose feasible set contains f = d(x, .), so the program always has an
optimum.  The two must agree in the small-eps limit, which the tests
and the verification pipeline exercise against each other.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import lp, transport
from .chain import MarkovData
from .digraph import DistanceMatrix
from .errors import EpsOutOfRangeError, LpFailureError, SameVertexError

# default smoothing grid: small enough to sit in the linear regime,
# two points so the spread reports whether that actually happened
DEFAULT_EPS_GRID = (1e-3, 5e-4)


@dataclass(frozen=True)
class CurvatureReport:
    """All ordered-pair curvatures with the global lower bound K.

    kappa has NaN on the diagonal.  witnesses maps (x, y) to an optimal
    potential of the exact program, normalised to f(x) = 0.  When the
    smoothing cross-check ran, cross_check holds |lp - limit| per pair.
    """

    kappa: np.ndarray
    K: float
    witnesses: dict[tuple[int, int], np.ndarray]
    method: str = "lp"
    cross_check: np.ndarray | None = None


def smoothed_measure(x: int, eps: float, M: MarkovData) -> np.ndarray:
    """(1 - eps) delta_x + eps Pbar(x, .); a probability vector for eps in [0, 1]."""
    if not 0.0 <= eps <= 1.0:
        raise EpsOutOfRangeError(f"eps must lie in [0, 1], got {eps}")
    nu = eps * M.Pmean[x].copy()
    nu[x] += 1.0 - eps
    return nu


def kappa_eps(x: int, y: int, eps: float, M: MarkovData, dm: DistanceMatrix) -> float:
    """Smoothed curvature 1 - W(nu_x_eps, nu_y_eps) / d(x, y)."""
    if x == y:
        raise SameVertexError("curvature needs two distinct vertices")
    nu_x = smoothed_measure(x, eps, M)
    nu_y = smoothed_measure(y, eps, M)
    plan = transport.wasserstein(nu_x, nu_y, dm, verify=False)
    return 1.0 - plan.value / float(dm.d[x, y])


def kappa_lp(
    x: int, y: int, M: MarkovData, dm: DistanceMatrix
) -> tuple[float, np.ndarray]:
    """Exact curvature by the limit-free program, with an optimal witness.

    Variables are f(z) for z != x with f(x) pinned to 0.  Constraints:
    all n(n-1) ordered-pair Lipschitz rows f(w) - f(z) <= d(z, w), plus
    the normalisation f(y) = d(x, y) that fixes the unit gradient along
    (x, y).  The objective is grad_xy (L f) as a linear form in f.
    """
    if x == y:
        raise SameVertexError("curvature needs two distinct vertices")
    d = dm.d
    n = d.shape[0]
    dxy = float(d[x, y])
    L = M.laplacian.matrix
    var_of = [z for z in range(n) if z != x]
    col_of = {z: k for k, z in enumerate(var_of)}

    objective = (L[y] - L[x]) / dxy
    c = np.array([objective[z] for z in var_of])

    rows = []
    rhs = []
    for z in range(n):
        for w in range(n):
            if z == w:
                continue
            row = np.zeros(n - 1)
            if w != x:
                row[col_of[w]] += 1.0
            if z != x:
                row[col_of[z]] -= 1.0
            rows.append(row)
            rhs.append(float(d[z, w]))
    eq = np.zeros(n - 1)
    eq[col_of[y]] = 1.0
    rows.append(eq)
    rhs.append(dxy)

    problem = lp.LinearProgram(
        c=c,
        A=np.asarray(rows),
        b=np.asarray(rhs),
        senses=("<=",) * (len(rows) - 1) + ("=",),
        bounds=((None, None),) * (n - 1),
    )
    solution = lp.solve_lp(problem)
    if solution.status != "optimal":
        raise LpFailureError(f"curvature program ended with status {solution.status!r}")
    witness = np.zeros(n)
    for z, k in col_of.items():
        witness[z] = solution.x[k]
    return float(solution.value), witness


def kappa_limit(
    x: int,
    y: int,
    M: MarkovData,
    dm: DistanceMatrix,
    eps_grid: tuple[float, ...] = DEFAULT_EPS_GRID,
) -> tuple[float, float]:
    """kappa_eps / eps at the smallest eps, plus the spread over the grid.

    Near zero the smoothed curvature is linear in eps, so the quotients
    stabilise; the spread (max - min over the grid) reports how far into
    that regime the grid reached.
    """
    if not eps_grid:
        raise EpsOutOfRangeError("eps grid must be non-empty")
    quotients = [kappa_eps(x, y, e, M, dm) / e for e in sorted(eps_grid, reverse=True)]
    return quotients[-1], float(max(quotients) - min(quotients))


def curvature_matrix(
    M: MarkovData,
    dm: DistanceMatrix,
    jobs: int = 1,
    cross_check: bool = False,
    eps_grid: tuple[float, ...] = DEFAULT_EPS_GRID,
) -> CurvatureReport:
    """kappa over all ordered pairs; K is the minimum entry."""
    n = M.n
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y]

    def solve_pair(pair: tuple[int, int]):
        x, y = pair
        value, witness = kappa_lp(x, y, M, dm)
        residual = None
        if cross_check:
            limit, _spread = kappa_limit(x, y, M, dm, eps_grid)
            residual = abs(value - limit)
        return value, witness, residual

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(solve_pair, pairs))
    else:
        results = [solve_pair(p) for p in pairs]

    kappa = np.full((n, n), np.nan)
    witnesses: dict[tuple[int, int], np.ndarray] = {}
    residuals = np.full((n, n), np.nan) if cross_check else None
    for (x, y), (value, witness, residual) in zip(pairs, results):
        kappa[x, y] = value
        witnesses[(x, y)] = witness
        if cross_check:
            residuals[x, y] = residual
    K = float(min(kappa[x, y] for x, y in pairs))
    return CurvatureReport(
        kappa=kappa, K=K, witnesses=witnesses, method="lp", cross_check=residuals
    )
