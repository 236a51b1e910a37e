"""Random-walk kernels, the stationary measure, and the mean Laplacian.

The walk steps from x with probability proportional to outgoing arc
weight: P(x, y) = mu_xy / mu(x).  On a strongly connected graph P has a
unique stationary probability measure m (all entries positive).  The
time reversal Prev(x, y) = m(y) P(y, x) / m(x) is again a kernel, and
the mean kernel Pbar = (P + Prev) / 2 is reversible with respect to m.
Everything downstream works with the operator L = I - Pbar, which is
self-adjoint in the inner product (f, g) = sum f g m, and with the
symmetric edge weights m_xy = m(x) Pbar(x, y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .digraph import DirectedGraph
from .errors import EmptySubsetError, SingularSystemError, ZeroOutDegreeError

# residual tolerance for the stationary balance equations
BALANCE_TOL = 1e-12
# reversibility of the mean kernel: |m(x) Pbar(x,y) - m(y) Pbar(y,x)|
REVERSIBILITY_TOL = 1e-14
# self-adjointness and integration-by-parts residuals
ADJOINTNESS_TOL = 1e-10
# agreement of the two carre-du-champ formulas
GAMMA_CROSSCHECK_TOL = 1e-12


@dataclass(frozen=True)
class LaplacianOperator:
    """L f = f - Pbar f as a dense matrix, with Delta = -L."""

    matrix: np.ndarray

    @property
    def delta(self) -> np.ndarray:
        return -self.matrix

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(f, dtype=float)


@dataclass(frozen=True)
class MarkovData:
    """Kernel, stationary measure, reversal, mean kernel, edge weights."""

    P: np.ndarray
    m: np.ndarray
    Prev: np.ndarray
    Pmean: np.ndarray
    mxy: np.ndarray
    laplacian: LaplacianOperator

    @property
    def n(self) -> int:
        return self.m.shape[0]


def transition_kernel(g: DirectedGraph) -> np.ndarray:
    """Row-stochastic kernel of the outgoing-weight random walk."""
    out = g.mu.sum(axis=1)
    if np.any(out <= 0):
        x = int(np.nonzero(out <= 0)[0][0])
        raise ZeroOutDegreeError(f"vertex {x} has no outgoing arc")
    return g.mu / out[:, None]


def perron_measure(P: np.ndarray, tol: float = BALANCE_TOL) -> np.ndarray:
    """Unique stationary probability measure of an irreducible kernel.

    Solves (P^T - I) m = 0 directly with one row replaced by the
    normalisation sum(m) = 1.  A direct solve is used on purpose:
    periodic kernels (a directed cycle, say) make power iteration
    oscillate, while the linear system stays nonsingular whenever P is
    irreducible.
    """
    n = P.shape[0]
    if n == 1:
        return np.ones(1)
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        m = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"stationary system is singular: {exc}") from None
    residual = float(np.abs(m @ P - m).max())
    if residual > tol or m.min() <= 0:
        raise SingularSystemError(
            f"stationary solve failed: balance residual {residual:.3e}, min entry {m.min():.3e}"
        )
    return m


def mean_kernel(P: np.ndarray, m: np.ndarray) -> MarkovData:
    """Assemble the reversal, the mean kernel, and the mean Laplacian.

    The symmetric weights are built as m_xy = (m(x) P(x,y) + m(y) P(y,x)) / 2,
    which is exactly symmetric in floating point; Pbar is recovered from
    the average of P and Prev, so m(x) Pbar(x,y) agrees with m_xy to
    roundoff and reversibility holds to REVERSIBILITY_TOL.
    """
    P = np.asarray(P, dtype=float)
    m = np.asarray(m, dtype=float)
    Prev = (m[None, :] * P.T) / m[:, None]
    Pmean = 0.5 * (P + Prev)
    w = m[:, None] * P
    mxy = 0.5 * (w + w.T)
    L = np.eye(P.shape[0]) - Pmean
    for a in (P, Prev, Pmean, mxy, L, m):
        a.flags.writeable = False
    return MarkovData(P=P, m=m, Prev=Prev, Pmean=Pmean, mxy=mxy, laplacian=LaplacianOperator(L))


def markov_data(g: DirectedGraph) -> MarkovData:
    """transition_kernel + perron_measure + mean_kernel in one call."""
    P = transition_kernel(g)
    return mean_kernel(P, perron_measure(P))


def laplacian_apply(M: MarkovData, f: np.ndarray) -> np.ndarray:
    """L f (x) = f(x) - sum_y Pbar(x, y) f(y)."""
    return M.laplacian.apply(f)


def gamma(f0: np.ndarray, f1: np.ndarray, M: MarkovData) -> np.ndarray:
    """Carre du champ: Gamma(f0, f1)(x) = (1/2) sum_y df0 df1 Pbar(x, y)."""
    f0 = np.asarray(f0, dtype=float)
    f1 = np.asarray(f1, dtype=float)
    d0 = f0[None, :] - f0[:, None]
    d1 = f1[None, :] - f1[:, None]
    return 0.5 * (d0 * d1 * M.Pmean).sum(axis=1)


def gamma_via_delta(f0: np.ndarray, f1: np.ndarray, M: MarkovData) -> np.ndarray:
    """Same quantity through (1/2)(Delta(f0 f1) - f0 Delta f1 - f1 Delta f0).

    Kept as an independent route; tests pin the two formulas together.
    """
    f0 = np.asarray(f0, dtype=float)
    f1 = np.asarray(f1, dtype=float)
    delta = M.laplacian.delta
    return 0.5 * (delta @ (f0 * f1) - f0 * (delta @ f1) - f1 * (delta @ f0))


def inner(f0: np.ndarray, f1: np.ndarray, m: np.ndarray) -> float:
    """Stationary inner product (f0, f1) = sum f0 f1 m."""
    return float(np.sum(np.asarray(f0) * np.asarray(f1) * m))


def mean(f: np.ndarray, m: np.ndarray) -> float:
    """Stationary mean m(f) = sum f m."""
    return float(np.sum(np.asarray(f) * m))


@dataclass(frozen=True)
class ByPartsReport:
    """Residuals of the summation-by-parts identity on a vertex subset.

    On a subset S the identity reads

        sum_{x in S} L f0(x) f1(x) m(x)
            = (1/2) sum_{x,y in S} (f0(y)-f0(x)) (f1(y)-f1(x)) m_xy
              - sum_{x in S, y not in S} (f0(y)-f0(x)) f1(x) m_xy

    and with S = V the boundary term vanishes, giving
    (L f0, f1) = m(Gamma(f0, f1)) = (f0, L f1).
    """

    lhs: float
    interior: float
    boundary: float
    subset_residual: float
    adjoint_residual: float
    gamma_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.subset_residual, self.adjoint_residual, self.gamma_residual)


def check_integration_by_parts(
    M: MarkovData, omega: list[int] | np.ndarray, f0: np.ndarray, f1: np.ndarray
) -> ByPartsReport:
    """Evaluate both sides of the subset identity plus the global ones."""
    omega = np.asarray(sorted(set(int(x) for x in np.asarray(omega).ravel())), dtype=int)
    if omega.size == 0:
        raise EmptySubsetError("integration by parts needs a non-empty subset")
    f0 = np.asarray(f0, dtype=float)
    f1 = np.asarray(f1, dtype=float)
    n = M.n
    inside = np.zeros(n, dtype=bool)
    inside[omega] = True

    Lf0 = M.laplacian.apply(f0)
    lhs = float(np.sum(Lf0[omega] * f1[omega] * M.m[omega]))

    d0 = f0[None, :] - f0[:, None]
    d1 = f1[None, :] - f1[:, None]
    pair = inside[:, None] & inside[None, :]
    interior = 0.5 * float((d0 * d1 * M.mxy)[pair].sum())
    cross = inside[:, None] & ~inside[None, :]
    boundary = float((d0 * f1[:, None] * M.mxy)[cross].sum())

    subset_residual = abs(lhs - (interior - boundary))

    Lf1 = M.laplacian.apply(f1)
    left = inner(Lf0, f1, M.m)
    right = inner(f0, Lf1, M.m)
    middle = mean(gamma(f0, f1, M), M.m)
    adjoint_residual = abs(left - right)
    gamma_residual = max(abs(left - middle), abs(right - middle))

    return ByPartsReport(
        lhs=lhs,
        interior=interior,
        boundary=boundary,
        subset_residual=subset_residual,
        adjoint_residual=adjoint_residual,
        gamma_residual=gamma_residual,
    )
