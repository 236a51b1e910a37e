"""Heat semigroup of the mean Laplacian and its contraction certificates.

P_t = exp(-t L) is computed spectrally: conjugating Pbar by the square
root of the stationary measure gives a symmetric matrix, so one real
eigendecomposition evaluates the semigroup at every time exactly (up to
roundoff) and keeps the semigroup law and self-adjointness tight.  The
row measures p_x_t of P_t are probability vectors; transporting them
against each other at small times recovers the curvature of each pair,
and at a global rate K the flow contracts both Lipschitz constants and
transport distances like exp(-K t).  A truncated series
exp(-t) sum_k t^k Pbar^k / k! stays available as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import transport
from .certificates import InequalityCertificate, certificate_from_samples
from .chain import MarkovData
from .digraph import DistanceMatrix, gradient_matrix, lipschitz_constant
from .errors import NegativeTimeError, NonSymmetricResidualError, NumericsError

# symmetry required of the conjugated kernel before eigendecomposition
SYMMETRY_TOL = 1e-10
# eigenvalues of L must land in [0, 2] within this slack
SPECTRUM_TOL = 1e-10
# kernel rows may dip this far below zero before renormalisation refuses
KERNEL_NEG_CLAMP = 1e-12
# default times for the contraction certificates
DEFAULT_TIME_GRID = (0.01, 0.1, 1.0, 5.0)
# default times for the small-time curvature limit
DEFAULT_LIMIT_GRID = (1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class HeatOperator:
    """Spectral form of exp(-t L) for one chain."""

    m: np.ndarray
    sqrt_m: np.ndarray
    Q: np.ndarray
    eigenvalues: np.ndarray  # of L, ascending

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @property
    def spectral_gap(self) -> float:
        return float(self.eigenvalues[1]) if self.n > 1 else 0.0

    def matrix(self, t: float) -> np.ndarray:
        """Dense P_t; rows are the heat-kernel measures before clamping."""
        if t < 0:
            raise NegativeTimeError(f"time must be non-negative, got {t}")
        decay = np.exp(-t * self.eigenvalues)
        core = (self.Q * decay[None, :]) @ self.Q.T
        return (core * self.sqrt_m[None, :]) / self.sqrt_m[:, None]

    def apply(self, t: float, f: np.ndarray) -> np.ndarray:
        """P_t f without forming the full matrix."""
        if t < 0:
            raise NegativeTimeError(f"time must be non-negative, got {t}")
        f = np.asarray(f, dtype=float)
        coeff = self.Q.T @ (self.sqrt_m * f)
        coeff *= np.exp(-t * self.eigenvalues)
        return (self.Q @ coeff) / self.sqrt_m


def heat_operator(M: MarkovData) -> HeatOperator:
    """Eigendecompose the measure-symmetrised mean kernel."""
    sqrt_m = np.sqrt(M.m)
    S = (sqrt_m[:, None] * M.Pmean) / sqrt_m[None, :]
    asym = float(np.abs(S - S.T).max())
    if asym > SYMMETRY_TOL:
        raise NonSymmetricResidualError(
            f"symmetrised kernel asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:.1e}"
        )
    S = 0.5 * (S + S.T)
    sigma, Q = np.linalg.eigh(S)
    eigenvalues = (1.0 - sigma)[::-1].copy()  # ascending in L
    Q = Q[:, ::-1].copy()
    if eigenvalues[0] < -SPECTRUM_TOL or eigenvalues[-1] > 2.0 + SPECTRUM_TOL:
        raise NumericsError(
            f"Laplacian spectrum [{eigenvalues[0]:.3e}, {eigenvalues[-1]:.3e}] leaves [0, 2]"
        )
    if M.n > 1 and eigenvalues[1] <= SPECTRUM_TOL:
        raise NumericsError("zero eigenvalue of L is not simple; chain not irreducible?")
    eigenvalues[0] = 0.0
    for a in (sqrt_m, Q, eigenvalues):
        a.flags.writeable = False
    return HeatOperator(m=M.m, sqrt_m=sqrt_m, Q=Q, eigenvalues=eigenvalues)


def heat_kernel_matrix(H: HeatOperator, t: float) -> np.ndarray:
    """All heat-kernel rows at time t, clamped and renormalised.

    Entries may round slightly negative; dips beyond KERNEL_NEG_CLAMP
    mean something upstream broke and raise instead of being hidden.
    """
    rows = H.matrix(t)
    worst = float(rows.min())
    if worst < -KERNEL_NEG_CLAMP:
        raise NumericsError(f"heat kernel entry {worst:.3e} below clamp threshold")
    rows = np.maximum(rows, 0.0)
    return rows / rows.sum(axis=1, keepdims=True)


def heat_kernel(H: HeatOperator, x: int, t: float) -> np.ndarray:
    """Probability measure p_x_t = row x of P_t."""
    return heat_kernel_matrix(H, t)[x]


def uniformization_matrix(M: MarkovData, t: float, tol: float = 1e-16) -> np.ndarray:
    """Independent route to P_t: exp(-t) sum_k t^k Pbar^k / k!.

    All terms are non-negative, so the truncation error is bounded by
    the neglected Poisson tail mass; the loop stops once that falls
    under tol.  Kept as a cross-check oracle for the spectral route.
    """
    if t < 0:
        raise NegativeTimeError(f"time must be non-negative, got {t}")
    n = M.n
    term = np.eye(n)
    coeff = np.exp(-t)
    total = coeff
    result = coeff * np.eye(n)
    k = 0
    while 1.0 - total > tol:
        k += 1
        term = term @ M.Pmean
        coeff *= t / k
        result += coeff * term
        new_total = total + coeff
        if new_total == total:
            # the tail no longer moves the accumulator: below one ulp
            break
        total = new_total
        if k > 1000 + int(10 * t):
            raise NumericsError("uniformization series failed to converge")
    return result


def verify_gradient_estimate(
    H: HeatOperator,
    dm: DistanceMatrix,
    K: float,
    fs: np.ndarray,
    ts: tuple[float, ...] = DEFAULT_TIME_GRID,
    tol: float = 1e-9,
) -> InequalityCertificate:
    """Check Lip(P_t f) <= exp(-K t) Lip(f) on every sample and time."""
    comparisons = []
    for t in ts:
        if t < 0:
            raise NegativeTimeError(f"time must be non-negative, got {t}")
        shrink = float(np.exp(-K * t))
        for i, f in enumerate(np.atleast_2d(fs)):
            lip_f = lipschitz_constant(f, dm)
            lip_heat = lipschitz_constant(H.apply(t, f), dm)
            comparisons.append(
                (lip_heat, shrink * lip_f, {"t": t, "f_index": i, "lip_f": lip_f})
            )
    return certificate_from_samples(
        "lipschitz_contraction", {"K": K, "times": list(ts)}, comparisons, tol
    )


def verify_transport_contraction(
    H: HeatOperator,
    dm: DistanceMatrix,
    K: float,
    ts: tuple[float, ...] = DEFAULT_TIME_GRID,
    tol: float = 1e-9,
) -> InequalityCertificate:
    """Check W(p_x_t, p_y_t) <= exp(-K t) d(x, y) over all ordered pairs."""
    n = H.n
    comparisons = []
    for t in ts:
        if t < 0:
            raise NegativeTimeError(f"time must be non-negative, got {t}")
        kernel = heat_kernel_matrix(H, t)
        shrink = float(np.exp(-K * t))
        for x in range(n):
            for y in range(n):
                if x == y:
                    continue
                plan = transport.wasserstein(kernel[x], kernel[y], dm, verify=False)
                comparisons.append(
                    (plan.value, shrink * float(dm.d[x, y]), {"t": t, "pair": (x, y)})
                )
    return certificate_from_samples(
        "transport_contraction", {"K": K, "times": list(ts)}, comparisons, tol
    )


def curvature_time_limit(
    H: HeatOperator,
    dm: DistanceMatrix,
    x: int,
    y: int,
    t_grid: tuple[float, ...] = DEFAULT_LIMIT_GRID,
) -> tuple[float, float]:
    """Small-time curvature (1/t)(1 - W(p_x_t, p_y_t) / d(x, y)).

    Returns the two-point Richardson extrapolation through the two
    smallest grid times together with the spread (max - min) of the
    finite-time estimates, which reports how settled the limit is.
    """
    ts = sorted(t_grid, reverse=True)
    if not ts or ts[-1] <= 0:
        raise NegativeTimeError("limit grid must contain positive times")
    dxy = float(dm.d[x, y])
    estimates = []
    for t in ts:
        kernel = heat_kernel_matrix(H, t)
        plan = transport.wasserstein(kernel[x], kernel[y], dm, verify=False)
        estimates.append((1.0 - plan.value / dxy) / t)
    if len(estimates) == 1:
        return estimates[0], 0.0
    t1, t2 = ts[-2], ts[-1]
    g1, g2 = estimates[-2], estimates[-1]
    extrapolated = (t1 * g2 - t2 * g1) / (t1 - t2)
    return float(extrapolated), float(max(estimates) - min(estimates))


def gradient_of_heat(H: HeatOperator, dm: DistanceMatrix, f: np.ndarray, t: float) -> np.ndarray:
    """All difference quotients of P_t f; convenience for witnesses."""
    return gradient_matrix(H.apply(t, f), dm)
