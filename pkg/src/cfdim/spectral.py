"""Dominant eigenpairs of the collocation matrices."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, OscillationDetected


@dataclass
class SpectralResult:
    eigenvalue: float
    vector: np.ndarray
    cw_lower: float
    cw_upper: float
    iterations: int
    residual: float
    history: list[tuple[float, float]] = field(default_factory=list, repr=False)

    @property
    def lam(self) -> float:
        return self.eigenvalue


def _as_operator(matrix):
    if hasattr(matrix, "apply"):
        return matrix.apply, matrix.n
    a = np.asarray(matrix, dtype=float)
    return (lambda v: a @ v), a.shape[0]


def collatz_wielandt(mv: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    pos = v > 0
    ratios = mv[pos] / v[pos]
    return float(ratios.min()), float(ratios.max())


def power_method(matrix, tol: float = 1e-10, max_iter: int = 100_000, record: bool = False) -> SpectralResult:
    """Power iteration for a nonnegative matrix, stopped on the Collatz-Wielandt width.

    Every iterate gives min_i (Mv)_i/v_i <= r(M) <= max_i (Mv)_i/v_i.
    """
    op, n = _as_operator(matrix)
    v = np.ones(n)
    history = []
    for it in range(1, int(max_iter) + 1):
        mv = op(v)
        lo, hi = collatz_wielandt(mv, v)
        if record:
            history.append((lo, hi))
        if hi - lo <= tol * lo:
            lam = 0.5 * (lo + hi)
            return SpectralResult(lam, v, lo, hi, it, float(np.abs(mv - lam * v).max()), history)
        top = mv.max()
        if not top > 0:
            raise NoConvergence("iterate collapsed to zero; the matrix is not primitive")
        v = mv / top
    raise NoConvergence(f"Collatz-Wielandt width {hi - lo:.3g} after {max_iter} iterations")


def _start_vector(n: int) -> np.ndarray:
    # positive and non-constant, so symmetric sign patterns cannot hide in it
    return 1.0 + 0.1 * ((np.arange(n) * 7919) % 13) / 13.0


def dominant_eigen_general(matrix, tol: float = 1e-13, max_iter: int = 100_000) -> tuple[float, np.ndarray]:
    """Power iteration for a possibly signed matrix with a simple real dominant eigenvalue.

    Converged when ||Mv - lam v||_inf <= tol |lam| ||v||_inf and the Rayleigh
    quotient lam has settled to the same relative tolerance.
    """
    op, n = _as_operator(matrix)
    v = _start_vector(n)
    v /= np.abs(v).max()
    lam_prev = None
    for it in range(1, int(max_iter) + 1):
        mv = op(v)
        lam = float(v @ mv / (v @ v))
        res = float(np.abs(mv - lam * v).max())
        if lam != 0 and res <= tol * abs(lam) and lam_prev is not None and abs(lam - lam_prev) <= tol * abs(lam):
            if lam < 0:
                raise NoConvergence(f"dominant eigenvalue {lam} is negative")
            return lam, v
        top = np.abs(mv).max()
        if not top > 0:
            raise NoConvergence("iterate collapsed to zero")
        w = mv / top
        if it % 20 == 0 and res > 1e-3 * abs(lam if lam else top):
            # the two-step map settling while the one-step map does not points to a +-lambda pair
            m2w = op(op(w))
            lam2 = float(w @ m2w / (w @ w))
            if lam2 > 0 and np.abs(m2w - lam2 * w).max() <= 1e-8 * lam2:
                raise OscillationDetected("iterates alternate; dominant eigenvalues come in a +-pair")
        lam_prev = lam
        v = w
    raise NoConvergence(f"no convergence after {max_iter} iterations (residual {res:.3g})")


class Direction(enum.Enum):
    UPPER_DOMINATES = "upper"  # Mv <= v, certifies r(M) <= 1
    LOWER_DOMINATES = "lower"  # Mv >= v, certifies r(M) >= 1


def verify_certificate(matrix, vector, direction: Direction, slack: float = 0.0) -> bool:
    """Componentwise check of Mv <= (1+slack) v or Mv >= (1-slack) v."""
    op, n = _as_operator(matrix)
    v = np.asarray(vector, dtype=float)
    if v.shape != (n,) or not (v > 0).all():
        return False
    mv = op(v)
    if direction is Direction.UPPER_DOMINATES:
        return bool((mv <= (1.0 + slack) * v).all())
    return bool((mv >= (1.0 - slack) * v).all())
