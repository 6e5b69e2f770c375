"""Derivative polynomials of G(u, v; s) = (u^2 + v^2)^(-s), eigenfunction
derivative-ratio constants, and the interpolation correction factors."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CorrectionTooLarge


def p_polynomial(j: int, u, v, s: float):
    """P_j with d^j/du^j G(u, v; s) = P_j(u, v; s) * G(u, v; s + j)."""
    t = 2.0 * s
    if j == 1:
        return -t * u
    if j == 2:
        return t * (t + 1) * u * u - t * v * v
    if j == 3:
        return -t * (t + 1) * (t + 2) * u**3 + t * (t + 2) * 3 * u * v * v
    if j == 4:
        u2 = u * u
        v2 = v * v
        return t * (t + 2) * ((t + 1) * (t + 3) * u2 * u2 - 6 * (t + 3) * u2 * v2 + 3 * v2 * v2)
    raise ValueError(f"derivative order must be in 1..4, got {j}")


# Alias kept for callers using the pj_ name.
pj_polynomial = p_polynomial


def q_polynomial(j: int, u, v, s: float):
    """Q_j for derivatives in v; G is symmetric in (u, v) so Q_j(u, v) = P_j(v, u)."""
    return p_polynomial(j, v, u, s)


def rising(x: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= x + i
    return out


@dataclass(frozen=True)
class BoundConstants:
    """Two-sided bounds on D^j v / v for the positive eigenfunction v."""

    s: float
    gamma: float
    dxx_lower: float
    dxx_upper: float
    dyy_lower: float
    dyy_upper: float
    lip_xy: float
    lip_x: float
    lip_y: float

    def generic(self, j: int) -> float:
        return generic_bound(j, self.s, self.gamma)


def bound_constants(s: float, gamma: float) -> BoundConstants:
    if not s > 0:
        raise ValueError("s must be positive")
    if not gamma >= 1:
        raise ValueError("gamma must be >= 1")
    g2 = gamma * gamma
    return BoundConstants(
        s=s,
        gamma=gamma,
        dxx_lower=-s / (4 * g2 * (s + 1)),
        dxx_upper=2 * s * (2 * s + 1) / g2,
        dyy_lower=-2 * s / g2,
        dyy_upper=2 * s * (2 * s + 1) / (4 * g2),
        lip_xy=math.sqrt(5) * s / gamma,
        lip_x=2 * s / gamma,
        lip_y=s / gamma,
    )


def generic_bound(j: int, s: float, gamma: float) -> float:
    """|D^j v| / v <= (2s)(2s+1)...(2s+j-1) / gamma^j in either coordinate."""
    return rising(2 * s, j) / gamma**j


def ratio_bounds(direction: str, j: int, s: float, gamma: float) -> tuple[float, float]:
    """Interval containing P_j(u,v)/(u^2+v^2)^j ('x') or Q_j(u,v)/(u^2+v^2)^j ('y')
    for all u >= gamma and real v."""
    g = gamma
    t = 2 * s
    if direction == "x":
        table = {
            1: (-t / g, 0.0),
            2: (-s / (4 * g**2 * (s + 1)), t * (t + 1) / g**2),
            3: (-t * (t + 1) * (t + 2) / g**3, t * (t + 2) / (g**3 * (s + 2) ** 2)),
            4: (-t * (t + 2) * (3 * s + 3) / g**4, rising(t, 4) / g**4),
        }
    elif direction == "y":
        c3 = t * (t + 2) / g**3 * max(25 * math.sqrt(5) / 72, (t + 1) / 8)
        table = {
            1: (-s / g, s / g),
            2: (-t / g**2, t * (t + 1) / (4 * g**2)),
            3: (-c3, c3),
            4: (-t * (t + 2) * (3 * s + 3) / g**4, rising(t, 4) / g**4),
        }
    else:
        raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")
    if j not in table:
        raise ValueError(f"derivative order must be in 1..4, got {j}")
    return table[j]


@dataclass(frozen=True)
class ErrFactors:
    err1_coeff: float
    err2_coeff: float


def err_factors(s: float, gamma: float, h: float) -> ErrFactors:
    """Coefficients multiplying the pointwise bilinear bracket."""
    if not (s > 0 and gamma >= 1 and h > 0):
        raise ValueError("need s > 0, gamma >= 1, h > 0")
    growth = math.exp(math.sqrt(10) * s * h / gamma)
    g2 = gamma * gamma
    return ErrFactors(
        err1_coeff=s * (2 * s + 1) / g2 * growth,
        err2_coeff=s / g2 * (9 + 8 * s) / (8 + 8 * s) * growth,
    )


def err_values(factors: ErrFactors, bracket: float) -> tuple[float, float]:
    err1 = bracket * factors.err1_coeff
    err2 = bracket * factors.err2_coeff
    if err1 >= 1:
        raise CorrectionTooLarge(f"lower correction {err1:.6g} >= 1; refine the mesh")
    return err1, err2
