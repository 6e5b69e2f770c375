"""Bounds on the part of the transfer operator discarded by truncating to |b| <= R.

Both bounds are relative to v(0): the tail at any z in the domain is
squeezed between eta * v(0) and delta * v(0).
"""

from __future__ import annotations

import math

SQRT2 = math.sqrt(2.0)
SQRT5 = math.sqrt(5.0)

_INFINITE = ("I1", "I2")


def _check(kind: str, s: float, R: float) -> str:
    kind = getattr(kind, "value", kind)
    if kind not in _INFINITE:
        raise ValueError(f"tail bounds are only available for I1 and I2, not {kind!r}")
    if not s > 1:
        raise ValueError(f"tail bounds need s > 1, got {s}")
    if not R > 2:
        raise ValueError(f"tail bounds need R > 2, got {R}")
    return kind


def upper_prefactor(s: float, R: float) -> float:
    return math.exp(s / math.sqrt(R * R - R)) * (R / (R - 1)) ** s


def lower_prefactor(s: float, R: float) -> float:
    return math.exp(-SQRT5 * s / math.sqrt(R * R - R)) * (R / (R + SQRT5 + 5 / (4 * R))) ** s


def theta_r(R: float) -> float:
    return math.asin(1.0 / (R + SQRT2))


def tail_integral_upper(kind: str, s: float, R: float) -> float:
    """Upper bound for the sum of |b|^(-2s) over the digits with |b| > R."""
    kind = _check(kind, s, R)
    annulus = (R - SQRT2) ** (2 - 2 * s) / (s - 1)
    if kind == "I1":
        return (R - 1) ** (1 - 2 * s) / (2 * s - 1) + (math.pi / 2) * annulus
    return (math.pi / 4) * annulus


def tail_integral_lower(kind: str, s: float, R: float) -> float:
    """Lower bound for the sum of |b|^(-2s) over the digits with |b| > R."""
    kind = _check(kind, s, R)
    angle = math.pi if kind == "I1" else math.pi / 2
    return (angle - 2 * theta_r(R)) / (2 * s - 2) * (R + SQRT2) ** (2 - 2 * s)


def delta_upper(kind: str, s: float, R: float) -> float:
    return upper_prefactor(s, R) * tail_integral_upper(kind, s, R)


def eta_lower(kind: str, s: float, R: float) -> float:
    return lower_prefactor(s, R) * tail_integral_lower(kind, s, R)


def tail_sum_bound(
    tail_upper: float, s: float, R: float, tail_lower: float | None = None
) -> tuple[float, float]:
    """(delta, eta) from caller-certified bounds on the digit tail sum.

    A zero tail (finite alphabet) gives (0, 0).
    """
    if tail_lower is None:
        tail_lower = tail_upper
    if tail_upper < 0 or tail_lower < 0:
        raise ValueError("tail sums must be nonnegative")
    if tail_lower > tail_upper:
        raise ValueError("tail_lower exceeds tail_upper")
    if tail_upper == 0:
        return 0.0, 0.0
    if not (s > 1 and R > 2):
        raise ValueError("need s > 1 and R > 2")
    return upper_prefactor(s, R) * tail_upper, lower_prefactor(s, R) * tail_lower
