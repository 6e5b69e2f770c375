"""Root finding on s -> log r(.) for the sandwich and uncorrected matrices."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .assembly import (
    Correction,
    OperatorSpec,
    SparseRowMatrix,
    WeightFamily,
    assemble,
    assemble_higher_order,
    assemble_sandwich,
    mesh_region_for,
)
from .errors import CertificateFailure, NoBracket
from .maps import Alphabet
from .mesh import MeshDomain, build_mesh_domain
from .spectral import Direction, SpectralResult, dominant_eigen_general, power_method, verify_certificate
from .tails import delta_upper, eta_lower

CERT_DIGITS = 15
MAX_NUDGES = 5
COARSE_N = 8


@dataclass(frozen=True)
class SolveConfig:
    alphabet: Alphabet
    n: int = 50
    R: float = 100.0
    tol_eig: float = 1e-10
    tol_root: float = 1e-5
    max_secant: int = 60
    s_init: tuple[float, float] | None = None
    threads: int = 1

    def __post_init__(self):
        if not self.tol_root > 0:
            raise ValueError("tol_root must be positive")
        if self.s_init is not None and min(self.s_init) <= self.s_floor:
            raise ValueError(f"initial abscissae must exceed {self.s_floor}")

    @property
    def radius(self) -> float:
        return self.R if self.alphabet.infinite else math.inf

    @property
    def s_floor(self) -> float:
        # tail bounds are only available for s > 1
        return 1.0 if self.alphabet.infinite else max(self.alphabet.tau, 0.0)

    def mesh(self, n: int | None = None) -> MeshDomain:
        return build_mesh_domain(self.n if n is None else n, mesh_region_for(self.alphabet))


def alphas(alphabet: Alphabet, s: float, R: float) -> tuple[float, float]:
    """(eta, delta): rank-one tail terms for the lower and upper matrices."""
    if not alphabet.infinite:
        return 0.0, 0.0
    return eta_lower(alphabet.name, s, R), delta_upper(alphabet.name, s, R)


@dataclass
class DimensionBracket:
    s_lower: float
    s_upper: float
    r_at_lower: float
    r_at_upper: float
    certificate_lower: np.ndarray
    certificate_upper: np.ndarray
    alpha_lower: float
    alpha_upper: float
    dof: int
    evaluations: int = 0
    runtime_s: float = 0.0

    @property
    def width(self) -> float:
        return self.s_upper - self.s_lower


def quantize(v: np.ndarray, digits: int = CERT_DIGITS) -> np.ndarray:
    """Round to ``digits`` significant digits, as written to JSON."""
    return np.array([float(f"{x:.{digits - 1}e}") for x in v])


def _matrix(config: SolveConfig, mesh: MeshDomain, s: float, which: Correction) -> tuple[SparseRowMatrix, float]:
    eta, delta = alphas(config.alphabet, s, config.radius)
    alpha = {Correction.LOWER: eta, Correction.UPPER: delta, Correction.NONE: delta}[which]
    spec = OperatorSpec(config.alphabet, s, mesh, config.radius, alpha, which)
    return assemble(spec, threads=config.threads), alpha


def radius_bounds(config: SolveConfig, s: float, mesh: MeshDomain | None = None) -> tuple[float, float]:
    """Spectral radii of A_s (alpha = eta) and B_s (alpha = delta)."""
    mesh = mesh or config.mesh()
    eta, delta = alphas(config.alphabet, s, config.radius)
    a, b = assemble_sandwich(mesh, config.alphabet, s, config.radius, eta, delta, threads=config.threads)
    return power_method(a, config.tol_eig).eigenvalue, power_method(b, config.tol_eig).eigenvalue


def radius_report(config: SolveConfig, s: float) -> dict:
    mesh = config.mesh()
    eta, delta = alphas(config.alphabet, s, config.radius)
    a, b = assemble_sandwich(mesh, config.alphabet, s, config.radius, eta, delta, threads=config.threads)
    ra = power_method(a, config.tol_eig)
    rb = power_method(b, config.tol_eig)
    return {
        "rA": ra.eigenvalue,
        "rB": rb.eigenvalue,
        "cw_A": [ra.cw_lower, ra.cw_upper],
        "cw_B": [rb.cw_lower, rb.cw_upper],
        "alpha_lower": eta,
        "alpha_upper": delta,
        "dof": mesh.n_points,
    }


@dataclass
class _Trial:
    s: float
    phi: float
    payload: object = None


@dataclass
class _Secant:
    """Secant iteration for a decreasing function, safeguarded by the best known bracket.

    Accepts the first point with phi in [lo, hi].
    """

    f: Callable[[float], _Trial]
    lo: float
    hi: float
    floor: float
    max_iter: int
    trials: list[_Trial] = field(default_factory=list)

    def run(self, s0: float, s1: float) -> _Trial:
        target = 0.5 * (self.lo + self.hi)
        pts = []
        for s in (s0, s1):
            t = self._eval(s)
            if self.lo <= t.phi <= self.hi:
                return t
            pts.append(t)
        for _ in range(self.max_iter):
            a, b = pts[-2], pts[-1]
            above = [t for t in self.trials if t.phi > self.hi]
            below = [t for t in self.trials if t.phi < self.lo]
            left = max((t.s for t in above), default=None)
            right = min((t.s for t in below), default=None)
            nxt = None
            if b.phi != a.phi and b.s != a.s:
                nxt = b.s - (b.phi - target) * (b.s - a.s) / (b.phi - a.phi)
            if left is not None and right is not None:
                if nxt is None or not (left < nxt < right):
                    nxt = 0.5 * (left + right)
            elif nxt is None or not math.isfinite(nxt):
                step = max(abs(b.s - a.s), 1e-3) * 2
                nxt = b.s + step if b.phi > self.hi else b.s - step
            elif left is not None and nxt <= left:
                nxt = left + 2 * (left - min(t.s for t in self.trials))
            elif right is not None and nxt >= right:
                nxt = right - 2 * (max(t.s for t in self.trials) - right)
            if nxt <= self.floor:
                nxt = 0.5 * (self.floor + min(t.s for t in self.trials))
            t = self._eval(nxt)
            if self.lo <= t.phi <= self.hi:
                return t
            pts.append(t)
        raise NoBracket(
            f"log radius not driven into [{self.lo:.3g}, {self.hi:.3g}] after {self.max_iter} steps; "
            f"last s={pts[-1].s!r}, phi={pts[-1].phi:.3g}"
        )

    def _eval(self, s: float) -> _Trial:
        t = self.f(s)
        self.trials.append(t)
        return t

    def slope(self, at: _Trial) -> float:
        others = [t for t in self.trials if t.s != at.s]
        if not others:
            return -1.0
        near = min(others, key=lambda t: abs(t.s - at.s))
        return (near.phi - at.phi) / (near.s - at.s)


def _initial_guess(config: SolveConfig) -> tuple[float, float]:
    if config.s_init is not None:
        return config.s_init
    # a coarse uncorrected solve locates the root to a few digits cheaply
    mesh = config.mesh(COARSE_N)

    def f(s):
        m, _ = _matrix(config, mesh, s, Correction.NONE)
        return _Trial(s, math.log(power_method(m, 1e-8).eigenvalue))

    start = (1.3, 1.8) if config.alphabet.infinite else (max(config.s_floor, 0.0) + 0.5, max(config.s_floor, 0.0) + 1.0)
    sec = _Secant(f, -1e-4, 1e-4, config.s_floor, config.max_secant)
    s = sec.run(*start).s
    return s, s + 1e-3


def bracket_dimension(config: SolveConfig, mesh: MeshDomain | None = None) -> DimensionBracket:
    """Certified [s_lower, s_upper]: B_{s_upper} w <= w and A_{s_lower} u >= u componentwise."""
    t0 = time.perf_counter()
    mesh = mesh or config.mesh()
    tol = config.tol_root

    def f_upper(s):
        m, alpha = _matrix(config, mesh, s, Correction.UPPER)
        res = power_method(m, config.tol_eig)
        return _Trial(s, math.log(res.cw_upper), (m, res, alpha))

    def f_lower(s):
        m, alpha = _matrix(config, mesh, s, Correction.LOWER)
        res = power_method(m, config.tol_eig)
        return _Trial(s, math.log(res.cw_lower), (m, res, alpha))

    s0, s1 = _initial_guess(config)
    sec_b = _Secant(f_upper, -tol, 0.0, config.s_floor, config.max_secant)
    up, cert_up = _certify(sec_b, sec_b.run(s0, s1), Direction.UPPER_DOMINATES, tol, +1)

    sec_a = _Secant(f_lower, 0.0, tol, config.s_floor, config.max_secant)
    guess = up.s - max(10 * tol / max(abs(sec_b.slope(up)), 1e-12), 1e-4)
    low, cert_low = _certify(sec_a, sec_a.run(up.s, guess), Direction.LOWER_DOMINATES, tol, -1)

    _, res_up, alpha_up = up.payload
    _, res_low, alpha_low = low.payload
    return DimensionBracket(
        s_lower=low.s,
        s_upper=up.s,
        r_at_lower=res_low.eigenvalue,
        r_at_upper=res_up.eigenvalue,
        certificate_lower=cert_low,
        certificate_upper=cert_up,
        alpha_lower=alpha_low,
        alpha_upper=alpha_up,
        dof=mesh.n_points,
        evaluations=len(sec_a.trials) + len(sec_b.trials),
        runtime_s=time.perf_counter() - t0,
    )


def _certify(sec: _Secant, trial: _Trial, direction: Direction, tol: float, sign: int):
    """Verify the quantized eigenvector; on failure step s further to the safe side."""
    for _ in range(MAX_NUDGES + 1):
        m, res, _ = trial.payload
        cert = quantize(res.vector)
        if verify_certificate(m, cert, direction, 0.0):
            return trial, cert
        step = tol / max(abs(sec.slope(trial)), 1e-12)
        trial = sec._eval(trial.s + sign * step)
    raise CertificateFailure(f"{direction.value} certificate still failing after {MAX_NUDGES} nudges")


def verify_stored(config: SolveConfig, record: dict) -> dict[str, bool]:
    """Re-assemble at the stored abscissae and check the stored certificates."""
    mesh = config.mesh()
    out = {}
    for key, corr, direction in (
        ("upper", Correction.UPPER, Direction.UPPER_DOMINATES),
        ("lower", Correction.LOWER, Direction.LOWER_DOMINATES),
    ):
        s = float(record[f"s_{key}"])
        vec = np.asarray(record[f"certificate_{key}"], dtype=float)
        m, _ = _matrix(config, mesh, s, corr)
        out[key] = verify_certificate(m, vec, direction, 0.0)
    return out


def solve_uncorrected(
    config: SolveConfig,
    degree: int = 1,
    weights: WeightFamily = WeightFamily.MOBIUS,
    tol: float = 1e-12,
    mesh: MeshDomain | None = None,
) -> float:
    """Root of log r(M_s) for the uncorrected degree-``degree`` collocation matrix (alpha = 0)."""
    mesh = mesh or config.mesh()

    def make(msh, eig_tol):
        def f(s):
            m = assemble_higher_order(msh, config.alphabet, s, degree if msh is mesh else 1, weights, config.radius, config.threads)
            lam, _ = dominant_eigen_general(m, eig_tol)
            return _Trial(s, math.log(lam))

        return f

    if config.s_init is not None:
        s0, s1 = config.s_init
    else:
        start = (1.3, 1.8) if config.alphabet.infinite else (1.0, 1.5)
        coarse = _Secant(make(config.mesh(COARSE_N), 1e-10), -1e-6, 1e-6, config.s_floor, config.max_secant)
        s0 = coarse.run(*start).s
        s1 = s0 + 1e-4
    sec = _Secant(make(mesh, 1e-14), -tol, tol, config.s_floor, config.max_secant)
    try:
        return sec.run(s0, s1).s
    except NoBracket:
        # the eigenvalue noise floor can exceed tol; accept the best converged iterate
        best = min(sec.trials, key=lambda t: abs(t.phi))
        if abs(best.phi) <= 1e3 * tol:
            return best.s
        raise
