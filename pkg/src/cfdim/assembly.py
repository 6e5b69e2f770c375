"""Collocation matrices for the truncated transfer operator.

Row i corresponds to a node z_i; each digit b contributes its weight at z_i
times the interpolation basis values at theta_b(z_i), optionally scaled by
(1 - err1) or (1 + err2), and alpha is added at the origin column.

Rows are processed in fixed-size chunks so the result does not depend on
the number of worker threads.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .derivatives import err_factors
from .errors import CorrectionTooLarge
from .maps import Alphabet, Symmetry, enumerate_truncated, fold_imag
from .mesh import MeshDomain, Region

# budget of (row, digit) pairs processed at once
CHUNK_PAIRS = 400_000


class Correction(enum.Enum):
    LOWER = "lower"
    UPPER = "upper"
    NONE = "none"


class WeightFamily(enum.Enum):
    MOBIUS = "mobius"  # g_b(z) = |z+b|^-2
    SPECIAL = "special"  # g_b(z) = (1/6)|(z+b+1)/(z+b)|^2 |1/(z+1)|^2


@dataclass(frozen=True)
class OperatorSpec:
    alphabet: Alphabet
    s: float
    mesh: MeshDomain
    R: float = math.inf
    alpha: float = 0.0
    correction: Correction = Correction.NONE
    weights: WeightFamily = WeightFamily.MOBIUS

    def __post_init__(self):
        if not self.s > self.alphabet.tau:
            raise ValueError(f"s={self.s} must exceed tau={self.alphabet.tau}")
        if not self.alpha >= 0:
            raise ValueError("alpha must be nonnegative")
        check_region(self.alphabet, self.mesh)


def check_region(alphabet: Alphabet, mesh: MeshDomain) -> None:
    if alphabet.symmetry is Symmetry.NONE and mesh.region is not Region.FULL_DISK:
        raise ValueError("an alphabet without symmetry needs a full-disk mesh")


def mesh_region_for(alphabet: Alphabet) -> Region:
    return Region.FULL_DISK if alphabet.symmetry is Symmetry.NONE else Region.HALF_DISK


class SparseRowMatrix:
    """Row-indexed sparse matrix backed by scipy CSR (duplicates merged)."""

    def __init__(self, csr: sp.csr_matrix):
        csr = sp.csr_matrix(csr)
        csr.sort_indices()
        self.csr = csr

    @property
    def n(self) -> int:
        return self.csr.shape[0]

    @property
    def nnz(self) -> int:
        return self.csr.nnz

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"vector of length {v.shape} does not match dimension {self.n}")
        return self.csr @ v

    __matmul__ = apply

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        a, b = self.csr.indptr[i], self.csr.indptr[i + 1]
        return self.csr.indices[a:b], self.csr.data[a:b]

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.csr.sum(axis=1)).ravel()

    def min_value(self) -> float:
        return float(self.csr.data.min()) if self.nnz else 0.0

    def toarray(self) -> np.ndarray:
        return self.csr.toarray()

    def identical(self, other: SparseRowMatrix) -> bool:
        a, b = self.csr, other.csr
        return (
            a.shape == b.shape
            and np.array_equal(a.indptr, b.indptr)
            and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data)
        )

    def dump(self, path: str | Path) -> None:
        """Write ``row col value`` triplets; values use repr so they round-trip exactly."""
        coo = self.csr.tocoo()
        with open(path, "w") as fh:
            fh.write(f"# n={self.n}\n")
            for r, c, v in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
                fh.write(f"{r} {c} {v!r}\n")

    @classmethod
    def load(cls, path: str | Path) -> SparseRowMatrix:
        n = None
        rows, cols, vals = [], [], []
        with open(path) as fh:
            for line in fh:
                if line.startswith("#"):
                    if line.startswith("# n="):
                        n = int(line[4:])
                    continue
                r, c, v = line.split()
                rows.append(int(r))
                cols.append(int(c))
                vals.append(float(v))
        if n is None:
            raise ValueError(f"{path}: missing dimension header")
        return cls(sp.csr_matrix((vals, (rows, cols)), shape=(n, n)))

    @classmethod
    def from_dense(cls, a) -> SparseRowMatrix:
        return cls(sp.csr_matrix(np.asarray(a, dtype=float)))


def apply(matrix: SparseRowMatrix, vector) -> np.ndarray:
    return matrix.apply(vector)


def lagrange_basis(t: np.ndarray, degree: int) -> np.ndarray:
    """Values of the degree-``degree`` Lagrange basis on uniform nodes p/degree; shape (len(t), degree+1)."""
    nodes = np.arange(degree + 1) / degree
    out = np.ones((t.size, degree + 1))
    for p in range(degree + 1):
        for r in range(degree + 1):
            if r != p:
                out[:, p] *= (t - nodes[r]) / (nodes[p] - nodes[r])
    return out


def _digit_weights(z: np.ndarray, b: np.ndarray, s: float, family: WeightFamily) -> np.ndarray:
    w = z[:, None] + b[None, :]
    mod2 = w.real * w.real + w.imag * w.imag
    if family is WeightFamily.MOBIUS:
        return mod2 ** (-s)
    w1 = w + 1.0
    z1 = z + 1.0
    g = (w1.real * w1.real + w1.imag * w1.imag) / mod2 / (z1.real * z1.real + z1.imag * z1.imag)[:, None] / 6.0
    return g**s


@dataclass(frozen=True)
class _Job:
    mesh: MeshDomain
    degree: int
    z: np.ndarray  # complex node coordinates (all rows)
    digits: np.ndarray
    s: float
    family: WeightFamily
    corrections: tuple[Correction, ...]
    fold: Symmetry | None
    err1_coeff: float
    err2_coeff: float


def _chunk(job: _Job, lo: int, hi: int):
    mesh = job.mesh
    d = job.degree
    z = job.z[lo:hi]
    nr, nb = z.size, job.digits.size
    g = _digit_weights(z, job.digits, job.s, job.family).ravel()
    img = (1.0 / (z[:, None] + job.digits[None, :])).ravel()
    y = img.imag if job.fold is None else fold_imag(img.imag, job.fold)
    j, k, xi, eta = mesh.locate(img.real, y)

    lx = lagrange_basis(xi, d)
    ly = lagrange_basis(eta, d)
    basis = (lx[:, :, None] * ly[:, None, :]).reshape(nr * nb, -1)
    lay = mesh.nodes(d)
    p = np.repeat(np.arange(d + 1), d + 1)
    q = np.tile(np.arange(d + 1), d + 1)
    # located squares belong to the mesh, so every stencil node exists
    cols = lay.index_grid[j[:, None] * d + p[None, :], k[:, None] * d + q[None, :] - lay.b_min].ravel()
    rows = np.repeat(np.arange(nr), nb * (d + 1) ** 2)

    bracket = mesh.h * mesh.h * ((1.0 - xi) * xi + (1.0 - eta) * eta)
    values = []
    for corr in job.corrections:
        if corr is Correction.LOWER:
            err1 = bracket * job.err1_coeff
            if (err1 >= 1).any():
                raise CorrectionTooLarge(f"lower correction {err1.max():.6g} >= 1; refine the mesh")
            scale = g * (1.0 - err1)
        elif corr is Correction.UPPER:
            scale = g * (1.0 + bracket * job.err2_coeff)
        else:
            scale = g
        values.append((scale[:, None] * basis).ravel())
    return _merge(rows, cols, values, nr, lay.size)


def _merge(rows, cols, values, nr, ncols):
    """Sum duplicate (row, col) entries in input order and drop exact zeros."""
    out = []
    if nr * ncols <= 16 * rows.size:
        keys = rows * ncols + cols
        for vals in values:
            dense = np.bincount(keys, weights=vals, minlength=nr * ncols).reshape(nr, ncols)
            out.append(sp.csr_matrix(dense))
        return out
    for vals in values:
        keep = vals != 0
        m = sp.csr_matrix((vals[keep], (rows[keep], cols[keep])), shape=(nr, ncols))
        m.sum_duplicates()
        m.eliminate_zeros()
        out.append(m)
    return out


def _assemble_many(
    mesh: MeshDomain,
    alphabet: Alphabet,
    s: float,
    R: float,
    degree: int,
    family: WeightFamily,
    corrections: tuple[Correction, ...],
    alphas: tuple[float, ...],
    threads: int = 1,
) -> list[SparseRowMatrix]:
    check_region(alphabet, mesh)
    if degree != 1 and any(c is not Correction.NONE for c in corrections):
        raise ValueError("error corrections are only defined for the bilinear scheme")
    digits = enumerate_truncated(alphabet, R)
    if digits.size == 0:
        raise ValueError(f"no digits with |b| <= {R}")
    lay = mesh.nodes(degree)
    z = (lay.nodes[:, 0] + 1j * lay.nodes[:, 1]) / (mesh.n * degree)
    fold = alphabet.symmetry if mesh.region is Region.HALF_DISK else None
    factors = err_factors(s, alphabet.gamma, mesh.h)
    job = _Job(mesh, degree, z, digits, s, family, corrections, fold, factors.err1_coeff, factors.err2_coeff)

    step = max(1, CHUNK_PAIRS // (digits.size * (degree + 1) ** 2))
    bounds = [(lo, min(lo + step, z.size)) for lo in range(0, z.size, step)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _chunk(job, *b), bounds))
    else:
        parts = [_chunk(job, *b) for b in bounds]

    origin = int(lay.node_index(0, 0))
    result = []
    for idx, alpha in enumerate(alphas):
        m = sp.vstack([p[idx] for p in parts], format="csr")
        if alpha:
            rank_one = sp.csr_matrix(
                (np.full(lay.size, float(alpha)), (np.arange(lay.size), np.full(lay.size, origin))),
                shape=m.shape,
            )
            m = m + rank_one
        result.append(SparseRowMatrix(m))
    return result


def assemble(spec: OperatorSpec, threads: int = 1) -> SparseRowMatrix:
    """Bilinear collocation matrix: A_s (LOWER), B_s (UPPER) or M_s (NONE)."""
    (m,) = _assemble_many(
        spec.mesh,
        spec.alphabet,
        spec.s,
        spec.R,
        1,
        spec.weights,
        (spec.correction,),
        (spec.alpha,),
        threads,
    )
    return m


def assemble_sandwich(
    mesh: MeshDomain,
    alphabet: Alphabet,
    s: float,
    R: float = math.inf,
    alpha_lower: float = 0.0,
    alpha_upper: float = 0.0,
    weights: WeightFamily = WeightFamily.MOBIUS,
    threads: int = 1,
    with_uncorrected: bool = False,
) -> list[SparseRowMatrix]:
    """A_s and B_s (and optionally M_s with alpha=0) from one pass over the images."""
    corr = (Correction.LOWER, Correction.UPPER) + ((Correction.NONE,) if with_uncorrected else ())
    alphas = (alpha_lower, alpha_upper) + ((0.0,) if with_uncorrected else ())
    return _assemble_many(mesh, alphabet, s, R, 1, weights, corr, alphas, threads)


def assemble_higher_order(
    mesh: MeshDomain,
    alphabet: Alphabet,
    s: float,
    degree: int,
    weights: WeightFamily = WeightFamily.MOBIUS,
    R: float = math.inf,
    threads: int = 1,
) -> SparseRowMatrix:
    """Uncorrected collocation over the continuous tensor Lagrange nodes of ``degree``."""
    if degree not in (1, 2, 3, 4):
        raise ValueError("degree must be in 1..4")
    (m,) = _assemble_many(mesh, alphabet, s, R, degree, weights, (Correction.NONE,), (0.0,), threads)
    return m
