"""Uniform square meshes covering the disk |z - 1/2| <= 1/2 or its upper half.

All geometry is kept in integer lattice units (multiples of h = 1/N, or of
h/degree for Lagrange node sets); float coordinates are derived on demand.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import OutOfDomain

# tolerance, in units of h, for images that round to just outside the cover
LOCATE_SLACK = 1e-9


class Region(enum.Enum):
    HALF_DISK = "half-disk"
    FULL_DISK = "full-disk"


@dataclass(frozen=True)
class StencilWeights:
    corners: tuple[int, int, int, int]
    weights: tuple[float, float, float, float]
    bracket: float


@dataclass(frozen=True, eq=False)
class NodeLayout:
    """Global node set of the continuous tensor Lagrange space of a given degree.

    ``nodes`` holds integer coordinates in units of h/degree, sorted in
    dictionary order (x first, then y).
    """

    degree: int
    nodes: np.ndarray
    index_grid: np.ndarray
    b_min: int

    @property
    def size(self) -> int:
        return len(self.nodes)

    def node_index(self, a, b):
        """Ordinal of the node at lattice coordinates (a, b), or -1."""
        a = np.asarray(a)
        b = np.asarray(b) - self.b_min
        ok = (a >= 0) & (a < self.index_grid.shape[0]) & (b >= 0) & (b < self.index_grid.shape[1])
        out = np.full(np.broadcast(a, b).shape, -1, dtype=np.int64)
        out[ok] = self.index_grid[a[ok] if a.ndim else a, b[ok] if b.ndim else b]
        return out


@dataclass(frozen=True, eq=False)
class MeshDomain:
    n: int
    region: Region
    squares: np.ndarray  # (m, 2) int array of (j, k), dictionary ordered
    k_min: int
    _present: np.ndarray = field(repr=False)  # padded boolean grid over (j, k)
    _layouts: dict = field(default_factory=dict, repr=False)

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @cached_property
    def layout(self) -> NodeLayout:
        return self.nodes(1)

    @property
    def points(self) -> np.ndarray:
        """Float coordinates of the mesh points, shape (n_points, 2)."""
        return self.layout.nodes / self.n

    @property
    def n_points(self) -> int:
        return self.layout.size

    @property
    def origin_index(self) -> int:
        return int(self.layout.node_index(0, 0))

    def index_of(self, point) -> int:
        """Ordinal of a mesh point given by float coordinates."""
        a, b = (int(round(c * self.n)) for c in point)
        if abs(a * self.h - point[0]) > 1e-12 or abs(b * self.h - point[1]) > 1e-12:
            raise KeyError(point)
        idx = int(self.layout.node_index(a, b))
        if idx < 0:
            raise KeyError(point)
        return idx

    def has_square(self, j, k):
        j = np.asarray(j)
        k = np.asarray(k)
        jj = j + 1
        kk = k - self.k_min + 1
        ok = (jj >= 0) & (jj < self._present.shape[0]) & (kk >= 0) & (kk < self._present.shape[1])
        out = np.zeros(np.broadcast(jj, kk).shape, dtype=bool)
        out[ok] = self._present[jj[ok] if jj.ndim else jj, kk[ok] if kk.ndim else kk]
        return out

    def nodes(self, degree: int) -> NodeLayout:
        """Node layout of the degree-``degree`` continuous tensor Lagrange space."""
        if degree not in self._layouts:
            self._layouts[degree] = _build_layout(self, degree)
        return self._layouts[degree]

    def locate(self, x, y):
        """Vectorized square location.

        Returns ``(j, k, xi, eta)`` where (xi, eta) are local coordinates in
        [0, 1]. Raises OutOfDomain if some point is in no square.
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        u = x * self.n
        v = y * self.n
        jf = np.floor(u).astype(np.int64)
        kf = np.floor(v).astype(np.int64)
        j = jf.copy()
        k = kf.copy()
        found = self.has_square(jf, kf)
        on_x = u == jf
        on_y = v == kf
        for dj, dk, cond in ((-1, 0, on_x), (0, -1, on_y), (-1, -1, on_x & on_y)):
            todo = ~found & cond
            if todo.any():
                hit = todo & self.has_square(jf + dj, kf + dk)
                j[hit] = jf[hit] + dj
                k[hit] = kf[hit] + dk
                found |= hit
        if not found.all():
            _locate_with_slack(self, u, v, jf, kf, j, k, found)
        xi = np.clip(u - j, 0.0, 1.0)
        eta = np.clip(v - k, 0.0, 1.0)
        return j, k, xi, eta


def _locate_with_slack(mesh, u, v, jf, kf, j, k, found):
    # Images mathematically on the circle can round a hair outside the cover
    # where the cover touches the circle at a lattice point.
    todo = np.flatnonzero(~found)
    best = np.full(todo.size, np.inf)
    bj = np.zeros(todo.size, dtype=np.int64)
    bk = np.zeros(todo.size, dtype=np.int64)
    for dj in (0, -1, 1):
        for dk in (0, -1, 1):
            cj = jf[todo] + dj
            ck = kf[todo] + dk
            ok = mesh.has_square(cj, ck)
            du = np.maximum(np.maximum(cj - u[todo], u[todo] - cj - 1), 0.0)
            dv = np.maximum(np.maximum(ck - v[todo], v[todo] - ck - 1), 0.0)
            dist = np.where(ok, np.hypot(du, dv), np.inf)
            better = dist < best
            best[better] = dist[better]
            bj[better] = cj[better]
            bk[better] = ck[better]
    bad = best > LOCATE_SLACK
    if bad.any():
        i = todo[np.flatnonzero(bad)[0]]
        raise OutOfDomain(
            f"point ({u[i] / mesh.n!r}, {v[i] / mesh.n!r}) is not covered by the N={mesh.n} mesh"
        )
    j[todo] = bj
    k[todo] = bk
    found[todo] = True


def build_mesh_domain(n: int, region: Region = Region.HALF_DISK) -> MeshDomain:
    """Union of the h-squares (h = 1/n) that meet the interior of ``region``.

    A closed square meets the open disk iff its closest point to the center
    (n/2, 0) is at distance < n/2; for the half disk it must also reach y > 0.
    Everything is integer arithmetic in units of h.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2 or n % 2:
        raise ValueError(f"N must be an even integer >= 2, got {n!r}")
    n = int(n)
    c = n // 2
    k_min = 0 if region is Region.HALF_DISK else -c
    js = np.arange(n)
    ks = np.arange(k_min, c)
    J, K = np.meshgrid(js, ks, indexing="ij")
    dx = np.clip(c, J, J + 1) - c
    dy = np.clip(0, K, K + 1)
    inside = dx * dx + dy * dy < c * c
    squares = np.stack([J[inside], K[inside]], axis=1)

    present = np.zeros((n + 2, c - k_min + 2), dtype=bool)
    present[squares[:, 0] + 1, squares[:, 1] - k_min + 1] = True
    return MeshDomain(n=n, region=region, squares=squares, k_min=k_min, _present=present)


def _build_layout(mesh: MeshDomain, degree: int) -> NodeLayout:
    if degree < 1:
        raise ValueError("degree must be >= 1")
    d = degree
    p = np.arange(d + 1)
    P, Q = np.meshgrid(p, p, indexing="ij")
    a = (mesh.squares[:, 0, None] * d + P.ravel()[None, :]).ravel()
    b = (mesh.squares[:, 1, None] * d + Q.ravel()[None, :]).ravel()
    b_min = mesh.k_min * d
    width = (mesh.n // 2 - mesh.k_min) * d + 1
    mark = np.zeros((mesh.n * d + 1, width), dtype=bool)
    mark[a, b - b_min] = True
    # np.nonzero on a C-ordered grid yields dictionary order directly
    na, nb = np.nonzero(mark)
    grid = np.full(mark.shape, -1, dtype=np.int64)
    grid[na, nb] = np.arange(na.size)
    nodes = np.stack([na, nb + b_min], axis=1)
    return NodeLayout(degree=d, nodes=nodes, index_grid=grid, b_min=b_min)


def locate_square(mesh: MeshDomain, p) -> tuple[int, int]:
    j, k, _, _ = mesh.locate([p[0]], [p[1]])
    return int(j[0]), int(k[0])


def bilinear_weights(mesh: MeshDomain, p) -> StencilWeights:
    """Bilinear stencil at ``p``: corner ordinals in dictionary order, hat weights,
    and the interpolation-error bracket (x1-x)(x-x0) + (y1-y)(y-y0)."""
    j, k, xi, eta = mesh.locate([p[0]], [p[1]])
    j, k, xi, eta = int(j[0]), int(k[0]), float(xi[0]), float(eta[0])
    lay = mesh.layout
    corners = tuple(int(lay.node_index(j + dj, k + dk)) for dj in (0, 1) for dk in (0, 1))
    weights = (
        (1.0 - xi) * (1.0 - eta),
        (1.0 - xi) * eta,
        xi * (1.0 - eta),
        xi * eta,
    )
    h = mesh.h
    bracket = h * h * ((1.0 - xi) * xi + (1.0 - eta) * eta)
    return StencilWeights(corners=corners, weights=weights, bracket=bracket)
