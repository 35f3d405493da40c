"""Brute-force polar geometry: plane sections, shadow counts, chord bounds.

For a unit program  max c^T x s.t. A x <= 1  the vertices of the feasible
set correspond to facets of the convex hull of the rows, so the number
of vertices the shadow path can visit in a plane W is controlled by the
number of facets of conv(rows) meeting W — the edges of the polygon
conv(rows) ∩ W.  This module computes those polygons by exhaustive
enumeration (all C(n, d) row subsets), counts shadow vertices by
enumerating feasible bases, and evaluates the deterministic edge-count
bound parametrized by the certified distribution constants.

Everything here assumes general position; ambiguous configurations
(points on another subset's facet plane, grazing contacts) raise
DegenerateConfiguration rather than guessing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._linalg import SingularBasis, null_direction, orthonormal_plane
from .lp import LPInstance, default_tol
from .noise import LAPLACE_GAUSSIAN, DistributionCertificate, certificate


class DegenerateConfiguration(Exception):
    """The point set violates general position for the requested section."""


class OutsideHull(Exception):
    """The query point admits no convex combination of the shape's points."""


class RankDeficientShape(Exception):
    """The shape's combination kernel is not one-dimensional."""


@dataclass(frozen=True)
class PlaneBasis:
    """Orthonormal basis (u, v) of a two-dimensional subspace."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if self.u.shape != self.v.shape or self.u.ndim != 1:
            raise ValueError("u and v must be vectors of equal dimension")
        gram = np.array(
            [
                [self.u @ self.u - 1.0, self.u @ self.v],
                [self.u @ self.v, self.v @ self.v - 1.0],
            ]
        )
        if float(np.abs(gram).max()) > 1e-9:
            raise ValueError("u, v must be orthonormal; use PlaneBasis.from_vectors")

    @classmethod
    def from_vectors(cls, a: Sequence[float], b: Sequence[float]) -> "PlaneBasis":
        u, v = orthonormal_plane(np.asarray(a, float), np.asarray(b, float))
        return cls(u=u, v=v)

    def project(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return np.column_stack([points @ self.u, points @ self.v])

    def embed(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        return np.outer(coords[..., 0], self.u) + np.outer(coords[..., 1], self.v)


@dataclass
class PolarEdge:
    """One facet's trace on the section plane, in plane coordinates."""

    subset: tuple[int, ...]
    endpoints: np.ndarray  # (2, 2)
    length: float


@dataclass
class PolarSection:
    """Convex polygon conv(points) ∩ W with per-edge provenance."""

    vertices: np.ndarray  # (k, 2), ordered by angle about the centroid
    edges: list[PolarEdge] = field(default_factory=list)
    perimeter: float = 0.0

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def _batched_facet_planes(points: np.ndarray, subsets: np.ndarray) -> np.ndarray:
    """Solve <theta_I, a_i> = 1 over each subset; NaN rows mark subsets whose
    affine hull passes through the origin (no such representation exists)."""
    m, d = subsets.shape
    mats = points[subsets]  # (m, d, d)
    rhs = np.ones((m, d, 1))
    try:
        return np.linalg.solve(mats, rhs)[..., 0]
    except np.linalg.LinAlgError:
        thetas = np.full((m, d), np.nan)
        ones = np.ones(d)
        for i in range(m):
            try:
                thetas[i] = np.linalg.solve(mats[i], ones)
            except np.linalg.LinAlgError:
                pass
        return thetas


def polar_section(
    points: np.ndarray, plane: PlaneBasis, rtol: float = 1e-10
) -> PolarSection:
    """Exhaustive section of conv(points) by the plane through the origin.

    Every d-subset whose points see all remaining points strictly on one
    side of their common affine hyperplane is a hull facet; each facet is
    intersected with the plane and the resulting segments assemble into
    the section polygon.  Subsets whose hyperplane passes through the
    origin admit no <theta, y> = 1 representation and are skipped — under
    general position such a hyperplane never supports the hull.

    Raises DegenerateConfiguration when a point lies on another subset's
    hyperplane (ambiguous facet test) or the plane grazes a facet.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be an (n, d) array")
    n, d = points.shape
    if n < d or d < 2:
        raise ValueError("need at least d >= 2 points in dimension d")
    if plane.u.shape != (d,):
        raise ValueError("plane dimension does not match the points")

    subsets = np.array(list(itertools.combinations(range(n), d)), dtype=int)
    thetas = _batched_facet_planes(points, subsets)
    usable = np.all(np.isfinite(thetas), axis=1)

    values = points @ thetas.T  # (n, m)
    member = np.zeros((n, len(subsets)), dtype=bool)
    for col, sub in enumerate(subsets):
        member[sub, col] = True
    margins = rtol * np.maximum(
        1.0, np.abs(np.where(np.isfinite(values), values, 0.0)).max(axis=0)
    )

    outside = ~member
    pos = outside & (values > 1.0 + margins)
    neg = outside & (values < 1.0 - margins)
    border = outside & (np.abs(values - 1.0) <= margins)
    npos = pos.sum(axis=0)
    nneg = neg.sum(axis=0)
    nbord = border.sum(axis=0)
    others = n - d

    ambiguous = usable & (nbord > 0) & ((npos == 0) | (nneg == 0))
    if np.any(ambiguous):
        col = int(np.flatnonzero(ambiguous)[0])
        raise DegenerateConfiguration(
            f"a point lies on the facet plane of subset {tuple(subsets[col])}"
        )
    facet = usable & ((nneg == others) | (npos == others))

    edges: list[PolarEdge] = []
    graze_tol = 1e-10
    for col in np.flatnonzero(facet):
        theta = thetas[col]
        tu = float(theta @ plane.u)
        tv = float(theta @ plane.v)
        norm2 = tu * tu + tv * tv
        if norm2 <= (rtol * max(1.0, float(np.abs(theta).max()))) ** 2:
            continue  # facet plane parallel to the section plane
        p0 = np.array([tu, tv]) / norm2
        direction = np.array([-tv, tu]) / math.sqrt(norm2)
        y0 = plane.embed(p0[None, :])[0]
        ydir = plane.embed(direction[None, :])[0]

        sub = subsets[col]
        system = np.vstack([points[sub].T, np.ones(d)])
        lam0, *_ = np.linalg.lstsq(system, np.concatenate([y0, [1.0]]), rcond=None)
        dlam, *_ = np.linalg.lstsq(system, np.concatenate([ydir, [0.0]]), rcond=None)

        lo, hi = -math.inf, math.inf
        tiny = 1e-12 * max(1.0, float(np.abs(dlam).max()))
        empty = False
        for a0, da in zip(lam0, dlam):
            if da > tiny:
                lo = max(lo, -a0 / da)
            elif da < -tiny:
                hi = min(hi, -a0 / da)
            else:
                if a0 < -tiny:
                    empty = True
                    break
                if a0 <= tiny:
                    raise DegenerateConfiguration(
                        "section line runs inside a sub-face of a facet"
                    )
        if empty or hi < lo - graze_tol:
            continue
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise DegenerateConfiguration("unbounded facet trace; hull is degenerate")
        if hi - lo <= graze_tol:
            raise DegenerateConfiguration("section plane grazes a facet")
        ends = np.vstack([p0 + lo * direction, p0 + hi * direction])
        edges.append(
            PolarEdge(subset=tuple(int(i) for i in sub), endpoints=ends, length=hi - lo)
        )

    if not edges:
        return PolarSection(vertices=np.empty((0, 2)), edges=[], perimeter=0.0)

    allpts = np.vstack([e.endpoints for e in edges])
    scale2 = max(1.0, float(np.abs(allpts).max()))
    verts: list[np.ndarray] = []
    for p in allpts:
        if not any(np.linalg.norm(p - q) <= 1e-8 * scale2 for q in verts):
            verts.append(p)
    varr = np.array(verts)
    center = varr.mean(axis=0)
    order = np.argsort(np.arctan2(varr[:, 1] - center[1], varr[:, 0] - center[0]))
    perimeter = float(sum(e.length for e in edges))
    return PolarSection(vertices=varr[order], edges=edges, perimeter=perimeter)


def shadow_vertices(
    inst: LPInstance, plane: PlaneBasis, dedupe_rtol: float = 1e-7
) -> int:
    """Vertices of the feasible set's projection onto the plane.

    All feasible basis points are enumerated, coincident points merged
    (a deliberately degenerate start vertex shared by many bases counts
    once), projected, and reduced to their convex hull; collinear points
    are dropped, so the count is the number of proper polygon corners.
    """
    tol = default_tol(inst)
    pts: list[np.ndarray] = []
    A, b = inst.A, inst.b
    for sub in itertools.combinations(range(inst.n), inst.d):
        M = A[list(sub)]
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] <= 1e-12 * max(s[0], 1.0):
            continue
        x = np.linalg.solve(M, b[list(sub)])
        if np.all(A @ x <= b + tol):
            pts.append(x)
    if not pts:
        return 0
    uniq: list[np.ndarray] = []
    for x in pts:
        if not any(
            np.linalg.norm(x - y) <= dedupe_rtol * max(1.0, float(np.abs(y).max()))
            for y in uniq
        ):
            uniq.append(x)
    proj = plane.project(np.array(uniq))
    scale = max(1.0, float(np.abs(proj).max()))
    flat: list[np.ndarray] = []
    for p in proj:
        if not any(np.linalg.norm(p - q) <= dedupe_rtol * scale for q in flat):
            flat.append(p)
    return _hull_vertex_count(np.array(flat), 1e-10 * scale * scale)


def _hull_vertex_count(pts: np.ndarray, cross_tol: float) -> int:
    """Monotone-chain hull; interior-of-edge (collinear) points dropped."""
    if len(pts) <= 2:
        return len(pts)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def build(seq):
        chain: list[np.ndarray] = []
        for p in seq:
            while len(chain) >= 2 and cross(chain[-2], chain[-1], p) <= cross_tol:
                chain.pop()
            chain.append(p)
        return chain[:-1]

    lower = build(pts)
    upper = build(pts[::-1])
    count = len(lower) + len(upper)
    return count if count >= 3 else (2 if len(pts) >= 2 else len(pts))


@dataclass
class Shape:
    """d points in R^(d-2) with the first at the origin.

    The combination map sending simplex weights to weighted sums of the
    points has (generically) a one-dimensional kernel direction z; the
    chord through any query point's weight set runs along z, and its
    l1-length is the quantity bounded by chord_diameter.
    """

    points: np.ndarray  # (d, d-2)

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ValueError("points must be a (d, d-2) array")
        d, codim = self.points.shape
        if d < 3 or codim != d - 2:
            raise ValueError(f"need d >= 3 points in dimension d-2, got {self.points.shape}")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("points contain non-finite entries")
        if float(np.abs(self.points[0]).max(initial=0.0)) > 1e-12:
            raise ValueError("the first point must be the origin")

    @property
    def d(self) -> int:
        return self.points.shape[0]


def _combo_system(shape: Shape) -> np.ndarray:
    return np.vstack([shape.points.T, np.ones(shape.d)])


def kernel_combination(shape: Shape) -> np.ndarray:
    """Unit-l1 kernel of the combination map, first nonzero entry positive.

    z satisfies sum_i z_i s_i = 0 and sum_i z_i = 0 with ||z||_1 = 1.
    """
    try:
        z = null_direction(_combo_system(shape))
    except SingularBasis as exc:
        raise RankDeficientShape(str(exc)) from exc
    z = z / float(np.abs(z).sum())
    for entry in z:
        if abs(entry) > 1e-12:
            if entry < 0.0:
                z = -z
            break
    return z


def chord_diameter(shape: Shape, query: Sequence[float]) -> float:
    """l1-diameter of the weight sets representing query over the shape.

    The representations form the segment lam* + mu z clipped to the
    nonnegative orthant; the diameter is the mu-range (z has unit
    l1-norm).  Raises OutsideHull when no nonnegative representation
    exists.
    """
    q = np.asarray(query, dtype=float)
    if q.shape != (shape.d - 2,):
        raise ValueError("query must live in the shape's ambient space")
    z = kernel_combination(shape)
    system = _combo_system(shape)
    rhs = np.concatenate([q, [1.0]])
    lam0, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    if float(np.abs(system @ lam0 - rhs).max()) > 1e-9 * max(1.0, float(np.abs(rhs).max())):
        raise OutsideHull("query is outside the affine hull of the shape")

    lo, hi = -math.inf, math.inf
    tiny = 1e-14
    for a0, zi in zip(lam0, z):
        if zi > tiny:
            lo = max(lo, -a0 / zi)
        elif zi < -tiny:
            hi = min(hi, -a0 / zi)
        elif a0 < -1e-12:
            raise OutsideHull("query has no nonnegative representation")
    if hi < lo - 1e-12:
        raise OutsideHull("query has no nonnegative representation")
    return max(0.0, float(hi - lo))


def widest_point(shape: Shape) -> np.ndarray:
    """The query point whose chord attains the maximal l1-diameter of 2."""
    z = kernel_combination(shape)
    return np.abs(z) @ shape.points


def parametrized_edge_bound(
    d: int, L: float, tau: float, R: float, r_n: float
) -> float:
    """Deterministic ceiling on the expected section-polygon edge count.

    Monotone in each argument: increasing in d, L, R, r_n and decreasing
    in tau.  At (d, L, tau, R, r_n) = (1, 1, 1, 0, 0) it evaluates to
    2 + 8*pi*e^2 ≈ 187.7.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    if L <= 0.0 or tau <= 0.0:
        raise ValueError("L and tau must be positive")
    if R < 0.0 or r_n < 0.0:
        raise ValueError("R and r_n must be nonnegative")
    return 2.0 + 8.0 * math.pi * math.e**2 * d**1.5 * (L / tau) * (1.0 + R) * (
        1.0 + 4.0 * r_n
    )


def gaussian_shadow_bound(d: int, n: int, sigma: float) -> float:
    """Edge-count bound for Gaussian noise, via the capped-tail surrogate.

    The Gaussian density is not log-Lipschitz, so the bound routes
    through the exponential-tailed surrogate family that dominates it;
    the result is strictly decreasing in sigma.
    """
    cert: DistributionCertificate = certificate(LAPLACE_GAUSSIAN, d, n, sigma)
    return 1.0 + parametrized_edge_bound(d, cert.L, cert.tau, cert.R_nd, cert.r_n)
