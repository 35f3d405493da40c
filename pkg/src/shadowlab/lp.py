"""LP instances, basis predicates, and a brute-force reference solver.

All problems have the inequality form

    maximize c^T x   subject to   A x <= b,

with n rows in d variables and n >= d >= 2.  A *basis* is a set of d row
indices whose constraints are tight at a vertex.  Everything here is
desk-scale and exact-ish: the reference solver enumerates all `C(n, d)`
bases and all `C(n, d-1)` candidate extreme rays, so it is meant for
cross-checking pivot methods on small instances, not for production
solving.

Unboundedness follows the convention that the program is unbounded
exactly when the homogeneous system {A r <= 0, c^T r > 0} is solvable;
under this convention a program can be both unbounded and infeasible,
and it is then reported as unbounded.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from ._linalg import SingularBasis, solve_refined

#: Relative comparison tolerance; all geometric predicates use
#: ``DEFAULT_RTOL * instance_scale(inst)`` unless given an explicit tol.
DEFAULT_RTOL = 1e-9

Basis = tuple[int, ...]


class DegenerateInstance(Exception):
    """The instance violates a general-position assumption (ties, >d tight rows)."""


@dataclass
class LPInstance:
    """Inequality-form LP data: maximize c^T x subject to A x <= b."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.A = np.asarray(self.A, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.c = np.asarray(self.c, dtype=float)
        if self.A.ndim != 2:
            raise ValueError("A must be a 2-d array")
        n, d = self.A.shape
        if d < 2 or n < d:
            raise ValueError(f"need n >= d >= 2, got n={n}, d={d}")
        if self.b.shape != (n,):
            raise ValueError("b must have one entry per row of A")
        if self.c.shape != (d,):
            raise ValueError("c must have one entry per column of A")
        for name, arr in (("A", self.A), ("b", self.b), ("c", self.c)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
        if not np.any(self.c):
            raise ValueError("c must be a nonzero vector")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "A": self.A.tolist(),
            "b": self.b.tolist(),
            "c": self.c.tolist(),
            "meta": self.meta,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), allow_nan=False)

    @classmethod
    def from_json_dict(cls, obj: dict) -> "LPInstance":
        inst = cls(A=obj["A"], b=obj["b"], c=obj["c"], meta=dict(obj.get("meta", {})))
        if "d" in obj and int(obj["d"]) != inst.d:
            raise ValueError("declared d does not match the shape of A")
        if "n" in obj and int(obj["n"]) != inst.n:
            raise ValueError("declared n does not match the shape of A")
        return inst

    @classmethod
    def loads(cls, text: str) -> "LPInstance":
        def _reject(token: str) -> float:
            raise ValueError(f"non-finite literal {token!r} in instance JSON")

        return cls.from_json_dict(json.loads(text, parse_constant=_reject))


@dataclass
class SolveResult:
    """Outcome of a solve: status plus whichever certificate applies."""

    status: str  # "optimal" | "unbounded" | "infeasible"
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    basis: Optional[Basis] = None
    ray: Optional[np.ndarray] = None


def instance_scale(inst: LPInstance) -> float:
    """Magnitude reference for tolerance scaling: max of 1 and all input entries."""
    return max(
        1.0,
        float(np.abs(inst.A).max()),
        float(np.abs(inst.b).max()),
        float(np.abs(inst.c).max()),
    )


def default_tol(inst: LPInstance) -> float:
    return DEFAULT_RTOL * instance_scale(inst)


def normalize_basis(basis: Iterable[int], inst: LPInstance) -> Basis:
    """Canonical sorted tuple form of a basis, validated against the instance."""
    out = tuple(sorted(int(i) for i in basis))
    if len(out) != inst.d or len(set(out)) != inst.d:
        raise ValueError(f"basis must contain d={inst.d} distinct row indices")
    if out[0] < 0 or out[-1] >= inst.n:
        raise ValueError("basis indices out of range")
    return out


def basis_matrix(inst: LPInstance, basis: Basis) -> np.ndarray:
    return inst.A[list(basis)]


def basis_point(inst: LPInstance, basis: Iterable[int]) -> np.ndarray:
    """The point where the basis rows are tight: solution of A_B x = b_B.

    Raises SingularBasis when the basis rows are not linearly independent.
    """
    basis = normalize_basis(basis, inst)
    return solve_refined(basis_matrix(inst, basis), inst.b[list(basis)])


def dual_coefficients(inst: LPInstance, basis: Basis, obj: np.ndarray) -> np.ndarray:
    """Coordinates of obj in the basis rows: y with A_B^T y = obj.

    The basis is optimal for obj exactly when these are all nonnegative
    (and the basis point is feasible); the coordinate order follows the
    sorted basis tuple.
    """
    basis = normalize_basis(basis, inst)
    return solve_refined(basis_matrix(inst, basis).T, np.asarray(obj, dtype=float))


def is_feasible_basis(inst: LPInstance, basis: Iterable[int], tol: Optional[float] = None) -> bool:
    """True when the basis point satisfies every row up to tolerance."""
    tol = default_tol(inst) if tol is None else tol
    try:
        x = basis_point(inst, basis)
    except SingularBasis:
        return False
    return bool(np.all(inst.A @ x <= inst.b + tol))


def is_optimal_basis(
    inst: LPInstance,
    basis: Iterable[int],
    obj: Optional[np.ndarray] = None,
    tol: Optional[float] = None,
    strict: bool = False,
) -> bool:
    """True when the basis is feasible and dual-feasible for obj (default c).

    With strict=True the dual coordinates must clear +tol instead of
    -tol, i.e. obj must lie in the interior of the basis cone; pivot
    runs use this form to validate their start.
    """
    tol = default_tol(inst) if tol is None else tol
    obj = inst.c if obj is None else np.asarray(obj, dtype=float)
    basis = normalize_basis(basis, inst)
    if not is_feasible_basis(inst, basis, tol):
        return False
    try:
        y = dual_coefficients(inst, basis, obj)
    except SingularBasis:
        return False
    bound = tol * max(1.0, float(np.linalg.norm(obj)))
    if strict:
        return bool(np.all(y > bound))
    return bool(np.all(y >= -bound))


def tight_rows(inst: LPInstance, x: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Indices of rows satisfied with equality at x, up to tolerance."""
    tol = default_tol(inst) if tol is None else tol
    return np.flatnonzero(np.abs(inst.A @ x - inst.b) <= tol)


def _extreme_ray_candidates(inst: LPInstance, tol: float):
    """Unit directions spanning nullspaces of (d-1)-row subsystems.

    For a non-degenerate A these are exactly the candidate extreme rays
    of the recession cone {A r <= 0}; each is emitted with both signs and
    filtered by the cone test at the call site.
    """
    n, d = inst.n, inst.d
    for subset in itertools.combinations(range(n), d - 1):
        M = inst.A[list(subset)]
        _, s, vh = np.linalg.svd(M)
        if s.size and s[-1] <= 1e-12 * max(s[0], 1.0):
            continue  # rank-deficient subset: not a 1-d nullspace
        r = vh[-1]
        for sign in (1.0, -1.0):
            cand = sign * r
            if np.all(inst.A @ cand <= tol):
                yield cand


def _infeasibility_certificate(
    inst: LPInstance, tol: float
) -> Optional[tuple[tuple[int, ...], np.ndarray]]:
    """Small-support Farkas certificate of emptiness, if one exists.

    {A x <= b} is empty iff some y >= 0 has yT A = 0 and yT b < 0, and a
    vertex of that dual polyhedron is supported on at most d + 1 rows, so
    scanning supports of size <= d + 1 decides emptiness for
    general-position data.  Each candidate is the nullspace direction of
    the support's transposed rows (taken only when that nullspace is
    one-dimensional), sign-fixed and then verified numerically, so an
    accepted certificate is sound regardless of how it was found.
    """
    A, b = inst.A, inst.b
    scale = instance_scale(inst)
    for i in range(inst.n):
        # support-1 certificates: a (numerically) zero row with negative rhs
        if float(np.abs(A[i]).max()) <= tol and b[i] < -tol:
            return (i,), np.ones(1)
    for k in range(2, min(inst.d + 1, inst.n) + 1):
        for subset in itertools.combinations(range(inst.n), k):
            rows = A[list(subset)]
            _, s, vh = np.linalg.svd(rows.T)
            cut = 1e-12 * max(float(s[0]), 1.0)
            if k - int(np.sum(s > cut)) != 1:
                continue  # no/ambiguous relation on this support
            y = vh[-1]
            if y[int(np.argmax(np.abs(y)))] < 0.0:
                y = -y
            if float(y.min()) < -1e-9:
                continue  # mixed signs: not a nonnegative combination
            y = np.clip(y, 0.0, None)
            weight = float(y.sum())
            if weight <= 0.0:
                continue
            if float(np.abs(rows.T @ y).max()) > 10.0 * tol * weight:
                continue
            if float(y @ b[list(subset)]) < -10.0 * tol * scale * weight:
                return tuple(subset), y
    return None


def oracle_solve(inst: LPInstance, tol: Optional[float] = None) -> SolveResult:
    """Reference solve by exhaustive enumeration.

    Order of business: scan candidate extreme rays and report unbounded
    on any improving recession direction (even when the feasible region
    is empty, matching the homogeneous-system convention); otherwise
    scan all bases for the best feasible vertex; with no feasible vertex
    at all, certify emptiness by a small-support Farkas combination.

    Raises DegenerateInstance when two feasible bases tie in value at
    distinct points or some feasible basis point is tight at more than d
    rows.
    """
    tol = default_tol(inst) if tol is None else tol
    c = inst.c
    c_norm = max(1.0, float(np.linalg.norm(c)))

    for ray in _extreme_ray_candidates(inst, tol):
        if c @ ray > tol * c_norm:
            return SolveResult(status="unbounded", ray=ray)

    best: Optional[tuple[float, Basis, np.ndarray]] = None
    feasible: list[tuple[float, Basis, np.ndarray]] = []
    for subset in itertools.combinations(range(inst.n), inst.d):
        try:
            x = basis_point(inst, subset)
        except SingularBasis:
            continue
        if not np.all(inst.A @ x <= inst.b + tol):
            continue
        if tight_rows(inst, x, tol).size > inst.d:
            raise DegenerateInstance(f"basis point of {subset} is tight at more than d rows")
        value = float(c @ x)
        feasible.append((value, tuple(subset), x))
        if best is None or value > best[0]:
            best = (value, tuple(subset), x)

    if best is not None:
        value_tol = tol * max(1.0, abs(best[0]))
        point_tol = 100.0 * tol * max(1.0, float(np.abs(best[2]).max()))
        for value, subset, x in feasible:
            if abs(value - best[0]) <= value_tol and np.abs(x - best[2]).max() > point_tol:
                raise DegenerateInstance(
                    f"bases {subset} and {best[1]} tie in objective at distinct points"
                )
        return SolveResult(status="optimal", x=best[2], value=best[0], basis=best[1])

    if _infeasibility_certificate(inst, tol) is not None:
        return SolveResult(status="infeasible")
    raise DegenerateInstance(
        "no feasible vertex and no infeasibility certificate: the region is "
        "(numerically) nonempty but vertex-free"
    )


def max_bases(inst: LPInstance) -> int:
    """Number of bases C(n, d): the hard ceiling on simplex path lengths."""
    return math.comb(inst.n, inst.d)
