"""Parametric shadow-path pivoting.

Follows maximizers of the interpolated objective

    obj(lam) = (1 - lam) * d_obj + lam * c,      lam: 0 -> 1,

starting from a basis optimal for d_obj.  Each dual coordinate of
obj(lam) in the current basis is affine in lam, so the largest lam at
which the basis stays optimal is the smallest root among the decreasing
coordinates; the coordinate hitting zero leaves the basis, and a ratio
test along the corresponding edge picks the entering row.  Termination:
lam reaches 1 (optimal) or the ratio test finds no blocking row
(unbounded, with a certified improving ray).

Degeneracy (tied roots, tied ratio tests, zero-length steps) raises
DegeneratePivot; callers resample or restart.  The basis system is
refactored from scratch every pivot: robustness over speed at desk
scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._linalg import SingularBasis, null_direction, solve_refined
from .lp import (
    Basis,
    LPInstance,
    basis_matrix,
    basis_point,
    default_tol,
    dual_coefficients,
    is_feasible_basis,
    max_bases,
    normalize_basis,
)

#: Absolute tie tolerance on lam roots and relative tie tolerance on ratio tests.
TIE_TOL = 1e-9

dual_coeffs = dual_coefficients


class NotOptimalStart(Exception):
    """The starting basis is not strictly optimal for the starting objective."""


class DegeneratePivot(Exception):
    """A tie or zero-length step made the pivot choice ambiguous."""


class MaxPivotsExceeded(Exception):
    """Pivot count passed C(n,d)+1: a cycle, impossible for sound non-degenerate input."""


@dataclass
class PivotStep:
    basis_before: Basis
    lam: float
    leaving: int
    entering: int
    objective_value: float

    def to_json_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "leaving": self.leaving,
            "entering": self.entering,
            "objective_value": self.objective_value,
        }


@dataclass
class ShadowProbe:
    """One shadow run's geometry handle, kept so harnesses can compare the
    pivot count against the vertex/edge counts of the same plane."""

    inst: LPInstance
    c: np.ndarray
    d_obj: np.ndarray
    pivots: int


@dataclass
class ShadowRunResult:
    """status: 'optimal' (lam reached 1), 'unbounded' (certified ray), or
    'stopped' (early exit when stop_on_entering pivoted in)."""

    status: str
    basis: Optional[Basis]
    x: Optional[np.ndarray]
    value: Optional[float]
    ray: Optional[np.ndarray] = None
    trace: list[PivotStep] = field(default_factory=list)
    stopped_on: Optional[int] = None

    @property
    def pivot_count(self) -> int:
        return len(self.trace)

    def trace_json(self) -> list[dict]:
        return [step.to_json_dict() for step in self.trace]


def _ratio_test(
    inst: LPInstance, basis: Basis, x: np.ndarray, u: np.ndarray, tol: float
) -> Optional[tuple[int, float]]:
    """Largest feasible step along u: returns (blocking row, step) or None.

    Only rows outside the basis with A_j u strictly positive can block.
    Ties within TIE_TOL relative raise DegeneratePivot; a zero-length
    step means the current vertex is tight at more than d rows.
    """
    in_basis = np.zeros(inst.n, dtype=bool)
    in_basis[list(basis)] = True
    au = inst.A @ u
    slack = inst.b - inst.A @ x
    blocking = np.flatnonzero(~in_basis & (au > tol))
    if blocking.size == 0:
        return None
    steps = slack[blocking] / au[blocking]
    order = np.argsort(steps)
    best = float(steps[order[0]])
    if blocking.size > 1:
        runner = float(steps[order[1]])
        if runner - best <= TIE_TOL * max(1.0, abs(best)):
            raise DegeneratePivot(
                f"ratio test tie between rows {blocking[order[0]]} and {blocking[order[1]]}"
            )
    if best <= 1e-12 * max(1.0, float(np.abs(x).max())):
        raise DegeneratePivot("zero-length step: vertex tight at more than d rows")
    return int(blocking[order[0]]), best


def _forced_first_step(
    inst: LPInstance,
    basis: Basis,
    x: np.ndarray,
    d_obj: np.ndarray,
    forced: Sequence[int],
    tol: float,
) -> tuple[Basis, PivotStep]:
    """First pivot along the prescribed edge out of a degenerate start vertex.

    The edge keeps the rows in `forced` tight; its direction is the
    nullspace of those rows, signed to move away from the d_obj maximum.
    The leaving row is the one basis row outside `forced`.
    """
    forced_set = tuple(sorted(int(i) for i in forced))
    if len(forced_set) != inst.d - 1 or not set(forced_set) <= set(basis):
        raise ValueError("forced_first_edge must be d-1 rows contained in the start basis")
    leaving = next(i for i in basis if i not in forced_set)
    u = null_direction(inst.A[list(forced_set)])
    drift = float(d_obj @ u)
    if abs(drift) <= tol * max(1.0, float(np.linalg.norm(d_obj))):
        raise DegeneratePivot("prescribed first edge is orthogonal to the start objective")
    if drift > 0.0:
        u = -u
    hit = _ratio_test(inst, basis, x, u, tol)
    if hit is None:
        # The prescribed edge recedes forever; treat as a degenerate draw
        # rather than unboundedness, which the main loop must certify.
        raise DegeneratePivot("prescribed first edge is unbounded")
    entering, _ = hit
    new_basis = normalize_basis(forced_set + (entering,), inst)
    step = PivotStep(
        basis_before=basis,
        lam=0.0,
        leaving=leaving,
        entering=entering,
        objective_value=float(inst.c @ basis_point(inst, new_basis)),
    )
    return new_basis, step


def shadow_vertex_run(
    inst: LPInstance,
    c: Optional[np.ndarray] = None,
    d_obj: Optional[np.ndarray] = None,
    start: Optional[Sequence[int]] = None,
    forced_first_edge: Optional[Sequence[int]] = None,
    stop_on_entering: Optional[int] = None,
    max_pivots: Optional[int] = None,
) -> ShadowRunResult:
    """Run the parametric path from a d_obj-optimal basis toward c.

    stop_on_entering: row index whose entry into the basis ends the run
    immediately with status 'stopped' (used to detect arrival at a
    target facet without walking onto it).
    """
    if c is None:
        c = inst.c
    c = np.asarray(c, dtype=float)
    d_obj = np.asarray(d_obj, dtype=float)
    if start is None:
        raise ValueError("a start basis is required")
    basis = normalize_basis(start, inst)
    tol = default_tol(inst)
    if max_pivots is None:
        max_pivots = max_bases(inst) + 1

    if not is_feasible_basis(inst, basis, tol):
        raise NotOptimalStart("start basis is not feasible")
    x = basis_point(inst, basis)
    trace: list[PivotStep] = []

    if forced_first_edge is not None:
        basis, step = _forced_first_step(inst, basis, x, d_obj, forced_first_edge, tol)
        trace.append(step)
        x = basis_point(inst, basis)
        if stop_on_entering is not None and step.entering == stop_on_entering:
            return ShadowRunResult(
                "stopped", basis, x, float(c @ x), trace=trace, stopped_on=stop_on_entering
            )
    else:
        p0 = dual_coefficients(inst, basis, d_obj)
        if not np.all(p0 > tol * max(1.0, float(np.linalg.norm(d_obj)))):
            raise NotOptimalStart(
                "start basis is not strictly optimal for the starting objective"
            )

    lam = 0.0
    while True:
        if len(trace) > max_pivots:
            raise MaxPivotsExceeded(f"exceeded {max_pivots} pivots")
        p = dual_coefficients(inst, basis, d_obj)
        q = dual_coefficients(inst, basis, c)
        slope = q - p

        # Decreasing coordinates cap how far lam can grow: the basis stays
        # optimal until the first of them hits zero.
        dec = np.flatnonzero(slope < 0.0)
        roots = np.full(inst.d, np.inf)
        roots[dec] = p[dec] / -slope[dec]
        finite = roots[dec]
        below = np.sort(finite[finite < 1.0])
        if below.size == 0:
            if np.any(q < -tol * max(1.0, float(np.linalg.norm(c)))):
                raise DegeneratePivot("dual infeasible at lam=1; inconsistent path state")
            return ShadowRunResult("optimal", basis, x, float(c @ x), trace=trace)
        if below.size > 1 and below[1] - below[0] <= TIE_TOL:
            raise DegeneratePivot(f"two dual coordinates vanish together at lam={below[0]:.12g}")
        lam_next = float(below[0])
        if lam_next < lam - TIE_TOL:
            raise DegeneratePivot("parametric path moved backwards; degenerate state")
        coord = int(np.argmin(roots))
        leaving = basis[coord]

        # Edge direction away from the leaving constraint: A_B u = -e_k.
        rhs = np.zeros(inst.d)
        rhs[coord] = -1.0
        try:
            u = solve_refined(basis_matrix(inst, basis), rhs)
        except SingularBasis as exc:
            raise DegeneratePivot(f"singular basis system at {basis}") from exc
        hit = _ratio_test(inst, basis, x, u, tol)
        if hit is None:
            # No blocking row: u recedes, and c^T u = -q_k > 0 since the
            # leaving dual coordinate keeps decreasing past lam_next.
            return ShadowRunResult("unbounded", basis, None, None, ray=u, trace=trace)
        entering, step_len = hit
        new_basis = normalize_basis(tuple(i for i in basis if i != leaving) + (entering,), inst)
        trace.append(
            PivotStep(
                basis_before=basis,
                lam=lam_next,
                leaving=leaving,
                entering=entering,
                objective_value=float(c @ (x + step_len * u)),
            )
        )
        basis = new_basis
        x = basis_point(inst, basis)
        lam = lam_next
        if stop_on_entering is not None and entering == stop_on_entering:
            return ShadowRunResult(
                "stopped", basis, x, float(c @ x), trace=trace, stopped_on=stop_on_entering
            )
