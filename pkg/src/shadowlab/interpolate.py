"""Two-phase solver: unit Phase I, then an interpolation Phase II.

The target program  max c^T x  s.t.  A x <= b  is solved through an
extended program in d+1 variables (x, t):

    rows i < n:   <a_i, x> + (1 - b_i) t <= 1
    row  n:       t <= 1
    row  n+1:    -t <= 0

At t = 0 the x-slice is the unit program (A x <= 1, always feasible);
at t = 1 it is the target program.  Phase I solves the unit program; its
optimal vertex (x*, 0), together with row n+1, is a vertex of the
extended program.  Phase II follows one shadow path in the plane
span((c, 0), e_t) from an objective pointing steeply down in t toward
the pure e_t objective, and stops the moment row n (t <= 1) enters the
basis: the x-part of that vertex is then the target optimum.  If the
path instead finishes at some t < 1, no feasible point reaches t = 1 and
the target program is infeasible.  Unboundedness is decided in Phase I:
the unit and target programs share the recession cone {A r <= 0}, so an
improving ray for one is an improving ray for the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .lp import (
    Basis,
    DegenerateInstance,
    LPInstance,
    basis_point,
    default_tol,
    is_optimal_basis,
    normalize_basis,
)
from .noise import SmoothedModel, sample_instance
from .phase1 import (
    PHASE1_STRATEGIES,
    RestartExhausted,
    SymRVConfig,
    SymRVOutcome,
    dd_solve_any_objective,
    symmetric_rv_solve,
)
from .pivot import (
    DegeneratePivot,
    MaxPivotsExceeded,
    NotOptimalStart,
    ShadowProbe,
    shadow_vertex_run,
)

#: Initial angle below the x-hyperplane for the Phase II start objective.
THETA0 = -math.pi / 2.0 + 2.0**-4

#: Angle-halving attempts before giving up on certifying the start.
MAX_THETA_HALVINGS = 60


@dataclass
class IntLP:
    """The extended (d+1)-variable program and its fixed shadow plane."""

    base: LPInstance
    plane: tuple[np.ndarray, np.ndarray]  # ((c, 0), e_t)
    row_upper: int  # index of the t <= 1 row
    row_lower: int  # index of the -t <= 0 row


def build_int_lp(inst: LPInstance) -> IntLP:
    """Extend inst by the interpolation variable t as described above."""
    n, d = inst.n, inst.d
    A = np.zeros((n + 2, d + 1))
    A[:n, :d] = inst.A
    A[:n, d] = 1.0 - inst.b
    A[n, d] = 1.0
    A[n + 1, d] = -1.0
    b = np.concatenate([np.ones(n), [1.0, 0.0]])
    c_ext = np.concatenate([inst.c, [0.0]])
    e_t = np.zeros(d + 1)
    e_t[d] = 1.0
    base = LPInstance(A, b, c_ext, meta={"kind": "interpolation-extension"})
    return IntLP(base=base, plane=(c_ext, e_t), row_upper=n, row_lower=n + 1)


@dataclass
class TwoPhaseResult:
    """Joint outcome of Phase I + Phase II on one instance."""

    status: str  # "optimal" | "unbounded" | "infeasible"
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    basis: Optional[Basis] = None
    ray: Optional[np.ndarray] = None
    phase1_pivots: int = 0
    phase2_pivots: int = 0
    restarts: int = 0
    probes: list[ShadowProbe] = field(default_factory=list)
    instance: Optional[LPInstance] = None

    def to_json_dict(self) -> dict:
        out = {
            "status": self.status,
            "phase1_pivots": self.phase1_pivots,
            "phase2_pivots": self.phase2_pivots,
            "restarts": self.restarts,
        }
        if self.x is not None:
            out["x"] = np.asarray(self.x).tolist()
        if self.value is not None:
            out["value"] = float(self.value)
        if self.ray is not None:
            out["ray"] = np.asarray(self.ray).tolist()
        return out


def _phase2_start_objective(
    ext: IntLP, start: Basis, c: np.ndarray
) -> tuple[np.ndarray, float]:
    """In-plane objective (cos(theta) c, sin(theta)) certifying the start.

    theta begins just above -pi/2 and halves its offset toward -pi/2
    until the start basis is strictly optimal; for a non-degenerate unit
    optimum a small enough angle always certifies, because the exact
    limit -pi/2 is optimal with duals (unit duals of c, |sin|) > 0.
    """
    offset = THETA0 + math.pi / 2.0
    for _ in range(MAX_THETA_HALVINGS):
        theta = -math.pi / 2.0 + offset
        d_obj = np.concatenate([math.cos(theta) * c, [math.sin(theta)]])
        if is_optimal_basis(ext.base, start, d_obj, strict=True):
            return d_obj, theta
        offset *= 0.5
    raise DegenerateInstance("no certified Phase II start objective")


def solve_instance(
    inst: LPInstance,
    phase1: str = "symrv",
    rng: Optional[np.random.Generator] = None,
    sigma: Optional[float] = None,
    symrv_cfg: Optional[SymRVConfig] = None,
) -> TwoPhaseResult:
    """Solve one instance end to end.

    phase1 selects the unit-program strategy: "symrv" (randomized; needs
    rng and d >= 3) or "dd" (deterministic).  Degenerate geometry raises
    DegenerateInstance — under a smoothed model the caller resamples.
    """
    if phase1 not in PHASE1_STRATEGIES:
        raise ValueError(f"phase1 must be one of {PHASE1_STRATEGIES}")
    n, d = inst.n, inst.d
    unit = LPInstance(inst.A.copy(), np.ones(n), inst.c.copy(), meta=dict(inst.meta))

    if phase1 == "symrv":
        out: SymRVOutcome = symmetric_rv_solve(unit, cfg=symrv_cfg, rng=rng, sigma=sigma)
        if out.status == "restart-exhausted":
            raise RestartExhausted(
                f"phase 1 gave up after {out.restarts_used} restarts; "
                f"reasons: {out.failure_reasons[-5:]}"
            )
    else:
        out = dd_solve_any_objective(unit)

    result = TwoPhaseResult(
        status="",
        phase1_pivots=out.pivots_total,
        restarts=out.restarts_used,
        probes=list(out.probes),
        instance=inst,
    )
    if out.status == "unbounded":
        result.status = "unbounded"
        result.ray = out.ray
        return result

    ext = build_int_lp(inst)
    tol = default_tol(ext.base)
    start = normalize_basis(tuple(out.basis) + (ext.row_lower,), ext.base)
    d_obj, _ = _phase2_start_objective(ext, start, inst.c)
    try:
        run = shadow_vertex_run(
            ext.base,
            c=ext.plane[1],
            d_obj=d_obj,
            start=start,
            stop_on_entering=ext.row_upper,
        )
    except (NotOptimalStart, DegeneratePivot, MaxPivotsExceeded) as exc:
        raise DegenerateInstance(f"phase 2: {exc}") from exc
    result.phase2_pivots = run.pivot_count
    result.probes.append(
        ShadowProbe(inst=ext.base, c=ext.plane[1], d_obj=d_obj, pivots=run.pivot_count)
    )

    if run.status == "stopped":
        rows = tuple(i for i in run.basis if i != ext.row_upper)
        if len(rows) != d or max(rows) >= n:
            raise DegenerateInstance("phase 2 stopped on a basis mixing the t-slab rows")
        basis = normalize_basis(rows, inst)
        x = basis_point(inst, basis)
        if not is_optimal_basis(inst, basis, inst.c):
            raise DegenerateInstance("phase 2 endpoint failed the optimality certificate")
        result.status = "optimal"
        result.x = x
        result.value = float(inst.c @ x)
        result.basis = basis
        return result

    if run.status == "unbounded":
        # The slab rows force any recession direction to have zero t-part,
        # and Phase I certified there is no improving x-ray; a certified
        # e_t-improving ray is numerically inconsistent.
        raise DegenerateInstance("phase 2 reported an unbounded t-direction")

    t_star = float(run.x[d])
    if t_star >= 1.0 - 10.0 * tol:
        raise DegenerateInstance("phase 2 finished at t = 1 without crossing the t-row")
    result.status = "infeasible"
    return result


def two_phase_solve(
    model: SmoothedModel,
    phase1: str = "symrv",
    rng: Optional[np.random.Generator] = None,
    sigma: Optional[float] = None,
    symrv_cfg: Optional[SymRVConfig] = None,
) -> TwoPhaseResult:
    """Sample one instance from the model and solve it.

    The sampled instance rides along on the result (``result.instance``)
    so harnesses can cross-check against reference solvers.
    """
    if rng is None:
        raise ValueError("two_phase_solve needs an explicit rng")
    inst = sample_instance(model, rng)
    sig = sigma if sigma is not None else model.noise.sigma
    return solve_instance(inst, phase1=phase1, rng=rng, sigma=sig, symrv_cfg=symrv_cfg)
