"""Phase I solvers for unit right-hand-side programs (b = all-ones).

The unit program  max c^T x  s.t.  A x <= 1  is always feasible (x = 0),
so a Phase I run ends either at an optimal vertex with a certifying basis
or with a certified improving ray.  Two strategies are provided:

* ``symmetric_rv_solve`` — randomized start construction for smoothed
  instances.  It appends 2(d-1) auxiliary mirrored rows whose common
  intersection point ``x0`` is feasible with high probability, prescribes
  the first edge out of ``x0``, and follows the parametric shadow path
  toward ``c``.  Failures of the random construction trigger a restart
  with fresh randomness; the auxiliary rows are resampled each attempt.

* ``dd_solve`` — deterministic dimension-by-dimension induction.  Stage k
  solves the restriction of the program to the first k coordinates by
  lifting the stage-(k-1) optimum onto a vertex of the k-dimensional
  feasible set and running one shadow path in the plane spanned by the
  previous objective and the new coordinate axis.

Both return a :class:`SymRVOutcome`; the deterministic strategy simply
never restarts.  Pivot counts accumulate across all completed shadow
runs, and each completed run is kept as a :class:`ShadowProbe` so that
harnesses can compare pivots against shadow-vertex and polar-edge counts
on the very same plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._linalg import SingularBasis, haar_rotation, null_direction, solve_refined
from .lp import (
    Basis,
    DegenerateInstance,
    LPInstance,
    default_tol,
    instance_scale,
    is_optimal_basis,
    normalize_basis,
    oracle_solve,
)
from .noise import sigma_bar
from .pivot import (
    DegeneratePivot,
    MaxPivotsExceeded,
    NotOptimalStart,
    ShadowProbe,
    _ratio_test,
    shadow_vertex_run,
)

PHASE1_STRATEGIES = ("symrv", "dd")


class RestartExhausted(Exception):
    """The randomized start construction failed max_restarts times in a row."""


class ZeroLeadingObjective(Exception):
    """dimension-by-dimension needs c[0] != 0; permute coordinates first."""


@dataclass(frozen=True)
class SymRVConfig:
    """Tunables for the randomized start construction.

    ell defaults to 1/(6 sqrt(ln d)) at run time (it depends on the
    dimension); offset is the distance of the auxiliary cluster from the
    origin along the random axis.  Rows of A with norm beyond
    fallback_threshold fall outside the smoothed-model envelope, and the
    whole solve falls back to the brute-force reference solver.
    """

    ell: Optional[float] = None
    offset: float = 4.0
    max_restarts: int = 1000
    fallback_threshold: float = 2.0

    def resolved_ell(self, d: int) -> float:
        if self.ell is not None:
            return float(self.ell)
        return 1.0 / (6.0 * math.sqrt(math.log(d)))


@dataclass
class SymRVOutcome:
    """Phase I outcome: status is 'optimal', 'unbounded', or 'restart-exhausted'."""

    status: str
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    basis: Optional[Basis] = None
    ray: Optional[np.ndarray] = None
    restarts_used: int = 0
    pivots_total: int = 0
    failure_reasons: list[str] = field(default_factory=list)
    probes: list[ShadowProbe] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        out = {
            "status": self.status,
            "restarts_used": self.restarts_used,
            "pivots_total": self.pivots_total,
            "failure_reasons": list(self.failure_reasons),
        }
        if self.x is not None:
            out["x"] = np.asarray(self.x).tolist()
        if self.value is not None:
            out["value"] = float(self.value)
        if self.basis is not None:
            out["basis"] = list(self.basis)
        if self.ray is not None:
            out["ray"] = np.asarray(self.ray).tolist()
        return out


def _require_unit_rhs(inst: LPInstance) -> None:
    if not np.allclose(inst.b, 1.0, rtol=0.0, atol=1e-12):
        raise ValueError("Phase I operates on unit programs: b must be all-ones")


def _resolve_sigma(inst: LPInstance, sigma: Optional[float]) -> float:
    """Noise scale used to size the auxiliary cluster.

    Resolution order: explicit argument, then the generator stamp in
    inst.meta, then the admissible ceiling sigma_bar(d, n).
    """
    if sigma is not None:
        if sigma <= 0.0:
            raise ValueError("sigma must be positive")
        return float(sigma)
    noise = inst.meta.get("noise") if isinstance(inst.meta, dict) else None
    if isinstance(noise, dict) and "sigma" in noise:
        return float(noise["sigma"])
    return sigma_bar(inst.d, inst.n)


@dataclass
class _Attempt:
    """One pass through the randomized construction; kind says how it ended."""

    kind: str  # "optimal" | "unbounded" | a restart reason
    run_pivots: int = 0
    x: Optional[np.ndarray] = None
    basis: Optional[Basis] = None
    ray: Optional[np.ndarray] = None
    probe: Optional[ShadowProbe] = None


def _symrv_attempt(
    work: LPInstance, sigma_eff: float, ell: float, offset: float, rng: np.random.Generator
) -> _Attempt:
    """Sample one auxiliary cluster and run the shadow path once.

    work must be a unit program whose rows are within the smoothed-model
    envelope.  The auxiliary rows come in mirrored pairs
    v_i^+ = offset*a + w_i and v_i^- = offset*a - w_i around a random
    axis a, where w_i = R(ell*e_i + g_i) with Gaussian g_i of scale
    sigma_eff.  Their common point x0 (the unique solution of
    <v_i^+, x> = 1 and <2*offset*a, x> = 2) is the start vertex.
    """
    n, d = work.n, work.d
    rotation = haar_rotation(d, rng)
    axis = rotation[:, d - 1]
    gauss = sigma_eff * rng.standard_normal((d - 1, d))
    w = (ell * np.eye(d - 1, d) + gauss) @ rotation.T
    v_plus = offset * axis + w
    v_minus = offset * axis - w

    try:
        x0 = solve_refined(
            np.vstack([v_plus, 2.0 * offset * axis]),
            np.concatenate([np.ones(d - 1), [2.0]]),
        )
    except SingularBasis:
        return _Attempt("x0-singular")
    rows_v = np.vstack([v_plus, v_minus])
    if float(np.abs(rows_v @ x0 - 1.0).max()) > 1e-9 * instance_scale(work):
        return _Attempt("x0-residual")
    if not np.all(work.A @ x0 < 1.0 - 1e-12):
        return _Attempt("x0-infeasible")

    # Decompose c over the cluster directions: sum_i lam_i w_i - lam_last * axis = c.
    try:
        lam = solve_refined(np.vstack([w, -axis]).T, work.c)
    except SingularBasis:
        return _Attempt("lambda-singular")
    if float(np.abs(lam[:-1]).min()) <= 1e-10 * max(1.0, float(np.abs(lam).max())):
        return _Attempt("lambda-degenerate")
    if float(lam[-1]) + offset * float(np.abs(lam[:-1]).sum()) <= 0.0:
        # x0 itself maximizes c; the path would go nowhere useful.
        return _Attempt("x0-optimal-for-c")

    prime = LPInstance(
        np.vstack([work.A, v_plus, v_minus]),
        np.ones(n + 2 * d - 2),
        work.c,
        meta={"kind": "symrv-augmented"},
    )
    forced = tuple(
        n + i if lam[i] > 0.0 else n + d - 1 + i for i in range(d - 1)
    )
    mirror0 = n + d - 1 if lam[0] > 0.0 else n
    start = normalize_basis(forced + (mirror0,), prime)

    try:
        run = shadow_vertex_run(
            prime, c=work.c, d_obj=axis, start=start, forced_first_edge=forced
        )
    except (NotOptimalStart, DegeneratePivot, MaxPivotsExceeded, SingularBasis) as exc:
        return _Attempt(f"shadow-{type(exc).__name__}")

    probe = ShadowProbe(inst=prime, c=work.c.copy(), d_obj=axis.copy(), pivots=run.pivot_count)
    if run.status == "unbounded":
        return _Attempt("unbounded", run_pivots=run.pivot_count, ray=run.ray, probe=probe)
    if run.basis is None or max(run.basis) >= n:
        return _Attempt("cutoff-by-v", run_pivots=run.pivot_count)
    if not np.all(rows_v @ run.x < 1.0 - 1e-12):
        return _Attempt("cutoff-by-v", run_pivots=run.pivot_count)
    return _Attempt(
        "optimal", run_pivots=run.pivot_count, x=run.x, basis=run.basis, probe=probe
    )


def symmetric_rv_solve(
    inst: LPInstance,
    cfg: Optional[SymRVConfig] = None,
    rng: Optional[np.random.Generator] = None,
    sigma: Optional[float] = None,
) -> SymRVOutcome:
    """Randomized Phase I for unit programs with d >= 3.

    sigma is the noise scale of the instance rows; if the effective scale
    exceeds the admissible ceiling sigma_bar(d, n), the feasible set is
    shrunk by gamma = sigma_bar/sigma (a pure rescale: optima map back as
    x -> gamma * x, bases and rays are unchanged).
    """
    if rng is None:
        raise ValueError("symmetric_rv_solve needs an explicit rng")
    cfg = cfg or SymRVConfig()
    _require_unit_rhs(inst)
    n, d = inst.n, inst.d
    if d < 3:
        raise ValueError("the randomized construction needs d >= 3; use dd_solve below that")

    sig = _resolve_sigma(inst, sigma)
    bar = sigma_bar(d, n)
    gamma = min(1.0, bar / sig)
    sigma_eff = min(sig, bar)
    if gamma != 1.0:
        work = LPInstance(gamma * inst.A, np.ones(n), inst.c, meta=dict(inst.meta))
    else:
        work = inst

    row_norms = np.linalg.norm(work.A, axis=1)
    if float(row_norms.max()) > cfg.fallback_threshold:
        res = oracle_solve(work)
        out = SymRVOutcome(status=res.status, failure_reasons=["fallback-oracle"])
        if res.status == "optimal":
            out.x = gamma * res.x
            out.value = float(inst.c @ out.x)
            out.basis = res.basis
        elif res.status == "unbounded":
            out.ray = res.ray
        else:
            # A unit program contains the origin; infeasibility cannot happen.
            raise DegenerateInstance("unit program reported infeasible by fallback")
        return out

    ell = cfg.resolved_ell(d)
    reasons: list[str] = []
    pivots = 0
    for attempt in range(cfg.max_restarts):
        res = _symrv_attempt(work, sigma_eff, ell, cfg.offset, rng)
        pivots += res.run_pivots
        if res.kind == "unbounded":
            # The augmented rows only cut the feasible set, so an improving
            # ray for the augmented program is one for the original.
            return SymRVOutcome(
                status="unbounded",
                ray=res.ray,
                restarts_used=attempt,
                pivots_total=pivots,
                failure_reasons=reasons,
                probes=[res.probe] if res.probe else [],
            )
        if res.kind == "optimal":
            x_orig = gamma * res.x
            if not is_optimal_basis(inst, res.basis, inst.c):
                reasons.append("postcheck-failed")
                continue
            return SymRVOutcome(
                status="optimal",
                x=x_orig,
                value=float(inst.c @ x_orig),
                basis=res.basis,
                restarts_used=attempt,
                pivots_total=pivots,
                failure_reasons=reasons,
                probes=[res.probe] if res.probe else [],
            )
        reasons.append(res.kind)
    return SymRVOutcome(
        status="restart-exhausted",
        restarts_used=cfg.max_restarts,
        pivots_total=pivots,
        failure_reasons=reasons,
    )


def symrv_loop_stats(
    make_instance,
    attempts: int,
    rng: np.random.Generator,
    cfg: Optional[SymRVConfig] = None,
    sigma: Optional[float] = None,
) -> dict:
    """Health counters for the randomized construction.

    make_instance(rng) must return a fresh unit instance each call; one
    construction attempt runs per instance (no retry loop), so the
    returned rates estimate single-attempt success probabilities:

    * start_feasible_rate — x0 lands strictly inside the feasible set;
    * admissible_rate     — among feasible starts, the path also finished
                            (optimal with slack auxiliary rows, or a ray);
    * success_rate        — joint: one attempt fully succeeded.
    """
    cfg = cfg or SymRVConfig()
    counts: dict[str, int] = {}
    feasible = 0
    success = 0
    for _ in range(attempts):
        inst = make_instance(rng)
        _require_unit_rhs(inst)
        sig = sigma if sigma is not None else _resolve_sigma(inst, None)
        bar = sigma_bar(inst.d, inst.n)
        gamma = min(1.0, bar / sig)
        sigma_eff = min(sig, bar)
        work = (
            LPInstance(gamma * inst.A, np.ones(inst.n), inst.c) if gamma != 1.0 else inst
        )
        if float(np.linalg.norm(work.A, axis=1).max()) > cfg.fallback_threshold:
            counts["fallback"] = counts.get("fallback", 0) + 1
            continue
        res = _symrv_attempt(work, sigma_eff, cfg.resolved_ell(work.d), cfg.offset, rng)
        counts[res.kind] = counts.get(res.kind, 0) + 1
        if res.kind not in ("x0-singular", "x0-residual", "x0-infeasible"):
            feasible += 1
        if res.kind in ("optimal", "unbounded"):
            success += 1
    return {
        "attempts": attempts,
        "counts": counts,
        "start_feasible_rate": feasible / attempts,
        "admissible_rate": success / feasible if feasible else 0.0,
        "success_rate": success / attempts,
    }


# ---------------------------------------------------------------------------
# Dimension-by-dimension induction.
# ---------------------------------------------------------------------------


def _stage_one(inst: LPInstance, tol: float) -> tuple[np.ndarray, Basis, Optional[np.ndarray]]:
    """Maximize c1*x1 over {t*e1 feasible}: closed form on the first axis.

    Returns (x, basis, ray); ray is non-None exactly when the axis is
    unbounded in the improving direction.
    """
    direction = 1.0 if inst.c[0] > 0.0 else -1.0
    col = direction * inst.A[:, 0]
    blocking = col > tol
    if not blocking.any():
        ray = np.zeros(inst.d)
        ray[0] = direction
        return np.empty(0), (), ray
    colmax = float(col.max())
    gaps = colmax - col
    near = np.flatnonzero(gaps <= 1e-9 * max(1.0, colmax))
    if near.size > 1:
        raise DegenerateInstance("stage 1 tie: two rows block the first axis equally")
    j1 = int(near[0])
    return np.array([direction / colmax]), (j1,), None


def _edge_normal_objective(
    inst_k: LPInstance, basis_k: Basis, u: np.ndarray, c_k: np.ndarray, tol: float
) -> Optional[np.ndarray]:
    """Certified strictly-optimal start objective for basis_k, in-plane.

    The lifted edge direction u spans the boundary segment whose outward
    normal (within span(c_prev, e_k)) is n = u_k * (c_prev, 0) - (c_prev . u) e_k
    up to sign.  Both edge endpoints are optimal for n non-strictly, so
    the start objective is nudged from n toward c_k until basis_k becomes
    strictly optimal; the nudge keeps the objective inside the plane.
    """
    k = inst_k.d
    cbar = np.concatenate([c_k[: k - 1], [0.0]])
    delta = float(cbar @ u)
    normal = u[k - 1] * cbar
    normal[k - 1] -= delta
    nrm = float(np.linalg.norm(normal))
    if nrm <= tol:
        return None
    normal /= nrm
    if not is_optimal_basis(inst_k, basis_k, normal):
        normal = -normal
        if not is_optimal_basis(inst_k, basis_k, normal):
            return None
    chat = c_k / float(np.linalg.norm(c_k))
    for half in range(1, 61):
        mu = 2.0**-half
        d_try = (1.0 - mu) * normal + mu * chat
        residual = d_try - (d_try @ chat) * chat
        if float(np.linalg.norm(residual)) <= 1e-12:
            continue  # collapsed onto c_k: useless as a distinct start objective
        if is_optimal_basis(inst_k, basis_k, d_try, strict=True):
            return d_try
    return None


def dd_solve(inst: LPInstance) -> SymRVOutcome:
    """Deterministic Phase I: induct on the coordinates.

    Stage 1 is the closed-form axis maximization; stage k lifts the
    stage-(k-1) optimum w onto the k-dimensional feasible set (w gains a
    zero k-th coordinate and sits on an edge there), walks that edge to a
    vertex, and follows one shadow path in span((c_1..c_{k-1}, 0), e_k)
    toward (c_1..c_k).  Any certified improving ray for a restriction
    zero-pads to one for the full program.

    Raises ZeroLeadingObjective when c[0] == 0 (permute coordinates
    first) and DegenerateInstance when ties or rank drops break the
    induction's general-position assumptions.
    """
    _require_unit_rhs(inst)
    n, d = inst.n, inst.d
    c = inst.c
    tol = default_tol(inst)
    if abs(c[0]) <= tol * float(np.linalg.norm(c)):
        raise ZeroLeadingObjective("dd_solve needs a nonzero leading objective entry")

    x_prev, basis_prev, ray = _stage_one(inst, tol)
    if ray is not None:
        return SymRVOutcome(status="unbounded", ray=ray)

    pivots = 0
    probes: list[ShadowProbe] = []
    for k in range(2, d + 1):
        c_k = c[:k].copy()
        inst_k = LPInstance(inst.A[:, :k], np.ones(n), c_k)
        ck_last = float(c[k - 1])
        if abs(ck_last) <= tol * max(1.0, float(np.linalg.norm(c_k))):
            raise DegenerateInstance(
                f"stage {k}: objective has (numerically) zero entry in coordinate {k}; "
                "the restricted optimum is a tie along the lifted edge"
            )
        v = np.concatenate([x_prev, [0.0]])
        try:
            u = null_direction(inst_k.A[list(basis_prev)])
        except SingularBasis as exc:
            raise DegenerateInstance(f"stage {k}: lifted rows lost rank") from exc
        if abs(float(u[k - 1])) <= 1e-12:
            raise DegenerateInstance(f"stage {k}: lifted edge parallel to the slice")
        if u[k - 1] < 0.0:
            u = -u

        side = 1.0 if ck_last > 0.0 else -1.0
        landed: Optional[tuple[np.ndarray, Basis]] = None
        finished: Optional[tuple[np.ndarray, Basis]] = None
        for sign in (side, -side):
            edge = sign * u
            try:
                hit = _ratio_test(inst_k, basis_prev, v, edge, tol)
            except DegeneratePivot as exc:
                raise DegenerateInstance(f"stage {k}: {exc}") from exc
            if hit is None:
                if float(c_k @ edge) > tol * max(1.0, float(np.linalg.norm(c_k))):
                    ray = np.zeros(d)
                    ray[:k] = edge
                    return SymRVOutcome(
                        status="unbounded", ray=ray, pivots_total=pivots, probes=probes
                    )
                continue  # recedes without improving; try the other endpoint
            j_star, step = hit
            w = v + step * edge
            basis_k = normalize_basis(basis_prev + (j_star,), inst_k)
            landed = (w, basis_k)
            if is_optimal_basis(inst_k, basis_k, c_k):
                finished = (w, basis_k)
                break
            d_try = _edge_normal_objective(inst_k, basis_k, u, c_k, tol)
            if d_try is None:
                continue  # wrong endpoint for the rotation; try the other one
            try:
                run = shadow_vertex_run(inst_k, c=c_k, d_obj=d_try, start=basis_k)
            except (NotOptimalStart, DegeneratePivot, MaxPivotsExceeded) as exc:
                raise DegenerateInstance(f"stage {k}: {exc}") from exc
            pivots += run.pivot_count
            probes.append(
                ShadowProbe(inst=inst_k, c=c_k, d_obj=d_try, pivots=run.pivot_count)
            )
            if run.status == "unbounded":
                r = run.ray
                if not (
                    np.all(inst_k.A @ r <= tol)
                    and float(c_k @ r) > tol * max(1.0, float(np.linalg.norm(c_k)))
                ):
                    raise DegenerateInstance(f"stage {k}: uncertified ray")
                ray = np.zeros(d)
                ray[:k] = r
                return SymRVOutcome(
                    status="unbounded", ray=ray, pivots_total=pivots, probes=probes
                )
            finished = (run.x, run.basis)
            break
        if finished is None:
            if landed is None:
                raise DegenerateInstance(
                    f"stage {k}: lifted edge recedes on both sides without improving"
                )
            raise DegenerateInstance(f"stage {k}: no certified start objective")
        x_prev, basis_prev = finished

    if not is_optimal_basis(inst, basis_prev, c):
        raise DegenerateInstance("final basis failed the optimality certificate")
    return SymRVOutcome(
        status="optimal",
        x=x_prev,
        value=float(c @ x_prev),
        basis=basis_prev,
        pivots_total=pivots,
        probes=probes,
    )


def dd_solve_any_objective(inst: LPInstance) -> SymRVOutcome:
    """dd_solve behind a coordinate permutation making |c| largest in slot 0.

    The permutation is applied to columns of A and entries of c, the
    program is solved, and the point/ray coordinates are permuted back.
    Row indices (bases) are untouched by a column permutation.
    """
    j = int(np.argmax(np.abs(inst.c)))
    if j == 0:
        return dd_solve(inst)
    perm = list(range(inst.d))
    perm[0], perm[j] = perm[j], perm[0]
    A_p = inst.A[:, perm]
    c_p = inst.c[perm]
    out = dd_solve(LPInstance(A_p, inst.b.copy(), c_p, meta=dict(inst.meta)))
    inv = np.empty(inst.d, dtype=int)
    inv[perm] = np.arange(inst.d)
    if out.x is not None:
        out.x = out.x[inv]
    if out.ray is not None:
        out.ray = out.ray[inv]
    return out
