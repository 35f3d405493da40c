"""Sweep harness: seeded grids of solves, polar counts, and tail checks.

A sweep walks the grid d_list x n_list x sigma_list, runs `trials`
independent repetitions per cell, and emits one record per trial with a
fixed CSV schema.  Reproducibility contract: every trial derives its
generator from SeedSequence(master_seed, spawn_key=(row_index,)) — and
(row_index, retry) for degenerate resamples — so re-running a sweep with
the same config yields byte-identical CSV output.  Wall-clock timing is
deliberately kept out of the per-trial records (it would break that
contract) and reported in the summary instead.

Modes
-----
* "solve"       — sample a smoothed instance, run the two-phase solver,
                  record status and pivot/restart counters.
* "polar-count" — sample an instance, intersect conv(rows) with a random
                  plane, record the edge count next to the certified
                  expected-edge bound for the noise family.
* "tails"       — no per-trial records; the summary carries a table
                  comparing Monte-Carlo tail frequencies with each
                  stated tail inequality.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, TextIO

import numpy as np

from ._linalg import SingularBasis
from .interpolate import two_phase_solve
from .lp import DegenerateInstance
from .noise import (
    GAUSSIAN,
    KINDS,
    LAPLACE,
    DirTail,
    DomainError,
    NoiseSpec,
    NormTail,
    SmoothedModel,
    certificate,
    empirical_tail,
    gaussian_dir_bound,
    gaussian_norm_bound,
    laplace_dir_bound,
    laplace_norm_bound,
    lg_dir_bound,
    lg_norm_bound,
    sample_instance,
)
from .phase1 import PHASE1_STRATEGIES, RestartExhausted
from .pivot import DegeneratePivot
from .polar import (
    DegenerateConfiguration,
    PlaneBasis,
    gaussian_shadow_bound,
    parametrized_edge_bound,
    polar_section,
    shadow_vertices,
)

MODES = ("solve", "polar-count", "tails")
STATUSES = ("optimal", "unbounded", "infeasible", "degenerate-resampled")

CSV_HEADER = (
    "d,n,sigma,trial,seed,status,phase1_pivots,phase2_pivots,restarts,"
    "polar_edges,shadow_vertices,bound_value,wall_ms"
)

#: Errors that mean "this draw violated general position": resample it.
DEGENERATE_ERRORS = (
    DegenerateInstance,
    DegeneratePivot,
    DegenerateConfiguration,
    RestartExhausted,
    SingularBasis,
)


class ConfigError(ValueError):
    """The sweep configuration is internally inconsistent."""


@dataclass(frozen=True)
class SweepConfig:
    mode: str = "solve"
    d_list: tuple[int, ...] = (3,)
    n_list: tuple[int, ...] = (8,)
    sigma_list: tuple[float, ...] = (0.1,)
    dist: str = GAUSSIAN
    trials: int = 10
    master_seed: int = 0
    phase1: str = "dd"
    perturb_rhs: bool = False
    check_geometry: bool = False
    max_resamples: int = 20
    tail_samples: int = 100_000

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.dist not in KINDS:
            raise ConfigError(f"dist must be one of {KINDS}, got {self.dist!r}")
        if self.phase1 not in PHASE1_STRATEGIES:
            raise ConfigError(f"phase1 must be one of {PHASE1_STRATEGIES}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.max_resamples < 1:
            raise ConfigError("max_resamples must be >= 1")
        if not self.d_list or not self.n_list or not self.sigma_list:
            raise ConfigError("d_list, n_list, sigma_list must be non-empty")
        for d in self.d_list:
            if d < 2:
                raise ConfigError("every d must be >= 2")
            for n in self.n_list:
                if n < d:
                    raise ConfigError(f"every (d, n) pair needs n >= d; ({d}, {n}) fails")
        for sigma in self.sigma_list:
            if sigma <= 0.0:
                raise ConfigError("every sigma must be positive")
        if self.mode == "solve" and self.phase1 == "symrv" and min(self.d_list) < 3:
            raise ConfigError("the symrv strategy needs d >= 3; use phase1='dd'")


@dataclass
class SweepRecord:
    d: int
    n: int
    sigma: float
    trial: int
    seed: int
    status: str
    phase1_pivots: Optional[int] = None
    phase2_pivots: Optional[int] = None
    restarts: Optional[int] = None
    polar_edges: Optional[int] = None
    shadow_vertices: Optional[int] = None
    bound_value: Optional[float] = None
    #: Always None in records: timing is nondeterministic and would break
    #: the byte-identical-rerun contract; totals live in the summary.
    wall_ms: Optional[float] = None

    def to_csv_row(self) -> str:
        def fmt(value) -> str:
            if value is None:
                return ""
            if isinstance(value, float):
                return repr(value)
            return str(value)

        return ",".join(
            fmt(v)
            for v in (
                self.d,
                self.n,
                self.sigma,
                self.trial,
                self.seed,
                self.status,
                self.phase1_pivots,
                self.phase2_pivots,
                self.restarts,
                self.polar_edges,
                self.shadow_vertices,
                self.bound_value,
                self.wall_ms,
            )
        )

    def to_json_dict(self) -> dict:
        return asdict(self)


def _unit_sphere_rows(rng: np.random.Generator, m: int, k: int) -> np.ndarray:
    x = rng.standard_normal((m, k))
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return x / norms


def draw_model(cfg: SweepConfig, d: int, n: int, sigma: float, rng: np.random.Generator) -> SmoothedModel:
    """Random centers on the unit sphere plus a random objective direction."""
    spec = NoiseSpec(cfg.dist, sigma)
    c = _unit_sphere_rows(rng, 1, d)[0]
    if cfg.perturb_rhs:
        rows = _unit_sphere_rows(rng, n, d + 1)
        return SmoothedModel(
            centers=rows[:, :d], c=c, noise=spec, perturb_rhs=True, b_bar=rows[:, d]
        )
    return SmoothedModel(centers=_unit_sphere_rows(rng, n, d), c=c, noise=spec)


def _bound_for(dist: str, d: int, n: int, sigma: float) -> Optional[float]:
    try:
        if dist == GAUSSIAN:
            return gaussian_shadow_bound(d, n, sigma)
        cert = certificate(dist, d, n, sigma)
    except DomainError:
        return None
    return parametrized_edge_bound(d, cert.L, cert.tau, cert.R_nd, cert.r_n)


def _solve_trial(
    cfg: SweepConfig, d: int, n: int, sigma: float, rng: np.random.Generator
) -> tuple[dict, int]:
    model = draw_model(cfg, d, n, sigma, rng)
    res = two_phase_solve(model, phase1=cfg.phase1, rng=rng)
    fields = {
        "status": res.status,
        "phase1_pivots": res.phase1_pivots,
        "phase2_pivots": res.phase2_pivots,
        "restarts": res.restarts,
    }
    violations = 0
    if cfg.check_geometry:
        count = None
        for probe in res.probes:
            try:
                plane = PlaneBasis.from_vectors(probe.d_obj, probe.c)
            except ValueError:
                continue  # objectives (numerically) parallel: no plane to check
            count = shadow_vertices(probe.inst, plane)
            if probe.pivots > count:
                violations += 1
        fields["shadow_vertices"] = count
    return fields, violations


def _polar_trial(
    cfg: SweepConfig, d: int, n: int, sigma: float, rng: np.random.Generator
) -> tuple[dict, int]:
    try:
        plane = PlaneBasis.from_vectors(
            _unit_sphere_rows(rng, 1, d)[0], _unit_sphere_rows(rng, 1, d)[0]
        )
    except ValueError as exc:
        raise DegenerateConfiguration("sampled plane directions were parallel") from exc
    model = draw_model(cfg, d, n, sigma, rng)
    inst = sample_instance(model, rng)
    section = polar_section(inst.A, plane)
    fields = {
        "status": "ok",
        "polar_edges": section.edge_count,
        "bound_value": _bound_for(cfg.dist, d, n, sigma),
    }
    return fields, 0


@dataclass
class SweepResult:
    config: SweepConfig
    records: list[SweepRecord] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "records": [r.to_json_dict() for r in self.records],
            "summary": self.summary,
        }


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Execute the grid; individual degenerate draws are resampled, never fatal."""
    cfg.validate()
    started = time.perf_counter()
    records: list[SweepRecord] = []
    resamples_total = 0
    geometry_violations = 0
    cells: dict[str, dict] = {}
    tails: list[dict] = []

    trial_fn: Optional[Callable] = {
        "solve": _solve_trial,
        "polar-count": _polar_trial,
        "tails": None,
    }[cfg.mode]

    row_index = 0
    for d, n, sigma in itertools.product(cfg.d_list, cfg.n_list, cfg.sigma_list):
        cell_key = f"d={d},n={n},sigma={sigma!r}"
        cell = cells.setdefault(
            cell_key,
            {"statuses": {}, "resamples": 0, "records": 0},
        )
        if cfg.mode == "tails":
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=cfg.master_seed, spawn_key=(row_index,))
            )
            tails.append(verify_tails(cfg.dist, d, n, sigma, cfg.tail_samples, rng))
            row_index += 1
            continue
        for trial in range(cfg.trials):
            fields: Optional[dict] = None
            seed_used = 0
            for retry in range(cfg.max_resamples):
                key = (row_index,) if retry == 0 else (row_index, retry)
                seq = np.random.SeedSequence(entropy=cfg.master_seed, spawn_key=key)
                seed_used = int(seq.generate_state(1, np.uint64)[0])
                rng = np.random.default_rng(seq)
                try:
                    fields, violations = trial_fn(cfg, d, n, sigma, rng)
                except DEGENERATE_ERRORS:
                    resamples_total += 1
                    cell["resamples"] += 1
                    continue
                geometry_violations += violations
                break
            if fields is None:
                fields = {"status": "degenerate-resampled"}
            record = SweepRecord(
                d=d, n=n, sigma=float(sigma), trial=trial, seed=seed_used, **fields
            )
            records.append(record)
            cell["records"] += 1
            cell["statuses"][record.status] = cell["statuses"].get(record.status, 0) + 1
            row_index += 1

        _summarize_cell(cfg, cell, [r for r in records if _in_cell(r, d, n, sigma)])

    summary = {
        "mode": cfg.mode,
        "cells": cells,
        "resamples_total": resamples_total,
        "geometry_violations": geometry_violations,
        "wall_ms_total": 1000.0 * (time.perf_counter() - started),
    }
    if cfg.mode == "tails":
        summary["tails"] = tails
        summary["all_pass"] = all(t["all_pass"] for t in tails)
    return SweepResult(config=cfg, records=records, summary=summary)


def _in_cell(r: SweepRecord, d: int, n: int, sigma: float) -> bool:
    return r.d == d and r.n == n and r.sigma == float(sigma)


def _summarize_cell(cfg: SweepConfig, cell: dict, recs: list[SweepRecord]) -> None:
    if cfg.mode == "solve":
        p1 = [r.phase1_pivots for r in recs if r.phase1_pivots is not None]
        p2 = [r.phase2_pivots for r in recs if r.phase2_pivots is not None]
        rs = [r.restarts for r in recs if r.restarts is not None]
        if p1:
            cell["mean_phase1_pivots"] = sum(p1) / len(p1)
            cell["max_phase1_pivots"] = max(p1)
        if p2:
            cell["mean_phase2_pivots"] = sum(p2) / len(p2)
            cell["max_phase2_pivots"] = max(p2)
        if rs:
            cell["mean_restarts"] = sum(rs) / len(rs)
    elif cfg.mode == "polar-count":
        edges = [r.polar_edges for r in recs if r.polar_edges is not None]
        if edges:
            cell["mean_polar_edges"] = sum(edges) / len(edges)
            cell["max_polar_edges"] = max(edges)
        bounds = [r.bound_value for r in recs if r.bound_value is not None]
        if bounds:
            cell["bound_value"] = bounds[0]
            if edges:
                cell["mean_below_bound"] = cell["mean_polar_edges"] <= bounds[0]


# ---------------------------------------------------------------------------
# tail verification


#: Inequality catalog: name -> (event kind, bound fn, t-grid fn).
def _tail_rows(kind: str, d: int, spec: NoiseSpec) -> list[tuple[str, str, float, float]]:
    rows: list[tuple[str, str, float, float]] = []
    if kind == GAUSSIAN:
        for t in (1.2, 1.5, 2.0):
            rows.append(("gaussian_norm", "norm", t, gaussian_norm_bound(d, t)))
        for t in (0.5, 1.0, 2.0, 3.0):
            rows.append(("gaussian_dir", "dir", t, gaussian_dir_bound(t)))
    elif kind == LAPLACE:
        for t in (1.2, 1.5, 2.0, 3.0):
            rows.append(("laplace_norm_exact", "norm", t, laplace_norm_bound(d, t, "exact")))
        for t in (2.0, 3.0):
            rows.append(("laplace_norm_linear", "norm", t, laplace_norm_bound(d, t, "linear")))
        crossover = 2.0 * math.sqrt(d)
        for t in (0.5, 1.0, 2.0, crossover + 0.5):
            rows.append(("laplace_dir", "dir", t, laplace_dir_bound(d, t)))
    else:
        r = spec.lg_radius
        for t in (r, 1.25 * r):
            rows.append(("lg_norm", "norm", t, lg_norm_bound(r, t)))
        for t in (0.5, 1.0, 2.0, r):
            rows.append(("lg_dir", "dir", t, lg_dir_bound(r, t)))
    return rows


def verify_tails(
    kind: str, d: int, n: int, sigma: float, samples: int, rng: np.random.Generator
) -> dict:
    """Monte-Carlo check of every stated tail inequality for one family.

    Each row compares the empirical frequency of its event against the
    stated bound plus three binomial standard errors; `all_pass` is the
    conjunction.  Norm events use the threshold scaling of the family's
    bound (t*sigma*sqrt(d) for gaussian/laplace, t*sigma for the capped
    family); directional events always use t*sigma.
    """
    spec = NoiseSpec(kind, sigma).resolved(d, n)
    theta = np.zeros(d)
    theta[0] = 1.0
    out_rows = []
    all_pass = True
    for name, event, t, bound in _tail_rows(kind, d, spec):
        test = NormTail(t) if event == "norm" else DirTail(theta, t)
        emp = empirical_tail(spec, d, test, samples, rng)
        p = min(bound, 1.0)
        slack = 3.0 * math.sqrt(p * (1.0 - p) / samples)
        ok = emp <= bound + slack
        all_pass = all_pass and ok
        out_rows.append(
            {
                "name": name,
                "event": event,
                "t": t,
                "empirical": emp,
                "bound": bound,
                "slack": slack,
                "pass": ok,
            }
        )
    return {
        "kind": kind,
        "d": d,
        "n": n,
        "sigma": sigma,
        "samples": samples,
        "rows": out_rows,
        "all_pass": all_pass,
    }


# ---------------------------------------------------------------------------
# output


def write_csv(records: list[SweepRecord], stream: TextIO) -> None:
    stream.write(CSV_HEADER + "\n")
    for record in records:
        stream.write(record.to_csv_row() + "\n")


def csv_text(records: list[SweepRecord]) -> str:
    lines = [CSV_HEADER]
    lines.extend(record.to_csv_row() for record in records)
    return "\n".join(lines) + "\n"
