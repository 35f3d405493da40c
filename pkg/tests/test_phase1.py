"""Phase I strategies: the randomized mirrored construction and the
dimension-by-dimension induction, both checked against the brute-force oracle."""

from __future__ import annotations

import numpy as np
import pytest

from shadowlab import (
    DegenerateInstance,
    LPInstance,
    SymRVConfig,
    ZeroLeadingObjective,
    dd_solve,
    dd_solve_any_objective,
    default_tol,
    is_optimal_basis,
    oracle_solve,
    symmetric_rv_solve,
    symrv_loop_stats,
)
from shadowlab.phase1 import PHASE1_STRATEGIES

from conftest import random_smoothed_instance, unit_square


def make_unit_instance(d, n, sigma, seed, kind="gaussian"):
    rng = np.random.default_rng(seed)
    return random_smoothed_instance(d, n, sigma, kind, rng), rng


# ---------------------------------------------------------- dimension walk


class TestDimensionByDimension:
    def test_square_frozen(self):
        out = dd_solve(unit_square())  # c = (1, 2)
        assert out.status == "optimal"
        assert np.allclose(out.x, [1.0, 1.0], atol=1e-12)
        assert out.value == pytest.approx(3.0, abs=1e-12)
        assert out.basis == (0, 1)
        assert out.pivots_total == 0  # both stages land by ratio test alone
        assert out.restarts_used == 0

    def test_unbounded_axis(self):
        inst = LPInstance(
            A=np.array([[-1.0, 0.0], [0.0, -1.0]]),
            b=np.ones(2),
            c=np.array([1.0, 1.0]),
        )
        out = dd_solve(inst)
        assert out.status == "unbounded"
        tol = default_tol(inst)
        assert np.all(inst.A @ out.ray <= tol)
        assert float(inst.c @ out.ray) > tol

    def test_unbounded_detected_mid_lift(self):
        # bounded on the first axis, unbounded once x2 is released
        inst = LPInstance(
            A=np.array([[1.0, 0.0], [-1.0, 0.0], [0.3, -1.0]]),
            b=np.ones(3),
            c=np.array([1.0, 0.5]),
        )
        out = dd_solve(inst)
        assert out.status == "unbounded"
        tol = default_tol(inst)
        assert np.all(inst.A @ out.ray <= tol)
        assert float(inst.c @ out.ray) > tol

    def test_zero_leading_objective_raises(self):
        inst = LPInstance(A=np.eye(2), b=np.ones(2), c=np.array([0.0, 1.0]))
        with pytest.raises(ZeroLeadingObjective):
            dd_solve(inst)

    def test_any_objective_wrapper_permutes(self):
        # |c| is maximal in coordinate 2: the wrapper must walk the axes in
        # permuted order and un-permute the answer
        inst = LPInstance(
            A=np.array([[1.0, 0.2], [0.1, 1.0], [-1.0, 0.0], [0.0, -1.0]]),
            b=np.ones(4),
            c=np.array([0.3, 1.0]),
        )
        out = dd_solve_any_objective(inst)
        ref = oracle_solve(inst)
        assert out.status == ref.status == "optimal"
        assert out.value == pytest.approx(ref.value, rel=1e-9)
        assert np.allclose(out.x, ref.x, atol=1e-8)

    def test_exact_zero_objective_entry_is_degenerate(self):
        # a zero entry survives any permutation: some stage then has a tied
        # restricted optimum, which the walk must refuse to silently resolve
        inst = LPInstance(
            A=np.array([[1.0, 0.2], [0.1, 1.0], [-1.0, 0.0], [0.0, -1.0]]),
            b=np.ones(4),
            c=np.array([0.0, 1.0]),
        )
        with pytest.raises(DegenerateInstance):
            dd_solve_any_objective(inst)

    def test_non_unit_rhs_rejected(self):
        inst = LPInstance(A=np.eye(2), b=np.array([1.0, 2.0]), c=np.ones(2))
        with pytest.raises(ValueError):
            dd_solve(inst)

    @pytest.mark.parametrize("seed", range(40))
    def test_matches_oracle_on_smoothed_instances(self, seed):
        inst, _ = make_unit_instance(3, 9, 0.2, 3_000 + seed)
        try:
            ref = oracle_solve(inst)
        except DegenerateInstance:
            return
        try:
            out = dd_solve_any_objective(inst)
        except DegenerateInstance:
            return
        assert out.status == ref.status
        if ref.status == "optimal":
            assert out.value == pytest.approx(ref.value, rel=1e-9, abs=1e-9)
            assert np.allclose(out.x, ref.x, atol=1e-7)
            assert is_optimal_basis(inst, out.basis)
        elif ref.status == "unbounded":
            tol = default_tol(inst)
            assert np.all(inst.A @ out.ray <= tol)
            assert float(inst.c @ out.ray) > tol

    @pytest.mark.parametrize("d,n", [(2, 6), (4, 9)])
    def test_matches_oracle_other_dimensions(self, d, n):
        hits = 0
        for seed in range(12):
            inst, _ = make_unit_instance(d, n, 0.25, 7_000 + seed, kind="laplace")
            try:
                ref = oracle_solve(inst)
                out = dd_solve_any_objective(inst)
            except DegenerateInstance:
                continue
            hits += 1
            assert out.status == ref.status
            if ref.status == "optimal":
                assert out.value == pytest.approx(ref.value, rel=1e-9, abs=1e-9)
        assert hits >= 6  # degeneracy must stay rare on smoothed data

    def test_probes_expose_stage_geometry(self):
        inst, _ = make_unit_instance(3, 9, 0.2, 3_004)
        try:
            out = dd_solve_any_objective(inst)
        except DegenerateInstance:
            pytest.skip("degenerate draw")
        if out.status != "optimal":
            pytest.skip("need a bounded draw")
        for probe in out.probes:
            assert probe.pivots >= 0
            assert probe.inst.d == probe.c.shape[0] == probe.d_obj.shape[0]


# ------------------------------------------------------- randomized Phase I


class TestSymmetricRV:
    def test_requires_rng_and_unit_rhs_and_dimension(self):
        inst, rng = make_unit_instance(3, 8, 0.1, 11)
        with pytest.raises(ValueError):
            symmetric_rv_solve(inst)  # no rng
        bad = LPInstance(A=np.eye(3), b=np.array([1.0, 2.0, 1.0]), c=np.ones(3))
        with pytest.raises(ValueError):
            symmetric_rv_solve(bad, rng=rng)
        flat = LPInstance(A=np.eye(2), b=np.ones(2), c=np.ones(2))
        with pytest.raises(ValueError):
            symmetric_rv_solve(flat, rng=rng, sigma=0.1)

    @pytest.mark.parametrize("seed", range(30))
    def test_matches_oracle_on_smoothed_instances(self, seed):
        inst, rng = make_unit_instance(3, 10, 0.1, 5_000 + seed)
        try:
            ref = oracle_solve(inst)
        except DegenerateInstance:
            return
        out = symmetric_rv_solve(inst, rng=rng)
        assert out.status == ref.status
        if ref.status == "optimal":
            assert out.value == pytest.approx(ref.value, rel=1e-9, abs=1e-9)
            assert np.allclose(out.x, ref.x, atol=1e-7)
            assert is_optimal_basis(inst, out.basis)
        else:
            tol = default_tol(inst)
            assert np.all(inst.A @ out.ray <= tol)
            assert float(inst.c @ out.ray) > tol

    def test_restart_accounting(self):
        inst, rng = make_unit_instance(3, 10, 0.1, 5_003)
        out = symmetric_rv_solve(inst, rng=rng)
        assert out.restarts_used == len(out.failure_reasons)
        assert out.pivots_total >= 0
        known = {
            "x0-singular", "x0-residual", "x0-infeasible", "lambda-singular",
            "lambda-degenerate", "x0-optimal-for-c", "cutoff-by-v", "postcheck-failed",
        }
        for reason in out.failure_reasons:
            assert reason in known or reason.startswith("shadow-")

    def test_sigma_above_ceiling_rescales_but_solves(self):
        # sigma far above sigma_bar: the instance is shrunk internally and
        # the answer still matches the oracle on the original
        inst, rng = make_unit_instance(3, 10, 0.5, 6_001)
        try:
            ref = oracle_solve(inst)
        except DegenerateInstance:
            pytest.skip("degenerate draw")
        out = symmetric_rv_solve(inst, rng=rng, sigma=0.5)
        assert out.status == ref.status
        if ref.status == "optimal":
            assert out.value == pytest.approx(ref.value, rel=1e-9, abs=1e-9)

    def test_oversized_rows_fall_back_to_reference_solver(self):
        A = np.vstack([np.eye(3) * 3.0, -np.eye(3)])  # rows of norm 3 > threshold
        inst = LPInstance(A=A, b=np.ones(6), c=np.array([1.0, 0.5, 0.25]))
        out = symmetric_rv_solve(inst, rng=np.random.default_rng(0), sigma=0.01)
        assert out.failure_reasons == ["fallback-oracle"]
        assert out.status == "optimal"
        ref = oracle_solve(inst)
        assert out.value == pytest.approx(ref.value, rel=1e-12)

    def test_restart_exhaustion_status(self):
        # a vanishing offset puts the start vertex at norm ~1/offset, far
        # outside the symmetric box |0.01 x_i| <= 1, so every attempt dies
        # during construction regardless of the random axis
        A = np.vstack([0.01 * np.eye(3), -0.01 * np.eye(3)])
        inst = LPInstance(A=A, b=np.ones(6), c=np.ones(3))
        cfg = SymRVConfig(offset=1e-9, max_restarts=5)
        out = symmetric_rv_solve(inst, cfg=cfg, rng=np.random.default_rng(1), sigma=0.01)
        assert out.status == "restart-exhausted"
        assert out.restarts_used == 5
        assert out.x is None and out.basis is None
        assert set(out.failure_reasons) <= {"x0-infeasible", "x0-residual", "x0-singular"}

    def test_unbounded_instances_certify_ray(self):
        hits = 0
        for seed in range(40):
            rng = np.random.default_rng(9_000 + seed)
            # centers pushed to one half-space: unboundedness is common
            centers = rng.standard_normal((8, 3))
            centers[:, 0] = -np.abs(centers[:, 0])
            centers /= np.maximum(np.linalg.norm(centers, axis=1, keepdims=True), 1.0)
            inst = LPInstance(
                A=centers + 0.05 * rng.standard_normal((8, 3)),
                b=np.ones(8),
                c=np.array([1.0, 0.1, 0.1]),
            )
            try:
                ref = oracle_solve(inst)
            except DegenerateInstance:
                continue
            if ref.status != "unbounded":
                continue
            out = symmetric_rv_solve(inst, rng=rng, sigma=0.05)
            assert out.status == "unbounded"
            tol = default_tol(inst)
            assert np.all(inst.A @ out.ray <= tol)
            assert float(inst.c @ out.ray) > tol
            hits += 1
        assert hits >= 5

    def test_loop_stats_counters(self):
        def make(rng):
            return random_smoothed_instance(3, 20, 0.008, "gaussian", rng)

        stats = symrv_loop_stats(make, 50, np.random.default_rng(42))
        assert stats["attempts"] == 50
        assert sum(stats["counts"].values()) == 50
        assert 0.0 <= stats["start_feasible_rate"] <= 1.0
        assert 0.0 <= stats["admissible_rate"] <= 1.0
        assert stats["success_rate"] <= stats["start_feasible_rate"] + 1e-12
        # construction health on genuinely smoothed data
        assert stats["start_feasible_rate"] >= 0.8
        assert stats["success_rate"] >= 0.1

    def test_outcome_json_dict(self):
        inst, rng = make_unit_instance(3, 10, 0.1, 5_010)
        out = symmetric_rv_solve(inst, rng=rng)
        payload = out.to_json_dict()
        assert payload["status"] == out.status
        assert payload["restarts_used"] == out.restarts_used
        assert payload["pivots_total"] == out.pivots_total
        if out.status == "optimal":
            assert payload["value"] == pytest.approx(out.value)


def sigma_bar_of(inst):
    from shadowlab import sigma_bar

    return sigma_bar(inst.d, inst.n)


def test_strategy_registry():
    assert PHASE1_STRATEGIES == ("symrv", "dd")
