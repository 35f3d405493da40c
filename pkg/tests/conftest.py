"""Shared test fixtures and instance factories."""

from __future__ import annotations

import numpy as np
import pytest

from shadowlab import LPInstance, NoiseSpec, SmoothedModel, sample_instance


def unit_square() -> LPInstance:
    """The axis-aligned square {x : x1 <= 1, x2 <= 1, -x1 <= 1, -x2 <= 1}."""
    A = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    return LPInstance(A=A, b=np.ones(4), c=np.array([1.0, 2.0]))


def random_unit_model(d: int, n: int, sigma: float, kind: str, rng: np.random.Generator,
                      perturb_rhs: bool = False) -> SmoothedModel:
    """Smoothed model with unit-sphere centers and a unit-sphere objective."""
    rows = d + 1 if perturb_rhs else d
    centers = rng.standard_normal((n, rows))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    c = rng.standard_normal(d)
    c /= np.linalg.norm(c)
    if perturb_rhs:
        return SmoothedModel(centers=centers[:, :d], c=c, noise=NoiseSpec(kind, sigma),
                             perturb_rhs=True, b_bar=centers[:, d])
    return SmoothedModel(centers=centers, c=c, noise=NoiseSpec(kind, sigma))


def random_smoothed_instance(d: int, n: int, sigma: float, kind: str,
                             rng: np.random.Generator,
                             perturb_rhs: bool = False) -> LPInstance:
    model = random_unit_model(d, n, sigma, kind, rng, perturb_rhs=perturb_rhs)
    return sample_instance(model, rng)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260819)
