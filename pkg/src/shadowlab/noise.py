"""Perturbation models for smoothed LP instances.

Three noise families, all mean-zero and isotropic:

  * gaussian  -- N(0, sigma^2 I).
  * laplace   -- rotationally symmetric exponential density
                 exp(-||x|| sqrt(d)/sigma), normalized so the expected
                 norm is sigma*sqrt(d) and the directional variance is
                 sigma^2 (1 + 1/d).
  * lg        -- "capped Gaussian": Gaussian density inside the ball of
                 radius r*sigma, glued to an exponential radial tail
                 outside, so the density is globally log-Lipschitz.

Alongside the samplers this module certifies the four distribution
parameters the shadow-size machinery consumes (log-Lipschitz constant L,
minimum line standard deviation tau, cutoff radius R_nd, n-th deviation
r_n), evaluates the closed-form tail bounds for each family, and
estimates tail-event frequencies by Monte Carlo.  Natural logarithms
throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import special

from .lp import LPInstance

GAUSSIAN = "gaussian"
LAPLACE = "laplace"
LAPLACE_GAUSSIAN = "lg"
KINDS = (GAUSSIAN, LAPLACE, LAPLACE_GAUSSIAN)


class DomainError(ValueError):
    """Parameter outside the domain where the certified formulas hold."""


def default_lg_radius(d: int, n: int) -> float:
    """Radius (in units of sigma) at which the lg density switches to its tail."""
    if n < 2:
        raise DomainError("lg radius default needs n >= 2 so log n > 0")
    return 4.0 * math.sqrt(d * math.log(n))


def sigma_bar(d: int, n: int) -> float:
    """Largest noise scale the randomized Phase I is calibrated for: 1/(36 sqrt(d ln n))."""
    if n < 2 or d < 1:
        raise DomainError("sigma_bar needs d >= 1 and n >= 2")
    return 1.0 / (36.0 * math.sqrt(d * math.log(n)))


@dataclass(frozen=True)
class NoiseSpec:
    """Noise family plus scale; lg_radius applies to kind='lg' only.

    lg_radius = None defers to default_lg_radius(d, n) once the ambient
    dimension and row count are known; use resolved() to pin it.
    """

    kind: str
    sigma: float
    lg_radius: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {KINDS}")
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be positive and finite")
        if self.lg_radius is not None:
            if self.kind != LAPLACE_GAUSSIAN:
                raise ValueError("lg_radius only applies to kind='lg'")
            if not (self.lg_radius > 0.0 and math.isfinite(self.lg_radius)):
                raise ValueError("lg_radius must be positive and finite")

    def resolved(self, d: int, n: int) -> "NoiseSpec":
        """Copy with the lg radius defaulted from (d, n) when left unset."""
        if self.kind == LAPLACE_GAUSSIAN and self.lg_radius is None:
            return replace(self, lg_radius=default_lg_radius(d, n))
        return self

    def to_json_dict(self) -> dict:
        out = {"kind": self.kind, "sigma": self.sigma}
        if self.lg_radius is not None:
            out["lg_radius"] = self.lg_radius
        return out

    @classmethod
    def from_json_dict(cls, obj: dict) -> "NoiseSpec":
        return cls(obj["kind"], float(obj["sigma"]), obj.get("lg_radius"))


# ---------------------------------------------------------------------------
# samplers


def _unit_directions(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((size, d))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return g / norms


def _lg_log_masses(d: int, r: float) -> tuple[float, float]:
    """Log radial masses (up to one shared constant) of the two lg branches.

    Inside the ball of radius r (sigma = 1 units) the radial mass is
    2^(d/2-1) Gamma(d/2) P(d/2, r^2/2); the tail contributes
    e^(r^2/2) r^(-d) Gamma(d) Q(d, r^2), with P/Q the regularized
    incomplete gamma functions.
    """
    p_lower = special.gammainc(d / 2.0, r * r / 2.0)
    q_upper = special.gammaincc(float(d), r * r)
    log_in = (d / 2.0 - 1.0) * math.log(2.0) + math.lgamma(d / 2.0) + (
        math.log(p_lower) if p_lower > 0.0 else -math.inf
    )
    log_out = r * r / 2.0 - d * math.log(r) + math.lgamma(float(d)) + (
        math.log(q_upper) if q_upper > 0.0 else -math.inf
    )
    return log_in, log_out


def lg_inside_probability(d: int, r: float) -> float:
    """Probability that an lg sample lands inside its Gaussian ball."""
    log_in, log_out = _lg_log_masses(d, r)
    if log_out == -math.inf:
        return 1.0
    if log_in == -math.inf:
        return 0.0
    return 1.0 / (1.0 + math.exp(log_out - log_in))


def _sample_lg(d: int, sigma: float, r: float, size: int, rng: np.random.Generator) -> np.ndarray:
    p_in = lg_inside_probability(d, r)
    inside = rng.random(size) < p_in
    out = np.empty((size, d))

    n_in = int(inside.sum())
    if n_in:
        # Gaussian conditioned on the ball, by rejection.  The acceptance
        # rate equals P(chi2_d <= r^2); oversample against its estimate.
        accept_est = max(float(special.gammainc(d / 2.0, r * r / 2.0)), 1e-6)
        got: list[np.ndarray] = []
        need = n_in
        while need > 0:
            batch = rng.standard_normal((int(need / accept_est) + 8, d))
            ok = batch[np.linalg.norm(batch, axis=1) <= r]
            got.append(ok[:need])
            need -= len(ok[:need])
        out[inside] = sigma * np.vstack(got)

    n_out = size - n_in
    if n_out:
        # Radial tail: v = r*t/sigma follows Gamma(d, 1) truncated to
        # [r^2, inf); invert its upper CDF directly.
        q_r = special.gammaincc(float(d), r * r)
        u = rng.random(n_out)
        v = special.gammainccinv(float(d), u * q_r)
        t = sigma * v / r
        out[~inside] = t[:, None] * _unit_directions(d, n_out, rng)
    return out


def sample_noise_batch(spec: NoiseSpec, d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """size-by-d array of independent mean-zero noise vectors."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if spec.kind == GAUSSIAN:
        return spec.sigma * rng.standard_normal((size, d))
    if spec.kind == LAPLACE:
        s = rng.gamma(shape=float(d), scale=spec.sigma / math.sqrt(d), size=size)
        return s[:, None] * _unit_directions(d, size, rng)
    if spec.lg_radius is None:
        raise ValueError("lg sampling needs lg_radius; call spec.resolved(d, n) first")
    return _sample_lg(d, spec.sigma, spec.lg_radius, size, rng)


def sample_noise(spec: NoiseSpec, d: int, rng: np.random.Generator) -> np.ndarray:
    """One mean-zero noise vector in R^d."""
    return sample_noise_batch(spec, d, 1, rng)[0]


def density_lg(x: np.ndarray, center: np.ndarray, sigma: float, r: float) -> float:
    """Unnormalized lg density at x: Gaussian inside radius r*sigma, exponential outside."""
    if sigma <= 0.0 or r <= 0.0:
        raise ValueError("sigma and r must be positive")
    t = float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(center, dtype=float)))
    if t <= r * sigma:
        return math.exp(-t * t / (2.0 * sigma * sigma))
    return math.exp(-t * r / sigma + r * r / 2.0)


# ---------------------------------------------------------------------------
# certified parameters


@dataclass(frozen=True)
class DistributionCertificate:
    """Certified (L, tau, R_nd, r_n); L is None when no log-Lipschitz bound exists."""

    L: Optional[float]
    tau: float
    R_nd: float
    r_n: float

    def to_json_dict(self) -> dict:
        return {"L": self.L, "tau": self.tau, "R_nd": self.R_nd, "r_n": self.r_n}


def _smallest_root_increasing(g, lo: float, hi: float, iters: int = 200) -> float:
    """Smallest u in [lo, hi] with g(u) >= 0, for g increasing; bisection."""
    if g(lo) >= 0.0:
        return lo
    while g(hi) < 0.0:
        lo, hi = hi, hi * 2.0
        if hi > 1e18:
            raise RuntimeError("bisection bracket blew up")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if g(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi


def certificate(kind: str, d: int, n: int, sigma: float) -> DistributionCertificate:
    """Certified distribution parameters for the given family at scale sigma.

    laplace and lg carry closed forms; the Gaussian has no log-Lipschitz
    constant, and its cutoff radius / n-th deviation come from inverting
    the Gaussian tail bounds numerically: R_nd solves
    exp(-(d/2)(t-1)^2) = 1/(d C(n,d)) with R_nd = t sigma sqrt(d), and
    r_n = sigma*u where u is smallest with
    sqrt(2 pi) erfc(u/sqrt(2)) <= u/n (the integrated directional tail).
    """
    if d < 3:
        raise DomainError("certificates require d >= 3")
    if n < d:
        raise DomainError("certificates require n >= d")
    if sigma <= 0.0:
        raise DomainError("sigma must be positive")
    ln_n = math.log(n)
    if kind == LAPLACE:
        return DistributionCertificate(
            L=math.sqrt(d) / sigma,
            tau=sigma / math.sqrt(d * math.e),
            R_nd=14.0 * sigma * math.sqrt(d) * ln_n,
            r_n=7.0 * sigma * ln_n,
        )
    if kind == LAPLACE_GAUSSIAN:
        root = math.sqrt(d * ln_n)
        return DistributionCertificate(
            L=4.0 * root / sigma,
            tau=sigma / 4.0,
            R_nd=4.0 * sigma * root,
            r_n=4.0 * sigma * math.sqrt(ln_n),
        )
    if kind == GAUSSIAN:
        target = math.log(d) + math.lgamma(n + 1) - math.lgamma(d + 1) - math.lgamma(n - d + 1)
        t_star = _smallest_root_increasing(lambda t: 0.5 * d * (t - 1.0) ** 2 - target, 1.0, 2.0)
        u_star = _smallest_root_increasing(
            lambda u: u / n - math.sqrt(2.0 * math.pi) * special.erfc(u / math.sqrt(2.0)),
            1e-12,
            2.0,
        )
        return DistributionCertificate(
            L=None,
            tau=sigma,
            R_nd=t_star * sigma * math.sqrt(d),
            r_n=sigma * u_star,
        )
    raise ValueError(f"unknown noise kind {kind!r}")


# ---------------------------------------------------------------------------
# tail bounds and their Monte-Carlo counterparts


def gaussian_norm_bound(d: int, t: float) -> float:
    """Pr[||X|| >= t sigma sqrt(d)] <= exp(-(d/2)(t-1)^2), valid for t >= 1."""
    if t < 1.0:
        return 1.0
    return math.exp(-0.5 * d * (t - 1.0) ** 2)


def gaussian_dir_bound(t: float) -> float:
    """Pr[|<X, theta>| >= t sigma] <= 2 exp(-t^2/2)."""
    return 2.0 * math.exp(-t * t / 2.0)


def laplace_norm_bound(d: int, t: float, form: str = "exact") -> float:
    """Pr[||X|| >= t sigma sqrt(d)]: exp(-d(t - ln t - 1)) for t >= 1,
    or the weaker linear form exp(-d t / 7) for t >= 2."""
    if form == "exact":
        if t < 1.0:
            return 1.0
        return math.exp(-d * (t - math.log(t) - 1.0))
    if form == "linear":
        if t < 2.0:
            return 1.0
        return math.exp(-d * t / 7.0)
    raise ValueError("form must be 'exact' or 'linear'")


def laplace_dir_bound(d: int, t: float) -> float:
    """Pr[|<X, theta>| >= t sigma]: 2 exp(-t^2/16) up to t = 2 sqrt(d), then exp(-sqrt(d) t/7)."""
    if t <= 2.0 * math.sqrt(d):
        return 2.0 * math.exp(-t * t / 16.0)
    return math.exp(-math.sqrt(d) * t / 7.0)


def lg_norm_bound(r: float, t: float) -> float:
    """Pr[||X|| >= sigma t] <= exp(-r t / 4), valid for t >= r."""
    if t < r:
        return 1.0
    return math.exp(-r * t / 4.0)


def lg_dir_bound(r: float, t: float) -> float:
    """Pr[|<X, theta>| >= sigma t]: 3 exp(-t^2/4) up to t = r, then exp(-r t / 4)."""
    if t >= r:
        return math.exp(-r * t / 4.0)
    return 3.0 * math.exp(-t * t / 4.0)


@dataclass
class NormTail:
    """Event ||X|| >= t * sigma * sqrt(d) (gaussian, laplace) or ||X|| >= t * sigma (lg).

    The scaling matches the parametrization in which each family's norm
    bound is stated, so empirical_tail(spec, d, NormTail(t), ...) is
    directly comparable with the matching *_norm_bound(t).
    """

    t: float


@dataclass
class DirTail:
    """Event |<X, theta>| >= t * sigma, theta normalized internally."""

    theta: np.ndarray
    t: float


def empirical_tail(spec: NoiseSpec, d: int, test, samples: int, rng: np.random.Generator) -> float:
    """Empirical frequency of the tail event over the given sample count."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    x = sample_noise_batch(spec, d, samples, rng)
    if isinstance(test, NormTail):
        scale = spec.sigma if spec.kind == LAPLACE_GAUSSIAN else spec.sigma * math.sqrt(d)
        return float(np.mean(np.linalg.norm(x, axis=1) >= test.t * scale))
    if isinstance(test, DirTail):
        theta = np.asarray(test.theta, dtype=float)
        theta = theta / np.linalg.norm(theta)
        return float(np.mean(np.abs(x @ theta) >= test.t * spec.sigma))
    raise TypeError("test must be NormTail or DirTail")


def tail_bound(spec: NoiseSpec, d: int, test) -> float:
    """Tightest stated bound applicable to the event of empirical_tail."""
    if isinstance(test, NormTail):
        if spec.kind == GAUSSIAN:
            return gaussian_norm_bound(d, test.t)
        if spec.kind == LAPLACE:
            return min(
                laplace_norm_bound(d, test.t, "exact"),
                laplace_norm_bound(d, test.t, "linear"),
            )
        if spec.lg_radius is None:
            raise ValueError("lg bound needs lg_radius")
        return lg_norm_bound(spec.lg_radius, test.t)
    if isinstance(test, DirTail):
        if spec.kind == GAUSSIAN:
            return gaussian_dir_bound(test.t)
        if spec.kind == LAPLACE:
            return laplace_dir_bound(d, test.t)
        if spec.lg_radius is None:
            raise ValueError("lg bound needs lg_radius")
        return lg_dir_bound(spec.lg_radius, test.t)
    raise TypeError("test must be NormTail or DirTail")


# ---------------------------------------------------------------------------
# smoothed instances


@dataclass
class SmoothedModel:
    """Centers plus noise spec; sample_instance draws perturbed LPs from it.

    perturb_rhs=False is the unit model: b is exactly all-ones and only A
    is perturbed, with center rows of norm <= 1.  perturb_rhs=True
    perturbs (A, b) jointly, one (d+1)-dimensional noise draw per row,
    with rows of [centers | b_bar] of norm <= 1.
    """

    centers: np.ndarray
    c: np.ndarray
    noise: NoiseSpec
    perturb_rhs: bool = False
    b_bar: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.centers = np.asarray(self.centers, dtype=float)
        self.c = np.asarray(self.c, dtype=float)
        if self.centers.ndim != 2:
            raise ValueError("centers must be an n-by-d matrix")
        n, d = self.centers.shape
        if d < 2 or n < d:
            raise ValueError(f"need n >= d >= 2, got n={n}, d={d}")
        if self.c.shape != (d,) or not np.any(self.c):
            raise ValueError("c must be a nonzero d-vector")
        if self.perturb_rhs:
            if self.b_bar is None:
                raise ValueError("perturb_rhs=True needs b_bar")
            self.b_bar = np.asarray(self.b_bar, dtype=float)
            if self.b_bar.shape != (n,):
                raise ValueError("b_bar must be an n-vector")
            rows = np.hstack([self.centers, self.b_bar[:, None]])
        else:
            if self.b_bar is not None:
                raise ValueError("b_bar only applies with perturb_rhs=True")
            rows = self.centers
        norms = np.linalg.norm(rows, axis=1)
        if norms.max() > 1.0 + 1e-9:
            raise ValueError(f"center rows must have norm <= 1 (max {norms.max():.6g})")

    @property
    def n(self) -> int:
        return self.centers.shape[0]

    @property
    def d(self) -> int:
        return self.centers.shape[1]


def sample_instance(model: SmoothedModel, rng: np.random.Generator) -> LPInstance:
    """One perturbed instance: A = centers + noise, b = 1 or b_bar + noise."""
    n, d = model.n, model.d
    if model.perturb_rhs:
        spec = model.noise.resolved(d + 1, n)
        e = sample_noise_batch(spec, d + 1, n, rng)
        a = model.centers + e[:, :d]
        b = model.b_bar + e[:, d]
    else:
        spec = model.noise.resolved(d, n)
        a = model.centers + sample_noise_batch(spec, d, n, rng)
        b = np.ones(n)
    meta = dict(model.meta)
    meta.update(noise=spec.to_json_dict(), perturb_rhs=model.perturb_rhs)
    return LPInstance(A=a, b=b, c=model.c.copy(), meta=meta)
