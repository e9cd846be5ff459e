"""Heavy-tailed random sources and corrupted two-point function-value oracles.

Every sampler takes an explicit ``numpy.random.Generator``; nothing here owns
random state, so callers control reproducibility and may hand independent
streams to parallel workers.

Each scalar distribution carries a :class:`TailSpec` describing the density
envelope it satisfies,

    p(u) <= gamma^kappa * B^kappa / (B^{1+kappa} + |u|^{1+kappa}),

with ``delta = gamma * B`` for a single draw.  Oracles combine component
specs into the effective spec of the *difference* noise they produce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ParameterError

Objective = Callable[[np.ndarray], float]

# Density-envelope constants gamma(alpha) for the standard (scale-1) symmetric
# alpha-stable family, gamma^alpha = sup_u p(u) * (1 + |u|^{1+alpha}).
# Computed by numerical maximization against scipy's stable pdf; alpha=1 is
# exactly 1/pi (Cauchy).  Verified in tests/test_noise.py.
_STABLE_GAMMA = {
    0.5: 0.405285,
    0.75: 0.274271,
    1.0: 1.0 / math.pi,
    1.25: 0.505521,
    1.5: 0.684073,
    1.75: 0.848201,
    2.0: 0.995707,
}


def stable_gamma(alpha: float) -> float:
    """Envelope constant for the scale-1 symmetric alpha-stable density,
    linearly interpolated between tabulated grid points."""
    grid = sorted(_STABLE_GAMMA)
    if alpha <= grid[0]:
        return _STABLE_GAMMA[grid[0]]
    for lo, hi in zip(grid, grid[1:]):
        if alpha <= hi:
            w = (alpha - lo) / (hi - lo)
            return (1 - w) * _STABLE_GAMMA[lo] + w * _STABLE_GAMMA[hi]
    return _STABLE_GAMMA[grid[-1]]


@dataclass(frozen=True)
class TailSpec:
    """Tail index, noise scale and density constant of a symmetric noise."""

    kappa: float
    delta: float
    gamma: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ParameterError(f"kappa must be positive, got {self.kappa}")
        if self.delta < 0:
            raise ParameterError(f"delta must be nonnegative, got {self.delta}")
        floor = (1.0 / math.pi) ** (1.0 / self.kappa)
        if self.gamma < floor * (1 - 1e-9):
            raise ParameterError(
                f"gamma={self.gamma} below the normalization floor "
                f"(1/pi)^(1/kappa)={floor:.6g}"
            )


def sample_cauchy(scale: float, rng: np.random.Generator, size=None):
    """Symmetric Cauchy sample(s) with the given scale (median 0)."""
    if scale <= 0:
        raise ParameterError(f"Cauchy scale must be positive, got {scale}")
    return scale * rng.standard_cauchy(size)


def sample_levy_stable(alpha: float, rng: np.random.Generator, size=None, scale: float = 1.0):
    """Symmetric alpha-stable sample(s) via the trigonometric construction.

    One uniform on (-pi/2, pi/2) and one unit exponential per draw; exact and
    rejection-free.  alpha=2 is sampled as the matching centered Gaussian
    (variance 2*scale^2) because the trigonometric formula is numerically
    degenerate there, and alpha=1 reduces to tan(U) (Cauchy).
    """
    if not 0 < alpha <= 2:
        raise ParameterError(f"alpha must lie in (0, 2], got {alpha}")
    if scale <= 0:
        raise ParameterError(f"scale must be positive, got {scale}")
    if alpha == 2.0:
        return rng.normal(0.0, math.sqrt(2.0) * scale, size)
    u = rng.uniform(-np.pi / 2, np.pi / 2, size)
    if alpha == 1.0:
        return scale * np.tan(u)
    w = rng.exponential(1.0, size)
    x = (np.sin(alpha * u) / np.cos(u) ** (1.0 / alpha)) * (
        np.cos((1.0 - alpha) * u) / w
    ) ** ((1.0 - alpha) / alpha)
    return scale * x


class NoiseDistribution:
    """Scalar symmetric noise source with a declared tail envelope."""

    #: closed under weighted sums with the alpha-stable scale rule
    is_alpha_stable = False

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    @property
    def tail(self) -> TailSpec:
        raise NotImplementedError


@dataclass(frozen=True)
class CauchyNoise(NoiseDistribution):
    scale: float = 1.0
    is_alpha_stable = True

    def __post_init__(self):
        if self.scale <= 0:
            raise ParameterError(f"Cauchy scale must be positive, got {self.scale}")

    def sample(self, rng, size=None):
        return sample_cauchy(self.scale, rng, size)

    @property
    def tail(self):
        return TailSpec(kappa=1.0, delta=self.scale / math.pi, gamma=1.0 / math.pi)


@dataclass(frozen=True)
class LevyStableNoise(NoiseDistribution):
    alpha: float = 1.0
    scale: float = 1.0
    is_alpha_stable = True

    def __post_init__(self):
        if not 0 < self.alpha <= 2:
            raise ParameterError(f"alpha must lie in (0, 2], got {self.alpha}")
        if self.scale <= 0:
            raise ParameterError(f"scale must be positive, got {self.scale}")

    def sample(self, rng, size=None):
        return sample_levy_stable(self.alpha, rng, size, self.scale)

    @property
    def tail(self):
        g = stable_gamma(self.alpha)
        return TailSpec(kappa=self.alpha, delta=g * self.scale, gamma=g)


@dataclass(frozen=True)
class GaussianNoise(NoiseDistribution):
    """Standard normal by default; the alpha-stable family at alpha=2."""

    std: float = 1.0
    is_alpha_stable = True

    def __post_init__(self):
        if self.std <= 0:
            raise ParameterError(f"std must be positive, got {self.std}")

    def sample(self, rng, size=None):
        return rng.normal(0.0, self.std, size)

    @property
    def tail(self):
        # stable scale of N(0, std^2) is std/sqrt(2)
        g = stable_gamma(2.0)
        return TailSpec(kappa=2.0, delta=g * self.std / math.sqrt(2.0), gamma=g)


@dataclass(frozen=True)
class ZeroNoise(NoiseDistribution):
    """Exact oracle (delta = 0); kappa is nominal."""

    kappa: float = 2.0
    is_alpha_stable = True

    def sample(self, rng, size=None):
        return np.zeros(size) if size is not None else 0.0

    @property
    def tail(self):
        return TailSpec(kappa=self.kappa, delta=0.0, gamma=1.0)


@dataclass(frozen=True)
class MixtureNoise(NoiseDistribution):
    """w * xi_1 + (1-w) * |xi_2|: symmetric component plus an absolute-value
    (asymmetric) component.  w=1 degenerates to the pure symmetric noise."""

    weight: float
    symmetric: NoiseDistribution
    asymmetric: NoiseDistribution

    def __post_init__(self):
        if not 0 <= self.weight <= 1:
            raise ParameterError(f"mixture weight must lie in [0, 1], got {self.weight}")

    def sample(self, rng, size=None):
        s = self.symmetric.sample(rng, size)
        a = self.asymmetric.sample(rng, size)
        return self.weight * s + (1.0 - self.weight) * np.abs(a)

    @property
    def tail(self):
        # Scheduling heuristic only: the mixture is not symmetric, so no
        # envelope in the Assumption-3 sense exists; we report the symmetric
        # component's index with a weight-blended scale.
        ts, ta = self.symmetric.tail, self.asymmetric.tail
        delta = self.weight * ts.delta + (1.0 - self.weight) * ta.delta
        return TailSpec(kappa=ts.kappa, delta=delta, gamma=ts.gamma)


def sample_mixture(spec: MixtureNoise, rng: np.random.Generator, size=None):
    return spec.sample(rng, size)


class TwoPointOracle:
    """Base for oracles returning noisy (f(x, xi), f(y, xi)) pairs.

    A single call consumes one fresh noise realization shared by both values;
    ``eval_pairs`` consumes ``n`` realizations and is distributionally
    identical to ``n`` single calls.
    """

    mode: str

    def __init__(self, objective: Objective):
        self.objective = objective

    def eval_pair(self, x, y, rng) -> tuple[float, float]:
        fx, fy = self.eval_pairs(x, y, 1, rng)
        return float(fx[0]), float(fy[0])

    def eval_pairs(self, x, y, n, rng) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def difference_tail(self, x, y) -> TailSpec:
        """Assumption-satisfying spec of f(x, xi) - f(y, xi) - (f(x) - f(y))."""
        raise NotImplementedError

    @property
    def delta(self) -> float:
        """Uniform noise constant: the difference-noise scale itself for the
        independent oracle, per unit ||x - y||_2 for the Lipschitz oracle."""
        raise NotImplementedError

    @property
    def assumption_tail(self) -> TailSpec:
        """Tail spec carrying the mode-appropriate uniform Delta, the one the
        second-moment formulas expect."""
        t = self.noise.tail
        return TailSpec(kappa=t.kappa, delta=self.delta, gamma=t.gamma)


class IndependentOracle(TwoPointOracle):
    """f(x, xi) = f(x) + xi_x with independent scalar draws per point; the
    difference-noise distribution does not depend on (x, y)."""

    mode = "independent"

    def __init__(self, objective: Objective, noise: NoiseDistribution):
        super().__init__(objective)
        self.noise = noise

    def eval_pairs(self, x, y, n, rng):
        fx = float(self.objective(np.asarray(x, dtype=float)))
        fy = float(self.objective(np.asarray(y, dtype=float)))
        xi_x = self.noise.sample(rng, n)
        xi_y = self.noise.sample(rng, n)
        return fx + xi_x, fy + xi_y

    @property
    def delta(self):
        t = self.noise.tail
        if self.noise.is_alpha_stable:
            # xi_x - xi_y is stable with scale s * 2^{1/kappa}
            return t.delta * 2.0 ** (1.0 / t.kappa)
        return 2.0 * t.delta

    def difference_tail(self, x=None, y=None):
        t = self.noise.tail
        return TailSpec(kappa=t.kappa, delta=self.delta, gamma=t.gamma)


class LipschitzOracle(TwoPointOracle):
    """f(x, xi) = f(x) + <xi, x> with one d-dimensional draw shared by both
    points, so the difference noise <xi, x - y> vanishes as x -> y."""

    mode = "lipschitz"

    def __init__(
        self,
        objective: Objective,
        noise: NoiseDistribution,
        dim: int,
        correlation: Optional[np.ndarray] = None,
    ):
        super().__init__(objective)
        self.noise = noise
        self.dim = int(dim)
        if correlation is not None:
            correlation = np.asarray(correlation, dtype=float)
            if correlation.shape != (self.dim, self.dim):
                raise ParameterError("correlation matrix must be d x d")
        self.correlation = correlation

    def sample_vectors(self, n, rng) -> np.ndarray:
        xi = self.noise.sample(rng, (n, self.dim))
        if self.correlation is not None:
            xi = xi @ self.correlation.T
        return xi

    def eval_pairs(self, x, y, n, rng):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        fx = float(self.objective(x))
        fy = float(self.objective(y))
        xi = self.sample_vectors(n, rng)
        return fx + xi @ x, fy + xi @ y

    @property
    def delta(self):
        # gamma * B(x, y) <= delta_component * d^{max(1/kappa - 1/2, 0)}
        #                    * ||A||_2 * ||x - y||_2
        t = self.noise.tail
        dim_factor = self.dim ** max(1.0 / t.kappa - 0.5, 0.0)
        corr_factor = 1.0
        if self.correlation is not None:
            corr_factor = float(np.linalg.norm(self.correlation, 2))
        return t.delta * dim_factor * corr_factor

    def difference_tail(self, x, y):
        t = self.noise.tail
        dist = float(np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)))
        return TailSpec(kappa=t.kappa, delta=self.delta * dist, gamma=t.gamma)


def eval_pair_independent(oracle: IndependentOracle, x, y, rng):
    return oracle.eval_pair(x, y, rng)


def eval_pair_lipschitz(oracle: LipschitzOracle, x, y, rng):
    return oracle.eval_pair(x, y, rng)
