"""Two-point smoothed gradient estimation with median filtering and clipping.

The single-direction estimator is

    g(x, e, xi) = d/(2*tau) * (f(x + tau*e, xi) - f(x - tau*e, xi)) * e,

the median estimator takes 2m+1 fresh realizations at the same (x, e), and the
batched variant averages b median estimates over fresh directions.  Because all
2m+1 samples share e they are collinear, so the component-wise median equals
the scalar median of the 2m+1 noisy differences times e; we compute it that
way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ScheduleError
from .noise import TailSpec, TwoPointOracle


@dataclass(frozen=True)
class MedianEstimatorConfig:
    """Median half-size m (2m+1 samples), direction batch b, smoothing radius
    tau, and the norm index q used for clipping and moment measurement."""

    m: int = 0
    b: int = 1
    tau: float = 1e-2
    q: float = 2.0

    def __post_init__(self):
        if self.m < 0:
            raise ParameterError(f"median half-size m must be >= 0, got {self.m}")
        if self.b < 1:
            raise ParameterError(f"batch size b must be >= 1, got {self.b}")
        if self.tau <= 0:
            raise ParameterError(f"smoothing radius tau must be positive, got {self.tau}")
        if not (self.q >= 2 or math.isinf(self.q)):
            raise ParameterError(f"norm index q must lie in [2, inf], got {self.q}")

    @property
    def samples_per_median(self) -> int:
        return 2 * self.m + 1

    @property
    def calls_per_estimate(self) -> int:
        return self.samples_per_median * self.b


@dataclass(frozen=True)
class GradientSample:
    """A gradient estimate plus the exact number of pair-evaluations spent."""

    value: np.ndarray
    oracle_calls: int


def sample_unit_sphere(d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform direction on the unit Euclidean sphere (normalized Gaussian)."""
    if d < 1:
        raise ParameterError(f"dimension must be >= 1, got {d}")
    while True:
        e = rng.normal(size=d)
        norm = np.linalg.norm(e)
        if norm > 0:  # astronomically unlikely to loop
            return e / norm


def two_point_estimate(oracle: TwoPointOracle, x, e, tau: float, rng) -> np.ndarray:
    """Single-realization estimate of the smoothed gradient at x."""
    if tau <= 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    fp, fm = oracle.eval_pair(x + tau * e, x - tau * e, rng)
    return (d / (2.0 * tau)) * (fp - fm) * e


def median_estimate(oracle: TwoPointOracle, x, e, config: MedianEstimatorConfig, rng) -> np.ndarray:
    """Component-wise median of 2m+1 samples sharing (x, e)."""
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    tau = config.tau
    fp, fm = oracle.eval_pairs(x + tau * e, x - tau * e, config.samples_per_median, rng)
    med = float(np.median(fp - fm))
    return (d / (2.0 * tau)) * med * e


def batch_median_estimate(oracle: TwoPointOracle, x, config: MedianEstimatorConfig, rng) -> GradientSample:
    """Mean of b median estimates, each with a fresh direction and a fresh
    block of realizations; never reuses realizations across directions."""
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    acc = np.zeros(d)
    for _ in range(config.b):
        e = sample_unit_sphere(d, rng)
        acc += median_estimate(oracle, x, e, config, rng)
    return GradientSample(value=acc / config.b, oracle_calls=config.calls_per_estimate)


def norm_q(g: np.ndarray, q: float) -> float:
    if math.isinf(q):
        return float(np.max(np.abs(g))) if g.size else 0.0
    return float(np.sum(np.abs(g) ** q) ** (1.0 / q))


def clip(g: np.ndarray, lam: float, q: float = 2.0) -> np.ndarray:
    """Rescale g so that its l_q norm never exceeds lam; clip(0) = 0 (the
    continuous extension at the origin)."""
    if lam <= 0:
        raise ParameterError(f"clipping level must be positive, got {lam}")
    if not (q >= 2 or math.isinf(q)):
        raise ParameterError(f"norm index q must lie in [2, inf], got {q}")
    g = np.asarray(g, dtype=float)
    n = norm_q(g, q)
    if n == 0.0 or n <= lam:
        return g.copy()
    return g * (lam / n)


def dual_norm_factor(d: int, q: float) -> float:
    """a_q = d^{1/q - 1/2} * min{sqrt(32 ln d - 8), sqrt(2q - 1)}.

    The sphere-moment constant with E||e||_q^2 <= a_q^2; equals 1 at d = 1
    where every l_q norm coincides.
    """
    if d < 1:
        raise ParameterError(f"dimension must be >= 1, got {d}")
    if d == 1:
        return 1.0
    log_term = 32.0 * math.log(d) - 8.0
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    terms = [math.sqrt(log_term)] if log_term > 0 else []
    if not math.isinf(q):
        terms.append(math.sqrt(2.0 * q - 1.0))
    return d ** (inv_q - 0.5) * min(terms)


def sigma_bound(
    config: MedianEstimatorConfig,
    d: int,
    M2: float,
    tail: TailSpec,
    mode: str,
) -> float:
    """Second-moment constant sigma of the median estimator.

    Independent oracle:  sigma^2 = 8 d M2^2 + 2 (d Delta / tau)^2 (2m+1) (4/kappa)^{2/kappa}
    Lipschitz oracle:    sigma^2 = 8 d M2^2 + (16m+8) d^2 Delta^2 (4/kappa)^{2/kappa}

    Valid only when m > 2/kappa; the unbatched l_q error moment is bounded by
    (sigma * a_q)^2 and the batched l_2 moment by sigma^2 / b.
    """
    m, kappa, delta = config.m, tail.kappa, tail.delta
    if not m > 2.0 / kappa:
        raise ScheduleError(
            f"median size m={m} must exceed 2/kappa={2.0 / kappa:.4g} for the "
            "second-moment bound to hold"
        )
    tail_factor = (4.0 / kappa) ** (2.0 / kappa)
    if mode == "independent":
        var = 8.0 * d * M2**2 + 2.0 * (d * delta / config.tau) ** 2 * (2 * m + 1) * tail_factor
    elif mode == "lipschitz":
        var = 8.0 * d * M2**2 + (16.0 * m + 8.0) * d**2 * delta**2 * tail_factor
    else:
        raise ParameterError(f"unknown oracle mode {mode!r}")
    return math.sqrt(var)


def median_size_for(kappa: float) -> int:
    """Smallest integer median size satisfying the strict m > 2/kappa
    condition following the m = 2/kappa + 1 prescription: ceil(2/kappa) + 1."""
    if kappa <= 0:
        raise ParameterError(f"kappa must be positive, got {kappa}")
    return math.ceil(2.0 / kappa) + 1
