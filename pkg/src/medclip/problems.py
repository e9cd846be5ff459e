"""Synthetic benchmark objectives with deterministic reference optima."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize

from .errors import ParameterError


@dataclass
class Problem:
    """A deterministic objective plus the constants solvers need.

    ``x_star``/``f_star`` are reference values for gap reporting; ``M2`` is a
    Lipschitz constant valid on the region the solver is expected to visit.
    """

    objective: Callable[[np.ndarray], float]
    d: int
    M2: float
    x0: np.ndarray
    x_star: Optional[np.ndarray] = None
    f_star: Optional[float] = None
    name: str = "problem"
    mu: float = 0.0  # strong-convexity modulus, 0 when merely convex
    extras: dict = field(default_factory=dict)

    def gap(self, x: np.ndarray) -> Optional[float]:
        if self.f_star is None:
            return None
        return float(self.objective(x)) - self.f_star


def make_least_squares(d: int, l: int, seed: int, planted: bool = False) -> Problem:
    """min_x ||A x - b||_2 with standard-normal A (l x d) and b.

    ``M2`` is the largest singular value of A (the Lipschitz constant of the
    norm composition); the reference optimum comes from a deterministic
    least-norm solve.  With ``planted`` the system is consistent (b = A x0),
    so the optimal value is exactly 0.
    """
    if d < 1 or l < 1:
        raise ParameterError("least-squares dimensions must be >= 1")
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(l, d))
    if planted:
        x_pl = rng.normal(size=d)
        b = A @ x_pl
    else:
        b = rng.normal(size=l)

    def objective(x):
        return float(np.linalg.norm(A @ x - b))

    x_star, *_ = np.linalg.lstsq(A, b, rcond=None)
    return Problem(
        objective=objective,
        d=d,
        M2=float(np.linalg.svd(A, compute_uv=False)[0]),
        x0=np.zeros(d),
        x_star=x_star,
        f_star=objective(x_star),
        name=f"least_squares(d={d}, l={l}, seed={seed})",
        extras={"A": A, "b": b},
    )


def make_strongly_convex(
    d: int, l: int, mu: float, seed: int, radius: float = 8.0
) -> Problem:
    """min_x ||A x - b||_2 + (mu/2) ||x||_2^2, a mu-strongly convex composite.

    The reference optimum is found by a deterministic derivative-free solve;
    ``M2`` bounds the Lipschitz constant on a ball of the given radius around
    the optimum.
    """
    if mu <= 0:
        raise ParameterError("mu must be positive for the strongly convex composite")
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(l, d))
    b = rng.normal(size=l)

    def objective(x):
        return float(np.linalg.norm(A @ x - b) + 0.5 * mu * np.dot(x, x))

    res = minimize(
        objective,
        np.zeros(d),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 200000, "maxfev": 200000},
    )
    x_star = res.x
    M2 = float(np.linalg.svd(A, compute_uv=False)[0]) + mu * (
        float(np.linalg.norm(x_star)) + radius
    )
    return Problem(
        objective=objective,
        d=d,
        M2=M2,
        x0=np.zeros(d),
        x_star=x_star,
        f_star=float(res.fun),
        name=f"strongly_convex(d={d}, l={l}, mu={mu}, seed={seed})",
        mu=mu,
        extras={"A": A, "b": b, "radius": radius},
    )


def make_linear(c: np.ndarray, x0: Optional[np.ndarray] = None) -> Problem:
    """min <c, x>; over the simplex the optimum sits at the best vertex."""
    c = np.asarray(c, dtype=float)
    d = c.shape[0]
    if x0 is None:
        x0 = np.full(d, 1.0 / d)
    i = int(np.argmin(c))
    x_star = np.zeros(d)
    x_star[i] = 1.0
    return Problem(
        objective=lambda x: float(np.dot(c, x)),
        d=d,
        M2=float(np.linalg.norm(c)),
        x0=np.asarray(x0, dtype=float),
        x_star=x_star,
        f_star=float(c[i]),
        name=f"linear(d={d})",
        extras={"c": c},
    )
