"""Prox-functions, conjugates, Bregman divergences and Bregman projections.

Three prox setups are supported:

* Ball:     Psi(x) = ||x||_2^2 / 2          (p = 2, q = 2)
* Entropy:  Psi(x) = (1+g) sum (x_i + g/d) log(x_i + g/d)   (p = 1, q = inf)
* Tsallis12: psi(x) = 2 (1 - sum sqrt(x_i)) on the simplex  (p = 1, q = inf)

All functions are stateless and safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError, ParameterError

# Coordinates are kept at or above this floor during mirror steps to protect
# the x^{-1/2} singularity of the Tsallis gradient at the simplex boundary.
SIMPLEX_FLOOR = 1e-12

_ROOT_TOL = 1e-10
_ROOT_MAX_ITER = 200


@dataclass(frozen=True)
class FeasibleSet:
    kind: str  # "whole_space" | "simplex" | "unit_ball"
    d: int
    p: float = 2.0  # unit_ball only

    @classmethod
    def whole_space(cls, d: int) -> "FeasibleSet":
        return cls("whole_space", d)

    @classmethod
    def simplex(cls, d: int) -> "FeasibleSet":
        return cls("simplex", d)

    @classmethod
    def unit_ball(cls, d: int, p: float = 2.0) -> "FeasibleSet":
        return cls("unit_ball", d, p)


def project_simplex_euclidean(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, len(y) + 1)
    cond = u - css / ks > 0
    rho = np.nonzero(cond)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(y - theta, 0.0)


def _project_l1_ball(y: np.ndarray) -> np.ndarray:
    if np.sum(np.abs(y)) <= 1.0:
        return y.copy()
    signs = np.sign(y)
    return signs * project_simplex_euclidean(np.abs(y))


class ProxSetup:
    """Interface of a prox-function: gradient, conjugate gradient, Bregman
    divergence, Bregman projection, minimizer and diameter over a set."""

    id: str
    p: float
    q: float

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def grad(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def conjugate_grad(self, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bregman(self, y: np.ndarray, x: np.ndarray) -> float:
        y = np.asarray(y, dtype=float)
        x = np.asarray(x, dtype=float)
        g = self.grad(x)
        return float(self.value(y) - self.value(x) - g @ (y - x))

    def argmin(self, fset: FeasibleSet) -> np.ndarray:
        raise NotImplementedError

    def project(self, fset: FeasibleSet, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def diameter(self, fset: FeasibleSet) -> float:
        """D with D^2 = 2 sup_{x,y in Q} V(x, y)."""
        raise NotImplementedError


class BallSetup(ProxSetup):
    id = "ball"
    p = 2.0
    q = 2.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * float(x @ x)

    def grad(self, x):
        return np.asarray(x, dtype=float).copy()

    def conjugate_grad(self, theta):
        return np.asarray(theta, dtype=float).copy()

    def argmin(self, fset):
        if fset.kind == "simplex":
            return np.full(fset.d, 1.0 / fset.d)
        return np.zeros(fset.d)

    def project(self, fset, y):
        y = np.asarray(y, dtype=float)
        if fset.kind == "whole_space":
            return y.copy()
        if fset.kind == "simplex":
            return project_simplex_euclidean(y)
        if fset.kind == "unit_ball":
            if fset.p == 2.0:
                n = np.linalg.norm(y)
                return y if n <= 1.0 else y / n
            if math.isinf(fset.p):
                return np.clip(y, -1.0, 1.0)
            if fset.p == 1.0:
                return _project_l1_ball(y)
        raise ParameterError(f"unsupported set for Ball setup: {fset}")

    def diameter(self, fset):
        if fset.kind == "unit_ball":
            if fset.p == 2.0 or fset.p == 1.0:
                return 2.0  # D^2 = 2 sup ||x-y||^2/2 = 4
            if math.isinf(fset.p):
                return 2.0 * math.sqrt(fset.d)
        if fset.kind == "simplex":
            return math.sqrt(2.0)  # sup ||x-y||_2^2 = 2 at vertex pairs
        raise ParameterError(f"diameter undefined for {fset} under Ball setup")


class EntropySetup(ProxSetup):
    """Shifted negative entropy; the shift gamma/d keeps the gradient finite
    on the closed simplex."""

    id = "entropy"
    p = 1.0
    q = math.inf

    def __init__(self, entropy_gamma: float = 1.0):
        if entropy_gamma <= 0:
            raise ParameterError("entropy gamma must be positive")
        self.entropy_gamma = entropy_gamma

    def _check_interior(self, x):
        if np.any(x <= 0):
            raise DomainError("Entropy setup requires strictly positive coordinates")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        g = self.entropy_gamma
        s = x + g / x.shape[0]
        return float((1.0 + g) * np.sum(s * np.log(s)))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        self._check_interior(x)
        g = self.entropy_gamma
        return (1.0 + g) * (np.log(x + g / x.shape[0]) + 1.0)

    def conjugate_grad(self, theta):
        theta = np.asarray(theta, dtype=float)
        g = self.entropy_gamma
        return np.exp(theta / (1.0 + g) - 1.0) - g / theta.shape[0]

    def argmin(self, fset):
        if fset.kind != "simplex":
            raise ParameterError("Entropy setup is defined over the simplex")
        return np.full(fset.d, 1.0 / fset.d)

    def project(self, fset, y):
        if fset.kind != "simplex":
            raise ParameterError("Entropy setup projects onto the simplex only")
        y = np.asarray(y, dtype=float)
        d = y.shape[0]
        shift = self.entropy_gamma / d
        base = y + shift
        if np.any(base <= 0):
            raise DomainError("point outside the entropy prox domain")

        # x_i(s) = max(base_i * s - shift, 0); sum is increasing in s
        def total(s):
            return float(np.sum(np.maximum(base * s - shift, 0.0)))

        lo, hi = 0.0, (1.0 + self.entropy_gamma) / float(np.sum(base))
        while total(hi) < 1.0:
            hi *= 2.0
        for _ in range(_ROOT_MAX_ITER):
            mid = 0.5 * (lo + hi)
            if abs(total(mid) - 1.0) <= _ROOT_TOL:
                break
            if total(mid) < 1.0:
                lo = mid
            else:
                hi = mid
        else:
            raise NumericalError(f"entropy projection did not converge for y={y!r}")
        x = np.maximum(base * mid - shift, 0.0)
        return x / np.sum(x)

    def diameter(self, fset):
        if fset.kind != "simplex":
            raise ParameterError("diameter defined on the simplex only")
        if fset.d == 1:
            return 0.0
        # sup V attained at vertex pairs: V(e_i, e_j) = (1+g) log(1 + d/g)
        g = self.entropy_gamma
        return math.sqrt(2.0 * (1.0 + g) * math.log(1.0 + fset.d / g))


class TsallisSetup(ProxSetup):
    """1/2-Tsallis entropy psi(x) = 2 (1 - sum sqrt(x_i))."""

    id = "tsallis12"
    p = 1.0
    q = math.inf

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("Tsallis setup requires nonnegative coordinates")
        return float(2.0 * (1.0 - np.sum(np.sqrt(x))))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise DomainError("Tsallis gradient requires strictly positive coordinates")
        return -1.0 / np.sqrt(x)

    def conjugate_grad(self, theta):
        theta = np.asarray(theta, dtype=float)
        if np.any(theta >= 0):
            raise DomainError(
                "Tsallis conjugate requires all dual coordinates negative; "
                "a violation signals the clipping level or stepsize is too large"
            )
        return 1.0 / theta**2

    def argmin(self, fset):
        if fset.kind != "simplex":
            raise ParameterError("Tsallis setup is defined over the simplex")
        return np.full(fset.d, 1.0 / fset.d)

    def project(self, fset, y):
        """Bregman projection onto the simplex: x_i = (y_i^{-1/2} - c)^{-2}
        with the scalar c solving sum x_i = 1, c < min_i y_i^{-1/2}."""
        if fset.kind != "simplex":
            raise ParameterError("Tsallis setup projects onto the simplex only")
        y = np.asarray(y, dtype=float)
        if np.any(y <= 0):
            raise DomainError("point outside the Tsallis prox domain")
        t = 1.0 / np.sqrt(y)
        c_max = float(np.min(t)) - 1e-14

        def total(c):
            return float(np.sum((t - c) ** -2.0))

        lo, hi = min(-1e12, c_max - 1.0), c_max
        converged = False
        c = lo
        for _ in range(_ROOT_MAX_ITER):
            c = 0.5 * (lo + hi)
            s = total(c)
            if s < 1.0:
                lo = c
            else:
                hi = c
            if abs(s - 1.0) <= _ROOT_TOL:
                converged = True
                break
        if not converged:
            # Newton polish on the monotone residual
            for _ in range(50):
                s = total(c)
                if abs(s - 1.0) <= _ROOT_TOL:
                    converged = True
                    break
                ds = float(np.sum(2.0 * (t - c) ** -3.0))
                step = (1.0 - s) / ds
                c_new = c + step
                if not (lo <= c_new <= hi):
                    c_new = 0.5 * (lo + hi)
                c = c_new
        if not converged:
            raise NumericalError(
                f"Tsallis projection did not converge after {_ROOT_MAX_ITER} "
                f"bisections for y={y!r}"
            )
        x = (t - c) ** -2.0
        return x / np.sum(x)

    def diameter(self, fset):
        """Conservative D with D^2 = 4 sqrt(d).

        V(x, y) diverges as y approaches the simplex boundary, so the true
        pairwise supremum is infinite; what the stepsize rule needs is the
        divergence from the solver's start x0 = uniform, which equals
        2 (sqrt(d) - sum sqrt(u_i)) <= 2 sqrt(d).
        """
        if fset.kind != "simplex":
            raise ParameterError("diameter defined on the simplex only")
        if fset.d == 1:
            return 0.0
        return math.sqrt(4.0 * math.sqrt(fset.d))


_SETUPS = {"ball": BallSetup, "entropy": EntropySetup, "tsallis12": TsallisSetup}


def make_setup(name: str, entropy_gamma: float = 1.0) -> ProxSetup:
    key = name.lower()
    if key not in _SETUPS:
        raise ParameterError(f"unknown prox setup {name!r}; choose from {sorted(_SETUPS)}")
    if key == "entropy":
        return EntropySetup(entropy_gamma)
    return _SETUPS[key]()


def floor_simplex(x: np.ndarray, floor: float = SIMPLEX_FLOOR) -> np.ndarray:
    """Clamp coordinates to the interior floor and renormalize to sum 1."""
    x = np.maximum(x, floor)
    return x / np.sum(x)
