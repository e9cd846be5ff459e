"""Zeroth-order solvers: clipped-median SSTM, SMD, restart wrappers and the
momentum SGD baseline.

A single run is strictly sequential; parallelism happens one level up, over
seeds, with each run owning its generator and trace buffer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DivergenceError, DomainError, ParameterError, ScheduleError
from .estimator import (
    MedianEstimatorConfig,
    batch_median_estimate,
    clip,
    dual_norm_factor,
    median_estimate,
    median_size_for,
    sample_unit_sphere,
    sigma_bound,
)
from .geometry import SIMPLEX_FLOOR, FeasibleSet, ProxSetup, floor_simplex
from .noise import TwoPointOracle
from .problems import Problem


@dataclass
class SolverSchedule:
    """Fully resolved run parameters for the zeroth-order solvers.

    ``lam``, when set, is a constant clipping level (SMD always uses one);
    otherwise SSTM uses the per-step rule lambda_k = R / (alpha_{k+1} * A_log).
    ``provenance`` records which values came from the theory formulas and
    which from user overrides.
    """

    K: int
    m: int = 0
    b: int = 1
    tau: float = 1e-2
    q: float = 2.0
    a: float = 1.0
    L: float = 1.0
    R: float = 1.0
    A_log: float = 1.0
    lam: Optional[float] = None
    nu: Optional[float] = None
    sigma: Optional[float] = None
    provenance: dict = field(default_factory=dict)

    @property
    def estimator(self) -> MedianEstimatorConfig:
        return MedianEstimatorConfig(m=self.m, b=self.b, tau=self.tau, q=self.q)

    @property
    def calls_per_step(self) -> int:
        return (2 * self.m + 1) * self.b

    def lambda_k(self, alpha_next: float) -> float:
        if self.lam is not None:
            return self.lam
        return self.R / (alpha_next * self.A_log)


@dataclass
class RunRecord:
    """Per-step trace of one solver run; the x-axis of convergence plots is
    the exact cumulative oracle-call count."""

    steps: np.ndarray
    oracle_calls: np.ndarray
    values: np.ndarray
    metric: str
    x_final: np.ndarray
    meta: dict = field(default_factory=dict)


def _metric_of(problem: Problem):
    if problem.f_star is not None:
        return "gap", lambda x: float(problem.objective(x)) - problem.f_star
    return "objective", lambda x: float(problem.objective(x))


def _check_finite(x: np.ndarray, step: int, what: str):
    if not np.all(np.isfinite(x)):
        raise DivergenceError(f"non-finite {what} iterate", step)


@dataclass
class SstmState:
    """Similar-triangles iterate triple with accumulated coefficients."""

    k: int
    A_k: float
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    a: float
    L: float

    @classmethod
    def initial(cls, x0: np.ndarray, a: float, L: float) -> "SstmState":
        if a <= 0 or L <= 0:
            raise ParameterError("SSTM stepsize a and smoothness L must be positive")
        x0 = np.asarray(x0, dtype=float)
        return cls(k=0, A_k=0.0, x=x0.copy(), y=x0.copy(), z=x0.copy(), a=a, L=L)


def sstm_step(
    state: SstmState,
    schedule: SolverSchedule,
    oracle: TwoPointOracle,
    rng: np.random.Generator,
) -> tuple[SstmState, int]:
    """One accelerated clipped step; returns the new state and the number of
    oracle calls consumed."""
    k = state.k
    alpha_next = (k + 2) / (2.0 * state.a * state.L)
    A_next = state.A_k + alpha_next
    x_next = (state.A_k * state.y + alpha_next * state.z) / A_next
    sample = batch_median_estimate(oracle, x_next, schedule.estimator, rng)
    lam = schedule.lambda_k(alpha_next)
    z_next = state.z - alpha_next * clip(sample.value, lam, 2.0)
    y_next = (state.A_k * state.y + alpha_next * z_next) / A_next
    _check_finite(z_next, k, "z")
    _check_finite(y_next, k, "y")
    new_state = SstmState(
        k=k + 1, A_k=A_next, x=x_next, y=y_next, z=z_next, a=state.a, L=state.L
    )
    return new_state, sample.oracle_calls


def run_sstm(
    problem: Problem,
    oracle: TwoPointOracle,
    schedule: SolverSchedule,
    rng: np.random.Generator,
    trace_every: int = 1,
) -> RunRecord:
    metric, evaluate = _metric_of(problem)
    state = SstmState.initial(problem.x0, schedule.a, schedule.L)
    steps, calls, values = [0], [0], [evaluate(state.y)]
    total_calls = 0
    # soft diagnostic for the high-probability claim that iterates stay in
    # B_{2R}(x*); available only when the reference optimum is known
    x_star = problem.x_star
    r_true = None if x_star is None else float(np.linalg.norm(problem.x0 - x_star))
    ball_exits = 0
    max_dist = r_true or 0.0
    for k in range(schedule.K):
        state, spent = sstm_step(state, schedule, oracle, rng)
        total_calls += spent
        if x_star is not None:
            dist = max(
                float(np.linalg.norm(it - x_star)) for it in (state.x, state.y, state.z)
            )
            max_dist = max(max_dist, dist)
            if dist > 2.0 * r_true:
                ball_exits += 1
        if (k + 1) % trace_every == 0 or k + 1 == schedule.K:
            steps.append(k + 1)
            calls.append(total_calls)
            values.append(evaluate(state.y))
    meta = {"algorithm": "zo_clipped_med_sstm", "A_K": state.A_k}
    if x_star is not None:
        meta.update(ball_exit_steps=ball_exits, max_dist_to_opt=max_dist, R_true=r_true)
    return RunRecord(
        steps=np.array(steps),
        oracle_calls=np.array(calls),
        values=np.array(values),
        metric=metric,
        x_final=state.y,
        meta=meta,
    )


@dataclass
class SmdState:
    k: int
    x: np.ndarray
    x_sum: np.ndarray  # running sum of iterates for the averaged output

    @property
    def x_bar(self) -> np.ndarray:
        return self.x_sum / max(self.k, 1)


def smd_step(
    state: SmdState,
    schedule: SolverSchedule,
    setup: ProxSetup,
    fset: FeasibleSet,
    oracle: TwoPointOracle,
    rng: np.random.Generator,
) -> tuple[SmdState, int]:
    """One mirror step with the unbatched median estimate."""
    if schedule.nu is None or schedule.lam is None:
        raise ScheduleError("SMD needs a constant stepsize nu and clipping level lam")
    cfg = schedule.estimator
    e = sample_unit_sphere(fset.d, rng)
    g = median_estimate(oracle, state.x, e, cfg, rng)
    theta = setup.grad(state.x) - schedule.nu * clip(g, schedule.lam, schedule.q)
    try:
        y = setup.conjugate_grad(theta)
    except DomainError as exc:
        raise ScheduleError(
            f"mirror step left the conjugate domain at iteration {state.k}: {exc}"
        ) from exc
    x_next = setup.project(fset, y)
    if fset.kind == "simplex":
        x_next = floor_simplex(x_next, SIMPLEX_FLOOR)
    _check_finite(x_next, state.k, "x")
    return (
        SmdState(k=state.k + 1, x=x_next, x_sum=state.x_sum + x_next),
        cfg.samples_per_median,
    )


def run_smd(
    problem: Problem,
    oracle: TwoPointOracle,
    schedule: SolverSchedule,
    setup: ProxSetup,
    fset: FeasibleSet,
    rng: np.random.Generator,
    trace_every: int = 1,
) -> RunRecord:
    """K mirror steps from argmin Psi; the output is the iterate average
    x_bar = (1/K) sum_{k=0}^{K-1} x^k."""
    metric, evaluate = _metric_of(problem)
    x0 = setup.argmin(fset)
    state = SmdState(k=1, x=x0.copy(), x_sum=x0.copy())
    steps, calls, values = [0], [0], [evaluate(x0)]
    total_calls = 0
    for k in range(schedule.K - 1):
        state, spent = smd_step(state, schedule, setup, fset, oracle, rng)
        total_calls += spent
        if (k + 1) % trace_every == 0 or k + 2 == schedule.K:
            steps.append(k + 1)
            calls.append(total_calls)
            values.append(evaluate(state.x_bar))
    return RunRecord(
        steps=np.array(steps),
        oracle_calls=np.array(calls),
        values=np.array(values),
        metric=metric,
        x_final=state.x_bar,
        meta={"algorithm": "zo_clipped_med_smd"},
    )


@dataclass
class RestartStage:
    t: int
    R_prev: float
    eps_t: float
    tau_t: float
    K_t: int
    a_t: Optional[float] = None  # SSTM stages
    L_t: Optional[float] = None
    lam_t: Optional[float] = None  # SMD stages
    nu_t: Optional[float] = None


@dataclass
class RestartSchedule:
    n_restarts: int
    stages: list
    final_eps: float


def resolve_restart_sstm(
    problem: Problem,
    oracle: TwoPointOracle,
    mu: float,
    eps: float,
    beta: float,
    R0: float,
    kappa: float,
    b: int = 1,
    m: Optional[int] = None,
    k_const: float = 1.0,
) -> RestartSchedule:
    """Geometric restart ladder: R_{t-1} = 2^{-(t-1)/2} R0, eps_t = mu R_{t-1}^2 / 4,
    N_r = ceil(log2(mu R0^2 / (2 eps)))."""
    if mu <= 0:
        raise ScheduleError("restarts require a positive strong-convexity modulus")
    if oracle.mode == "independent":
        bound = (kappa / 4.0) ** (1.0 / kappa) * eps / math.sqrt(problem.d)
        if oracle.delta > bound:
            raise ScheduleError(
                f"independent-oracle noise delta={oracle.delta:.4g} exceeds the "
                f"small-noise bound {bound:.4g}; restarts are not valid"
            )
    n_r = max(1, math.ceil(math.log2(mu * R0**2 / (2.0 * eps))))
    m_t = median_size_for(kappa) if m is None else m
    M2, d = problem.M2, problem.d
    stages = []
    for t in range(1, n_r + 1):
        R_prev = 2.0 ** (-(t - 1) / 2.0) * R0
        eps_t = mu * R_prev**2 / 4.0
        tau_t = eps_t / (4.0 * M2)
        L_t = math.sqrt(d) * M2 / tau_t
        cfg = MedianEstimatorConfig(m=m_t, b=b, tau=tau_t, q=2.0)
        sigma_t = sigma_bound(cfg, d, M2, oracle.assumption_tail, oracle.mode)
        K_t = max(
            1,
            math.ceil(
                k_const
                * max(
                    math.sqrt(L_t * R_prev**2 / eps_t),
                    (sigma_t * R_prev / eps_t) ** 2 / b,
                )
            ),
        )
        a_t = max(1.0, sigma_t * K_t**1.5 / (math.sqrt(b) * L_t * R_prev))
        stages.append(
            RestartStage(t=t, R_prev=R_prev, eps_t=eps_t, tau_t=tau_t, K_t=K_t, a_t=a_t, L_t=L_t)
        )
    return RestartSchedule(n_restarts=n_r, stages=stages, final_eps=eps)


def run_restarted(
    problem: Problem,
    oracle: TwoPointOracle,
    algorithm: str,
    mu: float,
    eps: float,
    beta: float,
    rng: np.random.Generator,
    R0: float,
    kappa: float,
    b: int = 1,
    m: Optional[int] = None,
    setup: Optional[ProxSetup] = None,
    fset: Optional[FeasibleSet] = None,
    k_const: float = 1.0,
    trace_every: int = 10,
) -> RunRecord:
    """Run the restart ladder, seeding each stage with the previous output."""
    if algorithm not in ("sstm", "smd"):
        raise ParameterError(f"unknown restart algorithm {algorithm!r}")
    if algorithm == "smd":
        return _run_restarted_smd(
            problem, oracle, mu, eps, beta, rng, kappa, m, setup, fset, k_const, trace_every
        )
    plan = resolve_restart_sstm(problem, oracle, mu, eps, beta, R0, kappa, b, m, k_const)
    metric, evaluate = _metric_of(problem)
    x_hat = np.asarray(problem.x0, dtype=float).copy()
    steps, calls, values = [0], [0], [evaluate(x_hat)]
    total_calls = 0
    total_steps = 0
    stage_dist2 = []
    for st in plan.stages:
        A_log = max(math.log(4.0 * plan.n_restarts * st.K_t / beta), 1.0)
        sched = SolverSchedule(
            K=st.K_t,
            m=median_size_for(kappa) if m is None else m,
            b=b,
            tau=st.tau_t,
            q=2.0,
            a=st.a_t,
            L=st.L_t,
            R=st.R_prev,
            A_log=A_log,
        )
        stage_problem = Problem(
            objective=problem.objective,
            d=problem.d,
            M2=problem.M2,
            x0=x_hat,
            x_star=problem.x_star,
            f_star=problem.f_star,
            mu=problem.mu,
        )
        rec = run_sstm(stage_problem, oracle, sched, rng, trace_every=trace_every)
        x_hat = rec.x_final
        steps.extend([total_steps + s for s in rec.steps[1:]])
        calls.extend([total_calls + c for c in rec.oracle_calls[1:]])
        values.extend(rec.values[1:])
        total_steps += st.K_t
        total_calls += int(rec.oracle_calls[-1])
        if problem.x_star is not None:
            stage_dist2.append(float(np.linalg.norm(x_hat - problem.x_star) ** 2))
    return RunRecord(
        steps=np.array(steps),
        oracle_calls=np.array(calls),
        values=np.array(values),
        metric=metric,
        x_final=x_hat,
        meta={
            "algorithm": "restarted_zo_clipped_med_sstm",
            "n_restarts": plan.n_restarts,
            "stages": plan.stages,
            "stage_dist2": stage_dist2,
        },
    )


def _run_restarted_smd(
    problem, oracle, mu, eps, beta, rng, kappa, m, setup, fset, k_const, trace_every
):
    if setup is None or fset is None:
        raise ParameterError("restarted SMD needs a prox setup and a feasible set")
    if oracle.mode != "lipschitz":
        bound = (kappa / 4.0) ** (1.0 / kappa) * eps / math.sqrt(problem.d)
        if oracle.delta > bound:
            raise ScheduleError("independent-oracle noise too large for restarted SMD")
    m_t = median_size_for(kappa) if m is None else m
    d, M2 = problem.d, problem.M2
    a_q = dual_norm_factor(d, setup.q)
    # tau-free second-moment constant (Lipschitz formula; the small-noise
    # independent case is bounded by the same expression at delta = 0 scale)
    tail_factor = (4.0 / kappa) ** (2.0 / kappa)
    if oracle.mode == "lipschitz":
        sigma = math.sqrt(8 * d * M2**2 + (16 * m_t + 8) * d**2 * oracle.delta**2 * tail_factor)
    else:
        sigma = math.sqrt(32.0 * (2 * m_t + 1) * d) * M2
    R0 = setup.diameter(fset)
    n_r = max(1, math.ceil(0.5 * math.log2(mu * R0**2 / (2.0 * eps))))
    metric, evaluate = _metric_of(problem)
    x_hat = setup.argmin(fset)
    steps, calls, values = [0], [0], [evaluate(x_hat)]
    total_calls, total_steps = 0, 0
    stage_dist2 = []
    for t in range(1, n_r + 1):
        R_t = R0 / 2.0**t
        K_t = max(1, math.ceil(k_const * (a_q * sigma / (mu * R_t)) ** 2))
        lam_t = math.sqrt(K_t) * a_q * sigma
        nu_t = R_t / lam_t
        tau_t = a_q * sigma * R_t / (M2 * math.sqrt(K_t))
        sched = SolverSchedule(
            K=K_t, m=m_t, b=1, tau=tau_t, q=setup.q, lam=lam_t, nu=nu_t
        )
        stage_problem = Problem(
            objective=problem.objective, d=d, M2=M2, x0=x_hat,
            x_star=problem.x_star, f_star=problem.f_star, mu=problem.mu,
        )
        rec = _run_smd_from(stage_problem, oracle, sched, setup, fset, rng, x_hat, trace_every)
        x_hat = rec.x_final
        steps.extend([total_steps + s for s in rec.steps[1:]])
        calls.extend([total_calls + c for c in rec.oracle_calls[1:]])
        values.extend(rec.values[1:])
        total_steps += K_t
        total_calls += int(rec.oracle_calls[-1])
        if problem.x_star is not None:
            stage_dist2.append(float(np.linalg.norm(x_hat - problem.x_star) ** 2))
    return RunRecord(
        steps=np.array(steps), oracle_calls=np.array(calls), values=np.array(values),
        metric=metric, x_final=x_hat,
        meta={"algorithm": "restarted_zo_clipped_med_smd", "n_restarts": n_r,
              "stage_dist2": stage_dist2},
    )


def _run_smd_from(problem, oracle, schedule, setup, fset, rng, x_start, trace_every):
    """SMD restarted from an arbitrary feasible interior point."""
    metric, evaluate = _metric_of(problem)
    x0 = np.asarray(x_start, dtype=float)
    if fset.kind == "simplex":
        x0 = floor_simplex(x0)
    state = SmdState(k=1, x=x0.copy(), x_sum=x0.copy())
    steps, calls, values = [0], [0], [evaluate(x0)]
    total_calls = 0
    for k in range(schedule.K - 1):
        state, spent = smd_step(state, schedule, setup, fset, oracle, rng)
        total_calls += spent
        if (k + 1) % trace_every == 0 or k + 2 == schedule.K:
            steps.append(k + 1)
            calls.append(total_calls)
            values.append(evaluate(state.x_bar))
    return RunRecord(
        steps=np.array(steps), oracle_calls=np.array(calls), values=np.array(values),
        metric=metric, x_final=state.x_bar, meta={},
    )


@dataclass
class SgdParams:
    """Heavy-ball baseline on clipped median estimates."""

    a: float = 0.01
    momentum: float = 0.9
    tau: float = 0.1
    m: int = 0
    lam: float = float("inf")
    K: int = 1000

    def __post_init__(self):
        if self.a <= 0 or self.tau <= 0:
            raise ParameterError("stepsize and smoothing radius must be positive")
        if not 0 <= self.momentum < 1:
            raise ParameterError("momentum must lie in [0, 1)")


def run_sgd_baseline(
    problem: Problem,
    oracle: TwoPointOracle,
    params: SgdParams,
    rng: np.random.Generator,
    trace_every: int = 1,
) -> RunRecord:
    """v <- momentum v + clip_2(g_med, lam); x <- x - a v."""
    metric, evaluate = _metric_of(problem)
    cfg = MedianEstimatorConfig(m=params.m, b=1, tau=params.tau, q=2.0)
    x = np.asarray(problem.x0, dtype=float).copy()
    v = np.zeros(problem.d)
    steps, calls, values = [0], [0], [evaluate(x)]
    total_calls = 0
    for k in range(params.K):
        e = sample_unit_sphere(problem.d, rng)
        g = median_estimate(oracle, x, e, cfg, rng)
        if math.isfinite(params.lam):
            g = clip(g, params.lam, 2.0)
        v = params.momentum * v + g
        x = x - params.a * v
        _check_finite(x, k, "x")
        total_calls += cfg.samples_per_median
        if (k + 1) % trace_every == 0 or k + 1 == params.K:
            steps.append(k + 1)
            calls.append(total_calls)
            values.append(evaluate(x))
    return RunRecord(
        steps=np.array(steps),
        oracle_calls=np.array(calls),
        values=np.array(values),
        metric=metric,
        x_final=x,
        meta={"algorithm": "zo_clipped_med_sgd"},
    )
