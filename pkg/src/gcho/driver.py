"""Outer solver loop: build the regularized Taylor model at the current
iterate, solve the matching subproblem, enforce descent by adaptive
regularization, record a trace row, and stop on the step-norm rule.

Acceptance requires both the model-value descent g(s(x+)) + h(x+) <= f(x)
(which the theory needs) and plain objective descent f(x+) <= f(x)
(belt and braces: with adaptive weights the model is not guaranteed to
majorize, and the measured majorization gap is recorded on every row so
violations are visible in the trace).
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NoConvergence, OracleError
from .numerics import ensure_finite
from .problem import IDENTITY, ProblemSpec, evaluate
from .subsolver import (
    SmoothingSchedule,
    solve_coordmax_smoothed,
    solve_identity_p1,
    solve_identity_p2_cubic,
    verify_descent,
)
from .surrogate import build_taylor

log = logging.getLogger("gcho")

STEP_TOL = "StepTol"
MAX_ITER = "MaxIter"
SUBSOLVER_FAILURE = "SubsolverFailure"

MAX_GROWTH_TRIALS = 60


@dataclass
class SolverConfig:
    """Knobs of the outer loop.

    ``m0`` seeds the per-component regularization weights (scalar broadcasts);
    growth doubles them on a rejected trial, shrink relaxes them after an
    accepted step down to ``m_min``.  ``tol_step`` is the stopping rule
    ||x_{k+1} - x_k|| <= tol_step; zero disables it so a run always uses
    ``max_iter`` iterations.  ``certificate_every`` and ``mu_factor`` steer
    the certificate pipeline (0 = off).
    """

    p: int = 2
    m0: object = 1.0
    m_growth: float = 2.0
    m_shrink: float = 0.5
    m_min: float = 1e-8
    tol_step: float = 1e-4
    max_iter: int = 500
    theta: float = 0.5
    certificate_every: int = 0
    mu_factor: float = 1.5
    seed: int = 0
    schedule: Optional[SmoothingSchedule] = None
    subsolver_tol: float = 1e-10

    def __post_init__(self):
        if self.p not in (1, 2):
            raise ValueError("order p must be 1 or 2")
        if np.any(np.asarray(self.m0, dtype=float) <= 0):
            raise ValueError("m0 must be positive")
        if self.m_growth <= 1.0:
            raise ValueError("m_growth must exceed 1")
        if not (0.0 < self.m_shrink <= 1.0):
            raise ValueError("m_shrink must lie in (0, 1]")
        if self.tol_step < 0 or self.max_iter < 1 or self.theta <= 0:
            raise ValueError("invalid stopping parameters")
        if self.mu_factor <= 1.0:
            raise ValueError("mu_factor must exceed 1")

    def initial_weights(self, m: int) -> np.ndarray:
        w = np.asarray(self.m0, dtype=float)
        if w.ndim == 0:
            return np.full(m, float(w))
        if w.size != m:
            raise ValueError(f"m0 has {w.size} entries, problem has {m} components")
        return w.copy()


@dataclass
class TraceRow:
    """One outer iteration: the iterate, its value, and the step taken."""

    k: int
    x: np.ndarray
    f: float
    step_norm: float
    m_max: float
    ls_trials: int
    inner_iters: int
    stat_res: float
    wall_ms: float
    majorization_gap: float
    fd_hessian: bool
    subsolver_converged: bool
    global_opt: bool


@dataclass
class IterateTrace:
    """Full run record: per-iteration rows plus the final point and status."""

    rows: list[TraceRow] = field(default_factory=list)
    status: str = MAX_ITER
    x_final: Optional[np.ndarray] = None
    f_final: float = math.nan
    p: int = 2

    def __len__(self) -> int:
        return len(self.rows)

    def f_values(self) -> np.ndarray:
        """Objective along the run, including the final point."""
        return np.array([r.f for r in self.rows] + [self.f_final])

    def step_norms(self) -> np.ndarray:
        return np.array([r.step_norm for r in self.rows])

    def iterates(self) -> list[np.ndarray]:
        return [r.x for r in self.rows] + [self.x_final]


def _dispatch(model, spec: ProblemSpec, config: SolverConfig):
    if spec.outer.kind == IDENTITY:
        if config.p == 1:
            return solve_identity_p1(model, spec.simple)
        return solve_identity_p2_cubic(model, spec.simple, tol=config.subsolver_tol)
    schedule = config.schedule if config.schedule is not None else SmoothingSchedule()
    return solve_coordmax_smoothed(
        model, spec.simple, theta=config.theta, schedule=schedule, outer=spec.outer
    )


def run(spec: ProblemSpec, config: SolverConfig) -> IterateTrace:
    """Drive the outer loop on ``spec`` until the step rule or budget fires.

    Identical (spec, config) inputs produce bit-identical traces apart from
    the wall-clock column.
    """
    x = ensure_finite(spec.x0, "x0").copy()
    fx = evaluate(spec, x).f
    if not math.isfinite(fx):
        raise OracleError(f"{spec.name}: starting point outside dom f")
    weights = config.initial_weights(spec.m)

    trace = IterateTrace(p=config.p)
    status = MAX_ITER

    for k in range(config.max_iter):
        t0 = time.perf_counter()
        trials = 0
        accepted = None
        while True:
            trials += 1
            if trials > MAX_GROWTH_TRIALS:
                break
            model = build_taylor(spec, x, config.p, weights)
            try:
                result = _dispatch(model, spec, config)
            except NoConvergence as exc:
                log.debug("iter %d: subsolver rejected (%s); growing weights", k, exc)
                weights = weights * config.m_growth
                continue
            f_new = evaluate(spec, result.x_next).f
            step = float(np.linalg.norm(result.x_next - x))
            model_ok = verify_descent(result, fx)
            true_ok = f_new <= fx + 1e-12 * (1.0 + abs(fx))
            null_without_cause = step == 0.0 and not result.converged
            if model_ok and true_ok and not null_without_cause:
                accepted = (result, f_new, step, model)
                break
            weights = weights * config.m_growth
        if accepted is None:
            status = SUBSOLVER_FAILURE
            break

        result, f_new, step, model = accepted
        gap = float(
            np.min(model.component_values(result.x_next) - spec.inner_values(result.x_next))
        )
        wall_ms = (time.perf_counter() - t0) * 1e3
        trace.rows.append(
            TraceRow(
                k=k,
                x=x.copy(),
                f=fx,
                step_norm=step,
                m_max=float(weights.max()),
                ls_trials=trials,
                inner_iters=result.inner_iterations,
                stat_res=result.stationarity_residual,
                wall_ms=wall_ms,
                majorization_gap=gap,
                fd_hessian=model.fd_hessian_used,
                subsolver_converged=result.converged,
                global_opt=result.global_opt,
            )
        )
        log.debug(
            "iter %d: f=%.6g step=%.3g M_max=%.3g trials=%d", k, fx, step, weights.max(), trials
        )
        x = result.x_next
        fx = f_new
        if config.m_shrink < 1.0:
            weights = np.maximum(weights * config.m_shrink, config.m_min)
        if config.tol_step > 0.0 and step <= config.tol_step:
            status = STEP_TOL
            break

    trace.status = status
    trace.x_final = x.copy()
    trace.f_final = fx
    return trace


def descent_margin(trace: IterateTrace, k: int) -> float:
    """Empirical per-step descent constant
    (f(x_k) - f(x_{k+1})) * (p+1)! / ||x_{k+1} - x_k||^(p+1).

    Nonnegative for every accepted step of a majorizing model; returns the
    +inf sentinel when the step norm underflows (exact null step).
    """
    if k < 0 or k >= len(trace.rows):
        raise IndexError(f"iteration {k} not in trace")
    f_k = trace.rows[k].f
    f_next = trace.rows[k + 1].f if k + 1 < len(trace.rows) else trace.f_final
    step = trace.rows[k].step_norm
    if step <= 1e-300:
        return math.inf
    p = trace.p
    return (f_k - f_next) * math.factorial(p + 1) / step ** (p + 1)
