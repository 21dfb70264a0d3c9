"""Solvers for the per-iteration model subproblem  min_x g(s(x; x_k)) + h(x).

Three concrete paths:

* identity g, order 1: closed-form step (spherical quadratic model), with an
  exact box projection when h is a box indicator;
* identity g, order 2, h = 0: global minimizer of the cubic-regularized
  quadratic model via the scalar secular equation over the eigendecomposition
  of the aggregated Hessian, including the hard case (gradient orthogonal to
  the bottom eigenspace);
* coordinate-max g (and the first-plus-penalized-max variant): temperature
  smoothing.  The softmax upper bound  max_i v_i <= mu*log sum_i exp(v_i/mu)
  <= max_i v_i + mu*log m  majorizes the true model, and each temperature
  stage is minimized by damped-Newton/gradient descent with Armijo
  backtracking.  Termination targets the relaxed stationarity condition
  ||g_x|| <= theta * ||x - center||^p measured as the min-norm element of the
  convex hull of active component gradients.

All solvers are deterministic given their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NoConvergence
from .numerics import eigh, min_norm_in_hull, solve_scalar_increasing
from .problem import COORD_MAX, IDENTITY, OuterFunction, SimpleTerm
from .surrogate import SurrogateModel

ABS_STATIONARITY_FLOOR = 1e-10


@dataclass
class SubproblemResult:
    """Outcome of one model solve.

    ``model_value`` is g(s(x_next)) + h(x_next); ``stationarity_residual`` is
    the measured norm of the smallest (sub)gradient of the model objective at
    ``x_next``; ``global_opt`` marks solvers that certify a global minimum.
    """

    x_next: np.ndarray
    model_value: float
    stationarity_residual: float
    inner_iterations: int
    converged: bool
    global_opt: bool = False
    boundary_heuristic: bool = False


def _aggregate_identity(model: SurrogateModel):
    """Sum the component models: identity g makes the subproblem a single
    regularized Taylor model with summed data and summed weight."""
    base = float(model.values.sum())
    g = model.grads.sum(axis=0)
    H = model.hessians.sum(axis=0) if model.hessians is not None else None
    weight = float(model.reg_weights.sum())
    return base, g, H, weight


def solve_identity_p1(model: SurrogateModel, h: SimpleTerm) -> SubproblemResult:
    """Closed-form minimizer of the order-1 model under identity g.

    The model is a quadratic with spherical curvature, so a box indicator is
    handled exactly by clamping the unconstrained step.
    """
    if model.order != 1:
        raise ValueError("order-1 solver got a higher-order model")
    base, g, _, weight = _aggregate_identity(model)
    x = model.center - g / weight
    x = h.project(x)
    d = x - model.center
    value = base + float(g @ d) + 0.5 * weight * float(d @ d)
    grad_at_x = g + weight * d
    residual = float(np.linalg.norm(x - h.project(x - grad_at_x)))
    return SubproblemResult(
        x_next=x,
        model_value=value + h.eval(x),
        stationarity_residual=residual,
        inner_iterations=1,
        converged=True,
        global_opt=True,
    )


def _secular_norm(ghat: np.ndarray, lam: np.ndarray, weight: float, r: float) -> float:
    """||(H + (weight/2) r I)^{-1} g|| through the eigenbasis; +inf when a
    nonzero gradient component sits on a vanishing denominator."""
    denom = lam + 0.5 * weight * r
    out = 0.0
    for gh, de in zip(ghat, denom):
        if abs(de) <= 1e-300:
            if abs(gh) > 0.0:
                return math.inf
            continue
        out += (gh / de) ** 2
    return math.sqrt(out)


def solve_identity_p2_cubic(
    model: SurrogateModel, h: SimpleTerm, tol: float = 1e-10
) -> SubproblemResult:
    """Global minimizer of the aggregated cubic-regularized quadratic model.

    With the eigendecomposition H = Q diag(lam) Q^T, the minimizer satisfies
    (H + (M/2) r I) d = -g with r = ||d||, and r solves the increasing secular
    equation  r - ||(H + (M/2) r I)^{-1} g|| = 0  on r >= max(0, -2 lam_1 / M).
    When g has no component in the bottom eigenspace and the off-eigenspace
    step is short enough (the hard case), the step is completed with a bottom
    eigenvector component; its sign is chosen to make the first nonzero entry
    of d positive, so results are reproducible.
    """
    if model.order != 2:
        raise ValueError("cubic solver needs an order-2 model")
    if h.kind != "zero":
        raise ValueError("cubic solver supports h = 0 only")
    base, g, H, weight = _aggregate_identity(model)
    n = g.size
    dec = eigh(H)
    lam, Q = dec.values, dec.vectors
    ghat = Q.T @ g
    lam_scale = 1.0 + float(np.abs(lam).max())
    gnorm = float(np.linalg.norm(g))

    def finish(d: np.ndarray, iters: int, converged: bool) -> SubproblemResult:
        nd = float(np.linalg.norm(d))
        value = (
            base + float(g @ d) + 0.5 * float(d @ H @ d) + weight / 6.0 * nd**3
        )
        residual = float(np.linalg.norm(g + H @ d + 0.5 * weight * nd * d))
        return SubproblemResult(
            x_next=model.center + d,
            model_value=value,
            stationarity_residual=residual,
            inner_iterations=iters,
            converged=converged,
            global_opt=converged,
        )

    if gnorm == 0.0 and lam[0] >= 0.0:
        return finish(np.zeros(n), 0, True)

    r_lo = max(0.0, -2.0 * lam[0] / weight)
    bottom = lam <= lam[0] + 1e-12 * lam_scale
    g_bottom = float(np.linalg.norm(ghat[bottom]))

    if lam[0] < 0.0 and g_bottom <= 1e-11 * (1.0 + gnorm):
        # Potential hard case: solve on the complement at the critical radius.
        denom = lam + 0.5 * weight * r_lo
        safe = np.abs(denom) > 1e-12 * lam_scale
        d_hat = np.zeros(n)
        d_hat[safe] = -ghat[safe] / denom[safe]
        norm_perp = float(np.linalg.norm(d_hat))
        if norm_perp <= r_lo * (1.0 + 1e-12) + 1e-300:
            alpha = math.sqrt(max(r_lo**2 - norm_perp**2, 0.0))
            v = Q[:, 0].copy()
            lead = np.flatnonzero(np.abs(v) > 1e-12)
            if lead.size and v[lead[0]] < 0:
                v = -v
            d_perp = Q @ d_hat
            d_plus = d_perp + alpha * v
            d_minus = d_perp - alpha * v
            chosen = d_plus
            nz = np.flatnonzero(np.abs(d_plus) > 1e-12)
            if nz.size and d_plus[nz[0]] < 0:
                nz_m = np.flatnonzero(np.abs(d_minus) > 1e-12)
                if nz_m.size and d_minus[nz_m[0]] > 0:
                    chosen = d_minus
            return finish(chosen, 1, True)

    # Easy case: bracket and solve the increasing secular function.
    seen: list[tuple[float, float]] = []

    def phi(r: float) -> float:
        val = r - _secular_norm(ghat, lam, weight, r)
        for r_prev, v_prev in seen[-4:]:
            # Monotonicity of the secular function, sanity at solver scale.
            if r > r_prev and val < v_prev - 1e-6 * (1.0 + abs(v_prev)):
                raise NoConvergence("secular function not monotone (ill-conditioned model)")
        seen.append((r, val))
        return val

    lo = r_lo
    hi = max(2.0 * r_lo, 1.0, 2.0 * math.sqrt(gnorm / weight))
    expansions = 0
    while phi(hi) < 0.0:
        hi *= 2.0
        expansions += 1
        if expansions > 200:
            raise NoConvergence("secular bracket expansion exhausted")
    if phi(lo) > 0.0:
        # Root pinched at the critical radius (numerically hard case boundary).
        lo = r_lo
        hi = max(hi, r_lo * (1 + 1e-8) + 1e-12)

    r_tol = max(tol, 1e-15 * (1.0 + hi))
    root = solve_scalar_increasing(phi, lo, hi, r_tol)
    denom = lam + 0.5 * weight * root
    denom = np.where(np.abs(denom) <= 1e-300, 1e-300, denom)
    d = Q @ (-ghat / denom)
    result = finish(d, len(seen), True)
    if result.stationarity_residual > max(tol, 1e-8 * (1.0 + gnorm)):
        result.converged = False
        result.global_opt = False
    return result


# ---------------------------------------------------------------------------
# Temperature-smoothed solver for max-type outer functions
# ---------------------------------------------------------------------------

@dataclass
class SmoothingSchedule:
    """Temperature ladder and inner-iteration budget for the smoothed solver.

    The ladder starts at ``mu0`` (when None: spread of the component values
    at the center divided by 10) and decays geometrically.  Fourteen stages
    put the final temperature around 4e-9 of the initial spread, which keeps
    the smoothing bias of the returned point well below desk-scale
    tolerances; shorter ladders leave an O(mu) bias beyond 1e-6 on
    kink-seeking problems.
    """

    mu0: Optional[float] = None
    decay: float = 4.0
    stages: int = 14
    iters_per_stage: int = 200
    armijo_c: float = 1e-4
    use_newton: bool = True

    def temperatures(self, spread: float, scale: float) -> list[float]:
        start = self.mu0
        if start is None:
            start = max(spread, 1e-3 * (1.0 + abs(scale))) / 10.0
        return [start * self.decay**-t for t in range(self.stages)]


def _combine_smoothed(vals, grads, mu, outer: OuterFunction, hessians=None):
    """Smoothed value/gradient (and optional Hessian) of g(s(x)).

    For coord-max this is the log-sum-exp at temperature mu; the penalty
    variant augments the tail branches with the zero branch and scales by rho.
    """
    if outer.kind == IDENTITY:
        val = float(vals.sum())
        grad = grads.sum(axis=0)
        hess = hessians.sum(axis=0) if hessians is not None else None
        return val, grad, hess

    if outer.kind == COORD_MAX:
        branch_vals, branch_grads, branch_hess = vals, grads, hessians
        prefactor, affine_val, affine_grad, affine_hess = 1.0, 0.0, 0.0, 0.0
    else:  # first + rho * max(0, tail)
        n = grads.shape[1]
        zero_branch_v = np.zeros(1)
        branch_vals = np.concatenate([vals[1:], zero_branch_v])
        branch_grads = np.vstack([grads[1:], np.zeros((1, n))])
        branch_hess = (
            np.concatenate([hessians[1:], np.zeros((1, n, n))])
            if hessians is not None
            else None
        )
        prefactor = outer.rho
        affine_val, affine_grad = float(vals[0]), grads[0]
        affine_hess = hessians[0] if hessians is not None else 0.0

    top = float(branch_vals.max())
    z = np.exp((branch_vals - top) / mu)
    zsum = float(z.sum())
    w = z / zsum
    lse = top + mu * math.log(zsum)
    gbar = w @ branch_grads
    val = affine_val + prefactor * lse
    grad = affine_grad + prefactor * gbar
    hess = None
    if branch_hess is not None:
        curv = np.einsum("m,mij->ij", w, branch_hess)
        gw = branch_grads - gbar
        curv = curv + (1.0 / mu) * np.einsum("m,mi,mj->ij", w, gw, gw)
        hess = affine_hess + prefactor * curv
    return val, grad, hess


def _true_outer_value(vals: np.ndarray, outer: OuterFunction) -> float:
    return outer.eval(vals)


def _descent_direction(grad, hess, use_newton):
    if hess is None or not use_newton:
        return -grad
    n = grad.size
    scale = 1.0 + float(np.abs(np.diag(hess)).max())
    tau = 0.0
    for _ in range(7):
        try:
            d = np.linalg.solve(hess + tau * np.eye(n), -grad)
        except np.linalg.LinAlgError:
            d = None
        if d is not None and np.all(np.isfinite(d)):
            if float(grad @ d) <= -1e-12 * float(np.linalg.norm(grad)) * float(
                np.linalg.norm(d)
            ):
                return d
        tau = max(4.0 * tau, 1e-8 * scale)
    return -grad


def smoothed_descent(
    parts: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    x0: np.ndarray,
    outer: OuterFunction,
    schedule: SmoothingSchedule,
    parts_hess: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    project: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    stage_callback: Optional[Callable[[np.ndarray], bool]] = None,
):
    """Minimize g(parts(x)) over decreasing temperatures, tracking the best
    iterate of the true (unsmoothed) objective.

    Returns ``(x_best, best_value, total_iterations, x_last)``.
    """
    x = np.asarray(x0, dtype=float).copy()
    vals0, _ = parts(x)
    spread = float(vals0.max() - vals0.min()) if vals0.size > 1 else abs(float(vals0[0]))
    mus = schedule.temperatures(spread, float(np.abs(vals0).max()))
    m = vals0.size

    best_x = x.copy()
    best_val = _true_outer_value(vals0, outer)
    total_iters = 0

    for mu in mus:
        stall = 0
        for _ in range(schedule.iters_per_stage):
            vals, grads = parts(x)
            hess = parts_hess(x) if (parts_hess is not None and schedule.use_newton) else None
            val, grad, hmat = _combine_smoothed(vals, grads, mu, outer, hess)
            true_val = _true_outer_value(vals, outer)
            if outer.kind == COORD_MAX:
                # Smoothing chain: max <= smoothed <= max + mu log m.
                slack = 1e-9 * (1.0 + abs(true_val))
                if not (true_val - slack <= val <= true_val + mu * math.log(m) + slack):
                    raise NoConvergence("smoothed objective left the majorization chain")
            if true_val < best_val:
                best_val = true_val
                best_x = x.copy()
            gnorm = float(np.linalg.norm(grad))
            if gnorm <= 1e-13 * (1.0 + abs(val)):
                break
            direction = _descent_direction(grad, hmat, schedule.use_newton)
            slope = float(grad @ direction)
            alpha = 1.0
            accepted = False
            for _ in range(60):
                cand = x + alpha * direction
                if project is not None:
                    cand = project(cand)
                cand_vals, _ = parts(cand)
                cand_val = _combine_smoothed(cand_vals, np.zeros_like(grads), mu, outer)[0]
                if cand_val <= val + schedule.armijo_c * alpha * slope + 1e-15 * abs(val):
                    accepted = True
                    break
                alpha *= 0.5
            total_iters += 1
            if not accepted:
                break
            step = cand - x
            x = cand
            improvement = val - cand_val
            if improvement <= 1e-16 * (1.0 + abs(val)) and float(np.linalg.norm(step)) <= 1e-16 * (
                1.0 + float(np.linalg.norm(x))
            ):
                stall += 1
                if stall >= 2:
                    break
            else:
                stall = 0
        if stage_callback is not None and stage_callback(x):
            break

    vals, _ = parts(x)
    final_val = _true_outer_value(vals, outer)
    if final_val < best_val:
        best_val = final_val
        best_x = x.copy()
    return best_x, best_val, total_iters, x


def model_stationarity_residual(
    model: SurrogateModel,
    x: np.ndarray,
    outer: OuterFunction,
    act_tol: float,
) -> float:
    """Min-norm element of the hull of chain-rule generators of g(s(.)) at x."""
    vals = model.component_values(x)
    grads = model.component_grads(x)
    gens = [grads.T @ u for u in outer.subdiff_generators(vals, act_tol)]
    point, _ = min_norm_in_hull(np.array(gens))
    return float(np.linalg.norm(point))


def solve_coordmax_smoothed(
    model: SurrogateModel,
    h: SimpleTerm,
    theta: float = 0.5,
    schedule: Optional[SmoothingSchedule] = None,
    outer: Optional[OuterFunction] = None,
) -> SubproblemResult:
    """Smoothing solver for max-type outer functions.

    Minimizes the temperature-smoothed model over the schedule's ladder and
    stops once the min-norm element of the hull of active component gradients
    falls below  theta * ||x - center||^p + floor  (the relaxed stationarity
    target).  A box h is handled by projecting each inner step, which is a
    heuristic and is flagged on the result.
    """
    if outer is None:
        outer = OuterFunction.coord_max()
    if outer.kind == IDENTITY:
        raise ValueError("smoothed solver expects a max-type outer function")
    if schedule is None:
        schedule = SmoothingSchedule()

    project = h.project if h.kind != "zero" else None
    p = model.order

    def parts(x):
        return model.component_values(x), model.component_grads(x)

    def parts_hess(x):
        return model.component_hessians(x)

    def target(x):
        return theta * float(np.linalg.norm(x - model.center)) ** p + ABS_STATIONARITY_FLOOR

    spread = (
        float(model.values.max() - model.values.min())
        if model.m > 1
        else abs(float(model.values[0]))
    )
    mus = schedule.temperatures(spread, float(np.abs(model.values).max()))
    # Branch pooling for the hull residual is tied to the FINAL temperature:
    # with the current (large) temperature it would pool everything early and
    # report a vacuous zero residual long before the point is stationary.
    act_tol = max(30.0 * mus[-1], 1e-12 * (1.0 + float(np.abs(model.values).max())))

    # The relaxed theta-target is loose for long steps, so exiting the ladder
    # on it would stop far from the exact model minimizer.  The ladder is cut
    # short only once the residual is tight at the final pooling width; the
    # theta-condition remains the reported convergence verdict.
    grad_scale = float(np.linalg.norm(model.grads, axis=1).max())
    tight_floor = max(ABS_STATIONARITY_FLOOR, 1e-8 * (1.0 + grad_scale))

    def stage_cb(x):
        res = model_stationarity_residual(model, x, outer, act_tol)
        return res <= min(target(x), tight_floor)

    best_x, best_val, iters, _ = smoothed_descent(
        parts,
        model.center,
        outer,
        schedule,
        parts_hess=parts_hess,
        project=project,
        stage_callback=stage_cb,
    )

    residual = model_stationarity_residual(model, best_x, outer, act_tol)
    value = best_val + h.eval(best_x)
    return SubproblemResult(
        x_next=best_x,
        model_value=value,
        stationarity_residual=residual,
        inner_iterations=iters,
        converged=residual <= target(best_x),
        global_opt=False,
        boundary_heuristic=project is not None,
    )


def verify_descent(result: SubproblemResult, f_prev: float) -> bool:
    """Model-value descent test: g(s(x_next)) + h(x_next) <= f(x_k)."""
    return result.model_value <= f_prev + 1e-12 * (1.0 + abs(f_prev))
