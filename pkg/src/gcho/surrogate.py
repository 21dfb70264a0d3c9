"""Upper-bound model construction and numerical certification.

Two model families are supported, both built per component around a center x:

* Taylor-plus-regularization: the order-p Taylor expansion of F_i plus
  M_i/(p+1)! * ||y - x||^(p+1).  If the p-th derivative of F_i is Lipschitz
  with constant L and M_i > L, the model majorizes F_i and its error function
  is sandwiched by (M_i - L) and (M_i + L) times the power term.
* Proximal: F_i itself plus the same power term, whose error function is
  exactly the power term.

``certify`` samples a seeded cloud around the center and reports the observed
majorization violations and the empirical sandwich constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import MissingHessian
from .numerics import ensure_finite
from .problem import InnerOracle, ProblemSpec

TAYLOR_REG = "taylor_reg"
PROXIMAL = "proximal"


def power_value(dist: float, weight: float, order: int) -> float:
    return weight / math.factorial(order + 1) * dist ** (order + 1)


def power_grad(d: np.ndarray, weight: float, order: int) -> np.ndarray:
    nd = float(np.linalg.norm(d))
    if nd == 0.0:
        return np.zeros_like(d)
    return weight / math.factorial(order) * nd ** (order - 1) * d


def power_hess(d: np.ndarray, weight: float, order: int) -> np.ndarray:
    n = d.size
    nd = float(np.linalg.norm(d))
    coeff = weight / math.factorial(order)
    if order == 1:
        return coeff * np.eye(n)
    if nd == 0.0:
        return np.zeros((n, n))
    return coeff * (nd ** (order - 1) * np.eye(n) + (order - 1) * nd ** (order - 3) * np.outer(d, d))


class SurrogateModel:
    """Per-component upper-bound models anchored at a center point.

    The model data (values, gradients, Hessians at the center) is frozen at
    construction, so evaluation is exactly reproducible given the center,
    the oracles, and the regularization weights.
    """

    def __init__(
        self,
        center: np.ndarray,
        order: int,
        values: np.ndarray,
        grads: np.ndarray,
        hessians: Optional[np.ndarray],
        reg_weights: np.ndarray,
        kind: str = TAYLOR_REG,
        oracles: Optional[Sequence[InnerOracle]] = None,
        fd_hessian_used: bool = False,
    ):
        self.center = ensure_finite(center, "center")
        self.order = int(order)
        self.values = ensure_finite(values, "component values")
        self.grads = ensure_finite(grads, "component gradients")
        self.hessians = None if hessians is None else ensure_finite(hessians, "hessians")
        self.reg_weights = ensure_finite(reg_weights, "regularization weights")
        if np.any(self.reg_weights <= 0):
            raise ValueError("regularization weights must be strictly positive")
        self.kind = kind
        self.oracles = list(oracles) if oracles is not None else None
        self.fd_hessian_used = fd_hessian_used
        self.m = self.values.size
        self.n = self.center.size

    # -- evaluation -------------------------------------------------------

    def component_values(self, y: np.ndarray) -> np.ndarray:
        d = y - self.center
        nd = float(np.linalg.norm(d))
        if self.kind == PROXIMAL:
            base = np.array([orc.value(y) for orc in self.oracles], dtype=float)
            return base + np.array(
                [power_value(nd, w, self.order) for w in self.reg_weights]
            )
        out = self.values + self.grads @ d
        if self.order >= 2:
            out = out + 0.5 * np.einsum("i,mij,j->m", d, self.hessians, d)
        return out + self.reg_weights * (nd ** (self.order + 1) / math.factorial(self.order + 1))

    def component_grads(self, y: np.ndarray) -> np.ndarray:
        d = y - self.center
        if self.kind == PROXIMAL:
            base = np.array([orc.grad(y) for orc in self.oracles], dtype=float)
        else:
            base = self.grads.copy()
            if self.order >= 2:
                base = base + np.einsum("mij,j->mi", self.hessians, d)
        return base + np.array(
            [power_grad(d, w, self.order) for w in self.reg_weights]
        )

    def component_hessians(self, y: np.ndarray) -> np.ndarray:
        d = y - self.center
        if self.kind == PROXIMAL:
            if any(orc.hess is None for orc in self.oracles):
                raise MissingHessian("proximal model components lack Hessian oracles")
            base = np.array([orc.hess(y) for orc in self.oracles], dtype=float)
        elif self.order >= 2:
            base = self.hessians.copy()
        else:
            base = np.zeros((self.m, self.n, self.n))
        return base + np.array(
            [power_hess(d, w, self.order) for w in self.reg_weights]
        )


def _component_hessian(comp: InnerOracle, x: np.ndarray) -> tuple[np.ndarray, bool]:
    """Analytic Hessian when available, else forward differences on the gradient."""
    if comp.hess is not None:
        return np.asarray(comp.hess(x), dtype=float), False
    n = x.size
    h = 1e-7 * (1.0 + float(np.linalg.norm(x)))
    g0 = np.asarray(comp.grad(x), dtype=float)
    H = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        H[:, j] = (np.asarray(comp.grad(x + e), dtype=float) - g0) / h
    return 0.5 * (H + H.T), True


def _weights(m: int, weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim == 0:
        w = np.full(m, float(w))
    if w.size != m:
        raise ValueError(f"expected {m} regularization weights, got {w.size}")
    return w


def build_taylor(spec: ProblemSpec, x, order: int, reg_weights) -> SurrogateModel:
    """Order-p Taylor model of every component plus the regularizing power term."""
    x = ensure_finite(x, "center")
    if order not in (1, 2):
        raise ValueError("model order must be 1 or 2")
    weights = _weights(spec.m, reg_weights)
    values = spec.inner_values(x)
    grads = spec.inner_grads(x)
    hessians = None
    fd_used = False
    if order == 2:
        hs = []
        for comp in spec.inner:
            if comp.smoothness_order < 2 and comp.hess is None:
                raise MissingHessian(f"{spec.name}: order-2 model needs a Hessian oracle")
            H, used_fd = _component_hessian(comp, x)
            fd_used = fd_used or used_fd
            hs.append(H)
        hessians = np.array(hs)
    return SurrogateModel(
        center=x,
        order=order,
        values=values,
        grads=grads,
        hessians=hessians,
        reg_weights=weights,
        kind=TAYLOR_REG,
        fd_hessian_used=fd_used,
    )


def build_proximal(spec: ProblemSpec, x, order: int, reg_weights) -> SurrogateModel:
    """F_i(y) + M_i/(r+1)! ||y-x||^(r+1): the error is exactly the power term."""
    x = ensure_finite(x, "center")
    weights = _weights(spec.m, reg_weights)
    return SurrogateModel(
        center=x,
        order=order,
        values=spec.inner_values(x),
        grads=spec.inner_grads(x),
        hessians=None,
        reg_weights=weights,
        kind=PROXIMAL,
        oracles=spec.inner,
    )


@dataclass(frozen=True)
class ErrorBoundReport:
    """Sampled error-function statistics, one entry per component.

    ``violation`` is the largest observed (F_i - s_i)+, ``lower_coeff`` the
    smallest e_i * (p+1)! / ||y-x||^(p+1) (empirical lower sandwich constant),
    ``upper_coeff`` the largest |e_i| * (p+1)! / ||y-x||^(p+1).
    """

    violation: np.ndarray
    lower_coeff: np.ndarray
    upper_coeff: np.ndarray
    samples: int
    passed: bool


def certify(
    model: SurrogateModel,
    spec: ProblemSpec,
    cloud_radius: float = 1.0,
    samples: int = 1000,
    seed: int = 0,
) -> ErrorBoundReport:
    """Check the majorization and sandwich properties on a seeded sample cloud.

    The violation check uses every sample; the sandwich ratios skip samples
    closer than 1% of the cloud radius, where e / ||y-x||^(p+1) is dominated
    by cancellation noise (e is a difference of O(1) quantities).
    """
    rng = np.random.default_rng(seed)
    n = model.n
    p = model.order
    fact = math.factorial(p + 1)
    dist_floor = 1e-2 * cloud_radius
    viol = np.zeros(model.m)
    lo = np.full(model.m, np.inf)
    hi = np.zeros(model.m)
    passed = True
    for _ in range(samples):
        direction = rng.standard_normal(n)
        direction /= max(np.linalg.norm(direction), 1e-300)
        radius = cloud_radius * rng.uniform() ** (1.0 / n)
        y = model.center + radius * direction
        fvals = spec.inner_values(y)
        svals = model.component_values(y)
        err = svals - fvals
        dist = float(np.linalg.norm(y - model.center))
        viol = np.maximum(viol, fvals - svals)
        if dist >= dist_floor:
            denom = dist ** (p + 1) / fact
            lo = np.minimum(lo, err / denom)
            hi = np.maximum(hi, np.abs(err) / denom)
        if np.any(fvals - svals > 1e-10 * (1.0 + np.abs(fvals))):
            passed = False
    return ErrorBoundReport(
        violation=np.maximum(viol, 0.0), lower_coeff=lo, upper_coeff=hi,
        samples=samples, passed=passed,
    )


def check_model_convexity(
    model: SurrogateModel, samples: int = 1000, seed: int = 0, cloud_radius: float = 1.0
) -> bool:
    """Midpoint convexity of every component model on random pairs.

    Returns False at the first violation beyond 1e-10 relative.  For a
    regularized Taylor model of a convex p-smooth component this holds
    whenever the weight is at least p times the derivative Lipschitz constant.
    """
    if model.kind != TAYLOR_REG:
        raise ValueError("convexity check applies to Taylor-regularized models")
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        a = model.center + cloud_radius * rng.uniform(-1, 1, size=model.n)
        b = model.center + cloud_radius * rng.uniform(-1, 1, size=model.n)
        mid = 0.5 * (a + b)
        s_mid = model.component_values(mid)
        s_avg = 0.5 * (model.component_values(a) + model.component_values(b))
        if np.any(s_mid > s_avg + 1e-10 * (1.0 + np.abs(s_avg))):
            return False
    return True
