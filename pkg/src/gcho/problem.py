"""Composite problem definitions: inner map F with derivative oracles, an
outer aggregator g with a monotonicity/homogeneity contract, a simple term h,
and the benchmark problem registry.

A problem is  f(x) = g(F_1(x), ..., F_m(x)) + h(x)  where g is convex,
componentwise nondecreasing and positively homogeneous-bounded
(g(a*y) <= a*g(y) for a >= 0), and h is either zero or a box indicator.
The registry ships the classical More-Garbow-Hillstrom systems in two
formulations (``:ls`` sums the squared residuals, ``:minmax`` takes their
max), a one-dimensional max-type counterexample, and two synthetic convex
problems with known constants.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import OnBoundary, OracleError, UnknownProblem
from .numerics import ensure_finite, min_norm_in_hull

log = logging.getLogger("gcho")


# ---------------------------------------------------------------------------
# Oracle and problem types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InnerOracle:
    """One component F_i with value/gradient and optional Hessian oracles.

    ``lipschitz_hints`` maps a derivative order p to a known Lipschitz
    constant of the p-th derivative (synthetic problems only; the driver
    estimates the constant adaptively when no hint is present).
    """

    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None
    smoothness_order: int = 2
    lipschitz_hints: Optional[Mapping[int, float]] = None

    def hint_for(self, order: int) -> Optional[float]:
        if self.lipschitz_hints is None:
            return None
        return self.lipschitz_hints.get(order)


IDENTITY = "identity"
COORD_MAX = "coord_max"
FIRST_PLUS_MAX_PENALTY = "first_plus_max_penalty"


@dataclass(frozen=True)
class OuterFunction:
    """Aggregator g: R^m -> R, one of the three supported shapes.

    * ``identity``: g(y) = sum(y) (the plain composite/simple case; for m = 1
      this is the identity map).
    * ``coord_max``: g(y) = max(y) (min-max problems).
    * ``first_plus_max_penalty``: g(y) = y_1 + rho * max(0, y_2, ..., y_m),
      the exact-penalty reduction of a functionally constrained problem.

    All three are convex, componentwise nondecreasing, satisfy
    g(a*y) <= a*g(y) for a >= 0 and g(x + t*y) <= g(x) + t*g(y) for t >= 0,
    and have subdifferentials contained in the nonnegative orthant.
    """

    kind: str
    rho: float = 0.0

    def __post_init__(self):
        if self.kind not in (IDENTITY, COORD_MAX, FIRST_PLUS_MAX_PENALTY):
            raise ValueError(f"unknown outer kind {self.kind!r}")
        if self.kind == FIRST_PLUS_MAX_PENALTY:
            if self.rho < 0:
                raise ValueError("penalty weight must be nonnegative")
            if self.rho == 0:
                # With rho = 0 the aggregate ignores the constraint block, so
                # the descent constant g(-R) may lose its sign guarantee.
                log.warning("first_plus_max_penalty with rho=0: degenerate penalty")

    @staticmethod
    def identity() -> "OuterFunction":
        return OuterFunction(IDENTITY)

    @staticmethod
    def coord_max() -> "OuterFunction":
        return OuterFunction(COORD_MAX)

    @staticmethod
    def first_plus_max_penalty(rho: float) -> "OuterFunction":
        return OuterFunction(FIRST_PLUS_MAX_PENALTY, rho=rho)

    def eval(self, y) -> float:
        y = np.asarray(y, dtype=float)
        if self.kind == IDENTITY:
            return float(np.sum(y))
        if self.kind == COORD_MAX:
            return float(np.max(y))
        return float(y[0] + self.rho * max(0.0, float(np.max(y[1:])) if y.size > 1 else 0.0))

    def subdiff_generators(self, y, act_tol: float) -> list[np.ndarray]:
        """Vertex weights of the subdifferential at y (all in R^m_+)."""
        y = np.asarray(y, dtype=float)
        m = y.size
        if self.kind == IDENTITY:
            return [np.ones(m)]
        if self.kind == COORD_MAX:
            top = float(np.max(y))
            gens = []
            for i in range(m):
                if y[i] >= top - act_tol:
                    e = np.zeros(m)
                    e[i] = 1.0
                    gens.append(e)
            return gens
        # first + penalized max(0, y_2..y_m): each active branch of the inner
        # max contributes a vertex; the zero branch contributes slope 0.
        base = np.zeros(m)
        base[0] = 1.0
        tail_top = float(np.max(y[1:])) if m > 1 else -np.inf
        top = max(0.0, tail_top)
        gens = []
        if 0.0 >= top - act_tol:
            gens.append(base.copy())
        for i in range(1, m):
            if y[i] >= top - act_tol:
                e = base.copy()
                e[i] = self.rho
                gens.append(e)
        return gens


ZERO = "zero"
BOX = "box"


@dataclass(frozen=True)
class SimpleTerm:
    """The simple term h: zero or a box indicator (+inf outside [lo, hi])."""

    kind: str = ZERO
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None

    @staticmethod
    def zero() -> "SimpleTerm":
        return SimpleTerm(ZERO)

    @staticmethod
    def box(lo, hi) -> "SimpleTerm":
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if np.any(lo > hi):
            raise ValueError("empty box")
        return SimpleTerm(BOX, lo=lo, hi=hi)

    @property
    def has_prox(self) -> bool:
        return True  # both supported kinds admit a closed-form projection

    def eval(self, x: np.ndarray) -> float:
        if self.kind == ZERO:
            return 0.0
        if np.any(x < self.lo) or np.any(x > self.hi):
            return math.inf
        return 0.0

    def project(self, x: np.ndarray) -> np.ndarray:
        if self.kind == ZERO:
            return x
        return np.clip(x, self.lo, self.hi)

    def on_boundary(self, x: np.ndarray, tol: float = 1e-12) -> bool:
        if self.kind == ZERO:
            return False
        scale = 1.0 + float(np.max(np.abs(x)))
        return bool(
            np.any(np.abs(x - self.lo) <= tol * scale)
            or np.any(np.abs(x - self.hi) <= tol * scale)
        )


@dataclass(frozen=True)
class ProblemSpec:
    """A composite problem plus benchmark metadata.

    ``known_solutions`` and ``known_fstar`` are optional reference data used
    by the benchmark gates; ``x0`` is the canonical starting point.
    """

    name: str
    n: int
    m: int
    inner: Sequence[InnerOracle]
    outer: OuterFunction
    simple: SimpleTerm
    x0: np.ndarray
    known_solutions: Sequence[np.ndarray] = field(default_factory=list)
    known_fstar: Optional[float] = None

    def __post_init__(self):
        if len(self.inner) != self.m:
            raise ValueError(f"{self.name}: m={self.m} but {len(self.inner)} components")
        if np.asarray(self.x0, dtype=float).size != self.n:
            raise ValueError(f"{self.name}: x0 has wrong dimension")

    def inner_values(self, x: np.ndarray) -> np.ndarray:
        try:
            vals = np.array([comp.value(x) for comp in self.inner], dtype=float)
        except Exception as exc:  # oracle bugs surface with context
            raise OracleError(f"{self.name}: component evaluation failed at x={x}") from exc
        if not np.all(np.isfinite(vals)):
            raise OracleError(f"{self.name}: non-finite component value at x={x}")
        return vals

    def inner_grads(self, x: np.ndarray) -> np.ndarray:
        try:
            grads = np.array([comp.grad(x) for comp in self.inner], dtype=float)
        except Exception as exc:
            raise OracleError(f"{self.name}: gradient oracle failed at x={x}") from exc
        if not np.all(np.isfinite(grads)):
            raise OracleError(f"{self.name}: non-finite gradient at x={x}")
        return grads


@dataclass(frozen=True)
class CompositeValue:
    """Component values together with the assembled objective."""

    inner_values: np.ndarray
    f: float


def default_act_tol(outer_value: float) -> float:
    """Scale-invariant activity tolerance for kink detection."""
    return 1e-8 * (1.0 + abs(outer_value))


def evaluate(spec: ProblemSpec, x) -> CompositeValue:
    """f(x) = g(F(x)) + h(x); domain violations return +inf, not exceptions."""
    x = ensure_finite(x, "x")
    hval = spec.simple.eval(x)
    vals = spec.inner_values(x)
    if not math.isfinite(hval):
        return CompositeValue(inner_values=vals, f=math.inf)
    return CompositeValue(inner_values=vals, f=spec.outer.eval(vals) + hval)


def subgradient_generators(
    spec: ProblemSpec, x, act_tol: Optional[float] = None
) -> list[np.ndarray]:
    """Chain-rule generators sum_i u_i * grad F_i(x), one per vertex weight u
    of the outer subdifferential at F(x).

    Raises :class:`OnBoundary` when x sits on the box boundary of h, where
    the generator set would need normal-cone terms.
    """
    x = ensure_finite(x, "x")
    if spec.simple.on_boundary(x):
        raise OnBoundary(f"{spec.name}: x on the box boundary, normal cone not modeled")
    vals = spec.inner_values(x)
    if act_tol is None:
        act_tol = default_act_tol(spec.outer.eval(vals))
    grads = spec.inner_grads(x)
    return [grads.T @ u for u in spec.outer.subdiff_generators(vals, act_tol)]


def stationarity_measure(
    spec: ProblemSpec, x, act_tol: Optional[float] = None
) -> float:
    """dist(0, conv{chain-rule generators}) at x, via the min-norm-point solver."""
    gens = subgradient_generators(spec, x, act_tol)
    point, _ = min_norm_in_hull(np.array(gens))
    return float(np.linalg.norm(point))


# ---------------------------------------------------------------------------
# Residual definitions for the benchmark registry
# ---------------------------------------------------------------------------

def _oracle(value, grad, hess, order=2, hints=None) -> InnerOracle:
    return InnerOracle(
        value=value, grad=grad, hess=hess, smoothness_order=order, lipschitz_hints=hints
    )


def _squared(comp: InnerOracle) -> InnerOracle:
    """The component F^2 with derivatives assembled from F's oracles."""

    def value(x):
        return comp.value(x) ** 2

    def grad(x):
        return 2.0 * comp.value(x) * comp.grad(x)

    def hess(x):
        g = comp.grad(x)
        return 2.0 * (np.outer(g, g) + comp.value(x) * comp.hess(x))

    return _oracle(value, grad, hess)


# MGH 1, Rosenbrock.  x0 = (-1.2, 1), root at (1, 1).
def _mgh01() -> list[InnerOracle]:
    return [
        _oracle(
            lambda x: 10.0 * (x[1] - x[0] ** 2),
            lambda x: np.array([-20.0 * x[0], 10.0]),
            lambda x: np.array([[-20.0, 0.0], [0.0, 0.0]]),
        ),
        _oracle(
            lambda x: 1.0 - x[0],
            lambda x: np.array([-1.0, 0.0]),
            lambda x: np.zeros((2, 2)),
        ),
    ]


# MGH 2, Freudenstein-Roth.  x0 = (0.5, -2); root (5, 4), plus the classical
# local least-squares minimizer near (11.413, -0.897).
def _mgh02() -> list[InnerOracle]:
    return [
        _oracle(
            lambda x: -13.0 + x[0] + ((5.0 - x[1]) * x[1] - 2.0) * x[1],
            lambda x: np.array([1.0, 10.0 * x[1] - 3.0 * x[1] ** 2 - 2.0]),
            lambda x: np.array([[0.0, 0.0], [0.0, 10.0 - 6.0 * x[1]]]),
        ),
        _oracle(
            lambda x: -29.0 + x[0] + ((x[1] + 1.0) * x[1] - 14.0) * x[1],
            lambda x: np.array([1.0, 3.0 * x[1] ** 2 + 2.0 * x[1] - 14.0]),
            lambda x: np.array([[0.0, 0.0], [0.0, 6.0 * x[1] + 2.0]]),
        ),
    ]


# MGH 4, Brown badly scaled.  x0 = (1, 1), root (1e6, 2e-6).  Included for
# completeness; excluded from pass/fail gates because of its extreme scaling.
def _mgh04() -> list[InnerOracle]:
    return [
        _oracle(
            lambda x: x[0] - 1.0e6,
            lambda x: np.array([1.0, 0.0]),
            lambda x: np.zeros((2, 2)),
        ),
        _oracle(
            lambda x: x[1] - 2.0e-6,
            lambda x: np.array([0.0, 1.0]),
            lambda x: np.zeros((2, 2)),
        ),
        _oracle(
            lambda x: x[0] * x[1] - 2.0,
            lambda x: np.array([x[1], x[0]]),
            lambda x: np.array([[0.0, 1.0], [1.0, 0.0]]),
        ),
    ]


# MGH 5, Beale.  x0 = (1, 1), root (3, 0.5).
def _mgh05() -> list[InnerOracle]:
    ys = (1.5, 2.25, 2.625)

    def make(i, yi):
        def value(x):
            return yi - x[0] * (1.0 - x[1] ** i)

        def grad(x):
            return np.array([-(1.0 - x[1] ** i), i * x[0] * x[1] ** (i - 1)])

        def hess(x):
            cross = i * x[1] ** (i - 1)
            curv = i * (i - 1) * x[0] * x[1] ** (i - 2) if i >= 2 else 0.0
            return np.array([[0.0, cross], [cross, curv]])

        return _oracle(value, grad, hess)

    return [make(i, yi) for i, yi in enumerate(ys, start=1)]


# MGH 7, helical valley.  x0 = (-1, 0, 0), root (1, 0, 0).  The angular term
# is smooth away from the ray {x1 = 0, x2 < 0}.
def _mgh07() -> list[InnerOracle]:
    two_pi = 2.0 * math.pi

    def theta(x):
        t = math.atan2(x[1], x[0]) / two_pi
        return t + 1.0 if t < -0.25 else t  # branch cut on x1 = 0, x2 < 0

    def f1(x):
        return 10.0 * (x[2] - 10.0 * theta(x))

    def g1(x):
        r2 = x[0] ** 2 + x[1] ** 2
        c = 100.0 / two_pi
        return np.array([c * x[1] / r2, -c * x[0] / r2, 10.0])

    def h1(x):
        r2 = x[0] ** 2 + x[1] ** 2
        c = 100.0 / two_pi
        a = 2.0 * x[0] * x[1] / r2**2
        b = (x[1] ** 2 - x[0] ** 2) / r2**2
        return np.array([[-c * a, -c * b, 0.0], [-c * b, c * a, 0.0], [0.0, 0.0, 0.0]])

    def f2(x):
        return 10.0 * (math.hypot(x[0], x[1]) - 1.0)

    def g2(x):
        r = math.hypot(x[0], x[1])
        return np.array([10.0 * x[0] / r, 10.0 * x[1] / r, 0.0])

    def h2(x):
        r = math.hypot(x[0], x[1])
        return (10.0 / r**3) * np.array(
            [[x[1] ** 2, -x[0] * x[1], 0.0], [-x[0] * x[1], x[0] ** 2, 0.0], [0.0, 0.0, 0.0]]
        )

    return [
        _oracle(f1, g1, h1),
        _oracle(f2, g2, h2),
        _oracle(lambda x: x[2], lambda x: np.array([0.0, 0.0, 1.0]), lambda x: np.zeros((3, 3))),
    ]


# MGH 13, Powell singular.  x0 = (3, -1, 0, 1), minimizer at the origin with a
# singular Hessian.
def _mgh13() -> list[InnerOracle]:
    s5 = math.sqrt(5.0)
    s10 = math.sqrt(10.0)

    def h3(x):
        out = np.zeros((4, 4))
        out[1, 1] = 2.0
        out[1, 2] = out[2, 1] = -4.0
        out[2, 2] = 8.0
        return out

    def h4(x):
        out = np.zeros((4, 4))
        out[0, 0] = out[3, 3] = 2.0 * s10
        out[0, 3] = out[3, 0] = -2.0 * s10
        return out

    return [
        _oracle(
            lambda x: x[0] + 10.0 * x[1],
            lambda x: np.array([1.0, 10.0, 0.0, 0.0]),
            lambda x: np.zeros((4, 4)),
        ),
        _oracle(
            lambda x: s5 * (x[2] - x[3]),
            lambda x: np.array([0.0, 0.0, s5, -s5]),
            lambda x: np.zeros((4, 4)),
        ),
        _oracle(
            lambda x: (x[1] - 2.0 * x[2]) ** 2,
            lambda x: np.array([0.0, 2.0 * (x[1] - 2.0 * x[2]), -4.0 * (x[1] - 2.0 * x[2]), 0.0]),
            h3,
        ),
        _oracle(
            lambda x: s10 * (x[0] - x[3]) ** 2,
            lambda x: s10 * np.array([2.0 * (x[0] - x[3]), 0.0, 0.0, -2.0 * (x[0] - x[3])]),
            h4,
        ),
    ]


# MGH 14, Wood.  x0 = (-3, -1, -3, -1), root (1, 1, 1, 1).
def _mgh14() -> list[InnerOracle]:
    s90 = math.sqrt(90.0)
    s10 = math.sqrt(10.0)

    def h1(x):
        out = np.zeros((4, 4))
        out[0, 0] = -20.0
        return out

    def h3(x):
        out = np.zeros((4, 4))
        out[2, 2] = -2.0 * s90
        return out

    return [
        _oracle(
            lambda x: 10.0 * (x[1] - x[0] ** 2),
            lambda x: np.array([-20.0 * x[0], 10.0, 0.0, 0.0]),
            h1,
        ),
        _oracle(
            lambda x: 1.0 - x[0],
            lambda x: np.array([-1.0, 0.0, 0.0, 0.0]),
            lambda x: np.zeros((4, 4)),
        ),
        _oracle(
            lambda x: s90 * (x[3] - x[2] ** 2),
            lambda x: np.array([0.0, 0.0, -2.0 * s90 * x[2], s90]),
            h3,
        ),
        _oracle(
            lambda x: 1.0 - x[2],
            lambda x: np.array([0.0, 0.0, -1.0, 0.0]),
            lambda x: np.zeros((4, 4)),
        ),
        _oracle(
            lambda x: s10 * (x[1] + x[3] - 2.0),
            lambda x: np.array([0.0, s10, 0.0, s10]),
            lambda x: np.zeros((4, 4)),
        ),
        _oracle(
            lambda x: (x[1] - x[3]) / s10,
            lambda x: np.array([0.0, 1.0 / s10, 0.0, -1.0 / s10]),
            lambda x: np.zeros((4, 4)),
        ),
    ]


_MGH = {
    "mgh01": dict(residuals=_mgh01, n=2, x0=(-1.2, 1.0), solutions=[(1.0, 1.0)]),
    "mgh02": dict(
        residuals=_mgh02,
        n=2,
        x0=(0.5, -2.0),
        solutions=[(5.0, 4.0), (11.412779, -0.896805)],
    ),
    "mgh04": dict(residuals=_mgh04, n=2, x0=(1.0, 1.0), solutions=[(1.0e6, 2.0e-6)]),
    "mgh05": dict(residuals=_mgh05, n=2, x0=(1.0, 1.0), solutions=[(3.0, 0.5)]),
    "mgh07": dict(residuals=_mgh07, n=3, x0=(-1.0, 0.0, 0.0), solutions=[(1.0, 0.0, 0.0)]),
    "mgh13": dict(
        residuals=_mgh13, n=4, x0=(3.0, -1.0, 0.0, 1.0), solutions=[(0.0, 0.0, 0.0, 0.0)]
    ),
    "mgh14": dict(
        residuals=_mgh14,
        n=4,
        x0=(-3.0, -1.0, -3.0, -1.0),
        solutions=[(1.0, 1.0, 1.0, 1.0)],
        # Balanced stationary point of the max-of-squares formulation: five
        # squared residuals tie at 3.0247522574 and the hull of their
        # gradients contains the origin (dist < 1e-15; local minimality
        # confirmed by dense random probing).  Exact model minimization from
        # the canonical start provably funnels here, not to the root.
        minmax_solutions=[(-0.73918149, 0.72030742, -0.73918149, 0.7297151)],
    ),
}

GATED_MGH = ("mgh01", "mgh02", "mgh05", "mgh07", "mgh13", "mgh14")


def _toymax() -> ProblemSpec:
    # f(x) = max(x^2 - 1, 1 - x^2): every iterate of a max-type method stays on
    # one smooth branch, so iterate stationarity fails while certificate
    # stationarity holds.  Gradient Lipschitz constant 2 on both branches.
    comps = [
        _oracle(
            lambda x: x[0] ** 2 - 1.0,
            lambda x: np.array([2.0 * x[0]]),
            lambda x: np.array([[2.0]]),
            hints={1: 2.0, 2: 0.0},
        ),
        _oracle(
            lambda x: 1.0 - x[0] ** 2,
            lambda x: np.array([-2.0 * x[0]]),
            lambda x: np.array([[-2.0]]),
            hints={1: 2.0, 2: 0.0},
        ),
    ]
    return ProblemSpec(
        name="toymax",
        n=1,
        m=2,
        inner=comps,
        outer=OuterFunction.coord_max(),
        simple=SimpleTerm.zero(),
        x0=np.array([2.0]),
        known_solutions=[np.array([1.0]), np.array([-1.0])],
        known_fstar=0.0,
    )


def _cvx_quad_max() -> ProblemSpec:
    # max of three convex quadratics; optimum 0 at the origin where the hull
    # of gradients {(1,0), (-1,0), (0,1)} contains 0.
    def make(b):
        b = np.asarray(b, dtype=float)
        return _oracle(
            lambda x, b=b: 0.5 * float(x @ x) + float(b @ x),
            lambda x, b=b: x + b,
            lambda x: np.eye(2),
            hints={1: 1.0, 2: 0.0},
        )

    comps = [make((1.0, 0.0)), make((-1.0, 0.0)), make((0.0, 1.0))]
    return ProblemSpec(
        name="cvx-quad-max",
        n=2,
        m=3,
        inner=comps,
        outer=OuterFunction.coord_max(),
        simple=SimpleTerm.zero(),
        x0=np.array([1.5, 0.7]),
        known_solutions=[np.zeros(2)],
        known_fstar=0.0,
    )


CVX_LS_ROWS = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
CVX_LS_RHS = np.array([1.0, 0.0, 2.0])
# Normal equations [[2,1],[1,2]] x = (3,2) give x* = (4/3, 1/3), f* = 1/3.
CVX_LS_XSTAR = np.array([4.0 / 3.0, 1.0 / 3.0])
CVX_LS_FSTAR = 1.0 / 3.0


def _cvx_ls() -> ProblemSpec:
    # Sum of squared affine residuals (each component is the convex quadratic
    # (a_i.x - b_i)^2, so its Hessian 2 a_i a_i^T is constant).
    def make(a, b):
        a = np.asarray(a, dtype=float)
        return _oracle(
            lambda x, a=a, b=b: float(a @ x - b) ** 2,
            lambda x, a=a, b=b: 2.0 * float(a @ x - b) * a,
            lambda x, a=a: 2.0 * np.outer(a, a),
            hints={1: 2.0 * float(a @ a), 2: 0.0},
        )

    comps = [make(a, b) for a, b in zip(CVX_LS_ROWS, CVX_LS_RHS)]
    return ProblemSpec(
        name="cvx-ls",
        n=2,
        m=3,
        inner=comps,
        outer=OuterFunction.identity(),
        simple=SimpleTerm.zero(),
        x0=np.array([3.0, -2.0]),
        known_solutions=[CVX_LS_XSTAR.copy()],
        known_fstar=CVX_LS_FSTAR,
    )


def registry_names() -> list[str]:
    names = []
    for base in _MGH:
        names.extend([f"{base}:ls", f"{base}:minmax"])
    names.extend(["toymax", "cvx-quad-max", "cvx-ls"])
    return names


def registry_lookup(name: str) -> ProblemSpec:
    """Return a registered problem, e.g. ``mgh01:minmax`` or ``toymax``."""
    if name == "toymax":
        return _toymax()
    if name == "cvx-quad-max":
        return _cvx_quad_max()
    if name == "cvx-ls":
        return _cvx_ls()
    if ":" in name:
        base, form = name.split(":", 1)
        if base in _MGH and form in ("ls", "minmax"):
            entry = _MGH[base]
            squared = [_squared(c) for c in entry["residuals"]()]
            outer = OuterFunction.identity() if form == "ls" else OuterFunction.coord_max()
            solutions = list(entry["solutions"])
            if form == "minmax":
                solutions += entry.get("minmax_solutions", [])
            return ProblemSpec(
                name=name,
                n=entry["n"],
                m=len(squared),
                inner=squared,
                outer=outer,
                simple=SimpleTerm.zero(),
                x0=np.asarray(entry["x0"], dtype=float),
                known_solutions=[np.asarray(s, dtype=float) for s in solutions],
                known_fstar=0.0,
            )
    raise UnknownProblem(f"no registered problem named {name!r}")
