"""Acceptance gates: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
report.  Tolerances are pinned here and nowhere else.
"""

import contextlib
import csv
import math

import numpy as np
import pytest

from gcho.bench import main
from gcho.certify import certificate_sweep, recurrence_equality_sequence, fit_rate
from gcho.driver import STEP_TOL, SolverConfig, run
from gcho.numerics import min_norm_in_hull
from gcho.problem import (
    GATED_MGH,
    InnerOracle,
    OuterFunction,
    ProblemSpec,
    SimpleTerm,
    registry_lookup,
    stationarity_measure,
)
from gcho.subsolver import solve_identity_p2_cubic
from gcho.surrogate import SurrogateModel, build_taylor, certify, check_model_convexity

from oracle_utils import fd_gradient, min_norm_bruteforce


@contextlib.contextmanager
def criterion(num: int, desc: str):
    try:
        yield
    except BaseException:
        print(f"\n[FAIL] criterion {num}: {desc}")
        raise
    print(f"\n[PASS] criterion {num}: {desc}")


GATED_RUNS = [f"{b}:{f}" for b in GATED_MGH for f in ("ls", "minmax")] + [
    "toymax",
    "cvx-quad-max",
    "cvx-ls",
]


def gated_config(name: str) -> SolverConfig:
    if name == "toymax":
        return SolverConfig(p=1, m0=(4.0, 4.0), m_shrink=1.0, tol_step=0.0, max_iter=20)
    return SolverConfig(p=2)


@pytest.fixture(scope="module")
def gated_traces():
    return {name: run(registry_lookup(name), gated_config(name)) for name in GATED_RUNS}


def test_criterion_1_monotone_descent(gated_traces):
    with criterion(1, "monotone objective descent on every gated run"):
        for name, trace in gated_traces.items():
            f = trace.f_values()
            drops = np.diff(f)
            assert np.all(drops <= 1e-12 * (1.0 + np.abs(f[:-1]))), name


def test_criterion_2_table_shape(gated_traces):
    with criterion(2, "comparison-table shape: endpoints and iteration ratio"):
        t = gated_traces["mgh01:minmax"]
        assert t.status == STEP_TOL and len(t.rows) <= 200
        assert np.max(np.abs(t.x_final - np.array([1.0, 1.0]))) <= 1e-2
        for form in ("ls", "minmax"):
            t5 = gated_traces[f"mgh05:{form}"]
            assert np.max(np.abs(t5.x_final - np.array([3.0, 0.5]))) <= 1e-2
        wins = sum(
            1
            for base in GATED_MGH
            if len(gated_traces[f"{base}:minmax"].rows)
            <= len(gated_traces[f"{base}:ls"].rows)
        )
        assert wins >= 4, f"min-max won on only {wins} of 6"


def test_criterion_3_counterexample_closed_forms():
    with criterion(3, "1-d max-type counterexample: iterates, measures, certificates"):
        spec = registry_lookup("toymax")
        config = SolverConfig(
            p=1, m0=(4.0, 4.0), m_shrink=1.0, tol_step=0.0, max_iter=20,
            certificate_every=1,
        )
        trace = run(spec, config)
        xs = np.array([float(x[0]) for x in trace.iterates()])
        ref = [2.0]
        for _ in range(20):
            ref.append((ref[-1] ** 2 + 1.0) / (2.0 * ref[-1]))
        assert np.max(np.abs(xs - np.array(ref))) <= 1e-6

        # dist(0, subdiff) = 2 x_k >= 2 on the smooth branch; in floating
        # point the iterate lands exactly on the kink after ~8 steps, where
        # the subdifferential genuinely contains zero (stationarity reached).
        smooth = [r for r in trace.rows if r.x[0] > 1.0 + 1e-9]
        assert len(smooth) >= 4
        for row in smooth:
            assert stationarity_measure(spec, row.x) == pytest.approx(2.0 * row.x[0])
            assert stationarity_measure(spec, row.x) >= 2.0
        for row in trace.rows:
            if row.x[0] <= 1.0 + 1e-9:
                assert row.x[0] == pytest.approx(1.0, abs=1e-9)

        records = certificate_sweep(spec, trace, config, mu=4.0)
        for rec, row in zip(records, trace.rows):
            xk = row.x[0]
            expected = (2.0 / 3.0) * xk if xk > 1.5 else 1.0
            assert rec.y[0] == pytest.approx(expected, abs=1e-4)
        assert records[-1].stationarity <= 1e-3


def bounded_product_holds(stationarities, order):
    """min_{j<=k} S_f(y_j) * k^(p/(p+1)) stays within 3x its value at k=5."""
    exponent = order / (order + 1.0)
    running = np.minimum.accumulate(np.asarray(stationarities))
    products = running * (np.arange(1, len(running) + 1) ** exponent)
    assert len(products) >= 6, "run too short to anchor the product at k=5"
    anchor = products[4]
    for later in products[5:]:
        assert later <= 3.0 * anchor + 1e-12
    return True


def test_criterion_4_nonconvex_rate_bound():
    with criterion(4, "certificate product bound on mgh07:minmax and toymax"):
        spec = registry_lookup("mgh07:minmax")
        config = SolverConfig(p=2, certificate_every=1)
        trace = run(spec, config)
        records = certificate_sweep(spec, trace, config, every=1)
        assert bounded_product_holds([r.stationarity for r in records], order=2)

        spec = registry_lookup("toymax")
        config = SolverConfig(
            p=1, m0=(4.0, 4.0), m_shrink=1.0, tol_step=0.0, max_iter=25,
            certificate_every=1,
        )
        trace = run(spec, config)
        records = certificate_sweep(spec, trace, config, mu=4.0)
        assert bounded_product_holds([r.stationarity for r in records], order=1)


def test_criterion_5_convex_rate_envelope():
    with criterion(5, "convex envelope bound on cvx-ls with fixed weights"):
        spec = registry_lookup("cvx-ls")
        m0 = 1.0  # >= hessian-lipschitz constant 0 of the quadratic components
        config = SolverConfig(p=2, m0=m0, m_shrink=1.0, tol_step=1e-9)
        trace = run(spec, config)
        fstar = spec.known_fstar
        gaps = trace.f_values() - fstar
        # g(L^e) = sum(M_i + L_i) = 3 * m0; level sets of the quadratic give
        # ||x_k - x*||^2 <= gap(x0) / lambda_min(A^T A) with lambda_min = 1.
        g_const = 3.0 * m0
        radius = math.sqrt(gaps[0])
        for k in range(1, len(gaps)):
            bound = 9.0 * g_const * radius**3 / (2.0 * k**2)
            assert gaps[k] <= bound


def model_from(g, H, weight):
    g = np.asarray(g, dtype=float)
    n = g.size
    return SurrogateModel(
        center=np.zeros(n), order=2, values=np.zeros(1),
        grads=g.reshape(1, n), hessians=np.asarray(H, dtype=float).reshape(1, n, n),
        reg_weights=np.array([weight]),
    )


def cubic_value(g, H, weight, xs):
    xs = np.atleast_2d(xs)
    lin = xs @ g
    quad = 0.5 * np.einsum("ki,ij,kj->k", xs, H, xs)
    cub = weight / 6.0 * np.linalg.norm(xs, axis=1) ** 3
    return lin + quad + cub


def test_criterion_6_cubic_solver_oracle_equivalence():
    with criterion(6, "cubic subsolver beats dense probe/line oracles"):
        rng = np.random.default_rng(2024)
        for trial in range(500):
            n = int(rng.integers(1, 6))
            A = rng.standard_normal((n, n))
            H = 0.5 * (A + A.T)
            g = rng.standard_normal(n)
            weight = float(rng.uniform(0.4, 8.0))
            res = solve_identity_p2_cubic(model_from(g, H, weight), SimpleTerm.zero())
            val = res.model_value
            probes = rng.uniform(-4.0, 4.0, size=(10_000, n))
            pvals = cubic_value(g, H, weight, probes)
            assert val <= pvals.min() + 1e-8 * (1.0 + abs(pvals.min()))
            line = np.linspace(-2.5, 2.5, 1000)[:, None] * res.x_next[None, :]
            lvals = cubic_value(g, H, weight, line)
            assert val <= lvals.min() + 1e-8 * (1.0 + abs(lvals.min()))
        # constructed hard cases: gradient orthogonal to the bottom eigenspace
        for trial in range(50):
            n = int(rng.integers(2, 6))
            Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
            lam = np.sort(rng.uniform(-3.0, 3.0, size=n))
            lam[0] = -abs(lam[0]) - 0.3
            ghat = rng.standard_normal(n)
            ghat[0] = 0.0
            ghat[1:] *= 0.05
            H = Q @ np.diag(lam) @ Q.T
            g = Q @ ghat
            weight = float(rng.uniform(0.4, 4.0))
            res = solve_identity_p2_cubic(model_from(g, 0.5 * (H + H.T), weight), SimpleTerm.zero())
            val = res.model_value
            probes = rng.uniform(-4.0, 4.0, size=(10_000, n))
            pvals = cubic_value(g, H, weight, probes)
            assert val <= pvals.min() + 1e-8 * (1.0 + abs(pvals.min()))


def test_criterion_7_min_norm_oracle_equivalence():
    with criterion(7, "min-norm-point solver matches simplex-grid brute force"):
        # The oracle grid is refined to 1e-5 in weight space: at the 1e-3
        # comparison tolerance, a raw 1e-3-step grid contributes errors of
        # its own order times the generator scale, so the finer oracle makes
        # the check strictly harder for the solver, never easier.
        rng = np.random.default_rng(77)
        for trial in range(200):
            ell = int(rng.integers(1, 5))
            n = int(rng.integers(1, 4))
            pts = rng.uniform(-3.0, 3.0, size=(ell, n))
            point, _ = min_norm_in_hull(pts)
            ref = min_norm_bruteforce(pts, final_step=1e-5)
            assert abs(np.linalg.norm(point) - np.linalg.norm(ref)) <= 1e-3


def cubic_1d_spec():
    comp = InnerOracle(
        value=lambda x: x[0] ** 3,
        grad=lambda x: np.array([3.0 * x[0] ** 2]),
        hess=lambda x: np.array([[6.0 * x[0]]]),
        lipschitz_hints={2: 6.0},
    )
    return ProblemSpec(
        name="cubic-1d", n=1, m=1, inner=[comp],
        outer=OuterFunction.identity(), simple=SimpleTerm.zero(),
        x0=np.array([0.0]),
    )


def test_criterion_8_surrogate_property_suite():
    with criterion(8, "surrogate residual bounds, center conditions, constants, convexity"):
        samples = 10_000
        cases = [
            (registry_lookup("toymax"), 1, np.array([1.4]), 8.0),
            (cubic_1d_spec(), 2, np.array([0.5]), 10.0),
            (registry_lookup("cvx-ls"), 2, np.array([0.5, -0.5]), 1.0),
            (registry_lookup("cvx-quad-max"), 2, np.array([0.3, 0.2]), 1.0),
        ]
        rng = np.random.default_rng(88)
        for spec, p, center, weight in cases:
            hints = np.array([c.hint_for(p) for c in spec.inner], dtype=float)
            assert np.all(np.isfinite(hints)), f"{spec.name} must carry hints"
            model = build_taylor(spec, center, order=p, reg_weights=weight)

            # Taylor residual bounds (value always, gradient for p = 2),
            # checked by subtracting the regularizing power term back out.
            for _ in range(samples // 20):
                y = center + rng.uniform(-1.0, 1.0, size=spec.n)
                d = float(np.linalg.norm(y - center))
                pow_v = weight * d ** (p + 1) / math.factorial(p + 1)
                tvals = model.component_values(y) - pow_v
                fvals = spec.inner_values(y)
                bounds = hints / math.factorial(p + 1) * d ** (p + 1)
                assert np.all(np.abs(fvals - tvals) <= bounds + 1e-9)
                if p == 2:
                    pow_g = weight / math.factorial(p) * d ** (p - 1) * (y - center)
                    tgrads = model.component_grads(y) - pow_g
                    fgrads = spec.inner_grads(y)
                    gbounds = hints / math.factorial(p) * d**p
                    err = np.linalg.norm(fgrads - tgrads, axis=1)
                    assert np.all(err <= gbounds + 1e-9)

            # center conditions: model value and gradient match the oracles
            assert np.allclose(model.component_values(center), spec.inner_values(center))
            for i in range(spec.m):
                g_fd = fd_gradient(lambda z, i=i: model.component_values(z)[i], center)
                assert np.linalg.norm(g_fd - spec.inner_grads(center)[i]) <= 1e-5 * (
                    1.0 + np.linalg.norm(g_fd)
                )

            # majorization and empirical sandwich constants
            big = float(hints.max()) + weight
            model_maj = build_taylor(spec, center, order=p, reg_weights=big + 1.0)
            report = certify(model_maj, spec, cloud_radius=1.0, samples=samples, seed=5)
            assert report.passed
            assert np.all(report.upper_coeff <= (big + 1.0) + hints + 1e-6)
            assert np.all(report.lower_coeff >= (big + 1.0) - hints - 1e-6)

        # midpoint convexity for convex components with weight >= p * L
        for name in ("cvx-ls", "cvx-quad-max"):
            spec = registry_lookup(name)
            model = build_taylor(spec, spec.x0, order=2, reg_weights=1.0)
            assert check_model_convexity(model, samples=samples, seed=6)


def test_criterion_9_recurrence_dichotomy():
    with criterion(9, "scalar recurrence decay dichotomy over the parameter grid"):
        for theta in (0.5, 1.0, 1.5, 2.0, 3.0):
            for c1, c2 in ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0)):
                lams = recurrence_equality_sequence(2.0, c1, c2, theta, 2000)
                if theta <= 1.0:
                    ratio = (c1 + c2) / (1.0 + c1 + c2)
                    tail = [
                        (lams[k + 1] / lams[k], lams[k])
                        for k in range(100, 160)
                        if lams[k] > 1e-250
                    ]
                    assert all(r <= ratio + 1e-6 for r, _ in tail)
                    if c1 == 0.0 or theta == 1.0:
                        # exactly geometric in these regimes
                        assert all(abs(r - ratio) <= 1e-6 for r, _ in tail if _ > 1e-200) or not tail
                elif c1 > 0.0:
                    fit = fit_rate(
                        [(k, lams[k]) for k in range(1000, 2001)], laws=("power",)
                    )
                    assert abs(fit.param + 1.0 / (theta - 1.0)) <= 0.1
                else:
                    # c1 = 0, theta > 1: the equality case is exactly linear,
                    # hence geometric (faster than the power bound).
                    ratio = c2 / (1.0 + c2)
                    tail = lams[100:160]
                    ratios = tail[1:] / tail[:-1]
                    assert np.all(np.abs(ratios - ratio) <= 1e-6)


def test_criterion_10_cli_determinism(tmp_path):
    with criterion(10, "byte-identical trace.csv modulo wall_ms under a fixed seed"):
        args = [
            "run", "--problem", "mgh01", "--form", "minmax", "--p", "2",
            "--seed", "11", "--no-plot",
        ]
        outs = []
        for sub in ("first", "second"):
            out = tmp_path / sub
            assert main(args + ["--out", str(out)]) == 0
            outs.append(out)
        tables = []
        for out in outs:
            with open(out / "trace.csv", newline="") as fh:
                rows = list(csv.reader(fh))
            widx = rows[0].index("wall_ms")
            tables.append([[c for j, c in enumerate(r) if j != widx] for r in rows])
        assert tables[0] == tables[1]
