import numpy as np
import pytest

from gcho.errors import BadBracket, NonFinite, NonSymmetric
from gcho.numerics import eigh, min_norm_in_hull, solve_scalar_increasing

from oracle_utils import min_norm_bruteforce


class TestEigh:
    def test_identity(self):
        dec = eigh(np.eye(2))
        assert np.allclose(dec.values, [1.0, 1.0])

    def test_diagonal(self):
        dec = eigh(np.diag([-1.0, 3.0]))
        assert np.allclose(dec.values, [-1.0, 3.0])
        assert np.allclose(np.abs(dec.vectors), np.eye(2))

    def test_two_by_two_offdiag(self):
        # Characteristic polynomial of [[2,1],[1,2]]: (2-l)^2 - 1 -> l in {1, 3}.
        dec = eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(dec.values, [1.0, 3.0], atol=1e-12)

    def test_rejects_nonsymmetric(self):
        with pytest.raises(NonSymmetric):
            eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_nonfinite(self):
        with pytest.raises(NonFinite):
            eigh(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_reconstruction_and_orthonormality_random(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            n = int(rng.integers(2, 21))
            a = rng.standard_normal((n, n))
            a = 0.5 * (a + a.T) * rng.uniform(0.1, 10.0)
            dec = eigh(a)
            rec = dec.vectors @ np.diag(dec.values) @ dec.vectors.T
            fro = np.linalg.norm(a, "fro")
            assert np.linalg.norm(rec - a, "fro") <= 1e-9 * (1.0 + fro)
            assert np.linalg.norm(dec.vectors.T @ dec.vectors - np.eye(n)) <= 1e-9
            assert np.all(np.diff(dec.values) >= -1e-12 * (1.0 + fro))


class TestScalarRoot:
    def test_linear(self):
        r = solve_scalar_increasing(lambda t: t - 1.0, 0.0, 2.0, 1e-12)
        assert abs(r - 1.0) <= 1e-10

    def test_quadratic_golden(self):
        # t^2 + t - 1 = 0 on [0, 1]: root (sqrt(5) - 1) / 2 by the quadratic formula.
        r = solve_scalar_increasing(lambda t: t * t + t - 1.0, 0.0, 1.0, 1e-12)
        assert abs(r - (np.sqrt(5.0) - 1.0) / 2.0) <= 1e-10

    def test_cubic(self):
        r = solve_scalar_increasing(lambda t: t**3 - 8.0, 0.0, 3.0, 1e-12)
        assert abs(r - 2.0) <= 1e-10

    def test_bad_bracket(self):
        with pytest.raises(BadBracket):
            solve_scalar_increasing(lambda t: t + 1.0, 0.0, 2.0, 1e-12)

    def test_bracket_consistency_random(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            root = rng.uniform(-5, 5)
            scale = rng.uniform(0.1, 4.0)
            phi = lambda t, root=root, scale=scale: scale * (t - root) ** 3 + (t - root)
            tol = 1e-10
            r = solve_scalar_increasing(phi, root - 7.0, root + 9.0, tol)
            assert phi(r - tol) <= tol
            assert phi(r + tol) >= -tol


class TestMinNormInHull:
    def test_symmetric_pair(self):
        point, coeffs = min_norm_in_hull([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        assert np.allclose(point, [0.5, 0.5], atol=1e-10)
        assert np.allclose(coeffs, [0.5, 0.5], atol=1e-10)
        assert abs(np.linalg.norm(point) - np.sqrt(0.5)) <= 1e-10

    def test_hull_contains_origin(self):
        point, _ = min_norm_in_hull([np.array([-1.0, 0.0]), np.array([1.0, 0.0])])
        assert np.linalg.norm(point) <= 1e-10

    def test_vertex_optimum(self):
        # Brute force over simplex weights puts the optimum at the (2,0) vertex.
        pts = [np.array([2.0, 0.0]), np.array([4.0, 1.0])]
        point, coeffs = min_norm_in_hull(pts)
        ref = min_norm_bruteforce(np.array(pts), final_step=1e-6)
        assert np.linalg.norm(point - ref) <= 1e-4
        assert np.allclose(point, [2.0, 0.0], atol=1e-8)
        assert coeffs[0] == pytest.approx(1.0, abs=1e-8)

    def test_single_point(self):
        point, coeffs = min_norm_in_hull([np.array([3.0, -4.0])])
        assert np.allclose(point, [3.0, -4.0])
        assert coeffs[0] == 1.0

    def test_random_hulls_against_bruteforce(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            ell = int(rng.integers(1, 5))
            n = int(rng.integers(2, 4))
            pts = rng.uniform(-2, 2, size=(ell, n))
            point, coeffs = min_norm_in_hull(pts)
            ref = min_norm_bruteforce(pts, final_step=1e-6)
            assert abs(np.linalg.norm(point) - np.linalg.norm(ref)) <= 1e-4
            # Feasibility: coefficients on the simplex reproduce the point.
            assert abs(coeffs.sum() - 1.0) <= 1e-9
            assert np.all(coeffs >= -1e-12)
            assert np.linalg.norm(pts.T @ coeffs - point) <= 1e-9
            # Optimality spot checks: beats every generator and pairwise midpoint.
            for i in range(ell):
                assert np.linalg.norm(point) <= np.linalg.norm(pts[i]) + 1e-9
                for j in range(i + 1, ell):
                    mid = 0.5 * (pts[i] + pts[j])
                    assert np.linalg.norm(point) <= np.linalg.norm(mid) + 1e-9
            # Wolfe certificate.
            for i in range(ell):
                assert (pts[i] - point) @ point >= -1e-8

    def test_rejects_nonfinite(self):
        with pytest.raises(NonFinite):
            min_norm_in_hull([np.array([np.inf, 0.0])])
