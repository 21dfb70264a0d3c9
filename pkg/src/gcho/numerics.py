"""Small dense numerical kernels: symmetric eigendecomposition, safeguarded
scalar root finding, and a min-norm-point-in-convex-hull solver.

Everything here is a pure function of its inputs; there is no shared state.
Sizes are desk scale (n up to a few hundred), so plain dense algorithms are
used throughout and the eigensolver is a cyclic Jacobi iteration, which is
deterministic and has no dependency beyond numpy array arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BadBracket, NonFinite, NonSymmetric

SYM_RTOL = 1e-12


def ensure_finite(arr, what: str = "array") -> np.ndarray:
    """Return ``arr`` as a float ndarray, raising :class:`NonFinite` on NaN/Inf."""
    a = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{what} contains NaN or Inf")
    return a


def ensure_symmetric(mat, what: str = "matrix") -> np.ndarray:
    """Validate symmetry to within ``SYM_RTOL`` relative and return the matrix."""
    a = ensure_finite(mat, what)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSymmetric(f"{what} is not square: shape {a.shape}")
    scale = np.abs(a).max() if a.size else 0.0
    if np.abs(a - a.T).max() > SYM_RTOL * (1.0 + scale):
        raise NonSymmetric(f"{what} violates the symmetry tolerance")
    return a


@dataclass(frozen=True)
class EigenDecomp:
    """Eigendecomposition A = Q diag(values) Q^T with ascending eigenvalues."""

    values: np.ndarray       # shape (n,), ascending
    vectors: np.ndarray      # shape (n, n), orthonormal columns


def eigh(mat) -> EigenDecomp:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps over all off-diagonal pairs, zeroing each in turn, until the
    off-diagonal Frobenius mass is negligible relative to the matrix scale.
    Deterministic (fixed sweep order, no pivot search).
    """
    a = ensure_symmetric(mat, "eigh input").copy()
    n = a.shape[0]
    q = np.eye(n)
    if n == 1:
        return EigenDecomp(values=a[0].copy(), vectors=q)

    scale = np.linalg.norm(a, "fro")
    tol = 1e-14 * (1.0 + scale)
    offmask = ~np.eye(n, dtype=bool)
    # 30 sweeps is far beyond what cyclic Jacobi needs at desk scale.
    for _ in range(30):
        if np.linalg.norm(a[offmask]) <= tol:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if abs(apr) <= 1e-18 * (1.0 + abs(a[p, p]) + abs(a[r, r])):
                    continue
                # Classical Jacobi rotation zeroing a[p, r].
                theta = (a[r, r] - a[p, p]) / (2.0 * apr)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[p, :] - s * a[r, :]
                rot_r = s * a[p, :] + c * a[r, :]
                a[p, :], a[r, :] = rot_p, rot_r
                col_p = c * a[:, p] - s * a[:, r]
                col_r = s * a[:, p] + c * a[:, r]
                a[:, p], a[:, r] = col_p, col_r
                qp = c * q[:, p] - s * q[:, r]
                qr = s * q[:, p] + c * q[:, r]
                q[:, p], q[:, r] = qp, qr

    vals = np.diag(a).copy()
    order = np.argsort(vals, kind="stable")
    return EigenDecomp(values=vals[order], vectors=q[:, order])


def solve_scalar_increasing(
    phi: Callable[[float], float], lo: float, hi: float, tol: float
) -> float:
    """Root of a continuous nondecreasing scalar function on [lo, hi].

    Requires phi(lo) <= 0 <= phi(hi); raises :class:`BadBracket` otherwise.
    Safeguarded secant/bisection: the bracket always shrinks, so the result r
    satisfies |phi(r)| <= tol or the final bracket width <= tol.
    """
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo:
        raise BadBracket(f"invalid bracket [{lo}, {hi}]")
    flo = phi(lo)
    fhi = phi(hi)
    if flo > 0.0 or fhi < 0.0:
        raise BadBracket(f"sign condition failed: phi({lo})={flo}, phi({hi})={fhi}")
    if abs(flo) <= tol:
        return lo
    if abs(fhi) <= tol:
        return hi

    a, fa, b, fb = lo, flo, hi, fhi
    for _ in range(10_000):
        if b - a <= tol:
            return 0.5 * (a + b)
        # Secant candidate when both ends are finite, else plain bisection.
        mid = 0.5 * (a + b)
        if np.isfinite(fa) and np.isfinite(fb) and fb > fa:
            cand = a - fa * (b - a) / (fb - fa)
            # Keep strictly interior so the bracket is guaranteed to shrink.
            if not (a + 0.1 * (b - a) <= cand <= b - 0.1 * (b - a)):
                cand = mid
        else:
            cand = mid
        fc = phi(cand)
        if abs(fc) <= tol:
            return cand
        if fc < 0.0:
            a, fa = cand, fc
        else:
            b, fb = cand, fc
    return 0.5 * (a + b)


def project_simplex(w: np.ndarray) -> np.ndarray:
    """Euclidean projection of w onto the probability simplex."""
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, w.size + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[cond][-1] / rho
    return np.maximum(w - theta, 0.0)


def _affine_minimizer(pts: np.ndarray) -> np.ndarray:
    """Coefficients of the min-norm point in the affine hull of the rows of pts."""
    k = pts.shape[0]
    gram = pts @ pts.T
    lhs = np.zeros((k + 1, k + 1))
    lhs[:k, :k] = gram
    lhs[:k, k] = 1.0
    lhs[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
    return sol[:k]


def _min_norm_projected_gradient(pts: np.ndarray, tol: float) -> np.ndarray:
    """Fallback solver: projected gradient on the simplex for ||P^T w||^2."""
    ell = pts.shape[0]
    gram = pts @ pts.T
    lam = np.linalg.eigvalsh(gram).max() if ell > 1 else max(gram[0, 0], 1.0)
    step = 1.0 / max(lam, 1e-30)
    w = np.full(ell, 1.0 / ell)
    for _ in range(20_000):
        grad = 2.0 * gram @ w
        w_new = project_simplex(w - step * grad)
        if np.linalg.norm(w_new - w) <= 1e-3 * tol:
            w = w_new
            break
        w = w_new
    return w


def min_norm_in_hull(
    points: Sequence[np.ndarray], tol: float = 1e-12
) -> tuple[np.ndarray, np.ndarray]:
    """Minimum-norm point of the convex hull of ``points`` (Wolfe's algorithm).

    Returns ``(point, coeffs)`` where ``coeffs`` lies on the unit simplex and
    reproduces ``point``.  Optimality is certified by the Wolfe criterion
    ``<p*, g_i - p*> >= -tol`` for every generator ``g_i``; if the combinatorial
    search stalls (degenerate hulls), a projected-gradient fallback finishes
    the job.
    """
    pts = np.atleast_2d(ensure_finite(np.asarray(points, dtype=float), "hull points"))
    ell = pts.shape[0]
    if ell == 1:
        return pts[0].copy(), np.ones(1)

    scale = 1.0 + float(np.max(np.linalg.norm(pts, axis=1)))
    eps = 1e-14 * scale

    norms = np.linalg.norm(pts, axis=1)
    start = int(np.argmin(norms))
    corral = [start]
    weights = np.array([1.0])
    x = pts[start].copy()

    ok = False
    for _ in range(16 * ell + 100):
        dots = pts @ x
        j = int(np.argmin(dots))
        if dots[j] >= x @ x - tol * scale - eps:
            ok = True
            break
        if j in corral:
            break  # numerical stall; certified below or fallback
        corral.append(j)
        weights = np.append(weights, 0.0)
        for _ in range(16 * ell + 100):
            alpha = _affine_minimizer(pts[corral])
            if np.all(alpha > eps):
                weights = alpha
                break
            # Step from the current simplex point toward the affine minimizer
            # until the first coefficient hits zero, then drop that generator.
            mask = alpha <= eps
            denom = weights[mask] - alpha[mask]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(denom > 0, weights[mask] / denom, np.inf)
            theta = min(1.0, float(np.min(ratios)))
            weights = theta * alpha + (1.0 - theta) * weights
            keep = weights > eps
            if keep.all():
                weights[np.argmin(weights)] = 0.0
                keep = weights > eps
            corral = [c for c, k in zip(corral, keep) if k]
            weights = weights[keep]
            weights = weights / weights.sum()
        x = pts[corral].T @ weights

    coeffs = np.zeros(ell)
    coeffs[corral] = weights

    # Wolfe certificate; rebuild with projected gradient if it does not hold.
    if not ok:
        gap = float(np.min(pts @ x) - x @ x)
        if gap < -tol * scale:
            coeffs = _min_norm_projected_gradient(pts, tol)
            x = pts.T @ coeffs
    return x, coeffs
