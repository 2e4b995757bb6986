"""Least-squares fitters and a penalized smoothing spline.

Everything here is built on plain numpy linear algebra. The linear and
quadratic fits solve their normal equations through a rank-revealing SVD
(``lstsq``); the smoother is a natural cubic spline basis with an
integrated-squared-second-derivative penalty, with the penalty weight
chosen by generalized cross-validation over a fixed logarithmic grid.

Conventions shared by all fitters:

* fits carry their residuals and an R^2 with the convention R^2 = 0 (and a
  ``degenerate`` flag) when the response has zero variance, so downstream
  scores never see NaN;
* singular designs raise :class:`SingularDesignError`, too little distinct
  support for the spline raises :class:`DegenerateSupportError`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSupportError, SingularDesignError

_SING_RCOND = 1e-10
_VAR_EPS = 1e-12
_MAX_KNOTS = 30
_GCV_GRID = np.logspace(-8.0, 4.0, 41)


@dataclass(frozen=True)
class LinearFit:
    intercept: float
    slope: float
    residuals: np.ndarray
    r_squared: float
    degenerate: bool = False


@dataclass(frozen=True)
class PolyFit:
    """Least-squares quadratic: coeffs = (c0, c1, c2) for c0 + c1 x + c2 x^2."""

    coeffs: tuple[float, float, float]
    residuals: np.ndarray
    r_squared: float
    degenerate: bool = False


@dataclass(frozen=True)
class SmoothFit:
    """Penalized natural cubic spline fit.

    ``knots`` are in original x units; internally the basis is evaluated on
    the affinely rescaled axis ``(x - x_shift) / x_scale`` for conditioning,
    and ``coefficients`` refer to that basis. ``edf`` is the trace of the
    smoother matrix at the selected penalty weight.
    """

    knots: np.ndarray
    coefficients: np.ndarray
    smoothing_parameter: float
    fitted: np.ndarray
    residuals: np.ndarray
    edf: float
    x_shift: float
    x_scale: float


def _as_vectors(x, y, min_n: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if len(x) < min_n:
        raise ValueError(f"need at least {min_n} paired observations")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("inputs must be finite")
    return x, y


def _r_squared(y: np.ndarray, residuals: np.ndarray) -> tuple[float, bool]:
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst <= 0.0:
        return 0.0, True
    r2 = 1.0 - float(np.sum(residuals**2)) / sst
    return float(min(max(r2, 0.0), 1.0)), False


def ols_fit(x, y) -> LinearFit:
    """Ordinary least squares of y on x with an intercept."""
    x, y = _as_vectors(x, y, min_n=3)
    if float(np.var(x)) <= _VAR_EPS:
        raise SingularDesignError("regressor is numerically constant")
    design = np.column_stack([np.ones_like(x), x])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=_SING_RCOND)
    if rank < 2:
        raise SingularDesignError("rank-deficient design")
    residuals = y - design @ coef
    r2, degenerate = _r_squared(y, residuals)
    return LinearFit(float(coef[0]), float(coef[1]), residuals, r2, degenerate)


def poly2_fit(x, y) -> PolyFit:
    """Least-squares quadratic of y on x."""
    x, y = _as_vectors(x, y, min_n=4)
    design = np.column_stack([np.ones_like(x), x, x**2])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=_SING_RCOND)
    if rank < 3:
        raise SingularDesignError("rank-deficient quadratic design")
    residuals = y - design @ coef
    r2, degenerate = _r_squared(y, residuals)
    return PolyFit((float(coef[0]), float(coef[1]), float(coef[2])), residuals, r2, degenerate)


# ---------------------------------------------------------------------------
# Natural cubic smoothing spline
# ---------------------------------------------------------------------------
#
# Basis: N_1(u) = 1, N_2(u) = u, N_{k+2}(u) = d_k(u) - d_{K-1}(u) with
# d_k(u) = [(u - t_k)_+^3 - (u - t_K)_+^3] / (t_K - t_k) on knots t_1<...<t_K.
# Second derivatives vanish outside [t_1, t_K], so prediction extrapolates
# linearly and the roughness penalty is supported on the knot range only.


def _select_knots(x: np.ndarray) -> np.ndarray:
    distinct = np.unique(x)
    if len(distinct) < 4:
        raise DegenerateSupportError("need at least 4 distinct x values")
    # keep the basis strictly smaller than the sample: with one knot per
    # observation the spline interpolates exactly and GCV degenerates (RSS
    # and the denominator both vanish), so small samples get n/2 knots
    budget = min(_MAX_KNOTS, max(4, len(x) // 2))
    if len(distinct) <= budget:
        return distinct
    probs = np.linspace(0.0, 1.0, budget)
    knots = np.unique(np.quantile(x, probs, method="nearest"))
    if len(knots) < 4:
        # heavy ties collapsed the data quantiles; space over distinct values
        knots = np.unique(np.quantile(distinct, probs, method="nearest"))
    return knots


def _natural_basis(u: np.ndarray, knots_u: np.ndarray) -> np.ndarray:
    t_last = knots_u[-1]
    cut_last = np.clip(u - t_last, 0.0, None) ** 3
    # d_j(u) = [(u - t_j)_+^3 - (u - t_K)_+^3] / (t_K - t_j), j = 0..K-2
    d_all = np.clip(u[:, None] - knots_u[None, :-1], 0.0, None) ** 3
    d_all -= cut_last[:, None]
    d_all /= (t_last - knots_u[:-1])[None, :]
    out = np.empty((len(u), len(knots_u)))
    out[:, 0] = 1.0
    out[:, 1] = u
    out[:, 2:] = d_all[:, :-1] - d_all[:, -1][:, None]
    return out


def _penalty_matrix(knots_u: np.ndarray) -> np.ndarray:
    """Integral of products of basis second derivatives over the knot range.

    Second derivatives of the basis are continuous piecewise-linear between
    knots, so the per-interval integrals below are exact.
    """
    k = len(knots_u)
    t_last = knots_u[-1]
    # second derivative of each basis function evaluated at every knot
    sec = np.zeros((k, k))
    ref = 6.0 * np.clip(knots_u - knots_u[-2], 0.0, None) / (t_last - knots_u[-2])
    for j in range(k - 2):
        dj = 6.0 * np.clip(knots_u - knots_u[j], 0.0, None) / (t_last - knots_u[j])
        sec[j + 2] = dj - ref
    omega = np.zeros((k, k))
    for left in range(k - 1):
        h = knots_u[left + 1] - knots_u[left]
        a = sec[:, left]
        b = sec[:, left + 1]
        omega += (h / 6.0) * (2.0 * np.outer(a, a) + np.outer(a, b)
                              + np.outer(b, a) + 2.0 * np.outer(b, b))
    return omega


def spline_fit(x, y) -> SmoothFit:
    """Cubic smoothing spline with GCV-selected roughness penalty.

    Minimizes ||y - f(x)||^2 + lam * integral(f''(u)^2 du) over natural
    cubic splines on up to 30 quantile-spaced knots, picking lam from a
    41-point logarithmic grid in [1e-8, 1e4] by generalized
    cross-validation GCV(lam) = n RSS / (n - tr H)^2.
    """
    x, y = _as_vectors(x, y, min_n=8)
    knots = _select_knots(x)
    shift = 0.5 * (knots[0] + knots[-1])
    scale = 0.5 * (knots[-1] - knots[0])
    knots_u = (knots - shift) / scale
    basis = _natural_basis((x - shift) / scale, knots_u)
    omega = _penalty_matrix(knots_u)

    n, nb = basis.shape
    gram = basis.T @ basis
    rhs = basis.T @ y
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        jitter = 1e-10 * float(np.trace(gram)) / nb
        try:
            chol = np.linalg.cholesky(gram + jitter * np.eye(nb))
        except np.linalg.LinAlgError as exc:
            raise DegenerateSupportError("spline design is numerically singular") from exc

    # One eigendecomposition makes the whole GCV sweep O(nb) per grid point:
    # with C = L L^T and M = L^-1 Omega L^-T = U diag(d) U^T,
    # tr H(lam) = sum 1/(1 + lam d) and RSS follows from z = U^T L^-1 rhs.
    half = np.linalg.solve(chol, omega)
    m_mat = np.linalg.solve(chol, half.T).T
    m_mat = 0.5 * (m_mat + m_mat.T)
    evals, evecs = np.linalg.eigh(m_mat)
    evals = np.clip(evals, 0.0, None)
    z = evecs.T @ np.linalg.solve(chol, rhs)
    yty = float(y @ y)

    shrink_grid = 1.0 / (1.0 + _GCV_GRID[:, None] * evals[None, :])
    rss_grid = np.maximum(yty - (shrink_grid * (2.0 - shrink_grid)) @ (z * z), 0.0)
    tr_grid = shrink_grid.sum(axis=1)
    denom = n - tr_grid
    with np.errstate(divide="ignore", invalid="ignore"):
        gcv_grid = np.where(denom > 0.0, n * rss_grid / denom**2, np.inf)
    if not np.isfinite(gcv_grid).any():
        raise SingularDesignError("GCV search found no admissible penalty")
    best = int(np.argmin(gcv_grid))
    lam = float(_GCV_GRID[best])
    shrink = shrink_grid[best]
    tr_h = float(tr_grid[best])
    coef = np.linalg.solve(chol.T, evecs @ (z * shrink))
    fitted = basis @ coef
    return SmoothFit(
        knots=knots,
        coefficients=coef,
        smoothing_parameter=lam,
        fitted=fitted,
        residuals=y - fitted,
        edf=tr_h,
        x_shift=float(shift),
        x_scale=float(scale),
    )


def predict(fit, x0):
    """Evaluate a fitted model at x0 (scalar or array).

    Splines continue linearly beyond the boundary knots (natural spline
    behaviour); linear and quadratic fits evaluate their polynomials.
    """
    arr = np.asarray(x0, dtype=float)
    scalar = arr.ndim == 0
    pts = np.atleast_1d(arr)
    if isinstance(fit, LinearFit):
        out = fit.intercept + fit.slope * pts
    elif isinstance(fit, PolyFit):
        c0, c1, c2 = fit.coeffs
        out = c0 + c1 * pts + c2 * pts**2
    elif isinstance(fit, SmoothFit):
        u = (pts - fit.x_shift) / fit.x_scale
        knots_u = (fit.knots - fit.x_shift) / fit.x_scale
        out = _natural_basis(u, knots_u) @ fit.coefficients
    else:
        raise TypeError(f"unsupported fit type: {type(fit).__name__}")
    return float(out[0]) if scalar else out


def finite_diff_derivative(fit, x0, h: float):
    """Central-difference derivative of the fitted function at x0."""
    if h <= 0.0:
        raise ValueError("h must be > 0")
    upper = predict(fit, np.asarray(x0, dtype=float) + h)
    lower = predict(fit, np.asarray(x0, dtype=float) - h)
    return (upper - lower) / (2.0 * h)


def default_fd_step(x) -> float:
    """Scale-aware finite-difference step: max(1e-3, 1e-3 * SD(x))."""
    return max(1e-3, 1e-3 * float(np.std(np.asarray(x, dtype=float))))
