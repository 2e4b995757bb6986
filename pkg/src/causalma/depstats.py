"""Dependence statistics used by the direction scorers.

Pearson correlation, tie-corrected Kendall tau (tau-b, O(n^2) pair
counting), and the biased sample distance correlation computed from
double-centered pairwise distance matrices.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateInputError


def _paired(u, v, min_n: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise ValueError("u and v must be 1-d arrays of equal length")
    if len(u) < min_n:
        raise ValueError(f"need at least {min_n} paired observations")
    if not (np.isfinite(u).all() and np.isfinite(v).all()):
        raise ValueError("inputs must be finite")
    return u, v


def pearson(u, v) -> float:
    """Sample Pearson correlation; constant inputs are rejected."""
    u, v = _paired(u, v, min_n=3)
    du = u - u.mean()
    dv = v - v.mean()
    ss_u = float(du @ du)
    ss_v = float(dv @ dv)
    if ss_u <= 0.0 or ss_v <= 0.0:
        raise DegenerateInputError("pearson undefined for constant input")
    r = float(du @ dv) / math.sqrt(ss_u * ss_v)
    return float(min(max(r, -1.0), 1.0))


def kendall_tau(u, v) -> float:
    """Tie-corrected Kendall rank correlation (tau-b).

    Counts concordant minus discordant pairs over all n(n-1)/2 pairs and
    normalizes by the geometric mean of untied pair counts per margin.
    """
    u, v = _paired(u, v, min_n=3)
    n = len(u)
    # sign(u_i - u_j) equals the sign of the dense-rank difference, and the
    # integer pair matrices are much cheaper than float ones
    rank_u = np.searchsorted(np.sort(u), u, side="left").astype(np.int32)
    rank_v = np.searchsorted(np.sort(v), v, side="left").astype(np.int32)
    sign_u = rank_u[:, None] - rank_u[None, :]
    np.sign(sign_u, out=sign_u)
    sign_v = rank_v[:, None] - rank_v[None, :]
    np.sign(sign_v, out=sign_v)
    concordance = float(np.einsum("ij,ij->", sign_u, sign_v, dtype=np.int64)) / 2.0
    n_pairs = n * (n - 1) / 2.0
    tied_u = (n * n - np.count_nonzero(sign_u) - n) / 2.0
    tied_v = (n * n - np.count_nonzero(sign_v) - n) / 2.0
    denom = math.sqrt((n_pairs - tied_u) * (n_pairs - tied_v))
    if denom <= 0.0:
        raise DegenerateInputError("kendall tau undefined: all pairs tied")
    tau = concordance / denom
    return float(min(max(tau, -1.0), 1.0))


def distance_correlation(u, v) -> float:
    """Biased sample distance correlation from double-centered distances.

    The mean products of the double-centered distance matrices are computed
    through the equivalent moment expansion
    ``mean(A~ B~) = mean(ab) - 2 mean_i(arow_i brow_i) + mean(a) mean(b)``
    which avoids materializing the centered copies. Returns 0 when either
    marginal distance variance vanishes (constant input), so degenerate
    inputs read as "no dependence".
    """
    u, v = _paired(u, v, min_n=4)
    n = len(u)
    a = u[:, None] - u[None, :]
    np.abs(a, out=a)
    b = v[:, None] - v[None, :]
    np.abs(b, out=b)
    row_a = a.mean(axis=1)
    row_b = b.mean(axis=1)
    mu_a = float(row_a.mean())
    mu_b = float(row_b.mean())
    dcov2 = (float(np.einsum("ij,ij->", a, b)) / (n * n)
             - 2.0 * float(row_a @ row_b) / n + mu_a * mu_b)
    dvar_u = (float(np.einsum("ij,ij->", a, a)) / (n * n)
              - 2.0 * float(row_a @ row_a) / n + mu_a * mu_a)
    dvar_v = (float(np.einsum("ij,ij->", b, b)) / (n * n)
              - 2.0 * float(row_b @ row_b) / n + mu_b * mu_b)
    if dvar_u <= 0.0 or dvar_v <= 0.0:
        return 0.0
    r2 = dcov2 / math.sqrt(dvar_u * dvar_v)
    return math.sqrt(min(max(r2, 0.0), 1.0))
