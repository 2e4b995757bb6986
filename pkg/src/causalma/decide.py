"""Loss functions, decision rules, and oracles for structure-uncertain actions.

Two strategies turn a structure posterior p = P(x causes y | data) plus an
estimated effect curve into an action at a point x:

* structure selection: commit to the more probable structure (forward wins
  ties at p = 0.5) and act optimally under it;
* structure averaging: weight each structure's optimal action by its
  posterior probability (the backward-optimal action is always 0).

The quadratic intervention loss is 0.5 (a' - a*)^2 + lambda a'^2 where a*
is the optimal action under the truth and lambda prices the intervention
itself; its curvature in a' is 1 + 2 lambda.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkit
from .synth import (
    BivariateSample,
    CausalStructure,
    ConstantEffect,
    DgpKind,
    EffectCurve,
    TabulatedEffect,
)


def _check_prob(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p_forward must lie in [0, 1]")


def optimal_action(effect_value: float, lam: float):
    """Minimizer of 0.5 (e - a)^2 + lambda a^2: e / (1 + 2 lambda)."""
    if lam < 0.0:
        raise ValueError("lambda must be >= 0")
    return effect_value / (1.0 + 2.0 * lam)


def estimate_effect(sample: BivariateSample, dgp_kind: DgpKind) -> EffectCurve:
    """Point estimate of the forward marginal effect curve.

    Heteroskedastic data use the OLS slope (constant effect); nonlinear data
    use finite-difference derivatives of the smoothing spline, tabulated at
    the observed x values.
    """
    if dgp_kind is DgpKind.HETEROSKEDASTIC:
        fit = numkit.ols_fit(sample.x, sample.y)
        return ConstantEffect(fit.slope)
    fit = numkit.spline_fit(sample.x, sample.y)
    grid = np.unique(sample.x)
    h = numkit.default_fd_step(sample.x)
    return TabulatedEffect(grid, numkit.finite_diff_derivative(fit, grid, h))


def ms_action(p_forward: float, effect_hat: EffectCurve, lam: float, x: float) -> float:
    """Action of the structure-selection rule at x."""
    _check_prob(p_forward)
    if p_forward >= 0.5:
        return float(optimal_action(effect_hat(x), lam))
    return 0.0


def ma_action(p_forward: float, effect_hat: EffectCurve, lam: float, x: float) -> float:
    """Action of the structure-averaging rule at x (backward optimum is 0)."""
    _check_prob(p_forward)
    return p_forward * float(optimal_action(effect_hat(x), lam))


def point_loss(a_prime, a_star, lam: float):
    """Quadratic intervention loss 0.5 (a' - a*)^2 + lambda a'^2 (elementwise)."""
    if lam < 0.0:
        raise ValueError("lambda must be >= 0")
    a_prime = np.asarray(a_prime, dtype=float)
    a_star = np.asarray(a_star, dtype=float)
    out = 0.5 * (a_prime - a_star) ** 2 + lam * a_prime**2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DecisionOutcome:
    """Per-point actions of both rules and their mean losses on one sample."""

    actions_ms: np.ndarray
    actions_ma: np.ndarray
    actions_star: np.ndarray
    loss_ms: float
    loss_ma: float
    delta_l: float


def evaluate_decisions(
    sample: BivariateSample,
    p_forward: float,
    effect_hat: EffectCurve,
    true_effect: EffectCurve,
    true_structure: CausalStructure,
    lam: float,
) -> DecisionOutcome:
    """Apply both decision rules at every observed x and average the losses."""
    _check_prob(p_forward)
    xs = sample.x
    if true_structure is CausalStructure.FORWARD:
        a_star = np.asarray(optimal_action(true_effect(xs), lam), dtype=float)
    else:
        a_star = np.zeros_like(xs)
    a_hat = np.asarray(optimal_action(effect_hat(xs), lam), dtype=float)
    a_ms = a_hat if p_forward >= 0.5 else np.zeros_like(xs)
    a_ma = p_forward * a_hat
    loss_ms = float(np.mean(point_loss(a_ms, a_star, lam)))
    loss_ma = float(np.mean(point_loss(a_ma, a_star, lam)))
    return DecisionOutcome(
        actions_ms=a_ms,
        actions_ma=a_ma,
        actions_star=a_star,
        loss_ms=loss_ms,
        loss_ma=loss_ma,
        delta_l=loss_ms - loss_ma,
    )


def binary_treatment_loss(a: int, ate: float, c: float, b: float, eta: float) -> float:
    """Treat-or-not loss: treatment cost minus weighted benefit, plus a
    structure-specific surcharge, all proportional to the action."""
    if a not in (0, 1):
        raise ValueError("a must be 0 or 1")
    if c <= 0.0 or b <= 0.0:
        raise ValueError("c and b must be > 0")
    return c * a - b * ate * a + eta * a


def threshold_loss(a: float, ate: float, tau: float, m_penalty: float) -> float:
    """Hard-threshold loss: zero only when the realized effect of the action
    clears the threshold, a flat penalty otherwise.

    The clearance test is signed (ate * a > tau): an action pointing against
    the realized effect does not clear it.
    """
    if tau <= 0.0 or m_penalty <= 0.0:
        raise ValueError("tau and m_penalty must be > 0")
    return 0.0 if ate * a > tau else m_penalty


def posterior_expected_loss_argmin(
    loss_table,
    p_forward: float,
    action_grid,
) -> tuple[float, float]:
    """Grid minimizer of p L(a, forward) + (1 - p) L(a, backward).

    ``loss_table`` has one row per grid action and two columns (forward,
    backward). Ties resolve to the first index.
    """
    grid = np.asarray(action_grid, dtype=float)
    table = np.asarray(loss_table, dtype=float)
    if grid.size == 0:
        raise ValueError("action grid must be nonempty")
    if table.shape != (grid.size, 2):
        raise ValueError("loss_table must have shape (len(action_grid), 2)")
    if not np.isfinite(table).all():
        raise ValueError("loss_table must be finite")
    _check_prob(p_forward)
    expected = p_forward * table[:, 0] + (1.0 - p_forward) * table[:, 1]
    i = int(np.argmin(expected))
    return float(grid[i]), float(expected[i])


def oracle_action_grid(optimal_actions, points: int = 2001) -> np.ndarray:
    """Uniform action grid spanning 1.5x the largest candidate optimum."""
    span = 1.5 * max(abs(float(a)) for a in optimal_actions)
    if span == 0.0:
        span = 1.0
    return np.linspace(-span, span, points)
