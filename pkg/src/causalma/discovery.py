"""Bivariate causal-direction scoring and bootstrap structure posteriors.

Two scorers are provided. The ANM scorer regresses each variable on the
other with the smoothing spline and sums |Pearson| and distance correlation
between residuals and the candidate cause (lower = more plausible). The
regression scorer fits quadratics both ways and uses R^2 minus |Kendall
tau| of residuals vs. cause (higher = more plausible).

The probability that x causes y is estimated as the fraction of bootstrap
resamples whose score favors that direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import depstats, numkit
from .errors import DegenerateInputError, DegenerateSupportError, SingularDesignError
from .synth import BivariateSample

#: residuals whose spread is this small relative to the response are treated
#: as exactly constant (a constant is independent of everything)
_NEGLIGIBLE_REL_SPREAD = 1e-9

_MAX_REDRAWS = 20


class DiscoveryMethod(Enum):
    ANM = "anm"
    REGRESSION = "regression"


@dataclass(frozen=True)
class DirectionScore:
    forward: float
    backward: float
    method: DiscoveryMethod

    @property
    def favors_forward(self) -> bool:
        """Strict comparison; exact ties count against the forward direction."""
        if self.method is DiscoveryMethod.ANM:
            return self.forward < self.backward
        return self.forward > self.backward


@dataclass(frozen=True)
class StructurePosterior:
    """Bootstrap estimate of P(x causes y | data)."""

    p_forward: float
    bootstrap_count: int
    method: DiscoveryMethod


def _negligible(residuals: np.ndarray, response: np.ndarray) -> bool:
    return float(np.std(residuals)) <= _NEGLIGIBLE_REL_SPREAD * (float(np.std(response)) + 1e-12)


def _anm_direction(cause: np.ndarray, effect: np.ndarray) -> float:
    fit = numkit.spline_fit(cause, effect)
    if _negligible(fit.residuals, effect):
        return 0.0
    try:
        r = abs(depstats.pearson(fit.residuals, cause))
    except DegenerateInputError:
        r = 0.0
    return r + depstats.distance_correlation(fit.residuals, cause)


def anm_score(sample: BivariateSample) -> DirectionScore:
    """Additive-noise direction score: spline residual dependence, lower wins."""
    try:
        forward = _anm_direction(sample.x, sample.y)
        backward = _anm_direction(sample.y, sample.x)
    except (DegenerateSupportError, SingularDesignError) as exc:
        raise DegenerateInputError(str(exc)) from exc
    return DirectionScore(forward, backward, DiscoveryMethod.ANM)


def _regression_direction(cause: np.ndarray, effect: np.ndarray) -> float:
    fit = numkit.poly2_fit(cause, effect)
    if _negligible(fit.residuals, effect):
        tau_abs = 0.0
    else:
        try:
            tau_abs = abs(depstats.kendall_tau(fit.residuals, cause))
        except DegenerateInputError:
            tau_abs = 0.0
    return fit.r_squared - tau_abs


def regression_score(sample: BivariateSample) -> DirectionScore:
    """Quadratic-regression direction score: fit minus residual dependence, higher wins."""
    if sample.n < 6:
        raise ValueError("need at least 6 observations")
    try:
        forward = _regression_direction(sample.x, sample.y)
        backward = _regression_direction(sample.y, sample.x)
    except (DegenerateSupportError, SingularDesignError) as exc:
        raise DegenerateInputError(str(exc)) from exc
    return DirectionScore(forward, backward, DiscoveryMethod.REGRESSION)


def score_sample(sample: BivariateSample, method: DiscoveryMethod) -> DirectionScore:
    if method is DiscoveryMethod.ANM:
        return anm_score(sample)
    return regression_score(sample)


def bootstrap_posterior(
    sample: BivariateSample,
    method: DiscoveryMethod,
    m: int,
    rng: np.random.Generator,
) -> StructurePosterior:
    """Proportion of m pairs-bootstrap resamples whose score favors x -> y.

    Each resample draws from its own spawned substream, so results do not
    depend on evaluation order. Degenerate resamples (constant axis, too few
    distinct values) are redrawn up to 20 times and then counted as not
    favoring the forward direction.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    favoring = 0
    for stream in rng.spawn(m):
        for _ in range(_MAX_REDRAWS + 1):
            idx = stream.integers(0, sample.n, size=sample.n)
            try:
                score = score_sample(sample.take(idx), method)
            except DegenerateInputError:
                continue
            if score.favors_forward:
                favoring += 1
            break
    return StructurePosterior(p_forward=favoring / m, bootstrap_count=m, method=method)
