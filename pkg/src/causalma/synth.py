"""Bivariate structural-equation data generators and their ground-truth effects.

Two candidate structures are entertained for a pair (x, y): Forward (x is
the cause of y) and Backward (y is the cause of x). The cause is always a
standard normal draw; the effect is a linear (plus optional quadratic) map
of the cause with additive Gaussian noise. Two generator families are
provided:

* heteroskedastic -- linear mean, noise scale grows with |cause|,
* nonlinear      -- quadratic mean, constant noise scale.

The module also exposes the true marginal effect curve dy/dx implied by a
generator and the average effect over a unit intervention range.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np


class CausalStructure(Enum):
    """Direction of the causal arrow between x and y."""

    FORWARD = "forward"    # x -> y
    BACKWARD = "backward"  # y -> x


class DgpKind(Enum):
    HETEROSKEDASTIC = "heteroskedastic"
    NONLINEAR = "nonlinear"


class EffectSize(Enum):
    SMALL = "small"
    LARGE = "large"


@dataclass(frozen=True)
class DgpSpec:
    """Parameters of one data-generating process.

    The effect variable is ``beta * cause + gamma * cause**2 + eps`` where
    eps is centered Gaussian with standard deviation
    ``noise_base + noise_slope * |cause|`` (heteroskedastic) or ``noise_sd``
    (nonlinear).
    """

    kind: DgpKind
    effect_size: EffectSize
    beta: float
    gamma: float
    noise_base: float = 0.5
    noise_slope: float = 0.3
    noise_sd: float = 0.3

    def __post_init__(self) -> None:
        if self.kind is DgpKind.HETEROSKEDASTIC and self.gamma != 0.0:
            raise ValueError("heteroskedastic DGP has no quadratic term")
        if self.noise_base < 0.0 or self.noise_slope < 0.0:
            raise ValueError("heteroskedastic noise parameters must be >= 0")
        if self.noise_sd <= 0.0:
            raise ValueError("noise_sd must be > 0")


def default_spec(kind: DgpKind, effect_size: EffectSize) -> DgpSpec:
    """Standard parameterization for a (kind, effect size) pair.

    Small effects use beta = 0.5 (gamma = 0.1 for nonlinear); large effects
    use beta = 2 (gamma = 0.5 for nonlinear).
    """
    beta = 0.5 if effect_size is EffectSize.SMALL else 2.0
    if kind is DgpKind.HETEROSKEDASTIC:
        gamma = 0.0
    else:
        gamma = 0.1 if effect_size is EffectSize.SMALL else 0.5
    return DgpSpec(kind=kind, effect_size=effect_size, beta=beta, gamma=gamma)


@dataclass(frozen=True)
class BivariateSample:
    """Paired (x, y) observations."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if len(x) < 1:
            raise ValueError("sample must contain at least one observation")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("sample contains non-finite values")

    @property
    def n(self) -> int:
        return len(self.x)

    def swapped(self) -> "BivariateSample":
        """The same observations with the roles of x and y exchanged."""
        return BivariateSample(self.y.copy(), self.x.copy())

    def take(self, indices: np.ndarray) -> "BivariateSample":
        """Row subset / resample by integer indices."""
        return BivariateSample(self.x[indices], self.y[indices])

    def to_csv(self, path) -> None:
        """Write the sample as a two-column CSV with an ``x,y`` header."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y"])
            for xi, yi in zip(self.x, self.y):
                writer.writerow([f"{xi:.17g}", f"{yi:.17g}"])

    @classmethod
    def from_csv(cls, path) -> "BivariateSample":
        """Read a sample written by :meth:`to_csv` (header must be ``x,y``)."""
        with open(path, "r", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["x", "y"]:
                raise ValueError("expected CSV header 'x,y'")
            xs, ys = [], []
            for row in reader:
                if not row:
                    continue
                if len(row) != 2:
                    raise ValueError(f"malformed CSV row: {row!r}")
                xs.append(float(row[0]))
                ys.append(float(row[1]))
        if not xs:
            raise ValueError("CSV contains no data rows")
        return cls(np.array(xs), np.array(ys))


# ---------------------------------------------------------------------------
# Marginal effect curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantEffect:
    """Marginal effect that does not depend on x."""

    value: float

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.full_like(arr, self.value)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class AffineEffect:
    """Marginal effect intercept + slope * x."""

    intercept: float
    slope: float

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = self.intercept + self.slope * arr
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ZeroEffect:
    """Identically zero marginal effect (x does not cause y)."""

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.zeros_like(arr)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TabulatedEffect:
    """Marginal effect given on a grid, linearly interpolated in between.

    Outside the grid the endpoint values are held constant.
    """

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or grid.shape != values.shape or len(grid) < 1:
            raise ValueError("grid and values must be matching 1-d arrays")
        if len(grid) > 1 and not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if not (np.isfinite(grid).all() and np.isfinite(values).all()):
            raise ValueError("grid and values must be finite")

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.interp(arr, self.grid, self.values)
        return float(out) if out.ndim == 0 else out


EffectCurve = Union[ConstantEffect, AffineEffect, ZeroEffect, TabulatedEffect]


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def draw_structure(rng: np.random.Generator) -> CausalStructure:
    """Pick Forward or Backward with probability 1/2 each."""
    if rng.uniform() < 0.5:
        return CausalStructure.FORWARD
    return CausalStructure.BACKWARD


def generate_sample(
    spec: DgpSpec,
    structure: CausalStructure,
    n: int,
    rng: np.random.Generator,
) -> BivariateSample:
    """Draw n observations from the structural model.

    The cause is standard normal; the effect adds Gaussian noise whose
    scale follows the spec. Under Forward the cause is stored in x, under
    Backward it is stored in y.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cause = rng.standard_normal(n)
    if spec.kind is DgpKind.HETEROSKEDASTIC:
        sd = spec.noise_base + spec.noise_slope * np.abs(cause)
    else:
        sd = np.full(n, spec.noise_sd)
    effect = spec.beta * cause + spec.gamma * cause**2 + rng.normal(0.0, sd)
    if structure is CausalStructure.FORWARD:
        return BivariateSample(cause, effect)
    return BivariateSample(effect, cause)


def true_marginal_effect(spec: DgpSpec, structure: CausalStructure) -> EffectCurve:
    """Ground-truth marginal effect dy/dx of intervening on x.

    Backward structures have zero effect of x on y by construction.
    """
    if structure is CausalStructure.BACKWARD:
        return ZeroEffect()
    if spec.kind is DgpKind.HETEROSKEDASTIC:
        return ConstantEffect(spec.beta)
    return AffineEffect(spec.beta, 2.0 * spec.gamma)


def ate_from_effect(curve: EffectCurve) -> float:
    """Average effect over a unit intervention range: integral of the curve on [0, 1].

    Closed form for constant/affine/zero curves; exact trapezoid integration
    of the piecewise-linear interpolant for tabulated curves.
    """
    if isinstance(curve, ZeroEffect):
        return 0.0
    if isinstance(curve, ConstantEffect):
        return curve.value
    if isinstance(curve, AffineEffect):
        return curve.intercept + 0.5 * curve.slope
    interior = curve.grid[(curve.grid > 0.0) & (curve.grid < 1.0)]
    pts = np.concatenate(([0.0], interior, [1.0]))
    return float(np.trapezoid(curve(pts), pts))
