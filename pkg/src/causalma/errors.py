"""Exception types shared across the fitting and scoring modules."""


class SingularDesignError(ValueError):
    """Regression design matrix is rank deficient (e.g. constant regressor)."""


class DegenerateSupportError(ValueError):
    """Too few distinct predictor values to place spline knots."""


class DegenerateInputError(ValueError):
    """A statistic or direction score is undefined for this input."""
