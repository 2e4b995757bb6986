"""Bivariate causal discovery with bootstrap structure posteriors and
model-averaged decision rules, plus the factorial simulation harness that
compares structure selection against structure averaging."""

from .decide import (
    DecisionOutcome,
    binary_treatment_loss,
    estimate_effect,
    evaluate_decisions,
    ma_action,
    ms_action,
    optimal_action,
    oracle_action_grid,
    point_loss,
    posterior_expected_loss_argmin,
    threshold_loss,
)
from .depstats import distance_correlation, kendall_tau, pearson
from .discovery import (
    DirectionScore,
    DiscoveryMethod,
    StructurePosterior,
    anm_score,
    bootstrap_posterior,
    regression_score,
    score_sample,
)
from .errors import DegenerateInputError, DegenerateSupportError, SingularDesignError
from .harness import (
    Cell,
    CellSummary,
    RunRecord,
    SimulationConfig,
    aggregate,
    ols_trend,
    prop3_trend_report,
    read_runs_csv,
    run_grid,
    run_replication,
    t_test_one_sample,
    write_runs_csv,
    write_summary_csv,
)
from .numkit import (
    LinearFit,
    PolyFit,
    SmoothFit,
    default_fd_step,
    finite_diff_derivative,
    ols_fit,
    poly2_fit,
    predict,
    spline_fit,
)
from .synth import (
    AffineEffect,
    BivariateSample,
    CausalStructure,
    ConstantEffect,
    DgpKind,
    DgpSpec,
    EffectCurve,
    EffectSize,
    TabulatedEffect,
    ZeroEffect,
    ate_from_effect,
    default_spec,
    draw_structure,
    generate_sample,
    true_marginal_effect,
)

__version__ = "0.1.0"
