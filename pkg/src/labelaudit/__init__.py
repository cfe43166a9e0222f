"""Observational Label-DP auditing: games, trade-off curves, empirical eps."""

from .audit import (
    AuditOutcome,
    EpsilonEstimate,
    audit_with_shift,
    best_epsilon_over_guess_sweep,
    empirical_epsilon,
    evaluate_audit,
)
from .experiment import (
    ExperimentConfig,
    ExperimentReport,
    run_experiment,
    write_report,
)
from .game import make_guesses, play_game, score_samples, tally
from .mechanism import RandomizedResponse, rr_apply, rr_posterior
from .proxy import (
    GroundTruthProxy,
    LogisticProxy,
    ShiftedProxy,
    predict_proba,
    sample_counterfactual,
    train_logistic,
)
from .synthdata import (
    LabeledDataset,
    sample_mixture,
    shifted_posterior,
    true_posterior,
)
from .tradeoff import (
    EpsDeltaTradeoff,
    GaussianFamily,
    GaussianTradeoff,
    ShiftedTradeoff,
    eps_from_tradeoff,
    eval_eps_delta,
    eval_gaussian,
    fbar_inverse,
    shift_tradeoff,
)

__version__ = "0.1.0"
