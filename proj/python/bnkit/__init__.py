"""Discrete Bayesian networks for survey data."""

from ._core import (
    BnkitError,
    ConstraintError,
    CycleError,
    DataError,
    Dag,
    Dataset,
    EvidenceError,
    ImpossibleEvidence,
    LimitError,
    ModelError,
    ModelRegistry,
    Network,
    NetworkError,
    Variable,
    bic_score,
    bootstrap_edges,
    brute_force_marginals,
    fit_network,
    forward_sample,
    hill_climb,
    joint_probability,
    load_network,
    load_structure,
    markov_equivalent,
    parameter_count,
    parse_network,
    pc_algorithm,
    posterior_marginals,
    read_survey_csv,
    refine_structure,
    save_network,
    score_relationship,
    state_counts,
    topological_order,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
