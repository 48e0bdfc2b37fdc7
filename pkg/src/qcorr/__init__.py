"""Quantify general quantum correlations of finite-dimensional multipartite
states via the entanglement created with measurement apparatuses.

Public surface: state constructors and registers (:mod:`qcorr.states`),
pre-measurement maps (:mod:`qcorr.premeasure`), entanglement monotones
(:mod:`qcorr.entanglement`), quantumness optimizers (:mod:`qcorr.quantumness`),
the LOCC transfer channel (:mod:`qcorr.locc`), von Neumann chain simulation
(:mod:`qcorr.chain`), and verification suites (:mod:`qcorr.suites`).
"""

from .errors import InvariantError, ParseError, QcorrError, UsageError
from .states import LabeledState, LocalBasis, Register
from .premeasure import MeasurementPlan, premeasure, dephase, undo_interaction
from .entanglement import (
    BipartitionCut,
    negativity,
    log_negativity,
    entropy_of_entanglement,
    e_min_max,
    pure_gme_test,
)
from .quantumness import (
    OptimizerConfig,
    QuantumnessReport,
    q_negativity,
    deficit,
    classify_cc,
)
from .locc import locc_undo, verify_monotonicity_step
from .chain import ChainConfig, LinkSpec, run_chain, eigenbasis_criterion

__all__ = [
    "QcorrError",
    "ParseError",
    "InvariantError",
    "UsageError",
    "Register",
    "LabeledState",
    "LocalBasis",
    "MeasurementPlan",
    "premeasure",
    "dephase",
    "undo_interaction",
    "BipartitionCut",
    "negativity",
    "log_negativity",
    "entropy_of_entanglement",
    "e_min_max",
    "pure_gme_test",
    "OptimizerConfig",
    "QuantumnessReport",
    "q_negativity",
    "deficit",
    "classify_cc",
    "locc_undo",
    "verify_monotonicity_step",
    "ChainConfig",
    "LinkSpec",
    "run_chain",
    "eigenbasis_criterion",
]
