from rs2bench.satisficing.core import (
    EPS_DIV,
    EPS_RATIO,
    AspirationController,
    ReliabilityEstimator,
    aspiration,
    aspiration_beta,
    rs2_values,
    rs_values,
    satisficed,
    select_action,
    softmax,
    srs_target,
    srs_values,
)
from rs2bench.satisficing.policy import EpsilonGreedy, EpsilonSchedule, RS2Policy, behave
from rs2bench.satisficing.rnd import RndModule, RunningStd, rnd_intrinsic, rnd_train

__all__ = [
    "EPS_DIV",
    "EPS_RATIO",
    "AspirationController",
    "EpsilonGreedy",
    "EpsilonSchedule",
    "RS2Policy",
    "ReliabilityEstimator",
    "RndModule",
    "RunningStd",
    "aspiration",
    "aspiration_beta",
    "behave",
    "rnd_intrinsic",
    "rnd_train",
    "rs2_values",
    "rs_values",
    "satisficed",
    "select_action",
    "softmax",
    "srs_target",
    "srs_values",
]
