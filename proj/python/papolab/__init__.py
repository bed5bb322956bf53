"""papolab: token-level entropy mechanics of softmax policy-gradient training.

The heavy lifting lives in the C++ extension `papolab._core`; this package
re-exports its surface.
"""

from ._core import (
    Controller,
    ControllerConfig,
    PolarityRecord,
    TokenDistribution,
    entropy_gradient,
    exact_entropy_delta,
    logit_update,
    polarity,
    run_verification,
    softmax_from_logits,
    tendency_components,
    token_gradient,
    train,
)

__all__ = [
    "Controller",
    "ControllerConfig",
    "PolarityRecord",
    "TokenDistribution",
    "entropy_gradient",
    "exact_entropy_delta",
    "logit_update",
    "polarity",
    "run_verification",
    "softmax_from_logits",
    "tendency_components",
    "token_gradient",
    "train",
]
