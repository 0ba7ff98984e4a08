"""Adam optimizer over MlpParams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import MlpParams

DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPSILON = 1e-8


@dataclass
class AdamState:
    """First/second moment estimates and the step counter."""

    m: MlpParams
    v: MlpParams
    t: int = 0

    @classmethod
    def fresh(cls, params: MlpParams) -> AdamState:
        """Zero moments shaped like params, t = 0."""
        return cls(m=params.zeros_like(), v=params.zeros_like(), t=0)


def adam_step(
    params: MlpParams,
    grads: MlpParams,
    state: AdamState,
    lr: float,
    beta1: float = DEFAULT_BETA1,
    beta2: float = DEFAULT_BETA2,
    epsilon: float = DEFAULT_EPSILON,
) -> tuple[MlpParams, AdamState]:
    """One bias-corrected Adam update.

    Inputs are left untouched; new parameter and state objects are returned.
    """
    t = state.t + 1
    bc1 = 1.0 - beta1**t
    bc2 = 1.0 - beta2**t

    new_params: list[np.ndarray] = []
    new_m: list[np.ndarray] = []
    new_v: list[np.ndarray] = []
    for theta, g, m, v in zip(
        params.arrays(), grads.arrays(), state.m.arrays(), state.v.arrays(), strict=True
    ):
        m_next = beta1 * m + (1.0 - beta1) * g
        v_next = beta2 * v + (1.0 - beta2) * (g * g)
        m_hat = m_next / bc1
        v_hat = v_next / bc2
        new_params.append(theta - lr * m_hat / (np.sqrt(v_hat) + epsilon))
        new_m.append(m_next)
        new_v.append(v_next)

    return (
        MlpParams.from_arrays(new_params),
        AdamState(m=MlpParams.from_arrays(new_m), v=MlpParams.from_arrays(new_v), t=t),
    )
