"""Adam on raw pixel arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BETA1 = 0.9
BETA2 = 0.999
EPS = 1e-8


@dataclass(frozen=True)
class AdamState:
    step: int
    first_moment: np.ndarray
    second_moment: np.ndarray

    @classmethod
    def zeros_like(cls, y) -> "AdamState":
        y = np.asarray(y, dtype=np.float64)
        return cls(0, np.zeros_like(y), np.zeros_like(y))


def adam_step(y, grad, state: AdamState, lr: float):
    """One bias-corrected Adam update; returns ``(new_y, new_state)``.

    No clipping is applied.
    """
    y = np.asarray(y, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if y.shape != grad.shape or y.shape != state.first_moment.shape:
        raise ValueError(f"shape mismatch: image {y.shape}, grad {grad.shape}, "
                         f"state {state.first_moment.shape}")
    t = state.step + 1
    m = BETA1 * state.first_moment + (1.0 - BETA1) * grad
    v = BETA2 * state.second_moment + (1.0 - BETA2) * (grad * grad)
    m_hat = m / (1.0 - BETA1 ** t)
    v_hat = v / (1.0 - BETA2 ** t)
    y_new = y - lr * m_hat / (np.sqrt(v_hat) + EPS)
    return y_new, AdamState(t, m, v)
