"""Adam over the flat parameter vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, TrainingDiverged


@dataclass(frozen=True)
class AdamConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.lr <= 0:
            raise ConfigError(f"learning rate must be positive, got {self.lr}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ConfigError("betas must lie in [0, 1)")
        if self.eps <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.eps}")


class Adam:
    """Standard bias-corrected Adam; state lives with the optimizer."""

    def __init__(self, size: int, config: AdamConfig = AdamConfig()):
        self.config = config
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        if grads.shape != params.shape:
            raise TrainingDiverged(f"gradient shape {grads.shape} != params {params.shape}")
        if not np.all(np.isfinite(grads)):
            raise TrainingDiverged("non-finite gradient")
        c = self.config
        self.t += 1
        self.m = c.beta1 * self.m + (1.0 - c.beta1) * grads
        self.v = c.beta2 * self.v + (1.0 - c.beta2) * grads * grads
        m_hat = self.m / (1.0 - c.beta1 ** self.t)
        v_hat = self.v / (1.0 - c.beta2 ** self.t)
        out = params - c.lr * m_hat / (np.sqrt(v_hat) + c.eps)
        if not np.all(np.isfinite(out)):
            raise TrainingDiverged("non-finite parameter update")
        return out
