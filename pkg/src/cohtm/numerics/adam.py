"""Adam with bias correction; defaults follow the training setup (beta1=0.99, lr=0.002)."""

import numpy as np


class AdamState:
    """First/second moment buffers shaped like their parameters, plus a step counter."""

    def __init__(self, params, lr=0.002, beta1=0.99, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.value) for p in params]
        self.v = [np.zeros_like(p.value) for p in params]


def adam_step(state, params, grads):
    """One in-place Adam update on ``params`` (list of Vars) from ``grads`` arrays."""
    if len(params) != len(state.m):
        raise ValueError("parameter count does not match optimizer state")
    for g in grads:
        if not np.all(np.isfinite(g)):
            raise FloatingPointError("non-finite gradient in adam_step")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for i, (p, g) in enumerate(zip(params, grads)):
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g
        m_hat = state.m[i] / bc1
        v_hat = state.v[i] / bc2
        p.value -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
