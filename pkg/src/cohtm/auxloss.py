"""Coherence/diversity penalty weights and the auxiliary loss on topic-word logits.

The weights are recomputed from the current logits every step and are always
gradient-detached: only the softmax of the logits carries gradients through
the auxiliary loss.
"""

import numpy as np

from cohtm.numerics import tape


class AuxConfig:
    """Hyperparameters of the auxiliary objective.

    ``mode`` selects the plain coherence weight ("wc") or the diversity-aware
    weight ("wd"); with ``lambda_d`` = 0.5 the two agree up to a factor of 2.
    """

    def __init__(self, n=20, lambda_d=0.7, lambda_a_max=100.0, warmup_epochs=50, mode="wd"):
        if mode not in ("wc", "wd"):
            raise ValueError("mode must be 'wc' or 'wd'")
        if not 0.5 <= lambda_d <= 1.0:
            raise ValueError("lambda_d must be in [0.5, 1]")
        if lambda_a_max < 0:
            raise ValueError("lambda_a_max must be >= 0")
        if n < 1:
            raise ValueError("top-word count n must be >= 1")
        self.n = int(n)
        self.lambda_d = float(lambda_d)
        self.lambda_a_max = float(lambda_a_max)
        self.warmup_epochs = int(warmup_epochs)
        self.mode = mode

    def to_dict(self):
        return {"n": self.n, "lambda_d": self.lambda_d, "lambda_a_max": self.lambda_a_max,
                "warmup_epochs": self.warmup_epochs, "mode": self.mode}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def top_mask(beta, n):
    """Binary K x V mask of each topic's n largest logits (ties by ascending id)."""
    beta = np.asarray(beta)
    k, v = beta.shape
    if n > v:
        raise ValueError("n exceeds vocabulary size")
    mask = np.zeros((k, v), dtype=bool)
    order = np.argsort(-beta, axis=1, kind="stable")
    rows = np.arange(k)[:, None]
    mask[rows, order[:, :n]] = True
    return mask


def coherence_weight(beta, mask, npmi):
    """Per-(topic, word) coherence penalty in [0, 1].

    The masked row softmax of the logits weights each word's NPMI with the
    topic's top-n words; a row-wise min-max rescale puts the averages in
    [0, 1] and the penalty is their complement.  Constant rows (uniform
    averages) rescale to 0 and so receive the maximal penalty 1.
    """
    beta = np.asarray(beta, dtype=np.float64)
    n = np.asarray(npmi.n if hasattr(npmi, "n") else npmi, dtype=np.float64)
    if beta.shape[1] != n.shape[0]:
        raise ValueError("beta columns do not match NPMI matrix size")
    weights = tape.masked_row_softmax(tape.constant(beta), mask).value
    avg = weights @ n
    scaled = tape.row_minmax_normalize(tape.constant(avg)).value
    return 1.0 - scaled


def diversity_mask(mask_c):
    """M_d[k, i] = 1 iff word i is in some *other* topic's top-n set."""
    mask_c = np.asarray(mask_c, dtype=bool)
    in_any = mask_c.sum(axis=0, keepdims=True)
    return (in_any - mask_c.astype(np.int64)) > 0


def diversity_weight(w_c, mask_d, lambda_d):
    """Rebalance W_C: factor lambda_d on words claimed by other topics, 1-lambda_d otherwise."""
    if not 0.5 <= lambda_d <= 1.0:
        raise ValueError("lambda_d must be in [0.5, 1]")
    w_c = np.asarray(w_c, dtype=np.float64)
    mask_d = np.asarray(mask_d, dtype=bool)
    return np.where(mask_d, lambda_d * w_c, (1.0 - lambda_d) * w_c)


def compute_weights(beta, npmi, cfg):
    """Masks and the final penalty matrix for one step, all gradient-detached."""
    m_c = top_mask(beta, cfg.n)
    w_c = coherence_weight(beta, m_c, npmi)
    if cfg.mode == "wc":
        return m_c, None, w_c
    m_d = diversity_mask(m_c)
    return m_c, m_d, diversity_weight(w_c, m_d, cfg.lambda_d)


def aux_loss(beta_var, weights):
    """Sum over topics and words of 0.5 * softmax(beta)^2 * weights (taped in beta only)."""
    p = tape.row_softmax(beta_var)
    return tape.smul(tape.reduce_sum(tape.mul(tape.square(p), tape.constant(weights))), 0.5)


def aux_grad_closed_form(beta, weights):
    """Closed-form gradient of ``aux_loss`` w.r.t. the logits (test oracle).

    For p = row softmax of beta and constant weights w:
    d/d beta_ki = w_ki p_ki^2 (1 - p_ki) - p_ki * sum_{j != i} w_kj p_kj^2
    """
    beta = np.asarray(beta, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    z = beta - beta.max(axis=1, keepdims=True)
    e = np.exp(z)
    p = e / e.sum(axis=1, keepdims=True)
    wp2 = w * p * p
    other = wp2.sum(axis=1, keepdims=True) - wp2
    return wp2 * (1.0 - p) - p * other


def lambda_schedule(epoch, cfg):
    """Linear warm-up: 0 at epoch 0, the full scale from ``warmup_epochs`` on."""
    if epoch < 0:
        raise ValueError("epoch must be >= 0")
    if cfg.warmup_epochs <= 0:
        return cfg.lambda_a_max
    return cfg.lambda_a_max * min(1.0, epoch / cfg.warmup_epochs)
