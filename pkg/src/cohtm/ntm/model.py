"""Model architecture and per-batch objective.

Encoder: one softplus hidden layer, dropout, batch-normalized Gaussian heads.
Latent: reparameterized logistic normal (softmax of the Gaussian sample).
Decoder: product-of-experts style mixture of topic logits, batch-normalized,
then normalized over the vocabulary.  The Gaussian prior is learnable and
initialized from the Laplace approximation of a symmetric Dirichlet(1).
"""

import numpy as np

from cohtm.numerics import tape

INPUT_MODES = ("bow", "embedding", "concat")


class ModelConfig:
    def __init__(self, k, vocab_size, hidden=100, input_mode="bow", embed_dim=0,
                 dropout_p=0.2, epochs=100, batch_size=100, lr=0.002, seed=0):
        if k < 2:
            raise ValueError("topic count must be >= 2")
        if hidden < 1:
            raise ValueError("hidden size must be >= 1")
        if input_mode not in INPUT_MODES:
            raise ValueError("input_mode must be one of %s" % (INPUT_MODES,))
        if input_mode in ("embedding", "concat") and embed_dim <= 0:
            raise ValueError("input_mode %r requires embed_dim > 0" % input_mode)
        self.k = int(k)
        self.vocab_size = int(vocab_size)
        self.hidden = int(hidden)
        self.input_mode = input_mode
        self.embed_dim = int(embed_dim)
        self.dropout_p = float(dropout_p)
        self.epochs = int(epochs)
        self.batch_size = int(batch_size)
        self.lr = float(lr)
        self.seed = int(seed)

    @property
    def input_dim(self):
        if self.input_mode == "bow":
            return self.vocab_size
        if self.input_mode == "embedding":
            return self.embed_dim
        return self.vocab_size + self.embed_dim

    def to_dict(self):
        return {"k": self.k, "vocab_size": self.vocab_size, "hidden": self.hidden,
                "input_mode": self.input_mode, "embed_dim": self.embed_dim,
                "dropout_p": self.dropout_p, "epochs": self.epochs,
                "batch_size": self.batch_size, "lr": self.lr, "seed": self.seed}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


PARAM_NAMES = ("w1", "b1", "w_mu", "b_mu", "w_lv", "b_lv", "beta",
               "prior_mean", "prior_logvar")
BN_NAMES = ("bn_mu", "bn_lv", "bn_dec")


class ModelParams:
    """All trainable tensors plus the three batchnorm running-stat states."""

    def __init__(self, w1, b1, w_mu, b_mu, w_lv, b_lv, beta, prior_mean, prior_logvar,
                 bn_mu, bn_lv, bn_dec):
        self.w1 = w1
        self.b1 = b1
        self.w_mu = w_mu
        self.b_mu = b_mu
        self.w_lv = w_lv
        self.b_lv = b_lv
        self.beta = beta
        self.prior_mean = prior_mean
        self.prior_logvar = prior_logvar
        self.bn_mu = bn_mu
        self.bn_lv = bn_lv
        self.bn_dec = bn_dec

    def trainable(self):
        return [getattr(self, name) for name in PARAM_NAMES]


def init_prior(k):
    """Laplace approximation of a symmetric Dirichlet(1) prior.

    Mean 0 and per-coordinate variance 1 - 1/k, from
    1/alpha (1 - 2/k) + 1/(k^2) * sum_j 1/alpha at alpha = 1.
    """
    if k < 2:
        raise ValueError("topic count must be >= 2")
    variance = 1.0 - 1.0 / k
    return np.zeros(k), np.full(k, np.log(variance))


def _xavier(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform((fan_in, fan_out)) * 2.0 * limit - limit


def init_params(config, rng):
    k, h, d = config.k, config.hidden, config.input_dim
    v = config.vocab_size
    prior_mean, prior_logvar = init_prior(k)
    return ModelParams(
        w1=tape.parameter(_xavier(rng, d, h)),
        b1=tape.parameter(np.zeros(h)),
        w_mu=tape.parameter(_xavier(rng, h, k)),
        b_mu=tape.parameter(np.zeros(k)),
        w_lv=tape.parameter(_xavier(rng, h, k)),
        b_lv=tape.parameter(np.zeros(k)),
        beta=tape.parameter(_xavier(rng, k, v)),
        prior_mean=tape.parameter(prior_mean),
        prior_logvar=tape.parameter(prior_logvar),
        bn_mu=tape.BatchNormState(k),
        bn_lv=tape.BatchNormState(k),
        bn_dec=tape.BatchNormState(v),
    )


def build_input(x, embeddings, config):
    """Encoder input per input_mode; BoW is L1-normalized before concatenation."""
    if config.input_mode == "bow":
        return np.asarray(x, dtype=np.float64)
    if config.input_mode == "embedding":
        if embeddings is None:
            raise ValueError("embedding input mode requires document embeddings")
        return np.asarray(embeddings, dtype=np.float64)
    if embeddings is None:
        raise ValueError("concat input mode requires document embeddings")
    x = np.asarray(x, dtype=np.float64)
    norm = x.sum(axis=1, keepdims=True)
    norm[norm == 0] = 1.0
    return np.concatenate([x / norm, np.asarray(embeddings, dtype=np.float64)], axis=1)


def encode(params, inp, config, rng, train=True, update=None):
    """Variational heads: (mu, logvar) Vars for a batch of encoder inputs."""
    inp = np.atleast_2d(np.asarray(inp, dtype=np.float64))
    if inp.shape[1] != config.input_dim:
        raise ValueError("encoder input dim %d, expected %d" % (inp.shape[1], config.input_dim))
    h = tape.softplus(tape.add_bias(tape.matmul(tape.constant(inp), params.w1), params.b1))
    h = tape.dropout(h, config.dropout_p, rng, train=train)
    mu = tape.batchnorm_1d(tape.add_bias(tape.matmul(h, params.w_mu), params.b_mu),
                           params.bn_mu, train=train, update=update)
    lv = tape.batchnorm_1d(tape.add_bias(tape.matmul(h, params.w_lv), params.b_lv),
                           params.bn_lv, train=train, update=update)
    return mu, lv


def reparameterize(mu, logvar, rng, train=True):
    """theta = softmax(mu + exp(logvar/2) * eps); eps = 0 outside training."""
    if train:
        eps = rng.normal(mu.value.shape)
        z = tape.add(mu, tape.mul(tape.exp(tape.smul(logvar, 0.5)), tape.constant(eps)))
    else:
        z = mu
    return tape.row_softmax(z)


def decode(params, theta, train=True, update=None):
    """Log word probabilities: log row-softmax of batch-normalized theta @ beta."""
    logits = tape.batchnorm_1d(tape.matmul(theta, params.beta), params.bn_dec,
                               train=train, update=update)
    return tape.log(tape.row_softmax(logits))


def _kl_to_prior(mu, lv, params):
    """Closed-form KL(q || N(prior_mean, exp(prior_logvar))): sum over K, mean over batch."""
    d_lv = tape.sub(lv, params.prior_logvar)
    t1 = tape.exp(d_lv)
    diff = tape.sub(mu, params.prior_mean)
    t2 = tape.mul(tape.square(diff), tape.exp(tape.smul(params.prior_logvar, -1.0)))
    inner = tape.add(tape.add(t1, t2), tape.smul(d_lv, -1.0))
    per_doc = tape.smul(tape.row_sum(inner), 0.5)
    k = mu.value.shape[1]
    return tape.add(tape.reduce_mean(per_doc), tape.constant(-0.5 * k))


def elbo_loss(params, x, embeddings, config, rng, train=True, update=None):
    """Minimized ELBO for a batch: mean over docs of KL minus log-likelihood.

    Returns (loss Var, theta Var); reconstruction sums over the vocabulary,
    KL sums over topics, both averaged over the batch.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    inp = build_input(x, embeddings, config)
    mu, lv = encode(params, inp, config, rng, train=train, update=update)
    theta = reparameterize(mu, lv, rng, train=train)
    logp = decode(params, theta, train=train, update=update)
    recon = tape.smul(tape.reduce_mean(tape.row_sum(tape.mul(tape.constant(x), logp))), -1.0)
    kl = _kl_to_prior(mu, lv, params)
    return tape.add(kl, recon), theta


class TopicSet:
    """K ranked lists of (word, probability), sorted by descending beta."""

    def __init__(self, ids, probs, words=None):
        self.ids = [np.asarray(t, dtype=np.int64) for t in ids]
        self.probs = [np.asarray(p, dtype=np.float64) for p in probs]
        self.words = words  # list of lists of token strings, or None

    @property
    def k(self):
        return len(self.ids)

    def top_ids(self, topic):
        return self.ids[topic]

    def as_word_lists(self):
        if self.words is None:
            raise ValueError("TopicSet has no vocabulary attached")
        return self.words


def extract_topics(params, n, vocab=None):
    """Top-n words per topic; ties break by ascending word id."""
    beta = params.beta.value
    k, v = beta.shape
    if not 1 <= n <= v:
        raise ValueError("n must be in [1, vocab_size]")
    z = beta - beta.max(axis=1, keepdims=True)
    e = np.exp(z)
    probs = e / e.sum(axis=1, keepdims=True)
    ids, top_probs, words = [], [], []
    for row in range(k):
        order = np.argsort(-beta[row], kind="stable")[:n]
        ids.append(order)
        top_probs.append(probs[row, order])
        if vocab is not None:
            words.append([vocab.words[i] for i in order])
    return TopicSet(ids, top_probs, words if vocab is not None else None)


def infer_theta(params, x, config, embeddings=None):
    """Deterministic document-topic distribution (eval mode, zero noise)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    inp = build_input(x, embeddings, config)
    mu, _ = encode(params, inp, config, rng=None, train=False)
    theta = tape.row_softmax(mu)
    return theta.value[0] if theta.value.shape[0] == 1 else theta.value
