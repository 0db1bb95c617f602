"""Minibatch training with the optional auxiliary objective, and checkpointing.

Checkpoint layout: a magic line, a JSON metadata line (config, epoch, rng
state, optimizer scalars, loss trace, vocabulary, array manifest), then the
raw little-endian array payloads in manifest order.  Arrays are stored as
float64 so that resuming reproduces uninterrupted training bit-exactly.
"""

import json

import numpy as np

from cohtm import auxloss as aux_mod
from cohtm.numerics import AdamState, RngStream, Tape, adam_step, backward, tape
from cohtm.ntm import model as model_mod

_MAGIC = b"COHTM-CKPT 1\n"


class TrainingError(RuntimeError):
    pass


class Checkpoint:
    """Everything needed to resume training or run inference."""

    def __init__(self, config, params, epoch, rng_state, adam, trace,
                 aux_config=None, vocab_words=None):
        self.config = config
        self.params = params
        self.epoch = epoch  # completed epochs
        self.rng_state = rng_state
        self.adam = adam
        self.trace = trace  # per-epoch dicts: epoch, elbo, aux, lambda_a
        self.aux_config = aux_config
        self.vocab_words = vocab_words


def _batches(num_docs, batch_size, perm):
    for start in range(0, num_docs, batch_size):
        yield perm[start:start + batch_size]


def fit(corpus, config, aux_config=None, npmi=None, doc_embeddings=None,
        resume=None, vocab_words=None, log_fn=None):
    """Train for ``config.epochs`` epochs and return the final Checkpoint.

    With ``aux_config`` set, the coherence/diversity penalty is recomputed
    from the current logits at every step (gradient-detached) and added with
    the warm-up scale; at scale 0 (epoch 0) the step is bit-identical to
    baseline training.  ``resume`` continues a checkpoint from its stored
    epoch; serial re-runs are bit-reproducible from (config, seed).
    """
    if aux_config is not None:
        if npmi is None:
            raise ValueError("auxiliary loss requires an NPMI matrix")
        if npmi.vocab_size != config.vocab_size:
            raise ValueError("NPMI matrix size %d does not match vocabulary %d"
                             % (npmi.vocab_size, config.vocab_size))
    if config.input_mode != "bow":
        if doc_embeddings is None:
            raise ValueError("input mode %r requires document embeddings" % config.input_mode)
        if doc_embeddings.num_docs != corpus.num_docs:
            raise ValueError("document embeddings do not align with the corpus")
    npmi_arr = None if npmi is None else np.asarray(npmi.n, dtype=np.float64)

    if resume is not None:
        params = resume.params
        rng = RngStream.from_state(resume.rng_state)
        adam = resume.adam
        trace = list(resume.trace)
        start_epoch = resume.epoch
    else:
        rng = RngStream(config.seed)
        params = model_mod.init_params(config, rng)
        adam = AdamState([p for p in params.trainable()], lr=config.lr)
        trace = []
        start_epoch = 0

    trainable = params.trainable()
    num_docs = corpus.num_docs
    for epoch in range(start_epoch, config.epochs):
        lam = 0.0 if aux_config is None else aux_mod.lambda_schedule(epoch, aux_config)
        perm = rng.permutation(num_docs)
        elbo_sum = 0.0
        aux_sum = 0.0
        n_batches = 0
        for batch_idx in _batches(num_docs, config.batch_size, perm):
            x = corpus.dense_rows(batch_idx)
            emb = None if doc_embeddings is None else doc_embeddings.rows[batch_idx]
            if aux_config is not None and lam > 0.0:
                _, _, weights = aux_mod.compute_weights(params.beta.value, npmi_arr, aux_config)
            else:
                weights = None
            with Tape() as t:
                loss, _ = model_mod.elbo_loss(params, x, emb, config, rng, train=True)
                elbo_val = float(loss.value)
                aux_val = 0.0
                if weights is not None:
                    aux_term = aux_mod.aux_loss(params.beta, weights)
                    aux_val = float(aux_term.value)
                    loss = tape.add(loss, tape.smul(aux_term, lam))
                if not np.isfinite(loss.value):
                    raise TrainingError(
                        "non-finite loss at epoch %d (elbo=%r, aux=%r)"
                        % (epoch, elbo_val, aux_val))
                grads = backward(t, loss)
            adam_step(adam, trainable, [grads[p] for p in trainable])
            elbo_sum += elbo_val
            aux_sum += aux_val
            n_batches += 1
        record = {"epoch": epoch, "elbo": elbo_sum / n_batches,
                  "aux": aux_sum / n_batches, "lambda_a": lam}
        trace.append(record)
        if log_fn is not None:
            log_fn(record)

    return Checkpoint(config, params, config.epochs, rng.get_state(), adam, trace,
                      aux_config=aux_config, vocab_words=vocab_words)


# ---------------------------------------------------------------------------
# checkpoint serialization

def _rng_state_to_json(state):
    def conv(obj):
        if isinstance(obj, dict):
            return {k: conv(v) for k, v in obj.items()}
        if isinstance(obj, np.ndarray):
            return {"__ndarray__": obj.tolist(), "dtype": str(obj.dtype)}
        if isinstance(obj, (np.integer,)):
            return int(obj)
        return obj

    return conv(state)


def _rng_state_from_json(state):
    def conv(obj):
        if isinstance(obj, dict):
            if "__ndarray__" in obj:
                return np.array(obj["__ndarray__"], dtype=obj["dtype"])
            return {k: conv(v) for k, v in obj.items()}
        return obj

    return conv(state)


def _array_manifest(ckpt):
    arrays = []
    for name in model_mod.PARAM_NAMES:
        arrays.append(("param." + name, getattr(ckpt.params, name).value))
    for name in model_mod.BN_NAMES:
        state = getattr(ckpt.params, name)
        arrays.append(("bn." + name + ".mean", state.running_mean))
        arrays.append(("bn." + name + ".var", state.running_var))
    for i, name in enumerate(model_mod.PARAM_NAMES):
        arrays.append(("adam.m." + name, ckpt.adam.m[i]))
        arrays.append(("adam.v." + name, ckpt.adam.v[i]))
    return arrays


def save_checkpoint(path, ckpt):
    arrays = _array_manifest(ckpt)
    header = {
        "config": ckpt.config.to_dict(),
        "aux_config": None if ckpt.aux_config is None else ckpt.aux_config.to_dict(),
        "epoch": ckpt.epoch,
        "rng_state": _rng_state_to_json(ckpt.rng_state),
        "adam": {"lr": ckpt.adam.lr, "beta1": ckpt.adam.beta1,
                 "beta2": ckpt.adam.beta2, "eps": ckpt.adam.eps, "t": ckpt.adam.t},
        "trace": ckpt.trace,
        "vocab": ckpt.vocab_words,
        "arrays": [{"name": n, "dtype": "<f8", "shape": list(a.shape)} for n, a in arrays],
    }
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(json.dumps(header).encode("utf-8"))
        fh.write(b"\n")
        for _, a in arrays:
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise TrainingError("not a checkpoint file: %s" % path)
        header_line = fh.readline()
        try:
            header = json.loads(header_line.decode("utf-8"))
        except ValueError as exc:
            raise TrainingError("corrupt checkpoint header: %s" % exc) from None
        values = {}
        for spec in header["arrays"]:
            count = int(np.prod(spec["shape"])) if spec["shape"] else 1
            buf = fh.read(8 * count)
            if len(buf) != 8 * count:
                raise TrainingError("truncated checkpoint array %r" % spec["name"])
            values[spec["name"]] = np.frombuffer(buf, dtype="<f8").reshape(spec["shape"]).copy()

    config = model_mod.ModelConfig.from_dict(header["config"])
    aux_config = (None if header["aux_config"] is None
                  else aux_mod.AuxConfig.from_dict(header["aux_config"]))
    kwargs = {name: tape.parameter(values["param." + name]) for name in model_mod.PARAM_NAMES}
    for name in model_mod.BN_NAMES:
        size = len(values["bn." + name + ".mean"])
        state = tape.BatchNormState(size)
        state.running_mean = values["bn." + name + ".mean"]
        state.running_var = values["bn." + name + ".var"]
        kwargs[name] = state
    params = model_mod.ModelParams(**kwargs)

    adam_meta = header["adam"]
    adam = AdamState(params.trainable(), lr=adam_meta["lr"], beta1=adam_meta["beta1"],
                     beta2=adam_meta["beta2"], eps=adam_meta["eps"])
    adam.t = adam_meta["t"]
    adam.m = [values["adam.m." + name] for name in model_mod.PARAM_NAMES]
    adam.v = [values["adam.v." + name] for name in model_mod.PARAM_NAMES]

    return Checkpoint(config, params, header["epoch"],
                      _rng_state_from_json(header["rng_state"]), adam, header["trace"],
                      aux_config=aux_config, vocab_words=header["vocab"])
