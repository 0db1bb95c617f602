"""Reverse-mode automatic differentiation on dense float64 arrays.

A ``Tape`` records every primitive operation executed inside its ``with``
block.  ``backward(tape, loss)`` replays the records in exact reverse order
and accumulates adjoints into every reachable ``Var`` that requires a
gradient.  Values created outside a tape (or through ``detach``) contribute
no adjoint.

All values are float64 internally; file formats downcast separately.
"""

import numpy as np

_ACTIVE_TAPES = []


class Tape:
    """Ordered record of primitive operations for one forward pass."""

    def __init__(self):
        self._nodes = []  # (out Var, inputs tuple[Var], backward fn)

    def __enter__(self):
        _ACTIVE_TAPES.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        popped = _ACTIVE_TAPES.pop()
        assert popped is self

    def __len__(self):
        return len(self._nodes)


def _active_tape():
    return _ACTIVE_TAPES[-1] if _ACTIVE_TAPES else None


class Var:
    """A float64 array plus an optional gradient buffer."""

    __slots__ = ("value", "grad", "requires_grad")

    def __init__(self, value, requires_grad=False):
        self.value = np.asarray(value, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad = None

    @property
    def shape(self):
        return self.value.shape


def parameter(value):
    """A trainable Var: ``backward`` deposits its adjoint in ``.grad``."""
    return Var(np.array(value, dtype=np.float64), requires_grad=True)


def constant(value):
    """A Var that never receives a gradient."""
    return Var(value, requires_grad=False)


def detach(v):
    """Copy of ``v`` cut off from the tape; contributes no adjoint."""
    return Var(np.array(v.value, copy=True), requires_grad=False)


def _as_var(x):
    return x if isinstance(x, Var) else constant(x)


def _record(out, inputs, backward_fn):
    tape = _active_tape()
    if tape is not None:
        tape._nodes.append((out, inputs, backward_fn))


def backward(tape, loss):
    """Accumulate adjoints of ``loss`` w.r.t. everything on the tape.

    Returns a dict mapping each reachable requires-grad Var to its gradient
    array (also stored in ``var.grad``).  Raises if ``loss`` is not scalar.
    """
    if np.ndim(loss.value) != 0 and np.size(loss.value) != 1:
        raise ValueError("backward requires a scalar loss, got shape %s" % (loss.shape,))
    adjoint = {id(loss): np.ones_like(loss.value)}
    grads = {}
    for out, inputs, backward_fn in reversed(tape._nodes):
        g_out = adjoint.get(id(out))
        if g_out is None:
            continue
        for var, g in zip(inputs, backward_fn(g_out)):
            if g is None:
                continue
            key = id(var)
            if key in adjoint:
                adjoint[key] = adjoint[key] + g
            else:
                adjoint[key] = g
            if var.requires_grad:
                grads[var] = adjoint[key]
    for var, g in grads.items():
        var.grad = g
    return grads


def _unbroadcast(g, shape):
    """Sum ``g`` down to ``shape`` (reverse of numpy broadcasting)."""
    g = np.asarray(g)
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g.reshape(shape)


# ---------------------------------------------------------------------------
# primitives

def matmul(a, b):
    a, b = _as_var(a), _as_var(b)
    out = Var(a.value @ b.value)
    av, bv = a.value, b.value
    _record(out, (a, b), lambda g: (g @ bv.T, av.T @ g))
    return out


def add_bias(x, b):
    """Row-broadcast bias add: ``x + b`` with b shaped (cols,)."""
    x, b = _as_var(x), _as_var(b)
    out = Var(x.value + b.value)
    bshape = b.value.shape
    _record(out, (x, b), lambda g: (g, _unbroadcast(g, bshape)))
    return out


def add(a, b):
    a, b = _as_var(a), _as_var(b)
    out = Var(a.value + b.value)
    ashape, bshape = a.value.shape, b.value.shape
    _record(out, (a, b), lambda g: (_unbroadcast(g, ashape), _unbroadcast(g, bshape)))
    return out


def sub(a, b):
    a, b = _as_var(a), _as_var(b)
    out = Var(a.value - b.value)
    ashape, bshape = a.value.shape, b.value.shape
    _record(out, (a, b), lambda g: (_unbroadcast(g, ashape), _unbroadcast(-g, bshape)))
    return out


def mul(a, b):
    a, b = _as_var(a), _as_var(b)
    out = Var(a.value * b.value)
    av, bv = a.value, b.value
    _record(out, (a, b),
            lambda g: (_unbroadcast(g * bv, av.shape), _unbroadcast(g * av, bv.shape)))
    return out


def smul(x, c):
    """Multiply by a python scalar constant."""
    x = _as_var(x)
    c = float(c)
    out = Var(x.value * c)
    _record(out, (x,), lambda g: (g * c,))
    return out


def square(x):
    x = _as_var(x)
    out = Var(x.value * x.value)
    xv = x.value
    _record(out, (x,), lambda g: (g * 2.0 * xv,))
    return out


def log(x):
    x = _as_var(x)
    out = Var(np.log(x.value))
    xv = x.value
    _record(out, (x,), lambda g: (g / xv,))
    return out


def exp(x):
    x = _as_var(x)
    out = Var(np.exp(x.value))
    ov = out.value
    _record(out, (x,), lambda g: (g * ov,))
    return out


def softplus(x):
    x = _as_var(x)
    out = Var(np.logaddexp(0.0, x.value))
    xv = x.value
    # d/dx softplus = sigmoid(x), computed stably from both tails
    _record(out, (x,), lambda g: (g * _sigmoid(xv),))
    return out


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def row_softmax(x):
    x = _as_var(x)
    z = x.value - x.value.max(axis=-1, keepdims=True)
    e = np.exp(z)
    p = e / e.sum(axis=-1, keepdims=True)
    out = Var(p)
    _record(out, (x,), lambda g: (p * (g - (g * p).sum(axis=-1, keepdims=True)),))
    return out


def masked_row_softmax(x, mask):
    """Softmax over the unmasked entries of each row; masked entries get 0.

    ``mask`` is a constant boolean array, True where the entry participates.
    Every row must have at least one unmasked entry.
    """
    x = _as_var(x)
    mask = np.asarray(mask, dtype=bool)
    if not mask.any(axis=-1).all():
        raise ValueError("masked_row_softmax: a row has no unmasked entries")
    neg = np.where(mask, x.value, -np.inf)
    z = neg - neg.max(axis=-1, keepdims=True)
    e = np.where(mask, np.exp(z), 0.0)
    p = e / e.sum(axis=-1, keepdims=True)
    out = Var(p)
    # p is exactly 0 on masked entries, so their gradient is exactly 0 too
    _record(out, (x,), lambda g: (p * (g - (g * p).sum(axis=-1, keepdims=True)),))
    return out


def dropout(x, p, rng, train=True):
    """Inverted dropout: keep with prob 1-p and scale kept values by 1/(1-p)."""
    x = _as_var(x)
    if not train or p == 0.0:
        out = Var(x.value)
        _record(out, (x,), lambda g: (g,))
        return out
    if not 0.0 <= p < 1.0:
        raise ValueError("dropout probability must be in [0, 1)")
    mask = (rng.uniform(x.value.shape) >= p) / (1.0 - p)
    out = Var(x.value * mask)
    _record(out, (x,), lambda g: (g * mask,))
    return out


class BatchNormState:
    """Running statistics for one batchnorm_1d site (no learned affine)."""

    def __init__(self, num_features, momentum=0.1, eps=1e-5):
        self.running_mean = np.zeros(num_features, dtype=np.float64)
        self.running_var = np.ones(num_features, dtype=np.float64)
        self.momentum = momentum
        self.eps = eps

    def copy(self):
        other = BatchNormState(len(self.running_mean), self.momentum, self.eps)
        other.running_mean = self.running_mean.copy()
        other.running_var = self.running_var.copy()
        return other


def batchnorm_1d(x, state, train=True, update=None):
    """Per-feature standardization over the batch axis, no affine terms.

    Degenerate batches (a single row, or all rows identical) fall back to the
    running statistics so the batch variance never divides by zero.  ``update``
    controls whether running stats are refreshed (defaults to ``train``).
    """
    x = _as_var(x)
    if update is None:
        update = train
    xv = x.value
    degenerate = xv.shape[0] == 1 or bool(np.all(xv == xv[0]))
    if train and not degenerate:
        mean = xv.mean(axis=0)
        var = xv.var(axis=0)
        if update:
            m = state.momentum
            state.running_mean = (1.0 - m) * state.running_mean + m * mean
            state.running_var = (1.0 - m) * state.running_var + m * var
        inv_std = 1.0 / np.sqrt(var + state.eps)
        xhat = (xv - mean) * inv_std
        out = Var(xhat)

        def bwd(g):
            gm = g.mean(axis=0)
            gxh = (g * xhat).mean(axis=0)
            return (inv_std * (g - gm - xhat * gxh),)

        _record(out, (x,), bwd)
        return out
    inv_std = 1.0 / np.sqrt(state.running_var + state.eps)
    out = Var((xv - state.running_mean) * inv_std)
    _record(out, (x,), lambda g: (g * inv_std,))
    return out


def row_minmax_normalize(x, guard=1e-12):
    """Map each row into [0, 1] via (x - min) / (max - min).

    Rows whose spread is below ``guard`` map to all zeros.  The adjoint treats
    the argmin/argmax positions as fixed (subgradient at ties).
    """
    x = _as_var(x)
    xv = np.atleast_2d(x.value)
    lo = xv.min(axis=-1, keepdims=True)
    hi = xv.max(axis=-1, keepdims=True)
    spread = hi - lo
    flat = (spread <= guard).ravel()
    safe = np.where(spread <= guard, 1.0, spread)
    y = (xv - lo) / safe
    y[flat] = 0.0
    out_val = y.reshape(x.value.shape)
    out = Var(out_val)
    imin = xv.argmin(axis=-1)
    imax = xv.argmax(axis=-1)
    rows = np.arange(xv.shape[0])

    def bwd(g):
        g2 = np.atleast_2d(g)
        gx = g2 / safe
        gsum = g2.sum(axis=-1)
        gy = (g2 * y).sum(axis=-1)
        corr_min = np.zeros_like(gx)
        corr_min[rows, imin] = (gsum - gy) / safe.ravel()
        corr_max = np.zeros_like(gx)
        corr_max[rows, imax] = gy / safe.ravel()
        gx = gx - corr_min - corr_max
        gx[flat] = 0.0
        return (gx.reshape(x.value.shape),)

    _record(out, (x,), bwd)
    return out


def reduce_sum(x):
    x = _as_var(x)
    out = Var(np.sum(x.value))
    shape = x.value.shape
    _record(out, (x,), lambda g: (np.broadcast_to(g, shape).copy(),))
    return out


def row_sum(x):
    x = _as_var(x)
    out = Var(x.value.sum(axis=-1))
    cols = x.value.shape[-1]
    _record(out, (x,), lambda g: (np.repeat(np.expand_dims(g, -1), cols, axis=-1),))
    return out


def reduce_mean(x):
    x = _as_var(x)
    out = Var(np.mean(x.value))
    shape = x.value.shape
    n = x.value.size
    _record(out, (x,), lambda g: (np.broadcast_to(g / n, shape).copy(),))
    return out
