"""Dense-matrix compute layer: reverse-mode tape, Adam, seeded RNG, gradient checking."""

from cohtm.numerics.adam import AdamState, adam_step
from cohtm.numerics.fdcheck import finite_diff_check
from cohtm.numerics.rng import RngStream
from cohtm.numerics.tape import (
    BatchNormState,
    Tape,
    Var,
    add,
    add_bias,
    backward,
    batchnorm_1d,
    constant,
    detach,
    dropout,
    exp,
    log,
    masked_row_softmax,
    matmul,
    mul,
    parameter,
    reduce_mean,
    reduce_sum,
    row_minmax_normalize,
    row_softmax,
    row_sum,
    smul,
    softplus,
    square,
    sub,
)

__all__ = [
    "AdamState",
    "BatchNormState",
    "RngStream",
    "Tape",
    "Var",
    "adam_step",
    "add",
    "add_bias",
    "backward",
    "batchnorm_1d",
    "constant",
    "detach",
    "dropout",
    "exp",
    "finite_diff_check",
    "log",
    "masked_row_softmax",
    "matmul",
    "mul",
    "parameter",
    "reduce_mean",
    "reduce_sum",
    "row_minmax_normalize",
    "row_softmax",
    "row_sum",
    "smul",
    "softplus",
    "square",
    "sub",
]
