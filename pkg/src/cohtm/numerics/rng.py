"""Seeded counter-based random streams (Philox): identical draws on every platform."""

import numpy as np


class RngStream:
    """Wraps a Philox generator; the full state round-trips through a dict."""

    def __init__(self, seed):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.Philox(self.seed))

    def normal(self, shape):
        return self._gen.standard_normal(shape)

    def uniform(self, shape):
        return self._gen.random(shape)

    def permutation(self, n):
        return self._gen.permutation(n)

    def get_state(self):
        return {"seed": self.seed, "bitgen": self._gen.bit_generator.state}

    def set_state(self, state):
        self.seed = int(state["seed"])
        self._gen.bit_generator.state = state["bitgen"]

    @classmethod
    def from_state(cls, state):
        stream = cls(state["seed"])
        stream.set_state(state)
        return stream
