"""Counter-based splitmix64 streams usable from numba kernels.

Every random stream is derived from a tuple of integers, so results do not
depend on how work is split between threads.
"""
import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def stream_state(a, b, c):
    """Fresh one-element generator state for the stream keyed by ``(a, b, c)``."""
    z = mix64(np.uint64(a) + _GOLDEN)
    z = mix64(z ^ (np.uint64(b) + _GOLDEN))
    z = mix64(z ^ (np.uint64(c) + _GOLDEN))
    state = np.empty(1, dtype=np.uint64)
    state[0] = z
    return state


@njit(cache=True, inline="always")
def next_u64(state):
    state[0] += _GOLDEN
    return mix64(state[0])


@njit(cache=True, inline="always")
def uniform(state):
    return float(next_u64(state) >> _S11) * _INV53


@njit(cache=True, inline="always")
def randint(state, n):
    """Uniform integer in ``[0, n)``."""
    return int(uniform(state) * n)


def seed_to_u64(seed) -> int:
    return int(seed) & 0xFFFFFFFFFFFFFFFF
