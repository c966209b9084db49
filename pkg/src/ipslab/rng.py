"""Pinned random number generator.

Every stochastic routine in the package draws from the same 64-bit generator,
xoshiro256**, seeded through the splitmix64 finalizer.  The state-advance
function is fixed here and nowhere else, so a (seed, call sequence) pair
produces bit-identical streams on every platform:

* ``mix64`` is the splitmix64 finalizer (Steele, Lea, Flood 2014), a bijection
  on 64-bit integers.
* Stream initialisation: ``state[i] = mix64(seed + (i+1)*GOLDEN)`` for
  i = 0..3, with ``GOLDEN = 0x9E3779B97F4A7C15``.
* ``next_u64`` advances xoshiro256** by one step.
* Uniforms on [0,1) take the top 53 bits: ``(x >> 11) * 2**-53``.
* Exponentials use the inverse CDF only: ``-log1p(-u)``.
* Uniform integers below ``n`` use rejection against a power-of-two mask,
  so they are exactly uniform.

Replica seeds are derived with ``derive_seed(master, k) =
mix64(master + GOLDEN*(k+1) mod 2**64)``.  For a fixed master this map is
injective in k (multiplication by an odd constant and addition are bijections
mod 2**64, and mix64 is a bijection), so replicas never share a stream.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

GOLDEN = np.uint64(0x9E3779B97F4A7C15)

_U64 = np.uint64
_INV53 = 1.0 / (1 << 53)


@njit(uint64(uint64), cache=True)
def mix64(z):
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


@njit(uint64(uint64, uint64), cache=True)
def derive_seed(master, replica):
    """Replica-k stream seed from a master seed (documented mixing function)."""
    return mix64(master + GOLDEN * (replica + _U64(1)))


@njit(cache=True)
def new_state(seed):
    """Initial xoshiro256** state for a 64-bit seed."""
    s = np.empty(4, dtype=np.uint64)
    for i in range(4):
        s[i] = mix64(seed + _U64(i + 1) * GOLDEN)
    return s


@njit(uint64(uint64, uint64), cache=True, inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (_U64(64) - k))


@njit(uint64(uint64[:]), cache=True, inline="always")
def next_u64(s):
    result = _rotl(s[1] * _U64(5), _U64(7)) * _U64(9)
    t = s[1] << _U64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], _U64(45))
    return result


@njit(cache=True, inline="always")
def next_unit(s):
    """Uniform float64 in [0, 1)."""
    return (next_u64(s) >> _U64(11)) * _INV53


@njit(cache=True, inline="always")
def next_exp(s):
    """Exp(1) variate by inverse CDF."""
    return -np.log1p(-next_unit(s))


@njit(cache=True, inline="always")
def next_below(s, n):
    """Exactly uniform integer in [0, n)."""
    if n <= 1:
        return 0
    mask = _U64(1)
    m = _U64(n - 1)
    while mask < m:
        mask = (mask << _U64(1)) | _U64(1)
    while True:
        x = next_u64(s) & mask
        if x < _U64(n):
            return np.int64(x)


@njit(cache=True)
def fill_units(s, out):
    for i in range(out.shape[0]):
        out[i] = next_unit(s)


@njit(cache=True)
def derive_seeds_array(master, n):
    out = np.empty(n, dtype=np.uint64)
    for k in range(n):
        out[k] = derive_seed(_U64(master), _U64(k))
    return out


def state_from(seed: int) -> np.ndarray:
    """Python-side convenience: stream state for ``seed`` (taken mod 2**64)."""
    return new_state(_U64(seed & 0xFFFFFFFFFFFFFFFF))


def shuffle(s: np.ndarray, a: np.ndarray) -> None:
    """In-place Fisher-Yates shuffle driven by the pinned stream."""
    _shuffle(s, a)


@njit(cache=True)
def _shuffle(s, a):
    for i in range(a.shape[0] - 1, 0, -1):
        j = next_below(s, i + 1)
        a[i], a[j] = a[j], a[i]
