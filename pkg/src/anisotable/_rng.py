"""Counter-based random streams built on the SplitMix64 finalizer.

Every variate is a pure function of (key, counter), so any batch or path can
be regenerated in isolation and results never depend on thread scheduling.
The numba kernels walk per-path (key, counter) pairs with the scalar helpers
below; the vectorized numpy engine consumes a per-batch stream through
:class:`Stream`. Both sides share the same key-derivation chain.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_U_GAMMA = np.uint64(GAMMA)
_U_MIX1 = np.uint64(_MIX1)
_U_MIX2 = np.uint64(_MIX2)

# 2^-53 and 2^-54: (x >> 11) * 2^-53 + 2^-54 lies strictly inside (0, 1)
_TO_UNIT = 1.0 / 9007199254740992.0
_HALF_ULP = 0.5 / 9007199254740992.0


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a python int (mod 2^64)."""
    z &= _MASK
    z ^= z >> 30
    z = (z * _MIX1) & _MASK
    z ^= z >> 27
    z = (z * _MIX2) & _MASK
    z ^= z >> 31
    return z


def derive_key(*parts: int) -> int:
    """Hash an ordered tuple of integers into a 64-bit stream key."""
    h = 0x6A09E667F3BCC909
    for p in parts:
        h = mix64((h ^ (p & _MASK)) + GAMMA)
        h = mix64(h)
    return h


def path_keys(master_seed: int, batch_index: int, n: int) -> np.ndarray:
    """Per-path keys for a batch, as uint64; row i seeds path i's stream."""
    base = derive_key(master_seed, batch_index, 0x70617468)  # 'path'
    idx = np.arange(n, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix_u64(np.uint64(base) + (idx + np.uint64(1)) * _U_GAMMA)


def batch_key(master_seed: int, batch_index: int) -> int:
    return derive_key(master_seed, batch_index, 0x62617463)  # 'batc'


def _mix_u64(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = z ^ (z >> np.uint64(30))
        z = z * _U_MIX1
        z = z ^ (z >> np.uint64(27))
        z = z * _U_MIX2
        z = z ^ (z >> np.uint64(31))
    return z


def uniforms_at(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    """Uniform(0,1) variates at explicit (key, counter) positions (vectorized)."""
    with np.errstate(over="ignore"):
        raw = _mix_u64(keys + (counters + np.uint64(1)) * _U_GAMMA)
    return (raw >> np.uint64(11)).astype(np.float64) * _TO_UNIT + _HALF_ULP


class Stream:
    """Sequential uniform/normal source over one key's counter space."""

    def __init__(self, key: int):
        self._key = np.uint64(key)
        self._ctr = 0

    def uniform(self, *shape: int) -> np.ndarray:
        n = int(np.prod(shape)) if shape else 1
        ctrs = np.arange(self._ctr, self._ctr + n, dtype=np.uint64)
        self._ctr += n
        out = uniforms_at(self._key, ctrs)
        return out.reshape(shape) if shape else out[0]

    def normal(self, *shape: int) -> np.ndarray:
        # Box-Muller, cosine branch only: one normal costs two uniforms,
        # matching the accounting used by the numba kernels.
        n = int(np.prod(shape)) if shape else 1
        u1 = self.uniform(n)
        u2 = self.uniform(n)
        out = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
        return out.reshape(shape) if shape else out[0]

    def poisson(self, lam: np.ndarray) -> np.ndarray:
        """Vector of Poisson counts via the Knuth product method.

        Chunks means above 256 so exp(-lam) never underflows. Consumption is
        a deterministic function of the drawn values themselves.
        """
        lam = np.asarray(lam, dtype=np.float64)
        out = np.zeros(lam.shape, dtype=np.int64)
        remaining = lam.copy()
        while True:
            chunk = np.minimum(remaining, 256.0)
            active = chunk > 0.0
            if not active.any():
                break
            target = np.exp(-chunk[active])
            prod = np.ones(target.shape)
            counts = np.full(target.shape, -1, dtype=np.int64)
            pending = np.ones(target.shape, dtype=bool)
            while pending.any():
                u = self.uniform(int(pending.sum()))
                prod[pending] *= u
                counts[pending] += 1
                pending = prod > target
            out[active] += counts
            remaining = remaining - chunk
        return out
