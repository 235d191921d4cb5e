"""Reproducible Brownian increments in sine-mode coordinates.

Every fine step ``m`` owns a fixed slice of a Philox-4x64 counter stream keyed
by ``(seed, run_index)``.  The raw 64-bit words of that slice are turned into
standard normals by the Box-Muller transform::

    u1 = ((w0 >> 11) + 1) * 2**-53        # in (0, 1]
    u2 = (w1 >> 11) * 2**-53              # in [0, 1)
    r  = sqrt(-2 log u1)
    z0, z1 = r cos(2 pi u2), r sin(2 pi u2)

Mode ``k`` of step ``m`` therefore depends only on ``(seed, run_index, m, k)``
and on ``K``; blocks of consecutive steps can be produced in one call or one
at a time with bitwise identical results.  This transform is part of the
output format and must not change.

Coarse increments are sums of fine increments accumulated one fine step at a
time in ascending order, so the association order is fixed.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["NoiseSource", "aggregate", "box_muller"]

_TWO_PI = 2.0 * np.pi
_INV_2_53 = 2.0**-53
_MASK64 = (1 << 64) - 1


def box_muller(words):
    """Map an even-length array of uint64 words to standard normals."""
    words = np.asarray(words, dtype=np.uint64)
    w0 = words[0::2]
    w1 = words[1::2]
    u1 = ((w0 >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * _INV_2_53
    u2 = (w1 >> np.uint64(11)).astype(np.float64) * _INV_2_53
    r = np.sqrt(-2.0 * np.log(u1))
    theta = _TWO_PI * u2
    out = np.empty(words.shape[0], dtype=np.float64)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out


@dataclass(frozen=True)
class NoiseSource:
    """Cylindrical Wiener increments on the fine grid ``T / N_ref``.

    Parameters
    ----------
    seed : int
        Master seed; reduced modulo 2**64.
    run_index : int
        Monte Carlo replica; distinct replicas use distinct Philox keys.
    K : int
        Number of sine modes.
    N_ref : int
        Number of fine steps on ``[0, T]``.
    T : float
        Horizon.
    scale : float
        1 for Brownian noise, 0 for a deterministic (noise-free) source.
    """

    seed: int
    run_index: int
    K: int
    N_ref: int
    T: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.K < 1 or self.N_ref < 1:
            raise ValueError("K and N_ref must be positive")
        if self.run_index < 0:
            raise ValueError("run_index must be nonnegative")

    @property
    def dt(self):
        return self.T / self.N_ref

    @property
    def _counters_per_step(self):
        # two words per normal pair, four words per Philox counter value
        pairs = (self.K + 1) // 2
        return (pairs + 1) // 2

    @property
    def _sigma(self):
        return self.scale * np.sqrt(self.dt)

    def _bitgen(self, m0):
        key = [self.seed & _MASK64, self.run_index & _MASK64]
        return np.random.Philox(key=key, counter=[m0 * self._counters_per_step, 0, 0, 0])

    def fine_block(self, m0, m1):
        """Increments for fine steps ``m0 .. m1 - 1`` as an ``(m1 - m0, K)`` array."""
        if not 0 <= m0 <= m1 <= self.N_ref:
            raise IndexError(f"fine steps [{m0}, {m1}) outside [0, {self.N_ref})")
        count = m1 - m0
        if self.scale == 0 or count == 0:
            return np.zeros((count, self.K))
        words_per_step = 4 * self._counters_per_step
        words = self._bitgen(m0).random_raw(count * words_per_step)
        z = box_muller(words).reshape(count, words_per_step)[:, : self.K]
        return z * self._sigma

    def fine_increment(self, m):
        """Increment over ``[m dt, (m + 1) dt]``, one value per mode."""
        if not 0 <= m < self.N_ref:
            raise IndexError(f"fine step {m} outside [0, {self.N_ref})")
        return self.fine_block(m, m + 1)[0]

    def check_ratio(self, r):
        if r < 1 or self.N_ref % r:
            raise ValueError(f"ratio {r} does not divide N_ref={self.N_ref}")
        return self.N_ref // r

    def coarse_block(self, j0, j1, r):
        """Coarse increments for coarse steps ``j0 .. j1 - 1`` at ratio ``r``."""
        N = self.check_ratio(r)
        if not 0 <= j0 <= j1 <= N:
            raise IndexError(f"coarse steps [{j0}, {j1}) outside [0, {N})")
        fine = self.fine_block(j0 * r, j1 * r)
        return aggregate(fine, r)

    def coarse_increment(self, j, r):
        """Sum of the ``r`` fine increments covering coarse step ``j``."""
        return self.coarse_block(j, j + 1, r)[0]


def aggregate(fine, r):
    """Sum consecutive groups of ``r`` rows, accumulating in row order."""
    n, K = fine.shape
    if n % r:
        raise ValueError(f"{n} rows do not split into groups of {r}")
    blocks = fine.reshape(n // r, r, K)
    acc = blocks[:, 0, :].copy()
    for i in range(1, r):
        acc += blocks[:, i, :]
    return acc
