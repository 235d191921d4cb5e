"""Sine-basis representation of the Dirichlet Laplacian on (0, 1).

A state is stored as the coefficient vector ``c`` of the orthonormal basis
``e_k(x) = sqrt(2) sin(k pi x)``, ``k = 1..K``.  Its collocation image lives
on the interior points ``x_j = j / (K + 1)``, ``j = 1..K``.  The transforms
use DST-I scaling:

    u_j = sqrt(2) * sum_k c_k sin(k pi j / (K + 1))
    c_k = sqrt(2) / (K + 1) * sum_j u_j sin(k pi j / (K + 1))

With this scaling the rectangle rule ``sum_j u_j**2 / (K + 1)`` equals
``sum_k c_k**2`` exactly, so quadrature norms and spectral norms agree for
``q = 2``.

All operator calculus is mode-wise: ``A`` acts on mode ``k`` as ``-lambda_k``
with ``lambda_k = nu * k**2 * pi**2``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft

__all__ = [
    "ModeBasis",
    "TimeGrid",
    "floor_grid",
    "lq_norm_pow",
    "dst1_naive",
    "dst1_fft",
    "int_power",
]

_SQRT2 = np.sqrt(2.0)


# below this size the cached sine matrix beats pocketfft, whose DST-I length
# 2 (K + 1) is often awkward (e.g. 514 = 2 * 257 for K = 256)
_MATRIX_MAX_K = 512


def sine_matrix(K):
    """Symmetric ``K x K`` matrix ``sin(k pi j / (K + 1))``."""
    idx = np.arange(1, K + 1)
    return np.sin(np.pi * np.outer(idx, idx) / (K + 1))


def dst1_naive(x):
    """Unnormalised DST-I, ``y_k = sum_j x_j sin(k pi j / (K + 1))``.

    O(K**2) reference for the FFT path.  Works along the last axis.
    """
    x = np.asarray(x, dtype=float)
    return x @ sine_matrix(x.shape[-1])


def dst1_fft(x):
    # scipy's DST-I carries an extra factor 2 relative to dst1_naive
    return 0.5 * scipy.fft.dst(x, type=1, axis=-1, workers=1)


@dataclass(frozen=True)
class ModeBasis:
    """First ``K`` Dirichlet sine modes of ``nu * d^2/dx^2`` on (0, 1).

    Parameters
    ----------
    K : int
        Number of retained modes.
    nu : float
        Diffusivity multiplying the Laplacian.
    method : {"auto", "matrix", "fft"}
        How the sine transform is computed.  ``"auto"`` uses the cached matrix
        for ``K <= 512`` and the FFT above that.  The choice is fixed per
        ``K`` so results are reproducible.
    """

    K: int
    nu: float = 1.0
    method: str = "auto"

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K!r}")
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu!r}")
        if self.method not in ("auto", "matrix", "fft"):
            raise ValueError(f"unknown transform method {self.method!r}")

    @cached_property
    def eigenvalues(self):
        """Array of ``lambda_k = nu k^2 pi^2`` for ``k = 1..K``."""
        k = np.arange(1, self.K + 1, dtype=float)
        return self.nu * k**2 * np.pi**2

    @cached_property
    def _matrix(self):
        if self.method == "fft" or (self.method == "auto" and self.K > _MATRIX_MAX_K):
            return None
        return sine_matrix(self.K)

    def _dst(self, v):
        S = self._matrix
        if S is None:
            return dst1_fft(v)
        return S @ v if v.ndim == 1 else v @ S

    @cached_property
    def points(self):
        """Interior collocation points ``j / (K + 1)``."""
        return np.arange(1, self.K + 1) / (self.K + 1)

    def eigenvalue(self, k):
        if not 1 <= k <= self.K:
            raise IndexError(f"mode index {k} outside 1..{self.K}")
        return self.nu * k**2 * np.pi**2

    # -- transforms --------------------------------------------------------

    def _check(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.K:
            raise ValueError(f"expected trailing length {self.K}, got {v.shape[-1]}")
        return v

    def to_grid(self, coeffs):
        """Evaluate a coefficient vector at the collocation points."""
        c = self._check(coeffs)
        return self._dst(c) * _SQRT2

    def to_spectral(self, values):
        """Inverse of :meth:`to_grid`."""
        u = self._check(values)
        return self._dst(u) * (_SQRT2 / (self.K + 1))

    # -- mode-wise operators -------------------------------------------------

    def semigroup_factors(self, t):
        """Multipliers ``exp(-lambda_k t)`` of ``e^{tA}``."""
        _check_time(t)
        return np.exp(-self.eigenvalues * t)

    def semigroup_apply(self, coeffs, t):
        return self._check(coeffs) * self.semigroup_factors(t)

    def resolvent_denominators(self, t):
        """Divisors ``1 + lambda_k t`` of ``(I - tA)^{-1}``."""
        _check_time(t)
        return 1.0 + self.eigenvalues * t

    def resolvent_apply(self, coeffs, t):
        return self._check(coeffs) / self.resolvent_denominators(t)

    def cn_factors(self, t):
        """Return ``(1 - lambda_k t / 2, 1 + lambda_k t / 2)``.

        The Crank-Nicolson step multiplies by the first and divides by the
        second; they are kept apart so the step can interleave the drift and
        noise between them.
        """
        _check_time(t)
        half = self.eigenvalues * (t / 2)
        return 1.0 - half, 1.0 + half

    def cn_factor_apply(self, coeffs, t):
        num, den = self.cn_factors(t)
        return num * self._check(coeffs) / den

    def fractional_power_apply(self, coeffs, r):
        """Apply ``(-A)^r``, i.e. scale mode ``k`` by ``lambda_k**r``."""
        if abs(r) > 2:
            raise ValueError(f"fractional power {r} outside [-2, 2]")
        return self._check(coeffs) * self.eigenvalues**r


def _check_time(t):
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")


def lq_norm_pow(values, q):
    """Rectangle-rule value of ``int_0^1 |u|^q dx`` on the interior grid.

    ``values`` has trailing length ``K``; the weight is ``1 / (K + 1)``.  Only
    even ``q`` is accepted so that no absolute value or root is needed.
    """
    if int(q) != q or q < 2 or q % 2:
        raise ValueError(f"q must be a positive even integer, got {q!r}")
    u = np.asarray(values, dtype=float)
    return np.sum(int_power(u, int(q)), axis=-1) / (u.shape[-1] + 1)


def int_power(u, q):
    """``u**q`` for integer ``q >= 1`` by repeated squaring."""
    result = None
    base = u
    while True:
        if q & 1:
            result = base if result is None else result * base
        q >>= 1
        if not q:
            return result
        base = base * base


def floor_grid(t, h, T=None):
    """Largest grid point ``i * h`` with ``i * h <= t``.

    The step index is found by integer correction of ``t / h`` so that grid
    points map to themselves despite rounding in the division.
    """
    return _floor_index(t, h, T) * h


def _floor_index(t, h, T=None):
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    if t < 0 or (T is not None and t > T):
        raise ValueError(f"t={t} outside [0, {T}]")
    i = int(np.floor(t / h))
    while (i + 1) * h <= t:
        i += 1
    while i > 0 and i * h > t:
        i -= 1
    return i


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``{0, h, ..., T}`` with ``h = T / N``."""

    T: float
    N: int

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("T must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")

    @property
    def h(self):
        return self.T / self.N

    def time(self, i):
        """Grid time of step index ``i``; ``time(N) == T`` exactly."""
        if not 0 <= i <= self.N:
            raise IndexError(f"step index {i} outside 0..{self.N}")
        return self.T if i == self.N else i * self.h

    def floor(self, t):
        if t == self.T:
            return self.T
        i = min(_floor_index(t, self.h, self.T), self.N)
        # N * h may round below T, but time(N) is T itself
        if i == self.N:
            i -= 1
        return self.time(i)
