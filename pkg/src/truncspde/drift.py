"""Odd-degree polynomial drift and the truncation indicator."""

import enum
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from math import comb

import numpy as np

from .spectral import lq_norm_pow

__all__ = [
    "PolynomialDrift",
    "IndicatorVariant",
    "TruncationRule",
    "ginzburg_landau",
    "powered_threshold",
]


@dataclass(frozen=True)
class PolynomialDrift:
    """``f(x) = sum_k a_k x**k`` with odd degree and negative leading term.

    ``coeffs`` lists ``a_0, ..., a_n``.
    """

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(float(a) for a in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        n = len(coeffs) - 1
        if n < 1 or n % 2 == 0:
            raise ValueError(f"degree must be odd and positive, got {n}")
        if not coeffs[-1] < 0:
            raise ValueError(f"leading coefficient must be negative, got {coeffs[-1]}")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        """Horner evaluation, scalar or elementwise on arrays."""
        x = np.asarray(x, dtype=float)
        a = self.coeffs
        acc = a[-1] * x + a[-2]
        for c in reversed(a[:-2]):
            acc = acc * x + c
        return acc if acc.ndim else float(acc)

    eval_pointwise = __call__

    def apply_on_grid(self, values):
        return np.asarray(self(values), dtype=float)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        n = self.degree
        acc = np.full_like(x, n * self.coeffs[n])
        for k in range(n - 1, 0, -1):
            acc = acc * x + k * self.coeffs[k]
        return acc

    # -- closed-form constants ----------------------------------------------
    #
    # On the unit interval max{1, |D|} = 1, which drops out of every formula.

    def one_sided_constant(self):
        """``C`` with ``(x - y)(f(x) - f(y)) <= C (x - y)**2``."""
        n = self.degree
        a = self.coeffs
        lead = max(1.0, abs(a[n]) ** (2 - n))
        low = max(1.0, max(k * abs(a[k]) for k in range(n)) ** (n - 1))
        return (n - 1) * lead * low

    def growth_constant(self, q=None):
        """``G`` with ``||f(v + w)||_2 <= G (1 + ||v||_q^{q/2} + ||w||_q^{q/2})``.

        Valid for even ``q >= 2 n``; the constant itself does not depend on q.
        """
        n = self.degree
        if q is not None and (q < 2 * n or q % 2):
            raise ValueError(f"q must be even and at least {2 * n}, got {q}")
        return 2.0 ** (n + 1) * max(abs(a) for a in self.coeffs)

    def local_lipschitz_constant(self):
        """``L`` in ``||f(v) - f(w)||_2^2 <= L ||v - w||^2 (1 + ||v||^e + ||w||^e)``.

        Norms on the right are ``L^{2 n^2}`` and ``e = max(1, 2 (n - 1))``.
        """
        n = self.degree
        return (n * (n + 1) / 2 * max(abs(a) for a in self.coeffs[1:])) ** 2

    def lyapunov_sum(self):
        """``sum_k sum_{j <= min(k, n-1)} C(k, j) |a_k|``.

        Both weighted sums of the one-step moment bound collapse to this when
        the Young weights are all one.
        """
        n = self.degree
        return float(sum(
            comb(k, j) * abs(a)
            for k, a in enumerate(self.coeffs)
            for j in range(min(k, n - 1) + 1)
        ))


def ginzburg_landau():
    """``f(v) = v - v**3``."""
    return PolynomialDrift((0.0, 1.0, 0.0, -1.0))


class IndicatorVariant(enum.Enum):
    """What the truncation test measures.

    ``STATE`` tests the state's ``L^{2 n^2}`` norm.  ``DRIFT`` tests the same
    norm of ``f`` applied to the state, as the original Matlab experiment
    script does.
    """

    STATE = "state"
    DRIFT = "drift"


def powered_threshold(ratio, chi, q):
    """``ratio ** (q chi)``, as an integer power when ``q chi`` is integral.

    ``chi`` given as a float is snapped to the nearest fraction with
    denominator at most 10**6, so ``1/6`` times 18 is exactly 3.
    """
    chi = chi if isinstance(chi, Fraction) else Fraction(chi).limit_denominator(10**6)
    e = chi * q
    if e.denominator == 1:
        return ratio ** int(e)
    return ratio ** float(e)


@dataclass(frozen=True)
class TruncationRule:
    """Indicator ``||Y||_{L^{2n^2}} <= (N / T)^chi``, compared in q-th powers."""

    chi: object
    T: float
    N: int
    degree: int
    variant: IndicatorVariant = IndicatorVariant.STATE

    def __post_init__(self):
        n = self.degree
        if not 0 < float(self.chi) <= 1 / (2 * n) * (1 + 1e-12):
            raise ValueError(f"chi must lie in (0, 1/(2n)] = (0, {1 / (2 * n)}], got {self.chi}")
        object.__setattr__(self, "variant", IndicatorVariant(self.variant))

    @property
    def q(self):
        return 2 * self.degree**2

    @property
    def threshold(self):
        """Bound on the norm itself, ``(N / T)^chi``."""
        return (self.N / self.T) ** float(self.chi)

    @cached_property
    def powered_threshold(self):
        """``(N / T)^(q chi)``; an integer power whenever ``q chi`` is integral."""
        return powered_threshold(self.N / self.T, self.chi, self.q)

    def indicator(self, state_values, drift_values=None):
        """Return 1 if the drift is kept at this step, else 0."""
        if self.variant is IndicatorVariant.DRIFT:
            if drift_values is None:
                raise ValueError("drift-norm indicator needs the drift values")
            tested = drift_values
        else:
            tested = state_values
        return int(lq_norm_pow(tested, self.q) <= self.powered_threshold)
