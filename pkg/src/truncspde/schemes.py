"""Nonlinearity-truncated one-step integrators on the sine-mode state.

Each step follows the same fixed order of operations:

1. transform the state to the collocation grid,
2. evaluate the polynomial drift pointwise,
3. decide the truncation indicator (drift dropped when it is 0),
4. transform the drift back to sine modes and scale by ``h``,
5. form ``state + h * drift + dW`` (Crank-Nicolson: ``num * state + ...``),
6. apply the linear propagator of the scheme.

Only grid-time states are produced.
"""

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .drift import IndicatorVariant, PolynomialDrift, TruncationRule
from .spectral import ModeBasis, TimeGrid

__all__ = [
    "SchemeKind",
    "Discretization",
    "SchemeState",
    "PathRecord",
    "step_exp_euler",
    "step_lin_implicit",
    "step_crank_nicolson",
    "run_path",
]


class SchemeKind(enum.Enum):
    EXP_EULER = "exp_euler"
    LIN_IMPLICIT = "lin_implicit"
    CRANK_NICOLSON = "crank_nicolson"


@dataclass(frozen=True)
class Discretization:
    """Everything a step needs apart from the state and the noise.

    Parameters
    ----------
    basis : ModeBasis
    drift : PolynomialDrift
    grid : TimeGrid
        Time grid of this scheme (``h = T / N``).
    chi : float or Fraction
        Truncation exponent in ``(0, 1 / (2 n)]``.
    variant : IndicatorVariant
        Whether the indicator measures the state or its drift.
    """

    basis: ModeBasis
    drift: PolynomialDrift
    grid: TimeGrid
    chi: object
    variant: IndicatorVariant = IndicatorVariant.STATE

    def __post_init__(self):
        object.__setattr__(self, "variant", IndicatorVariant(self.variant))

    @cached_property
    def rule(self):
        return TruncationRule(self.chi, self.grid.T, self.grid.N, self.drift.degree, self.variant)

    @property
    def h(self):
        return self.grid.h

    @property
    def N(self):
        return self.grid.N

    @cached_property
    def _exp_factors(self):
        return self.basis.semigroup_factors(self.h)

    @cached_property
    def _resolvent_den(self):
        return self.basis.resolvent_denominators(self.h)

    @cached_property
    def _cn_factors(self):
        return self.basis.cn_factors(self.h)

    def gated_drift(self, coeffs):
        """Return ``(h * drift in sine modes, indicator)``.

        The first entry is ``None`` when the indicator is 0.
        """
        u = self.basis.to_grid(coeffs)
        fu = self.drift.apply_on_grid(u)
        if not self.rule.indicator(u, fu):
            return None, 0
        return self.h * self.basis.to_spectral(fu), 1

    def step(self, kind, coeffs, dW):
        """One step of ``kind`` from ``coeffs`` driven by the increment ``dW``."""
        fh, _ = self.gated_drift(coeffs)
        return _combine(self, SchemeKind(kind), coeffs, fh, dW)

    def stepper(self, kind):
        kind = SchemeKind(kind)
        return lambda coeffs, dW: self.step(kind, coeffs, dW)


@dataclass(frozen=True)
class SchemeState:
    """State of a scheme at grid time ``disc.grid.time(index)``."""

    disc: Discretization
    index: int
    coeffs: np.ndarray

    @property
    def t(self):
        return self.disc.grid.time(self.index)

    def advance(self, kind, dW):
        if self.index >= self.disc.N:
            raise ValueError(f"cannot step past T: already at step {self.index} of {self.disc.N}")
        return SchemeState(self.disc, self.index + 1, self.disc.step(SchemeKind(kind), self.coeffs, dW))


def step_exp_euler(state, dW):
    """Truncated exponential Euler: ``e^{hA} [Y + h 1{..} F(Y) + dW]``."""
    return state.advance(SchemeKind.EXP_EULER, dW)


def step_lin_implicit(state, dW):
    """Truncated linear-implicit Euler: ``(I - hA)^{-1} [Z + h 1{..} F(Z) + dW]``."""
    return state.advance(SchemeKind.LIN_IMPLICIT, dW)


def step_crank_nicolson(state, dW):
    """Truncated Crank-Nicolson with the drift frozen at the left endpoint."""
    return state.advance(SchemeKind.CRANK_NICOLSON, dW)


@dataclass
class PathRecord:
    kind: SchemeKind
    N: int
    run_index: int
    times: np.ndarray
    states: np.ndarray
    indicators: np.ndarray = field(default=None, repr=False)

    @property
    def final(self):
        return self.states[-1]


# rows of fine increments materialised at once when generating a path
_FINE_ROWS_BUDGET = 1 << 22


def run_path(disc, kind, src, xi=None, snap_every=1):
    """Integrate one path on ``disc``'s grid with increments drawn from ``src``.

    Coarse step ``j`` consumes ``src.coarse_increment(j, r)`` with
    ``r = src.N_ref // N``.  States are returned at every ``snap_every``-th
    grid time, always including ``t = 0`` and ``t = T``.

    Rough initial data (coefficients not decaying like an ``H^{3/2}``
    function) is accepted, but the proven convergence rates then do not apply.
    """
    kind = SchemeKind(kind)
    N = disc.N
    if src.K != disc.basis.K:
        raise ValueError(f"noise has {src.K} modes, basis has {disc.basis.K}")
    if src.T != disc.grid.T:
        raise ValueError("noise and scheme horizons differ")
    if src.N_ref % N:
        raise ValueError(f"N={N} does not divide N_ref={src.N_ref}")
    if snap_every < 1:
        raise ValueError("snap_every must be positive")
    r = src.N_ref // N

    c = np.zeros(disc.basis.K) if xi is None else np.array(xi, dtype=float)
    if c.shape != (disc.basis.K,):
        raise ValueError(f"initial value must have {disc.basis.K} coefficients")

    snaps = [0] + [i for i in range(1, N + 1) if i % snap_every == 0 or i == N]
    snaps = sorted(set(snaps))
    times = np.array([disc.grid.time(i) for i in snaps])
    states = np.empty((len(snaps), disc.basis.K))
    indicators = np.empty(N, dtype=np.int8)
    states[0] = c
    s = 1

    chunk = max(1, _FINE_ROWS_BUDGET // (r * disc.basis.K))
    for j0 in range(0, N, chunk):
        j1 = min(N, j0 + chunk)
        incs = src.coarse_block(j0, j1, r)
        for j, dW in zip(range(j0, j1), incs):
            fh, gate = disc.gated_drift(c)
            indicators[j] = gate
            c = _combine(disc, kind, c, fh, dW)
            if s < len(snaps) and snaps[s] == j + 1:
                states[s] = c
                s += 1
    return PathRecord(kind, N, src.run_index, times, states, indicators)


def _combine(disc, kind, c, fh, dW):
    if kind is SchemeKind.CRANK_NICOLSON:
        num, den = disc._cn_factors
        x = num * c
        if fh is not None:
            x = x + fh
        return (x + dW) / den
    x = c if fh is None else c + fh
    x = x + dW
    if kind is SchemeKind.EXP_EULER:
        return disc._exp_factors * x
    if kind is SchemeKind.LIN_IMPLICIT:
        return x / disc._resolvent_den
    raise ValueError(f"unknown scheme {kind!r}")
