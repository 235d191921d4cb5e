"""Coupled Monte Carlo strong errors and log-log order fits.

Every replica drives the reference path and all coarse paths with one
:class:`~truncspde.noise.NoiseSource`, so the coarse increments are exact
sums of the reference increments.  Replicas are independent and can run on
any number of worker threads; results are gathered in replica order and
reduced in that order, so the output does not depend on the thread count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from .drift import IndicatorVariant, PolynomialDrift, ginzburg_landau
from .noise import NoiseSource, aggregate
from .schemes import Discretization, SchemeKind, _combine
from .spectral import ModeBasis, TimeGrid

__all__ = [
    "ConfigError",
    "FitError",
    "ExperimentConfig",
    "ErrorRow",
    "ErrorTable",
    "OrderFit",
    "strong_error_mc",
    "fit_order",
    "desk_config",
]


class ConfigError(ValueError):
    pass


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of a strong-error experiment.

    ``xi`` holds initial sine coefficients (empty tuple for zero initial
    data); ``xi_spec`` records where they came from so a config file can be
    written back unchanged.
    """

    T: float = 1.0
    nu: float = 1.0
    drift: PolynomialDrift = field(default_factory=ginzburg_landau)
    chi: object = Fraction(1, 6)
    K: int = 256
    N_ref: int = 65536
    N_list: tuple = (64, 128, 256, 512, 1024, 2048, 4096)
    mc_runs: int = 10
    seed: int = 0
    schemes: tuple = (SchemeKind.EXP_EULER, SchemeKind.LIN_IMPLICIT)
    indicator_variant: IndicatorVariant = IndicatorVariant.STATE
    noise_scale: float = 1.0
    xi: tuple = ()
    xi_spec: str = "zero"
    reference: SchemeKind = SchemeKind.CRANK_NICOLSON
    sup_over_time: bool = False
    output: str = None

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        try:
            set_("schemes", tuple(SchemeKind(s) for s in self.schemes))
            set_("indicator_variant", IndicatorVariant(self.indicator_variant))
            set_("reference", SchemeKind(self.reference))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        set_("N_list", tuple(int(n) for n in self.N_list))
        set_("xi", tuple(float(x) for x in self.xi))
        if not self.T > 0 or not self.nu > 0:
            raise ConfigError("T and nu must be positive")
        if self.K < 1 or self.N_ref < 1:
            raise ConfigError("K and N_ref must be positive")
        n = self.drift.degree
        if not 0 < float(self.chi) <= 1 / (2 * n) * (1 + 1e-12):
            raise ConfigError(f"chi must lie in (0, 1/{2 * n}], got {self.chi}")
        if not self.N_list:
            raise ConfigError("N_list is empty")
        if list(self.N_list) != sorted(set(self.N_list)):
            raise ConfigError("N_list must be strictly ascending")
        for N in self.N_list:
            if N < 1 or self.N_ref % N:
                raise ConfigError(f"N={N} does not divide N_ref={self.N_ref}")
        if self.mc_runs < 1:
            raise ConfigError("mc_runs must be at least 1")
        if self.noise_scale not in (0, 1):
            raise ConfigError("noise_scale must be 0 or 1")
        if len(self.xi) > self.K:
            raise ConfigError(f"initial value has {len(self.xi)} coefficients, K={self.K}")

    @property
    def basis(self):
        return ModeBasis(self.K, self.nu)

    def initial_coeffs(self):
        c = np.zeros(self.K)
        c[: len(self.xi)] = self.xi
        return c

    def discretization(self, N):
        return Discretization(self.basis, self.drift, TimeGrid(self.T, N), self.chi, self.indicator_variant)

    def noise(self, run_index):
        return NoiseSource(self.seed, run_index, self.K, self.N_ref, self.T, self.noise_scale)


def desk_config(**overrides):
    """Ginzburg-Landau experiment at laptop scale with the drift-norm indicator."""
    params = dict(seed=42, indicator_variant=IndicatorVariant.DRIFT)
    params.update(overrides)
    return ExperimentConfig(**params)


@dataclass(frozen=True)
class ErrorRow:
    scheme: SchemeKind
    N: int
    mc_runs: int
    rmse: float
    stderr_rmse: float


@dataclass
class ErrorTable:
    rows: list

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda r: (r.scheme.value, r.N))
        keys = [(r.scheme, r.N) for r in self.rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (scheme, N) rows")

    def for_scheme(self, scheme):
        scheme = SchemeKind(scheme)
        return [r for r in self.rows if r.scheme is scheme]

    def rmse(self, scheme):
        return np.array([r.rmse for r in self.for_scheme(scheme)])

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class OrderFit:
    scheme: SchemeKind
    slope: float
    intercept: float
    r2: float

    @property
    def order(self):
        return -self.slope


def fit_order(table, scheme):
    """Least-squares line through ``(log N, log rmse)`` for one scheme."""
    rows = table.for_scheme(scheme)
    if len(rows) < 3:
        raise FitError(f"need at least 3 rows for {SchemeKind(scheme).value}, got {len(rows)}")
    N = np.array([r.N for r in rows], dtype=float)
    e = np.array([r.rmse for r in rows], dtype=float)
    if np.any(~(e > 0)) or not np.all(np.isfinite(e)):
        raise FitError("rmse values must be positive and finite to fit in log-log")
    res = stats.linregress(np.log(N), np.log(e))
    return OrderFit(SchemeKind(scheme), float(res.slope), float(res.intercept), float(res.rvalue**2))


# -- Monte Carlo -------------------------------------------------------------

# fine increments held in memory per replica, counted in floats
_CHUNK_BUDGET = 1 << 22


def _divisors(n):
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _chunk_rows(N_ref, ratios, K):
    """Largest fine chunk that tiles ``N_ref`` and nests with every ratio."""
    limit = max(1, _CHUNK_BUDGET // K)
    best = 1
    for d in _divisors(N_ref):
        if d > limit:
            break
        if all(d % r == 0 or r % d == 0 for r in ratios):
            best = d
    return best


class _Ladder:
    """One coarse scheme being advanced alongside the reference."""

    def __init__(self, cfg, kind, N, c0):
        self.kind = kind
        self.N = N
        self.r = cfg.N_ref // N
        self.disc = cfg.discretization(N)
        self.c = c0.copy()
        self.j = 0
        self.carry = None

    def advance(self, dW):
        fh, _ = self.disc.gated_drift(self.c)
        self.c = _combine(self.disc, self.kind, self.c, fh, dW)
        self.j += 1


def _simulate_replica(cfg, run_index):
    """Squared L2 errors of every (scheme, N) for one replica.

    Returns a dict mapping ``(scheme, N)`` to an array of squared errors: one
    entry at ``T`` or, with ``sup_over_time``, one per coarse grid time.
    """
    src = cfg.noise(run_index)
    c0 = cfg.initial_coeffs()
    ref_disc = cfg.discretization(cfg.N_ref)
    ref_kind = cfg.reference
    ladders = [_Ladder(cfg, kind, N, c0) for kind in cfg.schemes for N in cfg.N_list]
    ratios = sorted({lad.r for lad in ladders})
    C = _chunk_rows(cfg.N_ref, ratios, cfg.K)
    snap_every = math.gcd(*ratios) if cfg.sup_over_time else C
    errs = {(lad.kind, lad.N): [] for lad in ladders}

    X = c0.copy()
    for m0 in range(0, cfg.N_ref, C):
        D = src.fine_block(m0, m0 + C)
        snaps = {}
        for i, dW in enumerate(D):
            fh, _ = ref_disc.gated_drift(X)
            X = _combine(ref_disc, ref_kind, X, fh, dW)
            if (m0 + i + 1) % snap_every == 0:
                snaps[m0 + i + 1] = X
        for lad in ladders:
            if C % lad.r == 0:
                incs = aggregate(D, lad.r)
            else:
                total = D[0].copy() if lad.carry is None else lad.carry + D[0]
                for row in D[1:]:
                    total += row
                if (m0 + C) % lad.r:
                    lad.carry = total
                    continue
                lad.carry = None
                incs = total[None, :]
            for dW in incs:
                lad.advance(dW)
                if cfg.sup_over_time:
                    d = snaps[lad.j * lad.r] - lad.c
                    errs[(lad.kind, lad.N)].append(float(d @ d))
    if not cfg.sup_over_time:
        for lad in ladders:
            d = X - lad.c
            errs[(lad.kind, lad.N)].append(float(d @ d))
    return {k: np.array(v) for k, v in errs.items()}


def strong_error_mc(cfg, threads=1):
    """Root-mean-square strong errors against the reference path.

    Returns an :class:`ErrorTable`.  ``stderr_rmse`` comes from the sample
    variance of the squared errors through the delta method
    ``se(sqrt(m)) = se(m) / (2 sqrt(m))``; it is NaN for a single replica.
    """
    runs = range(cfg.mc_runs)
    if threads > 1 and cfg.mc_runs > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda i: _simulate_replica(cfg, i), runs))
    else:
        results = [_simulate_replica(cfg, i) for i in runs]

    rows = []
    R = cfg.mc_runs
    for key in results[0]:
        sq = np.stack([res[key] for res in results])  # (runs, times)
        mean = sq.sum(axis=0) / R
        t = int(np.argmax(mean))
        rmse = math.sqrt(mean[t])
        if R > 1:
            se_mean = float(np.std(sq[:, t], ddof=1)) / math.sqrt(R)
            se = se_mean / (2 * rmse) if rmse > 0 else 0.0
        else:
            se = math.nan
        rows.append(ErrorRow(key[0], key[1], R, rmse, se))
    return ErrorTable(rows)
