"""Numerical checks of the operator and drift inequalities behind the schemes.

Two kinds of checks live here:

* scalar scans of the spectral multipliers over ``x = t * lambda`` on a dense
  log grid (the operator norms are suprema of these functions), and
* sampled checks on random band-limited fields, with all Lebesgue norms taken
  by the rectangle rule of :func:`~truncspde.spectral.lq_norm_pow`.

The rectangle rule is a measure of total mass ``K / (K + 1) <= 1``, so every
inequality proved for the unit interval also holds for it; failures can only
come from rounding, which the relative slack absorbs.

Each check yields a :class:`CheckResult` whose ``margin`` is the worst case
of ``bound - value`` (scans) or ``(rhs - lhs) / rhs`` (sampled checks).
"""

import math
from dataclasses import dataclass

import numpy as np

from .drift import IndicatorVariant, ginzburg_landau, powered_threshold
from .spectral import ModeBasis, lq_norm_pow

__all__ = [
    "BOUNDS",
    "FAMILIES",
    "CheckResult",
    "AuditReport",
    "verify_inequalities",
    "lyapunov_rhs",
    "lyapunov_lhs",
    "lyapunov_audit",
]

# Right-hand sides of the scalar bounds.  Tests patch these to prove the scans
# can fail.
BOUNDS = {
    "limplicit_bound": 4.0,
    "limplicit_order_1": 1.0,
    "limplicit_order_3": 16.0,  # divided by m
}

SCAN_SLACK = 1e-12
CONTRACTION_SLACK = 1e-8
SAMPLED_SLACK = 1e-6


@dataclass(frozen=True)
class CheckResult:
    family: str
    name: str
    margin: float
    slack: float
    samples: int

    @property
    def passed(self):
        return bool(self.margin >= -self.slack)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.family:<18} {self.name:<40} margin={self.margin:+.6e} (n={self.samples})"


def _log_grid(n_points):
    return np.logspace(-6, 6, n_points)


# -- scalar scans -------------------------------------------------------------


def scan_limplicit_bound(n_points=100_001):
    """``sup_x (j x)^kappa / (1 + x)^j <= 4`` for ``j >= 2``, ``kappa in [0, 2]``."""
    x = _log_grid(n_points)
    out = []
    for kappa in (0.0, 0.5, 1.0, 1.5, 2.0):
        worst = -np.inf
        for j in range(2, 65):
            v = np.exp(kappa * np.log(j * x) - j * np.log1p(x))
            worst = max(worst, float(v.max()))
        out.append(CheckResult("limplicit_bound", f"kappa={kappa}", BOUNDS["limplicit_bound"] - worst,
                               SCAN_SLACK, n_points * 63))
    return out


def scan_limplicit_order_1(n_points=100_001):
    """``sup_x x^-kappa |e^-x - (1 + x)^-1| <= 1`` for ``kappa in [0, 2]``."""
    x = _log_grid(n_points)
    # e^-x - 1/(1+x) = expm1(log1p(x) - x) / (1 + x), no cancellation near 0
    diff = np.abs(np.expm1(np.log1p(x) - x)) / (1.0 + x)
    out = []
    for kappa in (0.0, 0.5, 1.0, 1.5, 2.0):
        worst = float((diff * x**-kappa).max())
        out.append(CheckResult("limplicit_order_1", f"kappa={kappa}", BOUNDS["limplicit_order_1"] - worst,
                               SCAN_SLACK, n_points))
    return out


def scan_limplicit_order_3(n_points=100_001):
    """``sup_x x^kappa |e^{-m x} - (1 + x)^-m| <= 16 / m`` for ``kappa in [0, 1]``."""
    x = _log_grid(n_points)
    log_gap = np.log1p(x) - x
    out = []
    for kappa in (0.0, 0.5, 1.0):
        margin = np.inf
        for m in range(1, 65):
            diff = np.exp(-m * np.log1p(x)) * np.abs(np.expm1(m * log_gap))
            worst = float((x**kappa * diff).max())
            margin = min(margin, BOUNDS["limplicit_order_3"] / m - worst)
        out.append(CheckResult("limplicit_order_3", f"kappa={kappa}", margin, SCAN_SLACK, n_points * 64))
    return out


def scan_one_sided(drift, n_points=200_001, radius=1e3):
    """``sup_z f'(z)`` against the closed-form one-sided constant."""
    z = np.linspace(-radius, radius, n_points)
    worst = float(drift.derivative(z).max())
    return CheckResult("F_lem2", "sup f'(z) on [-1e3, 1e3]", drift.one_sided_constant() - worst, SCAN_SLACK, n_points)


# -- sampled field checks -----------------------------------------------------


def _band_limited(rng, basis, count, band, amplitude=(1e-2, 10.0), decay=1.0):
    """Random fields with ``band`` active modes and log-uniform amplitudes."""
    k = np.arange(1, band + 1, dtype=float)
    c = np.zeros((count, basis.K))
    c[:, :band] = rng.uniform(-1, 1, (count, band)) * k**-decay
    lo, hi = np.log(amplitude[0]), np.log(amplitude[1])
    c *= np.exp(rng.uniform(lo, hi, (count, 1)))
    return c


def _relative_margin(lhs, rhs):
    scale = np.maximum(np.abs(rhs), np.finfo(float).tiny)
    return float(np.min((rhs - lhs) / scale))


def check_contraction(rng, basis=None, count=200):
    """``L^q`` contraction of ``e^{tA}`` and ``(I - tA)^{-1}`` on smooth fields.

    The fields keep ``band`` modes with ``q * band < 2 (K + 1)``, so every
    ``|u|^q`` is a trigonometric polynomial the rectangle rule integrates
    exactly.
    """
    basis = basis or ModeBasis(256)
    out = []
    for q in (2, 6, 18):
        band = min(8, (2 * (basis.K + 1) - 1) // q)
        c = _band_limited(rng, basis, count, band, decay=3.0)
        before = lq_norm_pow(basis.to_grid(c), q)
        for t in (1e-4, 1e-2, 1.0, 10.0):
            for label, op in (("semigroup", basis.semigroup_apply), ("resolvent", basis.resolvent_apply)):
                after = lq_norm_pow(basis.to_grid(op(c, t)), q)
                margin = float(np.min(1.0 - after / before))
                out.append(CheckResult("U_lem1", f"{label} q={q} t={t:g}", margin, CONTRACTION_SLACK, count))
    return out


def lyapunov_lhs(drift, u, v, t, h, chi, q):
    """``|| u + t 1{||u + v||_{nq} <= h^-chi} f(u + v) ||_q^q`` on the grid.

    ``u`` and ``v`` are grid values with the mode axis last.
    """
    n = drift.degree
    w = u + v
    keep = lq_norm_pow(w, n * q) <= powered_threshold(1.0 / h, chi, n * q)
    return lq_norm_pow(u + t * np.asarray(keep, float)[..., None] * drift(w), q)


def lyapunov_rhs(drift, u, v, t, q, T=1.0):
    """Right side of the one-step moment bound with unit Young weights."""
    n = drift.degree
    a = drift.coeffs
    s = drift.lyapunov_sum()
    p = q + n - 1
    amax = max(abs(c) for c in a)
    growth = q * t * (a[n] + s) * lq_norm_pow(u, p)
    semigroup = np.exp(t) * lq_norm_pow(u, q)
    noise = t * np.maximum(1.0, lq_norm_pow(v, p)) * (2 * q * s + (q * (n + 1) * max(1.0, T) * amax) ** q)
    return growth + semigroup + noise


def check_lyapunov(rng, drift, basis=None, count=1000, T=1.0):
    basis = basis or ModeBasis(64)
    n = drift.degree
    chi = 1 / (2 * n)
    out = []
    for q in (2 * n, 2 * n + 2):
        for N in (4, 64, 1024):
            h = T / N
            u = basis.to_grid(_band_limited(rng, basis, count, 16, amplitude=(1e-2, 3.0)))
            v = basis.to_grid(_band_limited(rng, basis, count, 16, amplitude=(1e-2, 3.0)))
            t = h * rng.uniform(0, 1, count)
            t[0] = h
            lhs = lyapunov_lhs(drift, u, v, t[:, None], h, chi, q)
            rhs = lyapunov_rhs(drift, u, v, t, q, T)
            out.append(CheckResult("U_lem2", f"q={q} h=T/{N}", _relative_margin(lhs, rhs), SAMPLED_SLACK, count))
    return out


def check_growth(rng, drift, basis=None, count=1000):
    basis = basis or ModeBasis(64)
    n = drift.degree
    G = drift.growth_constant()
    out = []
    for q in (2 * n, 2 * n + 2):
        v = basis.to_grid(_band_limited(rng, basis, count, 16))
        w = basis.to_grid(_band_limited(rng, basis, count, 16))
        lhs = np.sqrt(lq_norm_pow(drift(v + w), 2))
        rhs = G * (1 + np.sqrt(lq_norm_pow(v, q)) + np.sqrt(lq_norm_pow(w, q)))
        out.append(CheckResult("F_lem1", f"q={q} G={G:g}", _relative_margin(lhs, rhs), SAMPLED_SLACK, count))
    return out


def check_one_sided(rng, drift, basis=None, count=1000, pairs=10_000):
    basis = basis or ModeBasis(64)
    C = drift.one_sided_constant()
    x = rng.uniform(-10, 10, pairs)
    y = rng.uniform(-10, 10, pairs)
    d = x - y
    lhs = d * (drift(x) - drift(y))
    scalar = float(np.min(C * d * d - lhs))
    out = [CheckResult("F_lem2", f"scalar pairs C={C:g}", scalar, 1e-10, pairs)]

    cv = _band_limited(rng, basis, count, 16)
    cw = _band_limited(rng, basis, count, 16)
    dc = cv - cw
    v, w = basis.to_grid(cv), basis.to_grid(cw)
    dgrid = v - w
    lap = -np.sum(basis.eigenvalues * dc * dc, axis=-1)
    nonlin = np.sum(dgrid * (drift(v) - drift(w)), axis=-1) / (basis.K + 1)
    lhs = lap + nonlin
    rhs = C * np.sum(dc * dc, axis=-1)
    scale = np.maximum.reduce([np.abs(lap), np.abs(nonlin), np.abs(rhs), np.full_like(rhs, 1e-300)])
    margin = float(np.min((rhs - lhs) / scale))
    out.append(CheckResult("F_lem2", f"fields with Laplacian C={C:g}", margin, SAMPLED_SLACK, count))
    out.append(scan_one_sided(drift))
    return out


def check_local_lipschitz(rng, drift, basis=None, count=1000):
    basis = basis or ModeBasis(64)
    n = drift.degree
    L = drift.local_lipschitz_constant()
    qn = 2 * n * n
    e = max(1, 2 * (n - 1))

    def norm(g):
        return lq_norm_pow(g, qn) ** (1.0 / qn)

    v = basis.to_grid(_band_limited(rng, basis, count, 16))
    w = basis.to_grid(_band_limited(rng, basis, count, 16))
    lhs = lq_norm_pow(drift(v) - drift(w), 2)
    rhs = L * norm(v - w) ** 2 * (1 + norm(v) ** e + norm(w) ** e)
    return [CheckResult("F_lem3", f"L={L:g}", _relative_margin(lhs, rhs), SAMPLED_SLACK, count)]


FAMILIES = (
    "limplicit_bound",
    "limplicit_order_1",
    "limplicit_order_3",
    "U_lem1",
    "U_lem2",
    "F_lem1",
    "F_lem2",
    "F_lem3",
)


def verify_inequalities(only=None, drift=None, seed=0, n_points=100_001, samples=1000):
    """Run the scalar scans and sampled checks; return a list of results.

    ``only`` restricts the run to the named families (see :data:`FAMILIES`).
    Failures are reported through ``CheckResult.passed``, never raised.
    """
    drift = drift or ginzburg_landau()
    selected = set(FAMILIES if only is None else ([only] if isinstance(only, str) else only))
    unknown = selected - set(FAMILIES)
    if unknown:
        raise ValueError(f"unknown inequality families: {sorted(unknown)}")
    rng = np.random.default_rng(seed)
    runners = {
        "limplicit_bound": lambda: scan_limplicit_bound(n_points),
        "limplicit_order_1": lambda: scan_limplicit_order_1(n_points),
        "limplicit_order_3": lambda: scan_limplicit_order_3(n_points),
        "U_lem1": lambda: check_contraction(rng),
        "U_lem2": lambda: check_lyapunov(rng, drift, count=samples),
        "F_lem1": lambda: check_growth(rng, drift, count=samples),
        "F_lem2": lambda: check_one_sided(rng, drift, count=samples),
        "F_lem3": lambda: check_local_lipschitz(rng, drift, count=samples),
    }
    results = []
    for name in FAMILIES:
        if name in selected:
            results.extend(runners[name]())
    return results


# -- Lyapunov audit along a path ---------------------------------------------


@dataclass(frozen=True)
class AuditReport:
    margins: np.ndarray
    tolerance: float = SAMPLED_SLACK

    @property
    def worst_margin(self):
        return float(self.margins.min()) if self.margins.size else math.inf

    @property
    def violations(self):
        return int(np.sum(self.margins < -self.tolerance))

    @property
    def passed(self):
        return self.violations == 0


def lyapunov_audit(disc, path, q=None):
    """Check the one-step moment bound at every step of ``path``.

    ``u`` is the full state at each grid time and ``v = 0``, which checks a
    stronger statement than the split into state minus Ornstein-Uhlenbeck
    part.  ``path`` must hold every grid time and use the state-norm
    indicator.
    """
    if disc.variant is not IndicatorVariant.STATE:
        raise ValueError("the audit needs a path run with the state-norm indicator")
    if len(path.states) != disc.N + 1:
        raise ValueError("the audit needs every grid time (snap_every=1)")
    drift = disc.drift
    q = 2 * drift.degree if q is None else q
    u = disc.basis.to_grid(path.states[:-1])
    v = np.zeros_like(u)
    h = disc.h
    lhs = lyapunov_lhs(drift, u, v, h, h, disc.chi, q)
    rhs = lyapunov_rhs(drift, u, v, h, q, disc.grid.T)
    return AuditReport((rhs - lhs) / np.maximum(np.abs(rhs), np.finfo(float).tiny))
