"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``PASS`` or ``FAIL`` line for its criterion before
asserting, so ``pytest -v`` output doubles as the acceptance report.
"""

import math
import time

import mpmath
import numpy as np
import pytest

from truncspde import verify
from truncspde.cli import main
from truncspde.config import error_table_csv
from truncspde.drift import IndicatorVariant, PolynomialDrift, ginzburg_landau
from truncspde.harness import ExperimentConfig, desk_config, fit_order, strong_error_mc
from truncspde.noise import NoiseSource
from truncspde.schemes import Discretization, SchemeKind, run_path
from truncspde.spectral import ModeBasis, TimeGrid, lq_norm_pow

EXP, LIN = SchemeKind.EXP_EULER, SchemeKind.LIN_IMPLICIT


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
        return ok

    return emit


# -- 1. convergence order at desk scale ---------------------------------------


@pytest.mark.slow
def test_criterion_1_desk_convergence(report):
    cfg = desk_config()
    assert cfg.indicator_variant is IndicatorVariant.DRIFT
    start = time.perf_counter()
    table = strong_error_mc(cfg)
    elapsed = time.perf_counter() - start

    ok = elapsed <= 600
    parts = [f"{elapsed:.0f}s"]
    for scheme in (EXP, LIN):
        rows = table.for_scheme(scheme)
        e = [r.rmse for r in rows]
        se = [r.stderr_rmse for r in rows]
        endpoints = e[-1] < e[0]
        adjacent = all(e[i + 1] <= e[i] + max(se[i], se[i + 1]) for i in range(len(e) - 1))
        order = fit_order(table, scheme).order
        window = 0.15 <= order <= 0.5
        ok &= endpoints and adjacent and window
        parts.append(
            f"{scheme.value} order={order:.4f} rmse {e[0]:.4g}->{e[-1]:.4g} "
            f"monotone={'yes' if endpoints and adjacent else 'no'}"
        )
    assert report(1, ok, "; ".join(parts))


# -- 2. inequality suite -------------------------------------------------------


def test_criterion_2_inequality_suite(report):
    start = time.perf_counter()
    code = main(["verify"])
    elapsed = time.perf_counter() - start
    results = verify.verify_inequalities()

    gl = ginzburg_landau()
    constants = (gl.growth_constant(), gl.one_sided_constant(), gl.local_lipschitz_constant()) == (16, 2, 36)
    scans = [r for r in results if r.family.startswith("limplicit")]
    scans_ok = all(r.passed and r.slack == 1e-12 and r.samples >= 100_000 for r in scans)
    sampled = [r for r in results if r.family in ("F_lem1", "F_lem2", "F_lem3")]
    sampled_ok = all(r.passed and r.slack <= 1e-6 and r.samples >= 1000 for r in sampled)
    ok = code == 0 and elapsed <= 60 and constants and scans_ok and sampled_ok
    worst = min(r.margin for r in results)
    assert report(
        2, ok, f"exit={code} {len(results)} checks in {elapsed:.1f}s, worst margin {worst:.3e}, constants 16/2/36"
    )


# -- 3. deterministic linear consistency ---------------------------------------

LINEAR_NS = (4, 8, 16, 32, 64, 128, 256)


def _closed_forms(N):
    """High-precision terminal values of both recursions for ``f(v) = -v``."""
    with mpmath.workdps(50):
        h = mpmath.mpf(1) / N
        lam = mpmath.pi**2
        exp_euler = (mpmath.exp(-lam * h) * (1 - h)) ** N
        lin_implicit = ((1 - h) / (1 + lam * h)) ** N
        return float(exp_euler), float(lin_implicit)


def _linear_terminal(kind, N):
    disc = Discretization(ModeBasis(1), PolynomialDrift((0.0, -1.0)), TimeGrid(1.0, N), 0.5)
    src = NoiseSource(0, 0, 1, max(LINEAR_NS), scale=0.0)
    return float(run_path(disc, kind, src, [1.0]).final[0])


def test_criterion_3_linear_consistency(report):
    exact = math.exp(-(math.pi**2 + 1))
    parts = []
    ok = True
    for idx, kind in enumerate((EXP, LIN)):
        values = [_linear_terminal(kind, N) for N in LINEAR_NS]
        oracle = [_closed_forms(N)[idx] for N in LINEAR_NS]
        rel = max(abs(v - o) / abs(o) for v, o in zip(values, oracle))
        errs = [abs(v - exact) for v in values]
        slope = float(np.polyfit(np.log(LINEAR_NS), np.log(errs), 1)[0])
        sub_ok = rel <= 1e-12 and abs(slope + 1) <= 0.1
        ok &= sub_ok
        parts.append(f"{kind.value} slope={slope:.3f} max rel dev={rel:.1e} ({'ok' if sub_ok else 'outside -1 +- 0.1'})")
    assert report(3, ok, "; ".join(parts))


# -- 4. structural invariants --------------------------------------------------


def _reduced_config():
    return ExperimentConfig(K=64, N_ref=4096, N_list=(16, 64, 256, 1024), mc_runs=8, seed=42,
                            indicator_variant=IndicatorVariant.DRIFT)


def test_criterion_4_structural_invariants(report):
    rng = np.random.default_rng(2024)
    worst_parseval = worst_round_trip = 0.0
    for _ in range(100):
        K = int(rng.integers(1, 1025))
        b = ModeBasis(K)
        c = rng.standard_normal(K) * np.exp(rng.uniform(-5, 5))
        u = b.to_grid(c)
        worst_parseval = max(worst_parseval, abs(lq_norm_pow(u, 2) / np.sum(c * c) - 1))
        worst_round_trip = max(worst_round_trip, np.linalg.norm(b.to_spectral(u) - c) / np.linalg.norm(c))
    transforms = worst_parseval <= 1e-12 and worst_round_trip <= 1e-12

    src = NoiseSource(42, 7, 32, 256)
    coupling = True
    for r in (1, 4, 16):
        fine = src.fine_block(0, 256)
        coarse = src.coarse_block(0, 256 // r, r)
        for j in range(256 // r):
            acc = fine[j * r].copy()
            for i in range(1, r):
                acc += fine[j * r + i]
            coupling &= bool(np.array_equal(acc, coarse[j]))

    cfg = _reduced_config()
    blobs = {t: error_table_csv(strong_error_mc(cfg, threads=t)).encode() for t in (1, 2, 8)}
    csv_same = blobs[1] == blobs[2] == blobs[8]

    ok = transforms and coupling and csv_same
    assert report(
        4, ok,
        f"parseval {worst_parseval:.1e}, round trip {worst_round_trip:.1e}, "
        f"coupling r=1,4,16 {'exact' if coupling else 'BROKEN'}, csv threads 1/2/8 {'identical' if csv_same else 'DIFFER'}",
    )


# -- 5. Lyapunov audit ---------------------------------------------------------


def test_criterion_5_lyapunov_audit(report):
    cfg = desk_config(indicator_variant=IndicatorVariant.STATE)
    disc = cfg.discretization(256)
    worst = math.inf
    violations = 0
    for kind in (EXP, LIN):
        path = run_path(disc, kind, cfg.noise(0), cfg.initial_coeffs())
        audit = verify.lyapunov_audit(disc, path)
        worst = min(worst, audit.worst_margin)
        violations += audit.violations
    ok = violations == 0 and worst >= -1e-6
    assert report(5, ok, f"N=256 both schemes, worst relative slack {worst:+.3e}, violations={violations}")
