import numpy as np
import pytest

from truncspde import verify
from truncspde.cli import main
from truncspde.drift import PolynomialDrift, ginzburg_landau
from truncspde.noise import NoiseSource
from truncspde.schemes import Discretization, run_path
from truncspde.spectral import ModeBasis, TimeGrid, lq_norm_pow


def test_full_suite_passes():
    results = verify.verify_inequalities()
    assert {r.family for r in results} == set(verify.FAMILIES)
    bad = [r.line() for r in results if not r.passed]
    assert not bad, bad


def test_scalar_scans_resolution_and_slack():
    for scan in (verify.scan_limplicit_bound, verify.scan_limplicit_order_1, verify.scan_limplicit_order_3):
        for r in scan():
            assert r.samples >= 100_000
            assert r.slack == 1e-12
            assert r.margin >= 0


def test_linear_drift_suite_passes():
    results = verify.verify_inequalities(drift=PolynomialDrift((0.0, -1.0)))
    assert all(r.passed for r in results)


def test_one_sided_scan_margin_for_cubic():
    # sup f'(z) = 1 against the constant 2
    r = verify.scan_one_sided(ginzburg_landau())
    assert r.margin == pytest.approx(1.0, abs=1e-9)


def test_broken_bound_is_caught(monkeypatch):
    monkeypatch.setitem(verify.BOUNDS, "limplicit_bound", 2.0)
    results = verify.verify_inequalities(only=["limplicit_bound"])
    assert not all(r.passed for r in results)
    assert main(["verify", "--only", "limplicit_bound"]) == 1


def test_only_filter(capsys):
    assert main(["verify", "--only", "limplicit_order_3"]) == 0
    out = capsys.readouterr().out
    assert "limplicit_order_3" in out
    assert "limplicit_bound " not in out
    with pytest.raises(ValueError):
        verify.verify_inequalities(only=["nope"])


def test_check_result_line():
    r = verify.CheckResult("F_lem1", "x", -1.0, 1e-6, 3)
    assert not r.passed and r.line().startswith("FAIL")


def _disc(N, K=32, variant="state"):
    return Discretization(ModeBasis(K), ginzburg_landau(), TimeGrid(1.0, N), 1 / 6, variant)


def test_audit_zero_path():
    disc = _disc(16)
    path = run_path(disc, "exp_euler", NoiseSource(0, 0, 32, 16, scale=0.0))
    report = verify.lyapunov_audit(disc, path)
    assert report.passed and report.worst_margin > 0


def test_audit_noisy_path():
    disc = _disc(64)
    path = run_path(disc, "exp_euler", NoiseSource(1, 0, 32, 256))
    report = verify.lyapunov_audit(disc, path)
    assert report.violations == 0
    assert report.margins.shape == (64,)


def test_lyapunov_boundary_at_zero_time(rng):
    drift = ginzburg_landau()
    u = ModeBasis(32).to_grid(rng.standard_normal((10, 32)))
    v = np.zeros_like(u)
    lhs = verify.lyapunov_lhs(drift, u, v, 0.0, 0.01, 1 / 6, 6)
    rhs = verify.lyapunov_rhs(drift, u, v, 0.0, 6)
    np.testing.assert_allclose(rhs - lhs, 0.0, atol=1e-12 * lq_norm_pow(u, 6).max())


def test_audit_preconditions():
    disc = _disc(16, variant="drift")
    path = run_path(disc, "exp_euler", NoiseSource(0, 0, 32, 16))
    with pytest.raises(ValueError):
        verify.lyapunov_audit(disc, path)
    disc = _disc(16)
    path = run_path(disc, "exp_euler", NoiseSource(0, 0, 32, 16), snap_every=4)
    with pytest.raises(ValueError):
        verify.lyapunov_audit(disc, path)
