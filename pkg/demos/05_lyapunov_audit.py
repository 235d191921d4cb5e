"""Step-by-step audit of the one-step moment bound along a simulated path.

The audit needs the state-norm indicator.  It uses the full state as ``u``
and sets ``v = 0``.
"""

from truncspde import desk_config, lyapunov_audit, run_path

cfg = desk_config(indicator_variant="state", K=128, N_ref=16384)
for N in (64, 256, 1024):
    disc = cfg.discretization(N)
    for kind in ("exp_euler", "lin_implicit"):
        path = run_path(disc, kind, cfg.noise(0), cfg.initial_coeffs())
        audit = lyapunov_audit(disc, path)
        print(f"{kind:13s} N={N:5d}  worst relative slack {audit.worst_margin:+.3e}  violations {audit.violations}")
