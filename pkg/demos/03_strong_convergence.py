"""Coupled Monte Carlo strong errors and the fitted order.

A reduced version of the desk experiment runs in a few seconds.  Pass
``--desk`` for the K=256, N_ref=2**16 problem (about a minute per 10
replicas).  If matplotlib is installed a log-log plot is saved next to
this script.
"""

import sys
from pathlib import Path

from truncspde import ExperimentConfig, desk_config, fit_order, strong_error_mc
from truncspde.cli import ORDER_LINE_CONSTANT

if "--desk" in sys.argv:
    cfg = desk_config()
else:
    cfg = desk_config(K=64, N_ref=4096, N_list=(16, 32, 64, 128, 256, 512), mc_runs=8)

table = strong_error_mc(cfg)
print("scheme         N      rmse       stderr")
for row in table:
    print(f"{row.scheme.value:13s} {row.N:5d}  {row.rmse:.5f}  {row.stderr_rmse:.5f}")
for scheme in cfg.schemes:
    fit = fit_order(table, scheme)
    print(f"{scheme.value}: observed order {fit.order:.3f} (r^2 = {fit.r2:.3f})")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)

fig, ax = plt.subplots()
Ns = list(cfg.N_list)
for scheme in cfg.schemes:
    ax.loglog(Ns, table.rmse(scheme), "o-", label=scheme.value)
for p, style in ((1 / 8, ":"), (1 / 4, "--"), (1 / 2, "-.")):
    ax.loglog(Ns, [ORDER_LINE_CONSTANT * N**-p for N in Ns], "k" + style, lw=0.8, label=f"order {p:g}")
ax.set_xlabel("N")
ax.set_ylabel("rms error at T")
ax.legend()
out = Path(__file__).with_suffix(".png")
fig.savefig(out, dpi=120)
print(f"plot written to {out}")
