"""Seeded Monte Carlo comparison of the two decoders.

Runs the four encoder/function panels (Lagrange or Berrut encoding, with
``x sin x`` or sigmoid) at several straggler counts, prints the mean error
in dB and writes per-trial and aggregate CSV files.

Run: ``python demos/04_monte_carlo.py [OUTDIR] [TRIALS]``
"""

import sys
from pathlib import Path

from bscc.experiments import emit_csv, panel_configs, run_experiment

outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
trials = int(sys.argv[2]) if len(sys.argv) > 2 else 100
outdir.mkdir(parents=True, exist_ok=True)

s_values = (0, 10, 20, 30, 40)
print(f"{trials} trials per point, mean e_rel in dB (spline / berrut decoder)\n")
print(f"{'panel':<18}" + "".join(f"{'S=' + str(s):>18}" for s in s_values))
for cfg in panel_configs(trials=trials, seed=2024, s_values=s_values):
    res = run_experiment(cfg)
    cells = []
    for s in s_values:
        b, a = res.aggregate_for("bscc", s), res.aggregate_for("bacc", s)
        cells.append(f"{b.mean_db:8.1f} /{a.mean_db:7.1f}")
    print(f"{cfg.encoder + ' ' + cfg.function:<18}" + "".join(f"{c:>18}" for c in cells))
    emit_csv(res.records, res.aggregates, outdir / f"{cfg.encoder}_{cfg.function}.csv")

print(f"\nCSV files written to {outdir}/")
