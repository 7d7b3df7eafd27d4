"""
Robustness to noise and the sparsity threshold
==============================================

Relative recovery error grows linearly with the relative noise level
``sqrt(m) sigma / ||Phi f||``, and recovery breaks down once the relative
sparsity ``s/m`` passes roughly 0.2.  Trial counts here are small so the
script finishes in a few minutes; ``optdual noise-sweep`` and
``optdual sparsity-sweep`` run the full versions.

Usage: python3 04_noise_and_sparsity_sweeps.py [trials]
"""

import sys

import numpy as np

from optdual.experiments import ExperimentConfig, run_noise_sweep, run_sparsity_sweep

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 2
cfg = ExperimentConfig(trials=trials)

levels = [0.001, 0.01, 0.05, 0.1, 0.2, 0.3]
rows, _ = run_noise_sweep(cfg, noise_levels=levels, modes=("optimal-dual",))
x = np.array([r["noise_level"] for r in rows])
y = np.array([r["mean_optimal_dual"] for r in rows])
slope, intercept = np.polyfit(x, y, 1)
r2 = 1 - np.sum((y - slope * x - intercept) ** 2) / np.sum((y - y.mean()) ** 2)
for lv, e in zip(x, y):
    print(f"noise level {lv:6.3f}: mean relative error {e:.4f}")
print(f"linear fit: slope {slope:.3f}, R^2 {r2:.4f}")

###############################################################################
rows, _ = run_sparsity_sweep(cfg, rho_values=(0.1, 0.2, 0.3, 0.5), modes=("optimal-dual",))
for r in rows:
    print(f"rho={r['rho']:.2f} (s={r['s']:2d}): mean relative error {r['mean_optimal_dual']:.4f}")
