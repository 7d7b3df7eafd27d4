"""
Gabor dictionary recovery and convergence traces
================================================

n = 128 samples, a Gabor dictionary oversampled 20 times (d = 2560),
s = 7 random atoms with complex Gaussian weights, m = 32 Gaussian
measurements, lambda = mu = 1, tol = 1e-6, nOuter = 200.  The convergence
table below is what ``optdual convergence`` writes to CSV.
"""

import numpy as np

from optdual.experiments import ExperimentConfig, run_convergence

for n_inner in (10, 30):
    cfg = ExperimentConfig(n_inner=n_inner)
    rows = run_convergence(cfg)
    last = rows[-1]
    od = [r["error_optimal_dual"] for r in rows if r["error_optimal_dual"] != ""]
    ca = [r["error_canonical"] for r in rows if r["error_canonical"] != ""]
    print(f"nInner={n_inner}: optimal-dual {od[-1]:.2e} after {len(od)} its, canonical {ca[-1]:.2e} after {len(ca)} its")

    try:
        import matplotlib.pyplot as plt
    except ImportError:
        continue
    plt.figure()
    plt.semilogy(np.arange(1, len(od) + 1), od, label="optimal-dual")
    plt.semilogy(np.arange(1, len(ca) + 1), ca, label="canonical")
    plt.title(f"nInner = {n_inner}")
    plt.xlabel("outer iteration")
    plt.ylabel("relative error")
    plt.legend()

try:
    import matplotlib.pyplot as plt
    plt.show()
except ImportError:
    pass
