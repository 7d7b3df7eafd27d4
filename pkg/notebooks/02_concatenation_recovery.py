"""
Spikes plus sinusoids: where l1-analysis with the canonical dual fails
=======================================================================

Signals sparse in ``D = [I, F]`` (identity and unitary DFT) are measured with
a 32 x 128 Gaussian matrix.  Standard l1-analysis, which uses the canonical
dual, typically stalls around 80% relative error, while optimizing over all
duals recovers the signal to high accuracy.
"""

import numpy as np

from optdual import SolverConfig, gaussian_sensing, make_rng, random_sparse_signal, solve, spikes_fourier_frame

n, m, s = 128, 32, 7
frame = spikes_fourier_frame(n)

rng = make_rng(0)
model = gaussian_sensing(m, n, rng)
signal = random_sparse_signal(frame, s, rng)
y = model.Phi @ signal.f

histories = {}
for mode in ("optimal-dual", "canonical"):
    cfg = SolverConfig(n_inner=15, n_outer=100, tol=1e-12, mode=mode)
    res = solve(model, y, frame, cfg, truth=signal.f)
    histories[mode] = res.error_history
    print(f"{mode:>13}: final relative error {res.error_history[-1]:.3e} after {res.outer_iterations_used} outer iterations")

###############################################################################
# A few more instances: the gap is systematic, not a lucky draw.
for seed in range(1, 6):
    rng = make_rng(seed)
    model = gaussian_sensing(m, n, rng)
    signal = random_sparse_signal(frame, s, rng)
    y = model.Phi @ signal.f
    errs = []
    for mode in ("optimal-dual", "canonical"):
        res = solve(model, y, frame, SolverConfig(n_inner=15, n_outer=100, tol=1e-12, mode=mode))
        errs.append(np.linalg.norm(res.f_hat - signal.f) / np.linalg.norm(signal.f))
    print(f"seed {seed}: optimal-dual {errs[0]:.2e}   canonical {errs[1]:.3f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    for mode, h in histories.items():
        plt.semilogy(np.arange(1, len(h) + 1), h, label=mode)
    plt.xlabel("outer iteration")
    plt.ylabel("relative error")
    plt.legend()
    plt.show()
