"""
Frames, dual frames and the null-space projector
================================================

A frame ``D`` (n x d, d >= n) reconstructs every signal from its analysis
coefficients with *any* dual ``Dt`` satisfying ``D Dt^* = I``.  All duals
are the canonical one plus a null-space term, and the canonical dual gives
the coefficients of least l2 norm.
"""

import numpy as np

from optdual import canonical_dual, general_dual, make_rng, null_space_projector
from optdual.frames import Frame, analysis_coefficients, gabor_frame, spikes_fourier_frame

rng = make_rng(0)

# a small random frame in R^4 with 7 atoms
frame = Frame(rng.standard_normal((4, 7)))
print(f"frame bounds A={frame.lower:.3f}  B={frame.upper:.3f}  kappa={frame.kappa:.3f}")

###############################################################################
# Canonical dual: (D D^*)^{-1} D, with frame bounds 1/B and 1/A.
canon = canonical_dual(frame)
print("canonical dual bounds:", round(canon.lower, 4), round(canon.upper, 4))
print("D Dbar^* == I:", np.allclose(frame.D @ canon.Dtilde.T, np.eye(4)))

###############################################################################
# Any other dual: Dbar + W^* P, where P projects onto null(D).
W = rng.standard_normal((7, 4))
dual = general_dual(frame, W)
print("D Dt^* == I for a random W:", np.allclose(frame.D @ dual.Dtilde.T, np.eye(4)))

P = null_space_projector(frame).P
print("P idempotent:", np.allclose(P @ P, P), " rank(P) =", round(np.trace(P)), "= d - n")

###############################################################################
# Both duals reconstruct f, but the canonical coefficients are the shortest.
f = rng.standard_normal(4)
c_canon = analysis_coefficients(canon, f)
c_other = analysis_coefficients(dual, f)
print("reconstruction errors:", np.linalg.norm(frame.D @ c_canon - f), np.linalg.norm(frame.D @ c_other - f))
print(f"||canonical coeffs|| = {np.linalg.norm(c_canon):.4f} <= ||other coeffs|| = {np.linalg.norm(c_other):.4f}")

###############################################################################
# The two dictionaries used in the experiments.
gab = gabor_frame(128, 20)
sf = spikes_fourier_frame(128)
print(f"Gabor: {gab.D.shape}, kappa={gab.kappa:.3f};  [I, F]: {sf.D.shape}, A=B={sf.upper:.1f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots(1, 2, figsize=(9, 3))
    ax[0].plot(gab.D[:, 40 * 32].real, label="real")
    ax[0].plot(np.abs(gab.D[:, 40 * 32]), label="|g|")
    ax[0].set_title("a Gabor atom")
    ax[0].legend()
    ax[1].imshow(np.abs(gab.D[:, :400]), aspect="auto")
    ax[1].set_title("first 400 atoms (magnitude)")
    fig.tight_layout()
    plt.show()
