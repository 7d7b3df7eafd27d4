"""Recovery of frame-sparse signals by l1-analysis over optimized dual frames.

Modules
-------
numkernel    dense linear algebra helpers and seeded RNG
frames       Gabor / spikes+Fourier frames, dual frames, null-space projector
sensing      Gaussian and sign-flipped partial-DFT sensing, noise bound
bregman      soft shrinkage, split Bregman solver, generic Bregman iteration
ripanalysis  RIP / D-RIP constants, sufficient conditions, error bounds
experiments  seeded trials, convergence traces and sweeps (CLI in ``cli``)
"""

from .bregman import Mode, RecoveryResult, SolverConfig, shrink, solve
from .frames import (
    DualFrame,
    Frame,
    analysis_coefficients,
    canonical_dual,
    gabor_frame,
    general_dual,
    null_space_projector,
    random_sparse_signal,
    spikes_fourier_frame,
)
from .numkernel import make_rng
from .sensing import (
    SensingModel,
    gaussian_noise_bound,
    gaussian_sensing,
    measure,
    partial_dft_signflip_sensing,
    relative_noise_level,
)

__version__ = "0.1.0"

__all__ = [
    "Mode", "RecoveryResult", "SolverConfig", "shrink", "solve",
    "DualFrame", "Frame", "analysis_coefficients", "canonical_dual", "gabor_frame",
    "general_dual", "null_space_projector", "random_sparse_signal", "spikes_fourier_frame",
    "make_rng",
    "SensingModel", "gaussian_noise_bound", "gaussian_sensing", "measure",
    "partial_dft_signflip_sensing", "relative_noise_level",
]
