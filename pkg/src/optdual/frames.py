"""Frames, dual frames and sparse test signals.

A frame is a wide matrix ``D`` (n x d, n <= d) whose columns span the
signal space.  Every dual ``Dt`` satisfies ``D @ Dt^* = I`` and all of them
are reached from the canonical dual by adding a null-space term::

    Dt = (D D^*)^{-1} D + W^* (I - D^* (D D^*)^{-1} D)

for an arbitrary d x n matrix ``W``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import io
from .errors import BadLattice, DegenerateFrame, RankDeficient, ShapeMismatch
from .numkernel import adjoint, extreme_eigenvalues, make_rng

__all__ = [
    "Frame",
    "DualFrame",
    "Projector",
    "SparseSignal",
    "canonical_dual",
    "null_space_projector",
    "general_dual",
    "gabor_frame",
    "spikes_fourier_frame",
    "random_sparse_signal",
    "analysis_coefficients",
]

MAX_CONDITION = 1e12


def _bounds(M):
    """Frame bounds of the columns of `M`: extreme eigenvalues of M M^*."""
    G = M @ adjoint(M)
    G = 0.5 * (G + adjoint(G))
    return extreme_eigenvalues(G)


@dataclass(frozen=True)
class Frame:
    """Synthesis matrix with cached frame bounds ``lower <= upper``."""

    D: np.ndarray
    lower: float = field(default=None)
    upper: float = field(default=None)

    def __post_init__(self):
        D = np.array(self.D)
        if D.ndim != 2 or D.shape[0] > D.shape[1]:
            raise ShapeMismatch(f"frame must be n x d with n <= d, got {D.shape}")
        D.setflags(write=False)
        object.__setattr__(self, "D", D)
        if self.lower is None or self.upper is None:
            A, B = _bounds(D)
            object.__setattr__(self, "lower", A)
            object.__setattr__(self, "upper", B)
        if not self.lower > 0:
            raise RankDeficient("frame does not span the signal space (A <= 0)")

    @property
    def n(self):
        return self.D.shape[0]

    @property
    def d(self):
        return self.D.shape[1]

    @property
    def kappa(self):
        """Ratio of frame bounds B/A."""
        return self.upper / self.lower

    @property
    def is_complex(self):
        return np.iscomplexobj(self.D)

    def is_parseval(self, atol=1e-10):
        G = self.D @ adjoint(self.D)
        return np.allclose(G, np.eye(self.n), rtol=0, atol=atol)

    def save(self, path, **meta):
        io.save_matrix(path, self.D, kind="frame", lower=self.lower, upper=self.upper, **meta)

    @classmethod
    def load(cls, path):
        D, header = io.load_matrix(path)
        return cls(D, header["lower"], header["upper"])


@dataclass(frozen=True)
class DualFrame:
    """A dual ``Dtilde`` of some frame, with the generator ``W`` it came from."""

    Dtilde: np.ndarray
    W: np.ndarray
    lower: float
    upper: float


class Projector:
    """Orthogonal projection onto the null space of ``D``.

    Applied implicitly as ``v - Dbar^* (D v)``; the explicit d x d matrix is
    only built on request.
    """

    def __init__(self, frame, Dbar=None):
        self.frame = frame
        if Dbar is None:
            Dbar = canonical_dual(frame).Dtilde
        self._D = frame.D
        self._DbarH = np.ascontiguousarray(adjoint(Dbar))
        self._matrix = None

    def apply(self, v):
        return v - self._DbarH @ (self._D @ v)

    __call__ = apply

    @property
    def P(self):
        if self._matrix is None:
            d = self.frame.d
            M = np.eye(d, dtype=self._DbarH.dtype) - self._DbarH @ self._D
            M.setflags(write=False)
            self._matrix = M
        return self._matrix


@dataclass(frozen=True)
class SparseSignal:
    x: np.ndarray
    support: np.ndarray
    f: np.ndarray

    @property
    def s(self):
        return len(self.support)


def _gram_inverse_times(frame, M):
    """``(D D^*)^{-1} M`` with a conditioning guard."""
    D = frame.D
    G = D @ adjoint(D)
    if np.linalg.cond(G) > MAX_CONDITION:
        raise RankDeficient("D D^* is numerically singular")
    return np.linalg.solve(G, M)


def canonical_dual(frame):
    """Canonical dual ``(D D^*)^{-1} D`` with bounds ``(1/B, 1/A)``."""
    Dbar = _gram_inverse_times(frame, frame.D)
    W = np.zeros((frame.d, frame.n), dtype=Dbar.dtype)
    return DualFrame(Dbar, W, 1.0 / frame.upper, 1.0 / frame.lower)


def null_space_projector(frame):
    return Projector(frame)


def general_dual(frame, W):
    """The dual frame generated by `W` (shape d x n)."""
    W = np.asarray(W)
    if W.shape != (frame.d, frame.n):
        raise ShapeMismatch(f"W must have shape {(frame.d, frame.n)}, got {W.shape}")
    Dbar = _gram_inverse_times(frame, frame.D)
    WH = adjoint(W)
    # W^* P = W^* - (W^* D^*) Dbar
    Dtilde = Dbar + WH - (WH @ adjoint(frame.D)) @ Dbar
    lower, upper = _bounds(Dtilde)
    return DualFrame(Dtilde, W, lower, upper)


def _periodic_gaussian(n, width):
    t = np.arange(n)
    wraps = np.arange(-3, 4)[:, None] * n
    return np.exp(-((t[None, :] - wraps) ** 2) / (2.0 * width**2)).sum(axis=0)


def gabor_frame(n, oversampling=20, window_width=None):
    """Gabor dictionary with a Gaussian window on the discrete circle of length `n`.

    Lattice: ``n/2`` time shifts of 2 samples and ``2*oversampling``
    modulations with frequency step ``1/(2*oversampling)``, so there are
    ``oversampling * n`` atoms.  Atoms are ordered shift-major and normalized
    to unit l2 norm.  `window_width` defaults to ``n/16``.
    """
    if n < 2 or n % 2:
        raise BadLattice(f"n must be a positive even integer, got {n}")
    if oversampling < 1 or int(oversampling) != oversampling:
        raise BadLattice(f"oversampling must be a positive integer, got {oversampling}")
    oversampling = int(oversampling)
    if window_width is None:
        window_width = n / 16
    if window_width <= 0:
        raise ValueError("window_width must be positive")

    n_shifts, n_mods, step = n // 2, 2 * oversampling, 2
    t = np.arange(n)
    g = _periodic_gaussian(n, window_width)
    shifted = np.stack([np.roll(g, k * step) for k in range(n_shifts)], axis=1)
    mods = np.exp(2j * np.pi * np.outer(t, np.arange(n_mods)) / n_mods)
    D = (shifted[:, :, None] * mods[:, None, :]).reshape(n, n_shifts * n_mods)
    D /= np.linalg.norm(D, axis=0)

    A, B = _bounds(D)
    if A < 1e-10:
        raise DegenerateFrame(f"lower frame bound {A:.3g} is numerically zero")
    return Frame(D, A, B)


def spikes_fourier_frame(n):
    """``[I, F]`` with F the unitary DFT matrix; a tight frame with A = B = 2."""
    if n < 2:
        raise ShapeMismatch("n must be at least 2")
    jk = np.outer(np.arange(n), np.arange(n))
    F = np.exp(-2j * np.pi * jk / n) / np.sqrt(n)
    D = np.hstack([np.eye(n, dtype=complex), F])
    return Frame(D)


def random_sparse_signal(frame, s, rng):
    """Draw an `s`-sparse coefficient vector and its signal ``f = D x``.

    Support is uniform without replacement; nonzeros are standard Gaussian
    (circular complex Gaussian with unit variance for complex frames).
    """
    d = frame.d
    if not 0 <= s <= d:
        raise ValueError(f"sparsity must lie in [0, {d}], got {s}")
    rng = make_rng(rng)
    support = np.sort(rng.choice(d, size=s, replace=False))
    if frame.is_complex:
        vals = (rng.standard_normal(s) + 1j * rng.standard_normal(s)) / np.sqrt(2.0)
        x = np.zeros(d, dtype=complex)
    else:
        vals = rng.standard_normal(s)
        x = np.zeros(d)
    x[support] = vals
    return SparseSignal(x, support, frame.D @ x)


def analysis_coefficients(dual, f):
    f = np.asarray(f)
    Dt = dual.Dtilde
    if f.shape[0] != Dt.shape[0]:
        raise ShapeMismatch(f"signal length {f.shape[0]} != {Dt.shape[0]}")
    return adjoint(Dt) @ f
