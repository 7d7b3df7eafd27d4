"""Sensing operators, noisy measurements and the Gaussian noise bound."""

import enum
from dataclasses import dataclass

import numpy as np

from . import io
from .errors import BadShape, ShapeMismatch, ZeroSignal
from .numkernel import gaussian_matrix, make_rng

__all__ = [
    "SensingKind",
    "SensingModel",
    "Measurement",
    "gaussian_sensing",
    "partial_dft_signflip_sensing",
    "measure",
    "gaussian_noise_bound",
    "relative_noise_level",
]


class SensingKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    PARTIAL_DFT_SIGNFLIP = "partial_dft_signflip"


def gaussian_noise_bound(m, sigma):
    """High-probability bound on the norm of N(0, sigma^2 I_m) noise.

    ``sigma * sqrt(m + 2 sqrt(m log m))`` with the natural log; the bound
    holds with probability at least ``1 - 1/m``.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return sigma * np.sqrt(m + 2.0 * np.sqrt(m * np.log(m)))


@dataclass(frozen=True)
class SensingModel:
    """Measurement matrix plus noise description.

    `epsilon` is the noise-power bound handed to solvers and guarantees.  If
    omitted it is derived from `sigma` via :func:`gaussian_noise_bound`
    (0 when there is no noise).
    """

    Phi: np.ndarray
    kind: SensingKind = SensingKind.GAUSSIAN
    sigma: float = 0.0
    epsilon: float = None

    def __post_init__(self):
        Phi = np.array(self.Phi)
        if Phi.ndim != 2 or Phi.shape[0] > Phi.shape[1]:
            raise BadShape(f"Phi must be m x n with m <= n, got {Phi.shape}")
        Phi.setflags(write=False)
        object.__setattr__(self, "Phi", Phi)
        object.__setattr__(self, "kind", SensingKind(self.kind))
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.epsilon is None:
            m = Phi.shape[0]
            eps = gaussian_noise_bound(m, self.sigma) if self.sigma > 0 and m >= 2 else 0.0
            object.__setattr__(self, "epsilon", float(eps))
        elif self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")

    @property
    def m(self):
        return self.Phi.shape[0]

    @property
    def n(self):
        return self.Phi.shape[1]

    def with_noise(self, sigma, epsilon=None):
        """Same operator, different noise level."""
        return SensingModel(self.Phi, self.kind, sigma, epsilon)

    def save(self, path):
        io.save_matrix(path, self.Phi, kind=self.kind.value, sigma=self.sigma, epsilon=self.epsilon)

    @classmethod
    def load(cls, path):
        Phi, header = io.load_matrix(path)
        return cls(Phi, header["kind"], header["sigma"], header["epsilon"])


@dataclass(frozen=True)
class Measurement:
    y: np.ndarray
    f: np.ndarray
    z: np.ndarray


def _check_mn(m, n):
    if not 1 <= m <= n:
        raise BadShape(f"need 1 <= m <= n, got m={m}, n={n}")


def gaussian_sensing(m, n, rng, sigma=0.0):
    """i.i.d. N(0, 1/m) entries, so columns have unit expected squared norm."""
    _check_mn(m, n)
    return SensingModel(gaussian_matrix(m, n, 1.0 / np.sqrt(m), rng), SensingKind.GAUSSIAN, sigma)


def partial_dft_signflip_sensing(m, n, rng, sigma=0.0):
    """`m` random rows of the unitary DFT, rescaled by sqrt(n/m), with random column signs."""
    _check_mn(m, n)
    rng = make_rng(rng)
    rows = np.sort(rng.choice(n, size=m, replace=False))
    signs = rng.choice(np.array([-1.0, 1.0]), size=n)
    F = np.exp(-2j * np.pi * np.outer(rows, np.arange(n)) / n) / np.sqrt(n)
    Phi = np.sqrt(n / m) * F * signs[None, :]
    return SensingModel(Phi, SensingKind.PARTIAL_DFT_SIGNFLIP, sigma)


def measure(model, f, rng):
    """``y = Phi f + z`` with z ~ N(0, sigma^2) per coordinate.

    For complex data the noise is circular with total variance sigma^2.
    """
    f = np.asarray(f)
    if f.shape != (model.n,):
        raise ShapeMismatch(f"signal must have shape ({model.n},), got {f.shape}")
    clean = model.Phi @ f
    rng = make_rng(rng)
    if np.iscomplexobj(clean):
        z = model.sigma * (rng.standard_normal(model.m) + 1j * rng.standard_normal(model.m)) / np.sqrt(2.0)
    else:
        z = model.sigma * rng.standard_normal(model.m)
    return Measurement(clean + z, f, z)


def relative_noise_level(model, f, sigma):
    """``sqrt(m) sigma / ||Phi f||``."""
    norm = np.linalg.norm(model.Phi @ np.asarray(f))
    if norm == 0:
        raise ZeroSignal("Phi f vanishes")
    return np.sqrt(model.m) * sigma / norm
