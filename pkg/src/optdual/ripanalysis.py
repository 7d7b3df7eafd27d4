"""Recovery guarantees: restricted isometry constants and error-bound constants.

Two sufficient conditions are evaluated here.  Both are stated for sparsity
``s`` and block sizes ``a < b <= 4a``, with ``rho = s/b``:

* the general-dual condition, driven by the product ``B * Btilde`` of the
  upper frame bounds of ``D`` and of the dual used for analysis;
* the canonical-dual condition, driven by the frame-bound ratio
  ``kappa = B/A`` and two free constants ``c1, c2``.

Each evaluator returns a :class:`GuaranteeReport` with the constants
``K1, K2`` and the error-bound constants ``C0 = 2/K1``, ``C1 = 2 K2/K1``.
The condition holds exactly when ``K1 > 0``.
"""

import itertools
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    BadBlockSizes,
    BadParams,
    ConditionFails,
    NegativeBracket,
    NotSorted,
    RhoTooLarge,
    TooLarge,
)
from .numkernel import adjoint

__all__ = [
    "GuaranteeParams",
    "GuaranteeReport",
    "shifting_inequality_holds",
    "rip_constant_bruteforce",
    "drip_constant_bruteforce",
    "sufficient_condition_general",
    "sufficient_condition_canonical",
    "general_condition_sides",
    "canonical_condition_sides",
    "canonical_condition_coefficients",
    "format_condition",
    "rip_order_bound",
    "bisect_threshold",
    "general_margin",
    "canonical_margin",
    "general_threshold",
    "canonical_threshold",
    "best_s_term_tail",
    "error_bound",
]

MAX_SUBSETS = 10**6
DEFAULT_C2 = 1e-3


@dataclass(frozen=True)
class GuaranteeParams:
    """Inputs to the sufficient conditions.

    `B` is the upper frame bound of ``D``; `kappa` is ``B/A``; `BBtilde` is
    ``B`` times the upper bound of the analysis dual (``kappa`` for the
    canonical dual).  `c1=None` selects the optimal ``(1 - rho*kappa)/kappa``.
    """

    s: int
    a: int
    b: int
    delta_s_plus_a: float
    delta_b: float
    kappa: float = 1.0
    B: float = 1.0
    BBtilde: float = 1.0
    c1: float = None
    c2: float = DEFAULT_C2

    def __post_init__(self):
        if self.s < 1 or self.a < 1 or self.b < 1:
            raise BadParams("s, a and b must be positive integers")
        if not 0 < self.b - self.a <= 3 * self.a:
            raise BadParams(f"need 0 < b - a <= 3a, got a={self.a}, b={self.b}")
        for name in ("delta_s_plus_a", "delta_b"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise BadParams(f"{name}={v} outside [0, 1)")
        if self.kappa < 1:
            raise BadParams("kappa = B/A is at least 1")
        if self.B <= 0 or self.BBtilde <= 0:
            raise BadParams("frame bounds must be positive")

    @property
    def rho(self):
        return self.s / self.b

    @classmethod
    def from_frame(cls, frame, s, a, b, delta_s_plus_a, delta_b, dual=None, **kw):
        """Fill the frame-bound fields from a Frame (and optionally a DualFrame)."""
        Btilde = 1.0 / frame.lower if dual is None else dual.upper
        return cls(
            s, a, b, delta_s_plus_a, delta_b,
            kappa=frame.kappa, B=frame.upper, BBtilde=frame.upper * Btilde, **kw,
        )


@dataclass(frozen=True)
class GuaranteeReport:
    condition_holds: bool
    K1: float
    K2: float
    C0: float
    C1: float
    lhs: float
    rhs: float

    def to_dict(self):
        return asdict(self)


def _report(K1, K2, lhs, rhs):
    holds = K1 > 0
    C0 = 2.0 / K1 if holds else math.inf
    C1 = 2.0 * K2 / K1 if holds else math.inf
    return GuaranteeReport(bool(holds), float(K1), float(K2), C0, C1, float(lhs), float(rhs))


# -- Shifting Inequality ------------------------------------------------------


def shifting_inequality_holds(a_block, b_block, c_block, atol=1e-12):
    """Check ``sqrt(sum b^2 + sum c^2) <= (sum a + sum b) / sqrt(q + r)``.

    The three blocks must concatenate to a nonincreasing nonnegative
    sequence, with ``len(a) == len(c) == r`` and ``len(b) == q <= 3r``.
    Returns ``(lhs, rhs, holds)``.
    """
    a, b, c = (np.asarray(x, dtype=float).ravel() for x in (a_block, b_block, c_block))
    r, q = len(a), len(b)
    if r < 1 or q < 1 or len(c) != r or q > 3 * r:
        raise BadBlockSizes(f"need |a| = |c| = r >= 1 and 1 <= |b| <= 3r, got {len(a)}, {q}, {len(c)}")
    seq = np.concatenate([a, b, c])
    if np.any(np.diff(seq) > 0) or seq[-1] < 0:
        raise NotSorted("blocks must form a nonincreasing nonnegative sequence")
    lhs = math.sqrt(float(b @ b + c @ c))
    rhs = float(a.sum() + b.sum()) / math.sqrt(q + r)
    return lhs, rhs, lhs <= rhs + atol


# -- restricted isometry constants ---------------------------------------------


def _check_enumeration(total, s):
    count = math.comb(total, s)
    if count > MAX_SUBSETS:
        raise TooLarge(f"C({total}, {s}) = {count} subsets exceeds {MAX_SUBSETS}")
    return count


def _isometry_deviation(blocks):
    """max over the stack of max(1 - lambda_min, lambda_max - 1) of each Gram matrix."""
    blocks = np.ascontiguousarray(blocks)  # layout affects einsum summation order
    G = np.einsum("kij,kil->kjl", blocks.conj(), blocks)
    w = np.linalg.eigvalsh(G)
    return float(np.max(np.maximum(1.0 - w[:, 0], w[:, -1] - 1.0)))


def _batched(iterable, size=4096):
    it = iter(iterable)
    while chunk := list(itertools.islice(it, size)):
        yield chunk


def rip_constant_bruteforce(Phi, s):
    """Restricted isometry constant of order `s` by enumerating all column subsets.

    Values above 1 are returned as computed, not clamped.
    """
    Phi = np.asarray(Phi)
    n = Phi.shape[1]
    if not 1 <= s <= n:
        raise BadParams(f"need 1 <= s <= {n}")
    _check_enumeration(n, s)
    worst = 0.0
    for chunk in _batched(itertools.combinations(range(n), s)):
        worst = max(worst, _isometry_deviation(np.stack([Phi[:, T] for T in chunk])))
    return worst


def _orthonormal_span(M, rtol=1e-10):
    """Orthonormal basis of the column span of `M`.

    Columns that are already orthonormal are used as they are.
    """
    k = M.shape[1]
    if np.array_equal(adjoint(M) @ M, np.eye(k)):
        return M
    U, sv, _ = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(sv > rtol * sv[0])) if sv.size and sv[0] > 0 else 0
    return U[:, :rank]


def drip_constant_bruteforce(Phi, D, s):
    """D-RIP constant of order `s`: isometry defect of Phi on every span of `s` atoms.

    `D` may be a Frame or a bare matrix.  For each s-subset the span of the
    chosen atoms is orthonormalized and the extreme eigenvalues of
    ``(Phi Q)^* (Phi Q)`` are inspected.
    """
    Phi = np.asarray(Phi)
    D = np.asarray(getattr(D, "D", D))
    d = D.shape[1]
    if Phi.shape[1] != D.shape[0]:
        raise BadParams("Phi and D have incompatible shapes")
    if not 1 <= s <= d:
        raise BadParams(f"need 1 <= s <= {d}")
    _check_enumeration(d, s)
    worst = 0.0
    for chunk in _batched(itertools.combinations(range(d), s)):
        by_rank = {}
        for T in chunk:
            Q = _orthonormal_span(D[:, T])
            if Q.shape[1]:
                by_rank.setdefault(Q.shape[1], []).append(Phi @ Q)
        for blocks in by_rank.values():
            worst = max(worst, _isometry_deviation(np.stack(blocks)))
    return worst


# -- sufficient conditions -----------------------------------------------------


def general_condition_sides(params):
    """Both sides of the general-dual condition ``lhs < rhs``."""
    t = params.rho * params.BBtilde
    lhs = (1 - math.sqrt(t)) ** 2 * params.delta_s_plus_a + t * params.delta_b
    return lhs, 1 - 2 * math.sqrt(t)


def sufficient_condition_general(params):
    """Evaluate the recovery condition for analysis with an arbitrary dual frame."""
    rho, B, BBt = params.rho, params.B, params.BBtilde
    d1, d2 = params.delta_s_plus_a, params.delta_b
    K1 = math.sqrt(1 - d1) - math.sqrt(rho * BBt * (1 - d1)) - math.sqrt(rho * BBt * (1 + d2))
    K2 = math.sqrt(rho * B * (1 - d1)) + math.sqrt(rho * B * (1 + d2))
    lhs, rhs = general_condition_sides(params)
    return _report(K1, K2, lhs, rhs)


def canonical_condition_sides(params):
    """Both sides of the canonical-dual condition ``lhs < rhs`` (the c2 -> 0 limit)."""
    rk, k3 = params.rho * params.kappa, params.rho * params.kappa**3
    lhs = (1 - rk) ** 2 * params.delta_s_plus_a + k3 * params.delta_b
    return lhs, (1 - rk) ** 2 - k3


def sufficient_condition_canonical(params):
    """Evaluate the sharper recovery condition for the canonical dual frame.

    ``c2 = 0`` is accepted as the limit ``c2 -> 0+``: K1 is then finite and
    its sign matches :func:`canonical_condition_sides` exactly, while K2 and
    C1 are infinite.
    """
    rho, kappa, B = params.rho, params.kappa, params.B
    d1, d2 = params.delta_s_plus_a, params.delta_b
    if not rho * kappa < 1:
        raise RhoTooLarge(f"rho * kappa = {rho * kappa:.4g} must be below 1")
    c1 = (1 - rho * kappa) / kappa if params.c1 is None else params.c1
    c2 = params.c2
    if c1 <= 0 or c2 < 0:
        raise BadParams("c1 must be positive and c2 nonnegative")
    bracket = 1 - c1 * kappa / 2 - rho * kappa - c2 * rho * math.sqrt(kappa * B)
    if bracket <= 0:
        raise NegativeBracket(f"1 - c1*kappa/2 - rho*kappa - c2*rho*sqrt(kappa*B) = {bracket:.4g} <= 0")
    scale = 2 * c1 / kappa * (1 - d1)
    K1 = math.sqrt(scale * bracket) - math.sqrt(rho * kappa * (1 + d2))
    noise_term = rho * math.sqrt(kappa * B) / c2 + rho * B if c2 > 0 else math.inf
    K2 = math.sqrt(scale * noise_term) + math.sqrt(rho * B * (1 + d2))
    lhs, rhs = canonical_condition_sides(params)
    return _report(K1, K2, lhs, rhs)


def canonical_condition_coefficients(rho, kappa):
    """Exact coefficients ``(x, y, z)`` of ``x*delta_{s+a} + y*delta_b < z``.

    Rational inputs (ints, Fractions, or strings like ``"1/4"``) give
    rational outputs reduced to the smallest integers.
    """
    rho, kappa = Fraction(rho), Fraction(kappa)
    x = (1 - rho * kappa) ** 2
    y = rho * kappa**3
    z = x - y
    coeffs = (x, y, z)
    denom = math.lcm(*(c.denominator for c in coeffs))
    ints = [int(c * denom) for c in coeffs]
    g = math.gcd(*ints) or 1
    return tuple(Fraction(v, g) for v in ints)


def format_condition(coeffs, names=("delta_2s", "delta_4s")):
    x, y, z = coeffs
    return f"{x}*{names[0]} + {y}*{names[1]} < {z}"


def rip_order_bound(k):
    """Multiplier in ``delta_{k s} <= k * delta_{2s}``."""
    if k < 1:
        raise BadParams("order multiple must be positive")
    return k


def bisect_threshold(k1_of_delta, lo=0.0, hi=1.0, tol=1e-6):
    """Largest delta in [lo, hi] with ``K1(delta) > 0``, for K1 decreasing in delta."""
    if k1_of_delta(lo) <= 0:
        return lo
    if k1_of_delta(hi) > 0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if k1_of_delta(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def general_margin(delta_s_plus_a, delta_b, rho, BBtilde):
    """``(1 - d1)(1 - sqrt t)^2 - t(1 + d2)`` with ``t = rho * BBtilde``.

    Positive exactly when K1 of the general condition is, for deltas in
    [0, 1); unlike K1 it is affine in the deltas and defined for any value.
    """
    t = rho * BBtilde
    if t >= 1:
        return -math.inf
    return (1 - delta_s_plus_a) * (1 - math.sqrt(t)) ** 2 - t * (1 + delta_b)


def canonical_margin(delta_s_plus_a, delta_b, rho, kappa, B=1.0, c1=None, c2=0.0):
    """Affine counterpart of K1 for the canonical condition (same sign on [0, 1))."""
    if not rho * kappa < 1:
        raise RhoTooLarge(f"rho * kappa = {rho * kappa:.4g} must be below 1")
    c1 = (1 - rho * kappa) / kappa if c1 is None else c1
    bracket = 1 - c1 * kappa / 2 - rho * kappa - c2 * rho * math.sqrt(kappa * B)
    if c1 <= 0 or bracket <= 0:
        raise NegativeBracket(f"1 - c1*kappa/2 - rho*kappa - c2*rho*sqrt(kappa*B) = {bracket:.4g} <= 0")
    return 2 * c1 / kappa * (1 - delta_s_plus_a) * bracket - rho * kappa * (1 + delta_b)


def _threshold_hi(margin):
    hi = 1.0
    while margin(hi) > 0:
        hi *= 2
    return hi


def general_threshold(s, a, b, BBtilde=1.0, mult_s_plus_a=1.0, mult_b=1.0, tol=1e-6):
    """Largest common delta with ``delta_{s+a} = m1*delta``, ``delta_b = m2*delta`` passing the condition.

    The substitution is done in the affine form of the condition, so with
    large multipliers the threshold may put ``m2*delta`` above 1 (where the
    constants themselves are undefined); that is the purely algebraic
    reading of the reduction.
    """
    rho = s / b

    def margin(delta):
        return general_margin(mult_s_plus_a * delta, mult_b * delta, rho, BBtilde)

    return bisect_threshold(margin, 0.0, _threshold_hi(margin), tol)


def canonical_threshold(s, a, b, kappa=1.0, B=1.0, c1=None, c2=0.0, mult_s_plus_a=1.0, mult_b=1.0, tol=1e-6):
    """Same as :func:`general_threshold` for the canonical-dual condition."""
    rho = s / b

    def margin(delta):
        return canonical_margin(mult_s_plus_a * delta, mult_b * delta, rho, kappa, B, c1, c2)

    return bisect_threshold(margin, 0.0, _threshold_hi(margin), tol)


# -- error bound ---------------------------------------------------------------


def best_s_term_tail(x, s):
    """l1 norm of `x` after zeroing its `s` largest-magnitude entries.

    Ties keep the lowest index.
    """
    x = np.asarray(x)
    if not 0 <= s <= x.size:
        raise BadParams(f"need 0 <= s <= {x.size}")
    mag = np.abs(x)
    order = np.lexsort((np.arange(x.size), -mag))
    return float(mag[order[s:]].sum())


def error_bound(report, epsilon, tail, s):
    """``C0 * epsilon + C1 * tail / sqrt(s)``."""
    if not report.condition_holds:
        raise ConditionFails("sufficient condition does not hold; no bound available")
    if s < 1:
        raise BadParams("s must be positive")
    return report.C0 * epsilon + report.C1 * tail / math.sqrt(s)
