"""Split Bregman solvers for l1-analysis with an optimized dual frame.

The main entry point is :func:`solve`, which recovers ``f`` from
``y = Phi f + z`` by minimizing ``||Dbar^* f + P g||_1`` over the signal
``f`` and a free null-space term ``P g`` (so, effectively, over every dual
frame of ``D``), subject to ``Phi f = y``.  With ``Mode.CANONICAL`` the
null-space term is pinned to zero and the method is plain l1-analysis with
the canonical dual.

The generic constrained Bregman iteration, in both its original (subgradient)
and simplified (residual add-back) forms, is exposed as
:func:`bregman_constrained` and :func:`bregman_constrained_subgradient`.
"""

import enum
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse.linalg as spla

from . import io
from .errors import NoProgress, NonFinite, NotPositiveDefinite, ShapeMismatch, SingularSystem
from .frames import Projector, canonical_dual
from .numkernel import SPDFactor, adjoint

__all__ = [
    "Mode",
    "SolverConfig",
    "SolverState",
    "RecoveryResult",
    "SplitBregmanSystem",
    "shrink",
    "f_update",
    "step_one_residual",
    "inner_sweep",
    "solve",
    "bregman_distance",
    "BregmanHistory",
    "bregman_constrained",
    "bregman_constrained_subgradient",
]


class Mode(str, enum.Enum):
    OPTIMAL_DUAL = "optimal-dual"
    CANONICAL = "canonical"


LINEAR_SOLVERS = ("auto", "cholesky", "inversion-lemma", "cg")


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of the split Bregman iteration.

    `linear_solver` picks how the step-1 system is handled: ``"cholesky"``
    factors it once, ``"inversion-lemma"`` uses the closed form available
    when both ``Phi Phi^*`` and ``Dbar Dbar^*`` are multiples of the
    identity, ``"cg"`` runs conjugate gradients to relative residual
    `cg_tol`, and ``"auto"`` takes the closed form when it applies and
    Cholesky otherwise.
    """

    mu: float = 1.0
    lam: float = 1.0
    n_inner: int = 30
    n_outer: int = 200
    tol: float = 1e-6
    mode: Mode = Mode.OPTIMAL_DUAL
    linear_solver: str = "auto"
    cg_tol: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not (self.mu > 0 and self.lam > 0):
            raise ValueError("mu and lam must be strictly positive")
        if self.n_inner < 1 or self.n_outer < 1:
            raise ValueError("n_inner and n_outer must be at least 1")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.linear_solver not in LINEAR_SOLVERS:
            raise ValueError(f"linear_solver must be one of {LINEAR_SOLVERS}")


@dataclass
class SolverState:
    f: np.ndarray
    d: np.ndarray
    pg: np.ndarray
    b: np.ndarray
    c: np.ndarray
    k: int = 0

    @classmethod
    def zeros(cls, n, d, m, dtype=float):
        return cls(
            np.zeros(n, dtype), np.zeros(d, dtype), np.zeros(d, dtype), np.zeros(d, dtype), np.zeros(m, dtype)
        )


@dataclass
class RecoveryResult:
    f_hat: np.ndarray
    d_hat: np.ndarray
    residual_history: list = field(default_factory=list)
    error_history: list = None
    outer_iterations_used: int = 0
    converged: bool = False
    tol: float = 0.0

    def to_dict(self):
        return {
            "f_hat": io.vector_to_json(self.f_hat),
            "d_hat": io.vector_to_json(self.d_hat),
            "residual_history": [float(r) for r in self.residual_history],
            "error_history": None if self.error_history is None else [float(e) for e in self.error_history],
            "outer_iterations_used": int(self.outer_iterations_used),
            "converged": bool(self.converged),
            "tol": float(self.tol),
        }

    @classmethod
    def from_dict(cls, obj):
        return cls(
            f_hat=io.vector_from_json(obj["f_hat"]),
            d_hat=io.vector_from_json(obj["d_hat"]),
            residual_history=list(obj["residual_history"]),
            error_history=obj["error_history"],
            outer_iterations_used=obj["outer_iterations_used"],
            converged=obj["converged"],
            tol=obj["tol"],
        )


def shrink(w, threshold):
    """Soft shrinkage, the proximal map of ``threshold * ||.||_1``.

    Works on real and complex arrays; complex entries keep their phase.
    """
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    w = np.asarray(w)
    mag = np.abs(w)
    scale = np.maximum(mag - threshold, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(mag > 0, w * (scale / np.where(mag > 0, mag, 1.0)), 0)
    return out.astype(w.dtype, copy=False) if np.issubdtype(w.dtype, np.inexact) else out


def _scalar_identity_multiple(G, atol=1e-10):
    """Return alpha if ``G == alpha * I`` within `atol`, else None."""
    alpha = np.real(np.trace(G)) / G.shape[0]
    if np.allclose(G, alpha * np.eye(G.shape[0]), rtol=0, atol=atol):
        return float(alpha)
    return None


class SplitBregmanSystem:
    """Iteration-independent pieces of the solver for one ``(Phi, frame)`` pair.

    Holds the canonical dual, the null-space projector and a solver for the
    step-1 system ``(mu Phi^* Phi + lam Dbar Dbar^*) f = rhs``; build it once
    and reuse it across solves with the same operators.
    """

    def __init__(self, Phi, frame, config):
        Phi = np.asarray(Phi)
        if Phi.shape[1] != frame.n:
            raise ShapeMismatch(f"Phi has {Phi.shape[1]} columns but frame has n={frame.n}")
        self.Phi = Phi
        self.frame = frame
        self.config = config
        self.D = frame.D
        self.Dbar = np.ascontiguousarray(canonical_dual(frame).Dtilde)
        self.DbarH = np.ascontiguousarray(adjoint(self.Dbar))
        self.PhiH = np.ascontiguousarray(adjoint(Phi))
        self.projector = Projector(frame, self.Dbar)
        self.dtype = np.result_type(Phi, self.D, float)

        mu, lam = config.mu, config.lam
        PhiPhiH = Phi @ self.PhiH
        DbarDbarH = self.Dbar @ self.DbarH
        beta = _scalar_identity_multiple(PhiPhiH)
        alpha = _scalar_identity_multiple(DbarDbarH)
        closed_form = beta is not None and alpha is not None and alpha > 0

        method = config.linear_solver
        if method == "auto":
            method = "inversion-lemma" if closed_form else "cholesky"
        if method == "inversion-lemma" and not closed_form:
            raise ValueError("inversion-lemma path needs Phi Phi^* and Dbar Dbar^* proportional to I")
        self.method = method

        self.matrix = mu * (self.PhiH @ Phi) + lam * DbarDbarH
        if method == "cholesky":
            try:
                self._factor = SPDFactor(self.matrix)
            except NotPositiveDefinite as exc:
                raise SingularSystem(str(exc)) from exc
        elif method == "inversion-lemma":
            # (mu beta Pi + lam alpha I)^{-1}, Pi = Phi^* Phi / beta
            self._la = lam * alpha
            self._coef = mu / (lam * alpha + mu * beta)
        else:
            n = frame.n
            self._op = spla.LinearOperator((n, n), matvec=lambda v: self.matrix @ v, dtype=self.matrix.dtype)

    def solve_step1(self, rhs, x0=None):
        if self.method == "cholesky":
            return self._factor.solve(rhs)
        if self.method == "inversion-lemma":
            return (rhs - self._coef * (self.PhiH @ (self.Phi @ rhs))) / self._la
        x, info = spla.cg(self._op, rhs, x0=x0, rtol=self.config.cg_tol, atol=0.0, maxiter=10 * len(rhs))
        if info != 0:
            raise SingularSystem(f"conjugate gradients did not converge (info={info})")
        return x

    def analysis(self, f):
        return self.DbarH @ f

    def residual(self, f, y):
        return float(np.linalg.norm(self.Phi @ f - y))

    def initial_state(self, m):
        return SolverState.zeros(self.frame.n, self.frame.d, m, self.dtype)


def f_update(state, system, y):
    """Step 1: minimize the quadratic in ``f`` with everything else frozen."""
    cfg = system.config
    rhs = cfg.mu * (system.PhiH @ (y - state.c)) + cfg.lam * (system.Dbar @ (state.d - state.pg - state.b))
    return system.solve_step1(rhs, x0=state.f)


def step_one_residual(f, state, system, y):
    """Gradient of the step-1 objective at `f` together with the scale of its terms.

    Returns ``(norm_of_gradient, scale)``; ``f`` is optimal when the first
    is small relative to the second.
    """
    cfg = system.config
    g1 = cfg.mu * (system.PhiH @ (system.Phi @ f - y + state.c))
    g2 = cfg.lam * (system.Dbar @ (system.DbarH @ f + state.pg - state.d + state.b))
    rhs = cfg.mu * (system.PhiH @ (y - state.c)) + cfg.lam * (system.Dbar @ (state.d - state.pg - state.b))
    scale = max(np.linalg.norm(rhs), np.linalg.norm(g1), np.linalg.norm(g2), np.finfo(float).tiny)
    return float(np.linalg.norm(g1 + g2)), float(scale)


def inner_sweep(state, system, y):
    """One pass of f -> d -> Pg -> b, each step using the newest iterates."""
    lam = system.config.lam
    f = f_update(state, system, y)
    Df = system.DbarH @ f
    d = shrink(Df + state.pg + state.b, 1.0 / lam)
    if system.config.mode is Mode.OPTIMAL_DUAL:
        pg = system.projector.apply(d - Df - state.b)
    else:
        pg = state.pg
    b = state.b + (Df + pg - d)
    return replace(state, f=f, d=d, pg=pg, b=b)


def _check_finite(state):
    for name in ("f", "d", "pg", "b", "c"):
        if not np.all(np.isfinite(getattr(state, name))):
            raise NonFinite(f"iterate {name} became non-finite at outer iteration {state.k}")


def solve(model, y, frame, config=None, truth=None, system=None, monitor=None):
    """Recover a signal from measurements `y`.

    Parameters
    ----------
    model : SensingModel
        Supplies ``Phi``.  When ``model.sigma > 0`` the outer loop stops on
        ``||Phi f - y|| <= model.epsilon``; otherwise on ``config.tol``.
    y : ndarray
        Measurements.
    frame : Frame
    config : SolverConfig, optional
    truth : ndarray, optional
        If given, the relative error ``||f - f_k|| / ||f||`` is recorded after
        each outer iteration.
    system : SplitBregmanSystem, optional
        Precomputed operators; built from `model`, `frame` and `config` if
        omitted.
    monitor : callable, optional
        Called as ``monitor(before, after, system, y)`` after every inner sweep.

    Returns
    -------
    RecoveryResult
    """
    config = config or SolverConfig()
    if system is None:
        system = SplitBregmanSystem(model.Phi, frame, config)
    y = np.asarray(y)
    if y.shape != (system.Phi.shape[0],):
        raise ShapeMismatch(f"y must have shape ({system.Phi.shape[0]},), got {y.shape}")
    if not np.all(np.isfinite(y)):
        raise NonFinite("measurements contain non-finite values")
    tol = model.epsilon if model.sigma > 0 else config.tol

    state = system.initial_state(len(y))
    residuals, errors = [], None
    if truth is not None:
        truth = np.asarray(truth)
        tnorm = np.linalg.norm(truth)
        tnorm = tnorm if tnorm > 0 else 1.0
        errors = []

    res = system.residual(state.f, y)
    while state.k < config.n_outer and res > tol:
        for _ in range(config.n_inner):
            new = inner_sweep(state, system, y)
            if monitor is not None:
                monitor(state, new, system, y)
            state = new
        state.c = state.c + (system.Phi @ state.f - y)
        state.k += 1
        _check_finite(state)
        res = system.residual(state.f, y)
        residuals.append(res)
        if errors is not None:
            errors.append(float(np.linalg.norm(truth - state.f) / tnorm))

    return RecoveryResult(
        f_hat=state.f,
        d_hat=state.d,
        residual_history=residuals,
        error_history=errors,
        outer_iterations_used=state.k,
        converged=bool(res <= tol),
        tol=float(tol),
    )


def bregman_distance(J, u, v, p):
    """``J(u) - J(v) - <u - v, p>`` for a subgradient `p` of `J` at `v`."""
    u, v, p = (np.asarray(a) for a in (u, v, p))
    return float(J(u) - J(v) - np.real(np.vdot(p, u - v)))


@dataclass
class BregmanHistory:
    iterates: list
    residuals: list
    converged: bool


def bregman_constrained(subsolve, Phi, y, lam, max_iters=1000, tol=1e-10, patience=50):
    """Bregman iteration for ``min J(u) s.t. Phi u = y`` in residual add-back form.

    `subsolve(target, lam)` must return ``argmin_u J(u) + lam/2 ||Phi u - target||^2``.
    Each step solves it with ``target = y - b`` and then sets
    ``b <- b + (Phi u - y)``.  Raises :class:`NoProgress` if the residual
    stays above `tol` without improving for `patience` iterations.
    """
    Phi, y = np.asarray(Phi), np.asarray(y)
    b = np.zeros_like(y, dtype=np.result_type(Phi, y, float))
    iterates, residuals = [], []
    best, stale = np.inf, 0
    for _ in range(max_iters):
        u = np.asarray(subsolve(y - b, lam))
        r = Phi @ u - y
        b = b + r
        res = float(np.linalg.norm(r))
        iterates.append(u)
        residuals.append(res)
        if res <= tol:
            return BregmanHistory(iterates, residuals, True)
        if res < best * (1 - 1e-9):
            best, stale = res, 0
        else:
            stale += 1
            if stale >= patience:
                raise NoProgress(f"residual stuck at {best:.3e} for {patience} iterations")
    return BregmanHistory(iterates, residuals, False)


def bregman_constrained_subgradient(subsolve, Phi, y, lam, max_iters=1000, tol=1e-10):
    """The same iteration written with explicit subgradients.

    `subsolve(p, lam)` must return ``argmin_u J(u) - <u, p> + lam/2 ||Phi u - y||^2``;
    ``p`` is then updated as ``p - lam Phi^* (Phi u - y)``.  Produces the same
    iterates as :func:`bregman_constrained`.
    """
    Phi, y = np.asarray(Phi), np.asarray(y)
    p = np.zeros(Phi.shape[1], dtype=np.result_type(Phi, y, float))
    iterates, residuals = [], []
    for _ in range(max_iters):
        u = np.asarray(subsolve(p, lam))
        r = Phi @ u - y
        p = p - lam * (adjoint(Phi) @ r)
        res = float(np.linalg.norm(r))
        iterates.append(u)
        residuals.append(res)
        if res <= tol:
            return BregmanHistory(iterates, residuals, True)
    return BregmanHistory(iterates, residuals, False)
