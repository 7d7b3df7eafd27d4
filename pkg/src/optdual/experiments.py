"""Seeded recovery experiments: single runs, convergence traces and sweeps.

Every trial derives its randomness from ``base_seed + trial_index``: the
sensing matrix is drawn first, then the sparse signal, then the noise, all
from one PCG64 stream.  Both solver modes see exactly the same
``(Phi, f, y)``.  Tables are returned as lists of dicts sorted by their key
columns, so writing them is deterministic regardless of how trials were
scheduled.
"""

import csv
import dataclasses
import functools
import io as _io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bregman import Mode, SolverConfig, solve
from .errors import ConfigError
from .frames import gabor_frame, random_sparse_signal, spikes_fourier_frame
from .numkernel import make_rng
from .ripanalysis import (
    GuaranteeParams,
    canonical_condition_coefficients,
    canonical_threshold,
    format_condition,
    general_threshold,
    rip_order_bound,
    sufficient_condition_canonical,
    sufficient_condition_general,
)
from .sensing import gaussian_sensing, measure, partial_dft_signflip_sensing

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "build_frame",
    "run_trial",
    "run_recover",
    "run_convergence",
    "run_noise_sweep",
    "run_sparsity_sweep",
    "run_theory",
    "remarks_report",
    "write_csv",
    "gnuplot_script",
    "DEFAULT_NOISE_LEVELS",
]

log = logging.getLogger(__name__)

DICTIONARIES = ("gabor", "spikes_fourier")
SENSING = ("gaussian", "partial_dft_signflip")
DEFAULT_NOISE_LEVELS = tuple(float(v) for v in np.logspace(-3, math.log10(0.3), 10))
DEFAULT_RHO_VALUES = (0.1, 0.2, 0.3, 0.4, 0.5)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to replay an experiment; defaults reproduce the Gabor setup."""

    dictionary: str = "gabor"
    n: int = 128
    oversampling: int = 20
    window_width: float = None
    sensing: str = "gaussian"
    m: int = 32
    s: int = 7
    sigma: float = 0.0
    mu: float = 1.0
    lam: float = 1.0
    n_inner: int = 30
    n_outer: int = 200
    tol: float = 1e-6
    mode: str = "optimal-dual"
    trials: int = 5
    base_seed: int = 0
    noise_levels: tuple = DEFAULT_NOISE_LEVELS
    rho_values: tuple = DEFAULT_RHO_VALUES
    workers: int = 1

    def __post_init__(self):
        if self.dictionary not in DICTIONARIES:
            raise ConfigError(f"dictionary must be one of {DICTIONARIES}")
        if self.sensing not in SENSING:
            raise ConfigError(f"sensing must be one of {SENSING}")
        if not 1 <= self.m <= self.n:
            raise ConfigError("need 1 <= m <= n")
        if self.s < 0:
            raise ConfigError("s must be nonnegative")
        if self.sigma < 0:
            raise ConfigError("sigma must be nonnegative")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if any(v < 0 for v in self.noise_levels):
            raise ConfigError("noise levels must be nonnegative")
        try:
            Mode(self.mode)
            self.solver_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        object.__setattr__(self, "noise_levels", tuple(float(v) for v in self.noise_levels))
        object.__setattr__(self, "rho_values", tuple(float(v) for v in self.rho_values))

    @classmethod
    def example2(cls, **overrides):
        """The spikes+Fourier setup."""
        base = dict(dictionary="spikes_fourier", tol=1e-12, n_outer=100, n_inner=15)
        base.update(overrides)
        return cls(**base)

    @classmethod
    def from_dict(cls, obj):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(obj) - names
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            return cls(**obj)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fp:
                obj = json.load(fp)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(obj)

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["noise_levels"] = list(self.noise_levels)
        d["rho_values"] = list(self.rho_values)
        return d

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)

    def solver_config(self, mode=None):
        return SolverConfig(
            mu=self.mu, lam=self.lam, n_inner=self.n_inner, n_outer=self.n_outer,
            tol=self.tol, mode=Mode(mode or self.mode),
        )

    def seed_for(self, trial_index):
        return self.base_seed + trial_index


@dataclass
class TrialRecord:
    trial_index: int
    seed: int
    mode: str
    relative_error: float
    residual_history: list
    error_history: list
    outer_iterations: int
    converged: bool
    s: int
    sigma: float
    wall_time: float = field(default=0.0, compare=False)

    def to_dict(self, with_time=False):
        d = dataclasses.asdict(self)
        if not with_time:
            d.pop("wall_time")
        return d


@functools.lru_cache(maxsize=8)
def _cached_frame(kind, n, oversampling, window_width):
    if kind == "gabor":
        return gabor_frame(n, oversampling, window_width)
    return spikes_fourier_frame(n)


def build_frame(config):
    return _cached_frame(config.dictionary, config.n, config.oversampling, config.window_width)


def _sensing(config, rng):
    if config.sensing == "gaussian":
        return gaussian_sensing(config.m, config.n, rng)
    return partial_dft_signflip_sensing(config.m, config.n, rng)


def _draw_instance(config, trial_index, s, noise_level=None):
    """Sensing model, signal and measurement for one trial.

    With `noise_level` given, sigma is chosen so that
    ``sqrt(m) sigma / ||Phi f|| == noise_level``; otherwise ``config.sigma``.
    """
    frame = build_frame(config)
    rng = make_rng(config.seed_for(trial_index))
    model = _sensing(config, rng)
    signal = random_sparse_signal(frame, s, rng)
    sigma = config.sigma
    if noise_level is not None:
        clean = np.linalg.norm(model.Phi @ signal.f)
        sigma = noise_level * clean / math.sqrt(config.m) if clean > 0 else 0.0
    model = model.with_noise(sigma)
    meas = measure(model, signal.f, rng)
    return frame, model, signal, meas


def _solve_modes(config, frame, model, signal, meas, modes):
    out = {}
    for mode in modes:
        t0 = time.perf_counter()
        res = solve(model, meas.y, frame, config.solver_config(mode), truth=signal.f)
        out[mode] = (res, time.perf_counter() - t0)
    return out


def run_trial(config, trial_index, modes=None, s=None, noise_level=None):
    """Run every mode in `modes` on one seeded instance; returns a list of TrialRecords."""
    modes = tuple(modes or (config.mode,))
    s = config.s if s is None else s
    frame, model, signal, meas = _draw_instance(config, trial_index, s, noise_level)
    records = []
    for mode, (res, elapsed) in _solve_modes(config, frame, model, signal, meas, modes).items():
        fnorm = np.linalg.norm(signal.f)
        err = float(np.linalg.norm(signal.f - res.f_hat) / fnorm) if fnorm > 0 else float(np.linalg.norm(res.f_hat))
        records.append(
            TrialRecord(
                trial_index, config.seed_for(trial_index), mode, err,
                res.residual_history, res.error_history, res.outer_iterations_used, res.converged,
                s, float(model.sigma), elapsed,
            )
        )
    return records


def _trial_job(args):
    config, trial_index, modes, s, key, noise_level = args
    return key, run_trial(config, trial_index, modes, s, noise_level)


def _map_trials(config, jobs):
    """Run jobs ``(config, trial, modes, s, key, noise_level)``; return ``[(key, record)]`` sorted."""
    workers = max(1, min(config.workers or os.cpu_count() or 1, len(jobs)))
    if workers == 1:
        results = [_trial_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_job, jobs))
    flat = [(key, rec) for key, recs in results for rec in recs]
    flat.sort(key=lambda kr: (kr[0], kr[1].trial_index, kr[1].mode))
    return flat


def run_recover(config, trial_index=0):
    """One seeded recovery with ``config.mode``; returns ``(record, RecoveryResult, frame, model)``."""
    frame, model, signal, meas = _draw_instance(config, trial_index, config.s)
    (res, elapsed), = _solve_modes(config, frame, model, signal, meas, (config.mode,)).values()
    fnorm = np.linalg.norm(signal.f)
    err = float(np.linalg.norm(signal.f - res.f_hat) / fnorm) if fnorm > 0 else 0.0
    record = TrialRecord(
        trial_index, config.seed_for(trial_index), config.mode, err, res.residual_history,
        res.error_history, res.outer_iterations_used, res.converged, config.s, float(model.sigma), elapsed,
    )
    return record, res, frame, model


BOTH_MODES = (Mode.OPTIMAL_DUAL.value, Mode.CANONICAL.value)


def run_convergence(config, trial_index=0):
    """Relative error per outer iteration for both modes on one instance.

    Rows: ``iteration, error_optimal_dual, error_canonical, seed``.  A mode
    that stopped early leaves its later cells empty.
    """
    if config.sigma > 0:
        log.warning("convergence traces are meant for noiseless data; sigma=%g", config.sigma)
    recs = {r.mode: r for r in run_trial(config, trial_index, BOTH_MODES)}
    od, ca = recs[BOTH_MODES[0]].error_history, recs[BOTH_MODES[1]].error_history
    rows = []
    for k in range(max(len(od), len(ca))):
        rows.append({
            "iteration": k + 1,
            "error_optimal_dual": od[k] if k < len(od) else "",
            "error_canonical": ca[k] if k < len(ca) else "",
            "seed": config.seed_for(trial_index),
        })
    return rows


def _summaries(keyed, key_name, modes):
    groups = {}
    for key, rec in keyed:
        groups.setdefault(key, {}).setdefault(rec.mode, []).append(rec.relative_error)
    rows = []
    for key in sorted(groups):
        row = {key_name: key}
        for mode in modes:
            errs = np.asarray(groups[key].get(mode, []), dtype=float)
            tag = mode.replace("-", "_")
            row[f"mean_{tag}"] = float(errs.mean()) if errs.size else ""
            row[f"std_{tag}"] = float(errs.std()) if errs.size else ""
        rows.append(row)
    return rows


def run_noise_sweep(config, noise_levels=None, modes=BOTH_MODES):
    """Mean/std relative error against relative noise level.

    Returns ``(summary_rows, trial_rows)``.  Summary rows carry
    ``base_seed`` and ``trials``; trial rows carry their own seed.
    """
    levels = tuple(float(v) for v in (config.noise_levels if noise_levels is None else noise_levels))
    if any(v < 0 for v in levels):
        raise ConfigError("noise levels must be nonnegative")
    modes = tuple(modes)
    jobs = [(config, t, modes, config.s, lv, lv) for lv in levels for t in range(config.trials)]
    keyed = _map_trials(config, jobs)
    rows = _summaries(keyed, "noise_level", modes)
    for row in rows:
        row.update(base_seed=config.base_seed, trials=config.trials)
    return rows, [dict(rec.to_dict(), noise_level=lv) for lv, rec in keyed]


def sparsity_for(config, rho):
    s = int(math.floor(rho * config.m + 0.5))
    if s < 1:
        raise ConfigError(f"rho={rho} gives sparsity 0 for m={config.m}")
    return s


def run_sparsity_sweep(config, rho_values=None, modes=BOTH_MODES):
    """Mean/std relative error against relative sparsity ``rho = s/m`` (noiseless)."""
    rhos = tuple(float(v) for v in (config.rho_values if rho_values is None else rho_values))
    svals = {rho: sparsity_for(config, rho) for rho in rhos}
    modes = tuple(modes)
    jobs = [(config, t, modes, svals[rho], rho, None) for rho in rhos for t in range(config.trials)]
    keyed = _map_trials(config, jobs)
    rows = _summaries(keyed, "rho", modes)
    for row in rows:
        row.update(s=svals[row["rho"]], base_seed=config.base_seed, trials=config.trials)
    return rows, [dict(rec.to_dict(), rho=rho) for rho, rec in keyed]


# -- theory --------------------------------------------------------------------


def run_theory(params):
    """Evaluate a sufficient condition described by a plain dict.

    Keys: ``condition`` (``"canonical"`` or ``"general"``), ``s``, ``a``,
    ``b``, ``delta_s_plus_a``, ``delta_b`` and optionally ``kappa``, ``B``,
    ``BBtilde``, ``c1``, ``c2``.  Optional ``threshold_multipliers``
    ``[m1, m2]`` also reports the largest common delta with
    ``delta_{s+a} = m1*delta`` and ``delta_b = m2*delta`` that passes.
    """
    params = dict(params)
    kind = params.pop("condition", "canonical")
    mults = params.pop("threshold_multipliers", None)
    try:
        gp = GuaranteeParams(**params)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    if kind == "canonical":
        report = sufficient_condition_canonical(gp)
    elif kind == "general":
        report = sufficient_condition_general(gp)
    else:
        raise ConfigError("condition must be 'canonical' or 'general'")
    out = {"condition": kind, "params": dataclasses.asdict(gp), "rho": gp.rho, "report": report.to_dict()}
    if mults is not None:
        m1, m2 = mults
        if kind == "canonical":
            out["threshold"] = canonical_threshold(
                gp.s, gp.a, gp.b, gp.kappa, gp.B, gp.c1, 0.0, m1, m2
            )
        else:
            out["threshold"] = general_threshold(gp.s, gp.a, gp.b, gp.BBtilde, m1, m2)
    return out


def remarks_report():
    """Reproduce the worked numbers for Parseval and general frames."""
    s = 1
    remark1 = general_threshold(s, 3 * s, 12 * s, BBtilde=1.0, mult_s_plus_a=rip_order_bound(4),
                                mult_b=rip_order_bound(12))
    remark2 = {
        "kappa=1": general_threshold(s, 7 * s, 8 * s, BBtilde=1.0),
        "kappa=sqrt2": general_threshold(s, 7 * s, 8 * s, BBtilde=math.sqrt(2.0)),
    }
    coeffs = canonical_condition_coefficients("1/4", 1)
    constants = {}
    for label, delta in (("delta=1/4", 0.25), ("delta=1/8", 0.125)):
        p = GuaranteeParams(s, s, 4 * s, delta, delta, kappa=1.0, B=1.0, BBtilde=1.0, c1=29 / 40, c2=0.1)
        r = sufficient_condition_canonical(p)
        constants[label] = {"C0": r.C0, "C1": r.C1, "K1": r.K1, "K2": r.K2}
    return {
        "parseval_general_dual_delta_2s_threshold": remark1,
        "general_frame_delta_8s_thresholds": remark2,
        "parseval_canonical_condition": format_condition(coeffs),
        "parseval_canonical_condition_threshold_equal_deltas": canonical_threshold(s, s, 4 * s, c2=0.0),
        "parseval_canonical_constants": constants,
    }


# -- output --------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def write_csv(path, rows, columns=None):
    """Write dict rows with a fixed column order; floats use ``repr`` for exact replay."""
    columns = columns or (list(rows[0]) if rows else [])
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c, "")) for c in columns])
    with open(path, "w", newline="") as fp:
        fp.write(buf.getvalue())


def gnuplot_script(csv_name, x_col, y_cols, xlabel, ylabel, logy=False):
    """A small gnuplot script plotting columns of `csv_name`."""
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
    ]
    if logy:
        lines.append("set logscale y")
    plots = [f"'{csv_name}' using {x_col}:{y} with linespoints" for y in y_cols]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"
