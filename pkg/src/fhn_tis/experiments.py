"""Sweep experiments: tonic-spiking heatmaps and initial-condition grids.

Experiment 1 sweeps (kappa, epsilon) panels per amplitude pair, driving the
averaged system with a cosine envelope of beat kappa*epsilon from the standard
start (0, w_e(1)) and counting spikes per cell; the slow-limit threshold
kappa* is attached to each panel as the analytic overlay. Experiment 2 fixes
one (kappa, epsilon) cell and sweeps a square of initial conditions, comparing
the observed counts against the arc-based prediction.

Cells are pure, independent work items scheduled over a thread pool (the
compiled kernels release the GIL); results are assembled by index, so reruns
are bit-identical regardless of scheduling.
"""
from __future__ import annotations

import dataclasses
import enum
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import _kernels
from ._version import __version__
from .errors import DomainError, RegionPreconditionError
from .frozen import classify_region, equilibrium
from .model import Params, State
from .sim import DEFAULT_CONFIG, FixedRK4, IntegratorConfig
from .singular import escape_cycle_check, kappa_threshold, predicts_no_tonic


class Prediction(enum.Enum):
    """Slow-limit verdict for one parameter point."""

    NO_TONIC = "no_tonic"
    TONIC_HEURISTIC = "tonic_heuristic"
    INDETERMINATE = "indeterminate"


@dataclasses.dataclass(frozen=True)
class AtZeroWe1:
    """Start every cell at (0, w_e(1)), which always fires at least once."""


@dataclasses.dataclass(frozen=True)
class ExplicitIC:
    state: State


@dataclasses.dataclass(frozen=True)
class SweepSpec:
    """Settings for one heatmap run; ranges are (min, max, step), inclusive."""

    amplitude_list: tuple
    kappa_range: tuple
    epsilon_range: tuple
    t_final: float
    beta: float
    gamma: float
    ic_policy: Union[AtZeroWe1, ExplicitIC] = AtZeroWe1()
    integrator: IntegratorConfig = DEFAULT_CONFIG

    def __post_init__(self):
        if not self.amplitude_list:
            raise DomainError("amplitude_list must be nonempty")
        for rng, name in ((self.kappa_range, "kappa_range"),
                          (self.epsilon_range, "epsilon_range")):
            lo, hi, step = rng
            if step <= 0.0 or hi < lo or lo <= 0.0:
                raise DomainError(f"{name} must satisfy 0 < min <= max, step > 0")
        if self.t_final <= 0.0:
            raise DomainError("t_final must be > 0")


@dataclasses.dataclass(frozen=True, eq=False)
class SweepResult:
    """One heatmap panel: spike counts over the (kappa, epsilon) grid."""

    A: float
    B: float
    kappa_values: np.ndarray
    epsilon_values: np.ndarray
    counts: np.ndarray          # [i_kappa, j_epsilon]; -1 marks a diverged cell
    tonic: np.ndarray
    diverged: np.ndarray
    kappa_star: float           # NaN when the region precondition fails
    manifest: dict


@dataclasses.dataclass(frozen=True)
class GridSpec:
    """Settings for one initial-condition grid."""

    A: float
    B: float
    beta: float
    gamma: float
    kappa: float
    epsilon: float
    t_final: float = 1000.0
    grid_points: int = 21
    extent: float = 2.0
    integrator: IntegratorConfig = DEFAULT_CONFIG

    def __post_init__(self):
        if self.kappa <= 0.0 or self.epsilon <= 0.0 or self.t_final <= 0.0:
            raise DomainError("kappa, epsilon, t_final must be > 0")
        if self.grid_points < 2 or self.extent <= 0.0:
            raise DomainError("grid_points must be >= 2 and extent > 0")


@dataclasses.dataclass(frozen=True, eq=False)
class ICGridResult:
    """Spike counts over a square of starts, with the slow-limit prediction."""

    settings: GridSpec
    v0_values: np.ndarray
    w0_values: np.ndarray
    counts: np.ndarray          # [i_v0, j_w0]; -1 marks a diverged cell
    diverged: np.ndarray
    prediction: Prediction
    manifest: dict


def _axis(rng: tuple) -> np.ndarray:
    lo, hi, step = rng
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def _fixed_dt(cfg: IntegratorConfig) -> float:
    # grid cells run on the fixed-step counting kernel; an adaptive request
    # falls back to its max_dt as the fixed step
    if isinstance(cfg.method, FixedRK4):
        return cfg.method.dt
    return cfg.method.max_dt


def _pool_size() -> int:
    return max(1, os.cpu_count() or 1)


def evaluate_prediction(p: Params, kappa: float) -> Prediction:
    """Combined slow-limit verdict; the escape construction takes precedence."""
    try:
        if escape_cycle_check(p, kappa).holds:
            return Prediction.TONIC_HEURISTIC
        if predicts_no_tonic(p, kappa):
            return Prediction.NO_TONIC
    except RegionPreconditionError:
        return Prediction.INDETERMINATE
    return Prediction.INDETERMINATE


def _warm_kernel():
    _kernels.cosine_cell_spikes(0.3, 0.3, 0.8, 0.5, 0.1, 0.1, 0.0, 0.0,
                                1.0, 0.5, 0.0, -0.5)


def run_experiment1(spec: SweepSpec) -> list:
    """Run one heatmap panel per amplitude pair in the spec."""
    kappas = _axis(spec.kappa_range)
    epsilons = _axis(spec.epsilon_range)
    dt = _fixed_dt(spec.integrator)
    _warm_kernel()
    results = []
    for (A, B) in spec.amplitude_list:
        t_start = time.perf_counter()
        p_geom = Params(A=A, B=B, beta=spec.beta, gamma=spec.gamma, epsilon=1.0)
        region = classify_region(p_geom)
        region_ok = region.equilibria_left_of_folds
        try:
            kstar = kappa_threshold(p_geom)
        except RegionPreconditionError:
            kstar = math.nan
        eq_top = equilibrium(p_geom, 1.0)
        eq_bot = equilibrium(p_geom, -1.0)
        if isinstance(spec.ic_policy, ExplicitIC):
            v0, w0 = spec.ic_policy.state
        else:
            v0, w0 = 0.0, eq_top.w_e
        arm = eq_bot.v_e / 2.0
        nk, ne = kappas.size, epsilons.size
        counts = np.zeros((nk, ne), dtype=np.int64)
        diverged = np.zeros((nk, ne), dtype=bool)

        def cell(idx):
            i, j = divmod(idx, ne)
            eta = kappas[i] * epsilons[j]
            cnt, ok, _, _ = _kernels.cosine_cell_spikes(
                A, B, spec.beta, spec.gamma, epsilons[j], eta, v0, w0,
                spec.t_final, dt, 0.0, arm)
            return idx, cnt, ok

        with ThreadPoolExecutor(max_workers=_pool_size()) as pool:
            for idx, cnt, ok in pool.map(cell, range(nk * ne), chunksize=16):
                i, j = divmod(idx, ne)
                if ok:
                    counts[i, j] = cnt
                else:
                    counts[i, j] = -1
                    diverged[i, j] = True
        manifest = {
            "A": A, "B": B, "beta": spec.beta, "gamma": spec.gamma,
            "t_final": spec.t_final, "dt": dt,
            "ic": [float(v0), float(w0)], "arm_level": arm, "fire_level": 0.0,
            "kappa_range": list(spec.kappa_range),
            "epsilon_range": list(spec.epsilon_range),
            "grid_shape": [int(nk), int(ne)],
            "kappa_star": kstar,
            "region_ok": bool(region_ok),
            "tool_version": __version__,
            "numba": _kernels.NUMBA_ENABLED,
            "wall_time_s": time.perf_counter() - t_start,
        }
        results.append(SweepResult(
            A=A, B=B, kappa_values=kappas.copy(), epsilon_values=epsilons.copy(),
            counts=counts, tonic=(counts >= 2), diverged=diverged,
            kappa_star=kstar, manifest=manifest))
    return results


def run_experiment2(settings_list) -> list:
    """Run one initial-condition grid per settings entry."""
    _warm_kernel()
    results = []
    for gs in settings_list:
        t_start = time.perf_counter()
        p = Params(A=gs.A, B=gs.B, beta=gs.beta, gamma=gs.gamma, epsilon=gs.epsilon)
        prediction = evaluate_prediction(p, gs.kappa)
        eta = gs.kappa * gs.epsilon
        arm = equilibrium(p, -1.0).v_e / 2.0
        dt = _fixed_dt(gs.integrator)
        axis = np.linspace(-gs.extent, gs.extent, gs.grid_points)
        n = gs.grid_points
        counts = np.zeros((n, n), dtype=np.int64)
        diverged = np.zeros((n, n), dtype=bool)

        def cell(idx):
            i, j = divmod(idx, n)
            cnt, ok, _, _ = _kernels.cosine_cell_spikes(
                gs.A, gs.B, gs.beta, gs.gamma, gs.epsilon, eta,
                axis[i], axis[j], gs.t_final, dt, 0.0, arm)
            return idx, cnt, ok

        with ThreadPoolExecutor(max_workers=_pool_size()) as pool:
            for idx, cnt, ok in pool.map(cell, range(n * n), chunksize=16):
                i, j = divmod(idx, n)
                if ok:
                    counts[i, j] = cnt
                else:
                    counts[i, j] = -1
                    diverged[i, j] = True
        manifest = {
            "A": gs.A, "B": gs.B, "beta": gs.beta, "gamma": gs.gamma,
            "kappa": gs.kappa, "epsilon": gs.epsilon, "eta": eta,
            "t_final": gs.t_final, "dt": dt,
            "grid_points": n, "extent": gs.extent,
            "arm_level": arm, "fire_level": 0.0,
            "prediction": prediction.value,
            "tool_version": __version__,
            "numba": _kernels.NUMBA_ENABLED,
            "wall_time_s": time.perf_counter() - t_start,
        }
        results.append(ICGridResult(
            settings=gs, v0_values=axis.copy(), w0_values=axis.copy(),
            counts=counts, diverged=diverged, prediction=prediction,
            manifest=manifest))
    return results


def desk_sweep_spec(beta: float = 0.8, gamma: float = 0.5) -> SweepSpec:
    """Reduced grid for quick runs: 2 panels, 4x coarser axes, half horizon."""
    return SweepSpec(
        amplitude_list=((0.15, 0.15), (0.3, 0.3)),
        kappa_range=(0.8, 12.0, 0.8),
        epsilon_range=(0.02, 0.2, 0.02),
        t_final=1000.0,
        beta=beta, gamma=gamma)


def paper_sweep_spec(beta: float = 0.8, gamma: float = 0.5) -> SweepSpec:
    """Full-scale sweep: 8 amplitude panels, 60 x 41 cells each, T=2000."""
    amps = tuple((round(0.15 + 0.05 * k, 2),) * 2 for k in range(8))
    return SweepSpec(
        amplitude_list=amps,
        kappa_range=(0.2, 12.0, 0.2),
        epsilon_range=(0.005, 0.205, 0.005),
        t_final=2000.0,
        beta=beta, gamma=gamma)


def desk_grid_specs() -> list:
    """Reduced initial-condition grids for the two headline cells."""
    return [
        GridSpec(A=0.3, B=0.3, beta=0.8, gamma=0.5, kappa=1.0, epsilon=0.02,
                 t_final=500.0, grid_points=11),
        GridSpec(A=0.3, B=0.3, beta=0.8, gamma=0.5, kappa=2.0, epsilon=0.02,
                 t_final=500.0, grid_points=11),
    ]


def paper_grid_specs() -> list:
    """Full-scale grid cells: two parameter rows by three kappa columns."""
    out = []
    for kappa in (1.0, 2.0, 2.5):
        out.append(GridSpec(A=0.3, B=0.3, beta=0.8, gamma=0.5,
                            kappa=kappa, epsilon=0.02, t_final=1000.0))
    for kappa in (1.0, 2.0, 2.5):
        out.append(GridSpec(A=0.3, B=0.3, beta=0.7, gamma=0.6,
                            kappa=kappa, epsilon=0.1, t_final=1000.0))
    return out


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


def save_sweep_results(results, out_dir) -> list:
    """Write per-panel CSVs, a gnuplot matrix per panel, redline.txt, manifest.json.

    Returns the list of written paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    redline_lines = []
    manifests = []
    for res in results:
        stem = f"panel_{res.A:g}_{res.B:g}"
        csv_path = out / f"{stem}.csv"
        with open(csv_path, "w") as fh:
            for k, v in res.manifest.items():
                fh.write(f"# {k}={_fmt(v)}\n")
            fh.write("kappa,epsilon,count,tonic\n")
            for i, kap in enumerate(res.kappa_values):
                for j, eps in enumerate(res.epsilon_values):
                    fh.write(f"{float(kap)!r},{float(eps)!r},"
                             f"{int(res.counts[i, j])},{int(res.tonic[i, j])}\n")
        written.append(csv_path)
        mat_path = out / f"{stem}_matrix.txt"
        with open(mat_path, "w") as fh:
            fh.write("# rows: epsilon (ascending); cols: kappa (ascending); "
                     "values: spike count\n")
            for j in range(res.epsilon_values.size):
                fh.write(" ".join(str(int(c)) for c in res.counts[:, j]))
                fh.write("\n")
        written.append(mat_path)
        redline_lines.append(f"{res.A!r} {res.B!r} {res.kappa_star!r}\n")
        manifests.append(res.manifest)
    red_path = out / "redline.txt"
    with open(red_path, "w") as fh:
        fh.writelines(redline_lines)
    written.append(red_path)
    man_path = out / "manifest.json"
    with open(man_path, "w") as fh:
        json.dump({"panels": manifests}, fh, indent=2)
    written.append(man_path)
    return written


def save_grid_results(results, out_dir) -> list:
    """Write one CSV per initial-condition grid plus manifest.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    manifests = []
    for res in results:
        gs = res.settings
        stem = f"grid_{gs.A:g}_{gs.B:g}_kappa{gs.kappa:g}_eps{gs.epsilon:g}"
        csv_path = out / f"{stem}.csv"
        with open(csv_path, "w") as fh:
            for k, v in res.manifest.items():
                fh.write(f"# {k}={_fmt(v)}\n")
            fh.write("v0,w0,count\n")
            for i, v0 in enumerate(res.v0_values):
                for j, w0 in enumerate(res.w0_values):
                    fh.write(f"{float(v0)!r},{float(w0)!r},"
                             f"{int(res.counts[i, j])}\n")
        written.append(csv_path)
        manifests.append(res.manifest)
    man_path = out / "manifest.json"
    with open(man_path, "w") as fh:
        json.dump({"grids": manifests}, fh, indent=2)
    written.append(man_path)
    return written
