"""Fidelity optimization against cat-state targets, sweeps, and the empty-ancilla baseline.

The two-photon scheme is optimized over the beam splitter parameter ``B`` and
the input squeezing ``S`` (dB): a coarse grid scan picks a start, then a
bounded Nelder-Mead simplex refines it. The result is a local optimum that is
only certified against its own grid.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from scsherald.closed_form import HeraldPattern, conditional_state, herald_probability
from scsherald.errors import DomainError
from scsherald.oracle import (
    BeamSplitterParams,
    cascade_herald,
    cascade_params,
    herald_input,
    vacuum_ancilla_herald,
)
from scsherald.states import FockVector, Parity, SCSTarget, fidelity, scs_state, squeeze_from

log = logging.getLogger(__name__)

EVEN_PATTERNS = ((2, 2), (4, 4), (6, 6))
ODD_PATTERNS = ((2, 3), (4, 5), (6, 7))


@dataclass(frozen=True)
class OptimizerSettings:
    """Search box and stopping rules.

    ``B`` defaults to the transmissive range ``T >= R``; widening it lets the
    (2, 2) outcome jump to a reflective optimum near ``B = 1.8`` for small
    amplitudes.
    """

    B_bounds: tuple[float, float] = (0.01, 1.0)
    S_bounds: tuple[float, float] = (0.5, 20.0)
    grid: tuple[int, int] = (40, 40)
    xatol: float = 1e-5
    maxfev: int = 500
    y2_bounds: tuple[float, float] = (0.001, 0.49)
    y2_scan: int = 60
    y2_xatol: float = 1e-9


@dataclass(frozen=True)
class OptimizationResult:
    beta: float
    k1: int
    k2: int
    B_opt: float
    S_opt_dB: float
    fid_max: float
    probability: float
    evaluations: int
    converged: bool
    y2: float = float("nan")
    feasible: bool = True

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GainMetrics:
    beta: float
    k1: int
    k2: int
    fid11: float
    fid00: float
    g_dB: float
    p11: float
    p00: float
    j_dB: float
    baseline_S_dB: float
    flags: tuple[str, ...] = field(default=())


@lru_cache(maxsize=256)
def target_state(beta: float, parity: Parity) -> FockVector:
    return scs_state(SCSTarget.for_parity(beta, parity))


def fidelity_at(k1: int, k2: int, beta: float, B: float, S_dB: float) -> float:
    """Fidelity of the ``(k1, k2)`` heralded state with the matching-parity cat of amplitude ``beta``."""
    p = HeraldPattern(k1, k2)
    c = cascade_params(S_dB, B)
    return fidelity(conditional_state(p, c.y2, B), target_state(beta, p.parity))


def probability_at(k1: int, k2: int, B: float, S_dB: float) -> float:
    return herald_probability(HeraldPattern(k1, k2), cascade_params(S_dB, B))


def _grid_best(k1, k2, beta, s: OptimizerSettings):
    Bs = np.linspace(*s.B_bounds, s.grid[0])
    Ss = np.linspace(*s.S_bounds, s.grid[1])
    best = (-1.0, Bs[0], Ss[0])
    for B in Bs:
        for S in Ss:
            f = fidelity_at(k1, k2, beta, float(B), float(S))
            if f > best[0]:
                best = (f, float(B), float(S))
    steps = (Bs[1] - Bs[0] if Bs.size > 1 else 0.01, Ss[1] - Ss[0] if Ss.size > 1 else 0.1)
    return best, Bs.size * Ss.size, steps


def _simplex(k1, k2, beta, x0, steps, s: OptimizerSettings):
    lo = np.array([s.B_bounds[0], s.S_bounds[0]])
    hi = np.array([s.B_bounds[1], s.S_bounds[1]])
    x0 = np.clip(np.asarray(x0, dtype=float), lo, hi)
    # step inward so the initial simplex stays inside the box
    dx = [steps[0] if x0[0] + steps[0] <= hi[0] else -steps[0],
          steps[1] if x0[1] + steps[1] <= hi[1] else -steps[1]]
    simplex = np.array([x0, x0 + [dx[0], 0.0], x0 + [0.0, dx[1]]])
    res = minimize(
        lambda x: -fidelity_at(k1, k2, beta, float(x[0]), float(x[1])),
        x0,
        method="Nelder-Mead",
        bounds=list(zip(lo, hi)),
        options=dict(initial_simplex=simplex, xatol=s.xatol, fatol=np.inf, maxfev=s.maxfev),
    )
    return -float(res.fun), res.x, int(res.nfev), bool(res.status == 0)


def optimize_fidelity(
    k1: int,
    k2: int,
    beta: float,
    settings: OptimizerSettings = OptimizerSettings(),
    start: tuple[float, float] | None = None,
) -> OptimizationResult:
    """Maximize the fidelity over ``(B, S_dB)`` for a fixed outcome and cat amplitude.

    ``start`` is an optional warm start (e.g. the previous point of a sweep);
    the simplex is also always run from the best grid cell and the better of
    the two runs is kept.
    """
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    (f_grid, B0, S0), n_eval, steps = _grid_best(k1, k2, beta, settings)
    best = _simplex(k1, k2, beta, (B0, S0), steps, settings)
    n_eval += best[2]
    if start is not None and not np.allclose(start, (B0, S0)):
        warm = _simplex(k1, k2, beta, start, steps, settings)
        n_eval += warm[2]
        if warm[0] > best[0]:
            best = warm
    f, x, _, converged = best
    if f < f_grid:
        f, x, converged = f_grid, np.array([B0, S0]), False
    B, S = float(x[0]), float(x[1])
    if not converged:
        log.warning("simplex did not converge for (%d, %d) at beta=%g", k1, k2, beta)
    return OptimizationResult(
        beta=float(beta),
        k1=k1,
        k2=k2,
        B_opt=B,
        S_opt_dB=S,
        fid_max=fidelity_at(k1, k2, beta, B, S),
        probability=probability_at(k1, k2, B, S),
        evaluations=n_eval,
        converged=converged,
        y2=cascade_params(S, B).y2,
    )


def sweep_beta(k1: int, k2: int, betas, settings: OptimizerSettings = OptimizerSettings()):
    """One optimization per amplitude, each warm-started from the previous optimum."""
    out = []
    start = None
    for beta in betas:
        try:
            r = optimize_fidelity(k1, k2, float(beta), settings, start)
        except (DomainError, ArithmeticError) as exc:
            log.error("sweep point (%d, %d, %g) failed: %s", k1, k2, beta, exc)
            r = OptimizationResult(float(beta), k1, k2, *(math.nan,) * 4, 0, False, feasible=False)
        else:
            start = (r.B_opt, r.S_opt_dB)
        out.append(r)
    return out


def _run_parallel(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *t) for t in tasks]
        return [f.result() for f in futures]


def run_sweeps(patterns, betas, settings: OptimizerSettings = OptimizerSettings(), workers: int = 1):
    """Sweeps for several patterns, rows ordered by ``(pattern, beta)`` whatever ``workers`` is.

    Parallelism is across patterns only; the warm-start chain within a
    pattern is sequential, so the output does not depend on scheduling.
    """
    betas = [float(b) for b in betas]
    chunks = _run_parallel(sweep_beta, [(k1, k2, betas, settings) for k1, k2 in patterns], workers)
    return [r for chunk in chunks for r in chunk]


def fidelity00(k1: int, k2: int, beta: float, y2: float) -> float:
    """Fidelity of the empty-ancilla heralded state, a function of ``y2`` alone."""
    out = vacuum_ancilla_herald(y2, k1, k2)
    if out.state is None:
        return 0.0
    return fidelity(out.state, target_state(beta, Parity.of(k1 + k2)))


def optimize_y2(k1: int, k2: int, beta: float, settings: OptimizerSettings = OptimizerSettings()):
    """Best ``y2`` for the empty-ancilla scheme: coarse scan, then bounded Brent in the best bracket."""
    lo, hi = settings.y2_bounds
    grid = np.linspace(lo, hi, settings.y2_scan)
    vals = [fidelity00(k1, k2, beta, float(y)) for y in grid]
    i = int(np.argmax(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(
        lambda y: -fidelity00(k1, k2, beta, float(y)),
        bounds=(a, b),
        method="bounded",
        options=dict(xatol=settings.y2_xatol),
    )
    y2, f = float(res.x), -float(res.fun)
    if vals[i] > f:
        y2, f = float(grid[i]), vals[i]
    return y2, f, grid.size + int(res.nfev), bool(res.success)


def baseline_B(y: float, y2: float) -> float:
    """Invert ``y = y2 (1 + B)^2``."""
    return math.sqrt(y / y2) - 1.0


def baseline00(
    k1: int,
    k2: int,
    beta: float,
    baseline_S_dB: float,
    settings: OptimizerSettings = OptimizerSettings(),
    y2_opt: tuple | None = None,
) -> OptimizationResult:
    """Empty-ancilla reference at fixed input squeezing.

    The fidelity is maximized over ``y2`` alone; ``B`` then follows from the
    configured squeezing through ``y = y2 (1 + B)^2``, and the probability is
    taken from the oracle at that ``(y, B)``. A squeezing too weak to reach
    the optimal ``y2`` is reported as infeasible.
    """
    y2, f, n_eval, ok = y2_opt if y2_opt is not None else optimize_y2(k1, k2, beta, settings)
    y = squeeze_from("S_dB", baseline_S_dB).y
    if not y > y2:
        return OptimizationResult(
            float(beta), k1, k2, math.nan, baseline_S_dB, f, math.nan, n_eval, ok, y2, feasible=False
        )
    B = baseline_B(y, y2)
    psi = herald_input(squeeze_from("y", y), k1 + k2)
    prob = cascade_herald(psi, 0, 0, BeamSplitterParams(B), k1, k2).probability
    return OptimizationResult(float(beta), k1, k2, B, baseline_S_dB, f, prob, n_eval, ok, y2)


def _gain(r11: OptimizationResult, r00: OptimizationResult) -> GainMetrics:
    flags = []
    g = 10.0 * math.log10(r11.fid_max / r00.fid_max) if r00.fid_max > 0 else math.inf
    if not r00.feasible:
        flags.append("infeasible-baseline")
        j = math.nan
    elif r00.probability == 0.0:
        flags.append("vanishing-baseline-probability")
        j = math.inf
    else:
        j = 10.0 * math.log10(r11.probability / r00.probability)
    if not r11.converged:
        flags.append("not-converged")
    return GainMetrics(
        r11.beta, r11.k1, r11.k2, r11.fid_max, r00.fid_max, g,
        r11.probability, r00.probability, j, r00.S_opt_dB, tuple(flags),
    )


def _pattern_gains(k1, k2, betas, baselines, settings, sweep=None):
    sweep = sweep if sweep is not None else sweep_beta(k1, k2, betas, settings)
    rows = []
    for r11 in sweep:
        y2_opt = optimize_y2(k1, k2, r11.beta, settings)
        for S in baselines:
            rows.append(_gain(r11, baseline00(k1, k2, r11.beta, S, settings, y2_opt)))
    return rows


def gain_curves(
    patterns,
    betas,
    baselines=(20.0,),
    settings: OptimizerSettings = OptimizerSettings(),
    workers: int = 1,
    sweeps: dict | None = None,
) -> list[GainMetrics]:
    """Fidelity and probability gains (dB) of the two-photon scheme over the empty-ancilla one.

    ``sweeps`` may map a pattern to an already computed ``sweep_beta`` result.
    Rows are ordered by ``(pattern, beta, baseline)``.
    """
    betas = [float(b) for b in betas]
    baselines = [float(b) for b in baselines]
    sweeps = sweeps or {}
    tasks = [(k1, k2, betas, baselines, settings, sweeps.get((k1, k2))) for k1, k2 in patterns]
    chunks = _run_parallel(_pattern_gains, tasks, workers)
    return [r for chunk in chunks for r in chunk]
