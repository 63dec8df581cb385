"""User-runnable consistency suites: closed forms against the brute-force oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from scsherald import closed_form, oracle
from scsherald.states import squeeze_from

ORACLE_GRID = dict(k=range(1, 5), y=(0.1, 0.2, 0.3), B=(0.3, 1.0, 2.5))
G_GRID = dict(k=range(1, 7), y2=(0.05, 0.15, 0.3), B=(0.2, 1.0, 3.0))


@dataclass
class SuiteResult:
    name: str
    tol: float
    max_residual: float = 0.0
    cases: int = 0
    failure: dict | None = field(default=None)

    @property
    def passed(self) -> bool:
        return self.failure is None

    def record(self, residual: float, **case) -> None:
        self.cases += 1
        if not residual <= self.max_residual:
            self.max_residual = residual
        if self.failure is None and not residual < self.tol:
            self.failure = dict(case, residual=residual)


def convention_lock(tol: float = 1e-15) -> SuiteResult:
    """One-photon block must read ``|1,0> -> t|1,0> - r|0,1>``, ``|0,1> -> r|1,0> + t|0,1>``."""
    res = SuiteResult("convention-lock", tol)
    for B in (0.3, 1.0, 2.5):
        bs = oracle.BeamSplitterParams(B)
        a, b = oracle.bs_apply(1, 0, bs), oracle.bs_apply(0, 1, bs)
        got = np.array([a[1, 0], a[0, 1], b[1, 0], b[0, 1]])
        want = np.array([bs.t, -bs.r, bs.r, bs.t])
        res.record(float(np.max(np.abs(got - want))), B=B)
    return res


def unitarity(nmax: int = 14, tol: float = 1e-12) -> SuiteResult:
    res = SuiteResult("unitarity", tol)
    for B in (0.3, 1.0, 2.5):
        bs = oracle.BeamSplitterParams(B)
        for N in range(nmax + 1):
            U = np.array([[oracle.bs_apply(m, N - m, bs)[N - q, q] for m in range(N + 1)] for q in range(N + 1)])
            res.record(float(np.max(np.abs(U.T @ U - np.eye(N + 1)))), B=B, N=N)
    return res


def oracle_equivalence(tol: float = 1e-9) -> tuple[SuiteResult, SuiteResult]:
    """Closed-form states and probabilities against the cascade oracle."""
    states = SuiteResult("oracle-states", tol)
    probs = SuiteResult("oracle-probabilities", tol)
    g = ORACLE_GRID
    for y, B in product(g["y"], g["B"]):
        c = oracle.CascadeParams(squeeze_from("y", y), oracle.BeamSplitterParams(B))
        psi = oracle.herald_input(c.squeeze, 2 * max(g["k"]))
        for k1, k2 in product(g["k"], g["k"]):
            p = closed_form.HeraldPattern(k1, k2)
            ref = oracle.cascade_herald(psi, 1, 1, c.bs, k1, k2)
            mine = closed_form.conditional_state(p, c.y2, B)
            n = max(mine.cutoff, ref.state.cutoff)
            diff = mine.padded(n).amplitudes - ref.state.padded(n).amplitudes
            states.record(float(np.max(np.abs(diff))), k1=k1, k2=k2, y=y, B=B)
            P = closed_form.herald_probability(p, c)
            probs.record(abs(P / ref.probability - 1.0), k1=k1, k2=k2, y=y, B=B)
    return states, probs


def two_route_G(tol: float = 1e-9) -> SuiteResult:
    res = SuiteResult("two-route-G", tol)
    g = G_GRID
    for k1, k2, y2, B in product(g["k"], g["k"], g["y2"], g["B"]):
        p = closed_form.HeraldPattern(k1, k2)
        a = closed_form.normalization_G_closed(p, y2, B)
        b = closed_form.normalization_G_direct(p, y2, B)
        res.record(abs(a / b - 1.0), k1=k1, k2=k2, y2=y2, B=B)
    return res


def completeness(y: float = 0.2, B: float = 1.0, tol: float = 1e-8) -> SuiteResult:
    res = SuiteResult("completeness", tol)
    psi = oracle.smsv_state(squeeze_from("y", y))
    for anc in ((1, 1), (0, 0)):
        total = oracle.total_probability(psi, *anc, oracle.BeamSplitterParams(B))
        res.record(abs(1.0 - total), y=y, B=B, ancillas=f"{anc[0]}{anc[1]}")
    return res


def run_all() -> list[SuiteResult]:
    return [convention_lock(), unitarity(), *oracle_equivalence(), two_route_G(), completeness()]


def format_case(case: dict) -> str:
    return ", ".join(f"{k}={v:.6g}" if isinstance(v, float) and math.isfinite(v) else f"{k}={v}" for k, v in case.items())
