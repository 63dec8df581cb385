"""Brute-force beam-splitter network acting on Fock states.

Convention: ``U a1^+ U^+ = t a1^+ - r a2^+`` and ``U a2^+ U^+ = r a1^+ + t a2^+``
with real ``t, r > 0``. The cascade mixes mode 1 with mode 2, then mode 1 with
mode 3, and projects modes 2 and 3 onto photon numbers ``(k1, k2)``. Matrix
elements come straight from the binomial expansion of the transformed creation
operators, so this module shares no algebra with the closed forms it checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from scsherald.errors import DomainError
from scsherald.states import FockVector, Parity, SqueezeParams, smsv_state, squeeze_from


@dataclass(frozen=True)
class BeamSplitterParams:
    """Beam splitter fixed by ``B = R/T``; ``B = 1`` is balanced."""

    B: float

    def __post_init__(self):
        if not (self.B > 0 and math.isfinite(self.B)):
            raise DomainError(f"beam splitter parameter must be positive, got {self.B}")

    @property
    def T(self) -> float:
        return 1.0 / (1.0 + self.B)

    @property
    def R(self) -> float:
        return self.B / (1.0 + self.B)

    @property
    def t(self) -> float:
        return math.sqrt(self.T)

    @property
    def r(self) -> float:
        return math.sqrt(self.R)


@dataclass(frozen=True)
class CascadeParams:
    squeeze: SqueezeParams
    bs: BeamSplitterParams

    @property
    def y(self) -> float:
        return self.squeeze.y

    @property
    def y1(self) -> float:
        return self.squeeze.y / (1.0 + self.bs.B)

    @property
    def y2(self) -> float:
        return self.squeeze.y / (1.0 + self.bs.B) ** 2


def cascade_params(S_dB: float, B: float) -> CascadeParams:
    return CascadeParams(squeeze_from("S_dB", S_dB), BeamSplitterParams(B))


@dataclass(frozen=True)
class HeraldOutcome:
    k1: int
    k2: int
    state: FockVector | None
    probability: float
    amplitudes: np.ndarray
    possible: bool = True


def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def bs_kernel(m, n: int, q: int, bs: BeamSplitterParams) -> np.ndarray:
    """``<m+n-q, q| U |m, n>`` for an array of first-mode inputs ``m``.

    Expands ``(t a1 - r a2)^m (r a1 + t a2)^n``: taking ``j`` creation operators
    of mode 1 from the second factor forces ``i = p - j`` from the first.
    """
    m = np.atleast_1d(np.asarray(m, dtype=np.int64))
    p = m + n - q
    log_t, log_r = math.log(bs.t), math.log(bs.r)
    out = np.zeros(m.shape)
    for j in range(n + 1):
        i = p - j
        ok = (i >= 0) & (i <= m) & (p >= 0)
        if not ok.any():
            continue
        ii, mm = np.where(ok, i, 0), np.where(ok, m, 0)
        log_mag = (
            _log_binom(mm, ii)
            + ii * log_t
            + (mm - ii) * log_r
            + _log_binom(n, j)
            + j * log_r
            + (n - j) * log_t
        )
        sign = np.where((mm - ii) % 2 == 0, 1.0, -1.0)
        out += np.where(ok, sign * np.exp(log_mag), 0.0)
    pp = np.maximum(p, 0)
    log_norm = 0.5 * (gammaln(pp + 1) + gammaln(q + 1) - gammaln(m + 1) - gammaln(n + 1))
    return np.where(p >= 0, out * np.exp(log_norm), 0.0)


def bs_apply(m: int, n: int, bs: BeamSplitterParams) -> dict[tuple[int, int], float]:
    """Output amplitudes ``{(p, q): <p, q|U|m, n>}`` for input ``|m, n>``."""
    if m < 0 or n < 0:
        raise DomainError("photon numbers must be nonnegative")
    N = m + n
    return {(N - q, q): float(bs_kernel([m], n, q, bs)[0]) for q in range(N + 1)}


def _project(amps: np.ndarray, anc: int, k: int, bs: BeamSplitterParams) -> np.ndarray:
    """Mix mode 1 with an ``anc``-photon mode and keep the ``k``-click branch."""
    m = np.arange(amps.size)
    kern = bs_kernel(m, anc, k, bs)
    p = m + anc - k
    keep = (p >= 0) & (amps != 0.0)
    out = np.zeros(max(amps.size + anc - k, 1))
    out[p[keep]] = amps[keep] * kern[keep]
    return out


def cascade_herald(
    input1: FockVector, anc2: int, anc3: int, bs: BeamSplitterParams, k1: int, k2: int
) -> HeraldOutcome:
    """Project the two-beam-splitter output onto ``k1`` clicks in mode 2 and ``k2`` in mode 3.

    Returns the unnormalized mode-1 amplitudes, their squared norm as the
    outcome probability, and the normalized conditional state. Outcomes that
    cannot occur within the input cutoff come back with ``possible=False``.
    """
    if anc2 not in (0, 1) or anc3 not in (0, 1):
        raise DomainError("ancilla modes hold 0 or 1 photons")
    if k1 < 0 or k2 < 0:
        raise DomainError("click counts must be nonnegative")
    budget = input1.cutoff + anc2 + anc3
    if k1 + k2 > budget:
        return HeraldOutcome(k1, k2, None, 0.0, np.zeros(1), possible=False)
    mid = _project(input1.amplitudes, anc2, k1, bs)
    out = _project(mid, anc3, k2, bs)
    prob = float(out @ out)
    if prob == 0.0:
        return HeraldOutcome(k1, k2, None, 0.0, out, possible=False)
    parity = _output_parity(input1.parity, anc2 + anc3 - k1 - k2)
    state = FockVector(out / math.sqrt(prob), parity).canonical()
    return HeraldOutcome(k1, k2, state, prob, out)


def _output_parity(parity: Parity, shift: int) -> Parity:
    if parity is Parity.MIXED:
        return Parity.MIXED
    return parity if shift % 2 == 0 else (Parity.ODD if parity is Parity.EVEN else Parity.EVEN)


def herald_distribution(
    input1: FockVector, anc2: int, anc3: int, bs: BeamSplitterParams, kmax: int
) -> dict[tuple[int, int], HeraldOutcome]:
    if kmax < 0:
        raise DomainError("kmax must be >= 0")
    return {
        (k1, k2): cascade_herald(input1, anc2, anc3, bs, k1, k2)
        for k1 in range(kmax + 1)
        for k2 in range(kmax + 1)
    }


def total_probability(input1: FockVector, anc2: int, anc3: int, bs: BeamSplitterParams) -> float:
    """Sum of every outcome probability reachable within the input cutoff."""
    budget = input1.cutoff + anc2 + anc3
    total = 0.0
    for k1 in range(budget + 1):
        for k2 in range(budget + 1 - k1):
            total += cascade_herald(input1, anc2, anc3, bs, k1, k2).probability
    return total


def baseline_pair(y2: float) -> tuple[float, float]:
    """A ``(y, B)`` pair realizing ``y2`` with vacuum ancillas; any such pair gives the same state."""
    if not 0 < y2 < 0.5:
        raise DomainError(f"y2 must lie in (0, 0.5), got {y2}")
    y = min(4.0 * y2, 0.5 * (y2 + 0.5))
    return y, math.sqrt(y / y2) - 1.0


def herald_input(squeeze: SqueezeParams, clicks: int = 0) -> FockVector:
    """Squeezed vacuum with twice the auto cutoff plus room for ``clicks`` photons.

    Heralding reweights the input towards high photon numbers, so a tail that
    is negligible in the squeezed vacuum can matter in the conditional state.
    """
    base = smsv_state(squeeze).cutoff
    return smsv_state(squeeze, cutoff=2 * base + 2 * clicks)


def vacuum_ancilla_herald(y2: float, k1: int, k2: int) -> HeraldOutcome:
    """Conditional state for empty ancillas; depends on the squeezing only through ``y2``."""
    y, B = baseline_pair(y2)
    psi = herald_input(squeeze_from("y", y), k1 + k2)
    return cascade_herald(psi, 0, 0, BeamSplitterParams(B), k1, k2)
