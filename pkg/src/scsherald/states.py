"""Fock-basis states: squeezed vacuum, cat-state targets, overlaps.

All amplitudes are real. Factorial ratios are built from ``gammaln`` so that
cutoffs of several hundred photons never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Literal

import numpy as np
from scipy.special import gammaln

from scsherald.errors import DomainError, TruncationError

#: dB per unit of squeezing amplitude, ``-10 log10(exp(-2 s)) = DB_PER_NEPER * s``.
DB_PER_NEPER = 20.0 * math.log10(math.e)

TAIL_RATIO = 1e-16
EXTRA_TERMS = 4
NORM_TOL = 1e-10
MAX_CUTOFF = 1 << 15


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"
    MIXED = "mixed"

    @classmethod
    def of(cls, n: int) -> "Parity":
        return cls.EVEN if n % 2 == 0 else cls.ODD

    def support(self) -> tuple[int, int]:
        """First index and stride of the indices this parity may populate."""
        if self is Parity.EVEN:
            return 0, 2
        if self is Parity.ODD:
            return 1, 2
        return 0, 1


@dataclass(frozen=True, eq=False)
class FockVector:
    """Real amplitudes over photon numbers ``0..cutoff``, dense storage."""

    amplitudes: np.ndarray
    parity: Parity = Parity.MIXED

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=float)
        if amps.ndim != 1 or amps.size == 0:
            raise DomainError("amplitudes must be a non-empty 1-D array")
        parity = Parity(self.parity)
        if parity is not Parity.MIXED:
            wrong = amps[1:: 2] if parity is Parity.EVEN else amps[0:: 2]
            if np.any(wrong != 0.0):
                raise DomainError(f"{parity.value} vector has wrong-parity amplitudes")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "parity", parity)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size - 1

    def norm_sq(self) -> float:
        return float(self.amplitudes @ self.amplitudes)

    def normalized(self) -> "FockVector":
        n = self.norm_sq()
        if n == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return FockVector(self.amplitudes / math.sqrt(n), self.parity)

    def padded(self, cutoff: int) -> "FockVector":
        if cutoff < self.cutoff:
            raise DomainError("padding cannot shrink a vector")
        out = np.zeros(cutoff + 1)
        out[: self.amplitudes.size] = self.amplitudes
        return FockVector(out, self.parity)

    def canonical(self) -> "FockVector":
        """Flip the global sign so the lowest nonzero amplitude is positive."""
        nz = np.flatnonzero(self.amplitudes)
        if nz.size and self.amplitudes[nz[0]] < 0:
            return FockVector(-self.amplitudes, self.parity)
        return self

    def mean_photons(self) -> float:
        n = np.arange(self.amplitudes.size)
        return float(n @ self.amplitudes**2)


@dataclass(frozen=True)
class SqueezeParams:
    s: float
    y: float
    S_dB: float
    mean_photons: float


def squeeze_from(anchor: Literal["s", "y", "S_dB"], value: float) -> SqueezeParams:
    """Build all squeezing representations from one of ``s``, ``y`` or ``S_dB``."""
    value = float(value)
    if anchor == "s":
        if not value >= 0:
            raise DomainError(f"squeezing amplitude must be >= 0, got {value}")
        s = value
    elif anchor == "y":
        if not 0 <= value < 0.5:
            raise DomainError(f"squeezing parameter must lie in [0, 0.5), got {value}")
        s = math.atanh(2.0 * value)
    elif anchor == "S_dB":
        if not value >= 0:
            raise DomainError(f"squeezing in dB must be >= 0, got {value}")
        s = value / DB_PER_NEPER
    else:
        raise DomainError(f"unknown squeezing anchor {anchor!r}")
    y = math.tanh(s) / 2.0
    if not y < 0.5:
        raise DomainError(f"squeezing amplitude {s} is too large to represent")
    return SqueezeParams(s=s, y=y, S_dB=DB_PER_NEPER * s, mean_photons=math.sinh(s) ** 2)


def auto_cutoff(
    log_weight: Callable[[np.ndarray], np.ndarray],
    parity: Parity,
    start: int = 64,
    max_cutoff: int = MAX_CUTOFF,
) -> int:
    """Smallest cutoff past which every squared amplitude is negligible.

    ``log_weight`` maps an array of photon numbers to log squared amplitudes
    (``-inf`` allowed). The window doubles until its last term is below
    ``TAIL_RATIO`` of the total and still falling; the cutoff is then the
    first index from which all remaining terms stay below that ratio, plus
    ``EXTRA_TERMS`` further terms of the supported parity.
    """
    first, step = parity.support()
    window = max(start, first + 4 * step)
    while window <= max_cutoff:
        n = np.arange(first, window + 1, step)
        lw = np.asarray(log_weight(n), dtype=float)
        top = lw.max()
        if not np.isfinite(top):
            raise DomainError("state has no nonzero amplitude")
        rel = lw - (top + math.log(np.exp(lw - top).sum()))
        small = rel < math.log(TAIL_RATIO)
        falling = lw[-1] < lw[-2] or lw[-1] == -np.inf
        if small[-1] and falling:
            big = np.flatnonzero(~small)
            idx = big[-1] + 1 + EXTRA_TERMS
            if idx < n.size:
                return int(n[idx])
        window *= 2
    raise TruncationError(f"no cutoff below {max_cutoff} meets the tail tolerance")


def _check_norm(amps: np.ndarray, tol: float, what: str) -> None:
    deficit = abs(1.0 - float(amps @ amps))
    if deficit > tol:
        raise TruncationError(f"{what}: norm deficit {deficit:.3e} exceeds {tol:.1e}")


def _smsv_log_weight(p: SqueezeParams) -> Callable[[np.ndarray], np.ndarray]:
    log_y = math.log(p.y) if p.y > 0 else -np.inf

    def lw(n):
        n = np.asarray(n)
        half = n // 2
        with np.errstate(invalid="ignore"):
            out = 2 * (np.where(half > 0, half * log_y, 0.0) + 0.5 * gammaln(n + 1) - gammaln(half + 1))
        out = out - math.log(math.cosh(p.s))
        return np.where(n % 2 == 0, out, -np.inf)

    return lw


def smsv_state(p: SqueezeParams, cutoff: int | None = None, tol: float = NORM_TOL) -> FockVector:
    """Single-mode squeezed vacuum, amplitude ``y^n sqrt((2n)!)/n! / sqrt(cosh s)`` at ``|2n>``."""
    lw = _smsv_log_weight(p)
    if cutoff is None:
        cutoff = auto_cutoff(lw, Parity.EVEN)
    n = np.arange(cutoff + 1)
    amps = np.where(n % 2 == 0, np.exp(0.5 * lw(n)), 0.0)
    _check_norm(amps, tol, "squeezed vacuum")
    return FockVector(amps, Parity.EVEN)


@dataclass(frozen=True)
class SCSTarget:
    beta: float
    sign: Literal["plus", "minus"] = "plus"

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"cat amplitude must be positive, got {self.beta}")
        if self.sign not in ("plus", "minus"):
            raise DomainError(f"sign must be 'plus' or 'minus', got {self.sign!r}")

    @classmethod
    def for_parity(cls, beta: float, parity: Parity) -> "SCSTarget":
        return cls(beta, "plus" if Parity(parity) is Parity.EVEN else "minus")

    @property
    def parity(self) -> Parity:
        return Parity.EVEN if self.sign == "plus" else Parity.ODD

    @property
    def N_norm(self) -> float:
        b2 = 2.0 * self.beta**2
        # expm1 keeps the odd cat finite as beta -> 0
        denom = 2.0 * (2.0 + math.expm1(-b2)) if self.sign == "plus" else -2.0 * math.expm1(-b2)
        return denom**-0.5


def scs_state(t: SCSTarget, cutoff: int | None = None, tol: float = NORM_TOL) -> FockVector:
    """Even (plus) or odd (minus) cat state ``N(|b> +- |-b>)`` in the Fock basis."""
    first, _ = t.parity.support()
    log_pref = math.log(2.0 * t.N_norm) - t.beta**2 / 2.0
    log_b = math.log(t.beta)

    def lw(n):
        n = np.asarray(n)
        out = 2 * (log_pref + n * log_b - 0.5 * gammaln(n + 1))
        return np.where(n % 2 == first, out, -np.inf)

    if cutoff is None:
        cutoff = auto_cutoff(lw, t.parity)
    n = np.arange(cutoff + 1)
    amps = np.where(n % 2 == first, np.exp(0.5 * lw(n)), 0.0)
    _check_norm(amps, tol, "cat state")
    return FockVector(amps, t.parity)


def fidelity(a: FockVector, b: FockVector, tol: float = 1e-8) -> float:
    """Squared real overlap of two normalized vectors (zero-padded to a common cutoff)."""
    for v in (a, b):
        if abs(v.norm_sq() - 1.0) > tol:
            raise DomainError(f"fidelity needs normalized inputs, got norm^2 {v.norm_sq()!r}")
    m = min(a.amplitudes.size, b.amplitudes.size)
    overlap = float(a.amplitudes[:m] @ b.amplitudes[:m])
    return min(1.0, overlap * overlap)
