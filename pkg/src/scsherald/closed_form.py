"""Analytic heralding amplitudes, conditional states and outcome probabilities.

Valid for outcomes with at least one click in each detector. All four parity
cases share one amplitude formula: at Fock index ``j`` (``j = K mod 2``,
``K = k1 + k2``) the unnormalized amplitude is

    y2^(j/2) / sqrt(j!) * (2 nu)! / nu! * (a0 + a1 j + a2 j^2),   nu = (j + K - 2) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from scsherald.errors import ConvergenceError, DomainError
from scsherald.oracle import CascadeParams
from scsherald.series import differentiate, euler_apply, evaluate, shift_multiply_x, z_series
from scsherald.states import FockVector, Parity, auto_cutoff

SERIES_DEGREE = 200
MAX_SERIES_DEGREE = 800
SERIES_RTOL = 1e-12


@dataclass(frozen=True)
class HeraldPattern:
    k1: int
    k2: int

    def __post_init__(self):
        if self.k1 < 1 or self.k2 < 1:
            raise DomainError(
                f"closed forms need k1, k2 >= 1, got ({self.k1}, {self.k2}); use the oracle"
            )

    @property
    def K(self) -> int:
        return self.k1 + self.k2

    @property
    def parity(self) -> Parity:
        return Parity.of(self.K)


@dataclass(frozen=True)
class QuadraticWeights:
    a0: float
    a1: float
    a2: float

    @property
    def A(self) -> tuple[float, float, float, float, float]:
        a0, a1, a2 = self.a0, self.a1, self.a2
        return (a0 * a0, 2 * a0 * a1, a1 * a1 + 2 * a0 * a2, 2 * a1 * a2, a2 * a2)

    def __call__(self, j):
        return self.a0 + self.a1 * j + self.a2 * j * j


def _check_B(B: float) -> None:
    if not B > 0:
        raise DomainError(f"beam splitter parameter must be positive, got {B}")


def _check_y(y: float, name: str = "y") -> None:
    if not 0 < y < 0.5:
        raise DomainError(f"{name} must lie in (0, 0.5), got {y}")


def herald_amplitude_ck(k: int, y: float, B: float) -> float:
    """Single-photon heralding amplitude for ``k`` photons routed to a detector."""
    if k < 0:
        raise DomainError("k must be >= 0")
    _check_y(y)
    _check_B(B)
    if k == 0:
        return math.sqrt(B / (1.0 + B))
    sign = 1.0 if k % 2 == 1 else -1.0
    log_mag = 0.5 * (k - 1) * math.log(y * B) + math.log(k) - 0.5 * math.lgamma(k + 1)
    return sign * math.exp(log_mag) / math.sqrt(1.0 + B)


def quadratic_weights(p: HeraldPattern, B: float) -> QuadraticWeights:
    _check_B(B)
    k1, k2 = p.k1, p.k2
    return QuadraticWeights(
        a0=1.0 - (k2 - 1) / k1 * B,
        a1=((k2 - 1) * B - k1 - k2) * B / (k1 * k2),
        a2=B * B / (k1 * k2),
    )


def _log_envelope(p: HeraldPattern, y2: float, j: np.ndarray) -> np.ndarray:
    nu = (j + p.K - 2) // 2
    return 0.5 * j * math.log(y2) - 0.5 * gammaln(j + 1) + gammaln(2 * nu + 1) - gammaln(nu + 1)


def unnormalized_amplitudes(
    p: HeraldPattern, y2: float, B: float, cutoff: int | None = None
) -> np.ndarray:
    """Amplitudes ``c_j`` before division by ``sqrt(G)``, dense over ``0..cutoff``."""
    _check_y(y2, "y2")
    w = quadratic_weights(p, B)
    first = p.K % 2
    if cutoff is None:
        cutoff = _cutoff(p, y2, w)
    j = np.arange(cutoff + 1)
    amp = np.exp(_log_envelope(p, y2, j)) * w(j.astype(float))
    return np.where(j % 2 == first, amp, 0.0)


def _cutoff(p: HeraldPattern, y2: float, w: QuadraticWeights) -> int:
    def lw(j):
        with np.errstate(divide="ignore"):
            return 2 * _log_envelope(p, y2, j) + np.log(w(j.astype(float)) ** 2)

    start = 64 + int(40.0 / -math.log(2 * y2))
    return auto_cutoff(lw, p.parity, start=start)


def normalization_G_direct(p: HeraldPattern, y2: float, B: float, cutoff: int | None = None) -> float:
    """Squared norm of the unnormalized conditional amplitudes, summed to the tail."""
    amp = unnormalized_amplitudes(p, y2, B, cutoff)
    return float(amp @ amp)


def conditional_state(p: HeraldPattern, y2: float, B: float, cutoff: int | None = None) -> FockVector:
    amp = unnormalized_amplitudes(p, y2, B, cutoff)
    G = float(amp @ amp)
    if G == 0.0:
        raise DomainError(f"conditional amplitudes vanish for {p} at B={B}")
    return FockVector(amp / math.sqrt(G), p.parity).canonical()


def _G_from_series(A, K: int, y2: float, degree: int) -> float:
    z = z_series(degree)
    total = A[0] * evaluate(differentiate(z, K - 2), y2)
    inner = shift_multiply_x(differentiate(z, K - 1))
    for l in range(1, 5):
        total += A[l] * evaluate(euler_apply(inner, l - 1), y2)
    return total


def normalization_G_closed(
    p: HeraldPattern, y2: float, B: float, degree: int = SERIES_DEGREE
) -> float:
    """Normalization from derivatives of ``Z(y2) = 1/sqrt(1 - 4 y2^2)``.

    ``G = A0 Z^(K-2) + sum_{l=1..4} A_l (y2 d/dy2)^(l-1) (y2 Z^(K-1))``. The
    series degree doubles until two successive values agree to ``SERIES_RTOL``.
    """
    _check_y(y2, "y2")
    A = quadratic_weights(p, B).A
    prev = _G_from_series(A, p.K, y2, degree)
    while degree * 2 <= MAX_SERIES_DEGREE:
        degree *= 2
        cur = _G_from_series(A, p.K, y2, degree)
        if abs(cur - prev) <= SERIES_RTOL * abs(cur):
            return cur
        prev = cur
    raise ConvergenceError(
        f"Z-series for K={p.K} at y2={y2} not converged at degree {degree}"
    )


def herald_probability(p: HeraldPattern, c: CascadeParams) -> float:
    """Probability of ``(k1, k2)`` clicks: ``c_k1(y1)^2 c_k2(y2)^2 G(y2) / cosh s``."""
    B = c.bs.B
    ck1 = herald_amplitude_ck(p.k1, c.y1, B)
    ck2 = herald_amplitude_ck(p.k2, c.y2, B)
    G = normalization_G_direct(p, c.y2, B)
    return ck1 * ck1 * ck2 * ck2 * G / math.cosh(c.squeeze.s)


__all__ = [
    "HeraldPattern",
    "QuadraticWeights",
    "conditional_state",
    "herald_amplitude_ck",
    "herald_probability",
    "normalization_G_closed",
    "normalization_G_direct",
    "quadratic_weights",
    "unnormalized_amplitudes",
]
