"""Truncated one-variable power series.

Only what the normalization of heralded states needs: the Maclaurin series of
``Z(x) = 1/sqrt(1 - 4 x^2)``, termwise derivatives, multiplication by ``x``
and the Euler operator ``x d/dx``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Polynomial ``sum_k coeffs[k] x^k``; nothing beyond ``degree`` is implied.

    ``exhausted`` marks a series that was differentiated past its degree and
    collapsed to zero.
    """

    coeffs: np.ndarray
    exhausted: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-D array")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x: float) -> float:
        return evaluate(self, x)


def evaluate(s: TruncatedSeries, x: float) -> float:
    acc = 0.0
    for c in s.coeffs[::-1]:
        acc = acc * x + c
    return float(acc)


def z_series(degree: int) -> TruncatedSeries:
    """Maclaurin series of ``1/sqrt(1 - 4x^2)``: ``binom(2n, n)`` at ``x^(2n)``."""
    if degree < 0:
        raise ValueError("degree must be >= 0")
    c = np.zeros(degree + 1)
    for n in range(degree // 2 + 1):
        c[2 * n] = float(math.comb(2 * n, n))
    return TruncatedSeries(c)


def differentiate(s: TruncatedSeries, order: int = 1) -> TruncatedSeries:
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    if order == 0:
        return s
    if order > s.degree:
        return TruncatedSeries(np.zeros(1), exhausted=True)
    k = np.arange(order, s.degree + 1)
    # falling factorial k (k-1) ... (k-order+1), exact in integers before the cast
    falling = np.array([math.perm(int(i), order) for i in k], dtype=float)
    return TruncatedSeries(s.coeffs[order:] * falling, exhausted=s.exhausted)


def euler_apply(s: TruncatedSeries, times: int = 1) -> TruncatedSeries:
    """Apply ``x d/dx`` ``times`` times: ``c_k -> k**times * c_k``."""
    if times < 0:
        raise ValueError("times must be >= 0")
    if times == 0:
        return s
    k = np.arange(s.degree + 1, dtype=float)
    return TruncatedSeries(s.coeffs * k**times, exhausted=s.exhausted)


def shift_multiply_x(s: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(np.concatenate(([0.0], s.coeffs)), exhausted=s.exhausted)
