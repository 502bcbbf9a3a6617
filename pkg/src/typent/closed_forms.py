"""Closed-form ensemble averages used as reference values.

All logarithms are natural. Nothing here touches the simulation engines, so
these functions can serve as independent oracles for them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ModelParams:
    d: int
    k: int = 1
    q: float = 0.0
    L_A: int = 1
    L_B: int = 1

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if self.L_A < 1 or self.L_B < 1:
            raise ValueError("L_A and L_B must be >= 1")

    @property
    def L(self) -> int:
        return self.L_A + self.L_B


def _check_d(d):
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")


def nd_constant(d: float) -> float:
    """``d / (d^2 + 1)``: half the mean one-qudit purity after a Haar gate."""
    _check_d(d)
    return d / (d * d + 1.0)


def symmetric_subspace_dim(d: int) -> int:
    """Dimension of the symmetric part of two copies of a two-qudit space."""
    _check_d(d)
    m = d * d
    return m * (m + 1) // 2


def single_edge_purity(d: float) -> float:
    return 2.0 * nd_constant(d)


def entangling_power(d: float) -> float:
    _check_d(d)
    return (d - 1.0) ** 2 / (d * d + 1.0)


def random_edge_purity(q: float, d: float, k: int) -> float:
    """``(1 - q (1 - 2 N_d))^k``; exact for ``k <= 1``, an approximation beyond."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return (1.0 - q * entangling_power(d)) ** k


def random_edge_entropy_bound(q: float, d: float, k: int) -> float:
    return k * q * entangling_power(d)


def chain_purity_exact(k: int, d: float, terms: int | None = None) -> float:
    """Mean purity of a chain half after ``k`` least-entangling sweeps.

    Sum over ``m < k`` of ``2 C(k+m-1, m) N_d^(k+m)``, valid while ``k`` is
    below both half-chain lengths. ``terms`` truncates the sum to its first
    ``terms`` summands.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = nd_constant(d)
    top = k if terms is None else min(k, max(int(terms), 0))
    if k <= 50:
        return math.fsum(2.0 * math.comb(k + m - 1, m) * n ** (k + m) for m in range(top))
    log_n = math.log(n)
    logs = [
        math.log(2.0)
        + math.lgamma(k + m) - math.lgamma(m + 1) - math.lgamma(k)
        + (k + m) * log_n
        for m in range(top)
    ]
    if not logs:
        return 0.0
    peak = max(logs)
    return math.exp(peak) * math.fsum(math.exp(x - peak) for x in logs)


def chain_purity_large_k(k: int, d: float) -> float:
    n = nd_constant(d)
    return 2.0 * (n / (1.0 - n)) ** k


def chain_entropy_bound(k: int, d: float) -> float:
    """Lower bound ``k log((1-N_d)/N_d) - log 2`` on the mean chain Renyi-2 entropy."""
    n = nd_constant(d)
    return k * math.log((1.0 - n) / n) - math.log(2.0)


def chain_asymptotic_purity(d: float, L: int, L_A: int) -> float:
    """Purity of a length-``L_A`` block once a length-``L`` chain has fully mixed."""
    if not 1 <= L_A < L:
        raise ValueError("need 1 <= L_A < L")
    _check_d(d)
    # numerator and denominator both divided by d^L
    x = float(d) ** -L
    return (float(d) ** -L_A + float(d) ** (L_A - L)) / (1.0 + x)


def chain_asymptotic_purity_large_L(d: float, L: int, L_A: int) -> float:
    if not 1 <= L_A < L:
        raise ValueError("need 1 <= L_A < L")
    return d ** -L_A + d ** (L_A - L)


def haar_state_purity(dA: int, dB: int) -> float:
    """Mean reduced purity of a Haar-random pure state on ``C^dA x C^dB``."""
    return (dA + dB) / (dA * dB + 1.0)
