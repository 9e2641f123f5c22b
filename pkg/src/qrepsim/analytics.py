"""Closed-form rate analytics for the two-segment doubling step.

The doubling step waits until both fundamental segments of a pair hold a
link whose creation times differ by at most tau, then spends one unit on the
classical transfer of a connection attempt that succeeds with probability
p_conn; failure restarts both segments from vacuum. ``mean_Z_*`` functions
give the expected waiting time Z between connection attempts; mean times T
satisfy T = (Z + 1) / p_conn.

The multiplexed rate formula covers one doubling step with n element pairs
per segment where any left link may connect to any right link; residual
(unconsumed) links carry over between attempts, which is what the alpha
correction term accounts for.
"""

from __future__ import annotations

import math
from typing import NamedTuple


class DivergenceError(ValueError):
    """The requested mean diverges (e.g. a success probability is zero)."""


def _check_prob(name: str, p: float) -> None:
    if math.isnan(p) or not 0.0 <= p <= 1.0:
        raise ValueError(f"{name}: probability must be in [0, 1], got {p!r}")


def _check_tau(tau: int) -> None:
    if not isinstance(tau, int) or isinstance(tau, bool) or tau < 0:
        raise ValueError(f"tau: must be a non-negative integer, got {tau!r}")


def qpow(q: float, k: float) -> float:
    """q**k with the convention q**0 == 1 even at q == 0.

    For q in (0, 1) this underflows smoothly to 0.0 at large k; every formula
    below keeps an O(1) term next to these powers so no 0/0 can form.
    """
    if q == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(q)) if k > 1e3 else q**k


class WaitTerms(NamedTuple):
    """Three contributions to the finite-memory waiting time.

    waiting: time spent waiting for the slower segment in rounds that connect.
    fruitless: generation attempts made while a held link times out.
    second_success: delay reacquiring the first segment after a timeout.
    """

    waiting: float
    fruitless: float
    second_success: float

    @property
    def total(self) -> float:
        return self.waiting + self.fruitless + self.second_success


def mean_time_infinite(p_gen: float, p_conn: float) -> float:
    """Expected distribution time of the doubling step, unbounded memory."""
    _check_prob("p_gen", p_gen)
    _check_prob("p_conn", p_conn)
    if p_gen == 0.0 or p_conn == 0.0:
        raise DivergenceError("mean time diverges: p_gen and p_conn must be positive")
    return (3.0 - p_gen**2) / (p_gen * p_conn * (2.0 - p_gen))


def mean_Z_finite_terms(p_gen: float, tau: int) -> WaitTerms:
    """Waiting-time breakdown at memory lifetime tau (inclusive usability)."""
    _check_prob("p_gen", p_gen)
    _check_tau(tau)
    if p_gen == 0.0:
        raise DivergenceError("waiting time diverges: p_gen must be positive")
    q0 = 1.0 - p_gen
    qt1 = qpow(q0, tau + 1)
    denom = 2.0 - p_gen - 2.0 * qt1
    waiting = 1.0 / (p_gen * denom)
    fruitless = 2.0 * tau * qt1 / denom
    second = 2.0 * q0 * (1.0 - qpow(q0, tau) * (1.0 + tau * p_gen)) / (p_gen * denom)
    return WaitTerms(waiting, fruitless, second)


def mean_Z_finite(p_gen: float, tau: int) -> float:
    """Expected wait between connection attempts at memory lifetime tau."""
    return mean_Z_finite_terms(p_gen, tau).total


def mean_time_finite(p_gen: float, p_conn: float, tau: int) -> float:
    """Expected distribution time of the doubling step at lifetime tau.

    Algebraically identical to (mean_Z_finite + 1) / p_conn; computed from
    the independent closed form so the identity stays a real cross-check.
    """
    _check_prob("p_conn", p_conn)
    if p_conn == 0.0:
        raise DivergenceError("mean time diverges: p_conn must be positive")
    _check_prob("p_gen", p_gen)
    _check_tau(tau)
    if p_gen == 0.0:
        raise DivergenceError("mean time diverges: p_gen must be positive")
    t_inf = mean_time_infinite(p_gen, p_conn)
    q0 = 1.0 - p_gen
    w = qpow(q0, tau + 1) / (1.0 - p_gen / 2.0)
    return (t_inf - ((1.0 + p_gen) / (p_gen * p_conn)) * w) / (1.0 - w)


def mean_Z_asymptotic(p_gen: float, tau: int) -> float:
    """Small-p_gen approximation to mean_Z_finite.

    Valid when p_gen << 1/(tau+1); see asymptotic_in_regime. The value is
    returned regardless of regime so callers can inspect the error outside it.
    """
    _check_prob("p_gen", p_gen)
    _check_tau(tau)
    if p_gen == 0.0:
        raise DivergenceError("waiting time diverges: p_gen must be positive")
    d = 1.0 + 2.0 * tau
    return 1.0 / (p_gen**2 * d) + 2.0 * tau / (p_gen * d) + 2.0 * tau**2 * (1.0 - p_gen) / d


def asymptotic_in_regime(p_gen: float, tau: int, margin: float = 0.05) -> bool:
    """True when the small-p_gen expansion is trustworthy at these inputs.

    The expansion drops terms of relative order p_gen * (tau + 1), so the
    default margin keeps its error within a few percent of the exact value.
    """
    _check_prob("p_gen", p_gen)
    _check_tau(tau)
    return p_gen * (tau + 1) < margin


class MultiplexedRate(NamedTuple):
    rate: float
    alpha: float


def multiplexed_rate(p_gen: float, p_conn: float, tau: int, n: int) -> MultiplexedRate:
    """Steady-state distribution rate of a multiplexed doubling step.

    Returns the rate (successes per time unit) and the residual-entanglement
    correction alpha. At n == 1 alpha is exactly 1 (the expression cancels
    algebraically) and rate * mean_time_finite == 1.
    """
    _check_prob("p_gen", p_gen)
    _check_prob("p_conn", p_conn)
    _check_tau(tau)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"n: must be a positive integer, got {n!r}")
    if p_gen == 0.0:
        raise DivergenceError("rate is zero: p_gen must be positive")
    q0 = 1.0 - p_gen
    qn = qpow(q0, n)
    if n == 1:
        alpha = 1.0  # exact algebraic cancellation of the general expression
    else:
        num = (
            qpow(q0, n - 1)
            * (1.0 - qn)
            * (1.0 - qpow(q0, 2 * n - 1) + 2.0 * qpow(q0, 3 * n - 2) * (1.0 - qpow(q0, tau * (2 * n - 1))))
        )
        den = (1.0 - qpow(q0, 2 * n - 1)) * (1.0 + qn - 2.0 * qpow(q0, (tau + 1) * n))
        alpha = num / den
    rate_num = p_conn * (1.0 - qn) * (1.0 + qn - 2.0 * qpow(q0, n * (tau + 1)))
    rate_den = (
        1.0
        + 2.0 * qn
        - qpow(q0, 2 * n)
        - 4.0 * qpow(q0, n * (tau + 1))
        + 2.0 * qpow(q0, n * (tau + 2))
        + alpha
    )
    return MultiplexedRate(rate_num / rate_den, alpha)


class DoublingStats(NamedTuple):
    """Summary of one doubling step at n = 1."""

    mean_Z: float
    mean_T: float
    rate: float


def doubling_stats(p_gen: float, p_conn: float, tau: int | None) -> DoublingStats:
    """mean_Z, mean_T and rate for one doubling step; tau=None is unbounded."""
    if tau is None:
        _check_prob("p_gen", p_gen)
        if p_gen == 0.0:
            raise DivergenceError("waiting time diverges: p_gen must be positive")
        q0 = 1.0 - p_gen
        mean_z = (3.0 - 2.0 * p_gen) / (p_gen * (2.0 - p_gen))
        mean_t = mean_time_infinite(p_gen, p_conn)
    else:
        mean_z = mean_Z_finite(p_gen, tau)
        mean_t = mean_time_finite(p_gen, p_conn, tau)
    return DoublingStats(mean_z, mean_t, 1.0 / mean_t)
