"""Exact Markov-chain oracles for the doubling step.

These are deliberately independent of both the closed forms in
:mod:`qrepsim.analytics` and the Monte Carlo engine: they enumerate the
discrete-time chain state space explicitly and solve small linear systems,
so closed forms and sampled estimates can each be checked against them.

Unit-step dynamics encoded here (matching the engine's contract):

* during each unit, every vacuum element pair of an uncovered segment
  attempts generation with probability p_gen;
* connection attempts launched when both segments hold usable links occupy
  one unit (the classical transfer) and succeed with probability p_conn;
  failure resets all involved elements to vacuum;
* while an attempt is in flight no generation happens in the two segments
  it spans (generation-during-connection disabled);
* an unmatched link whose age has reached tau is dropped at the instant of
  its last matching opportunity, so its elements regenerate the next unit;
* multiplexed matching pairs the oldest available links first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable

import numpy as np


class OracleSizeError(ValueError):
    """Raised when the requested instance exceeds the exact-enumeration caps."""


@dataclass(frozen=True)
class ChainSpec:
    """An explicit finite Markov chain.

    matrix[i, j] is the one-step probability from state i to state j; rows
    must sum to 1. ``reward[i]`` is the expected number of distribution
    successes recorded during one step out of state i (rate chains only).
    """

    labels: tuple[Hashable, ...]
    matrix: np.ndarray
    start: int
    absorbing: tuple[int, ...] = ()
    reward: np.ndarray | None = None

    def validate(self, atol: float = 1e-12) -> None:
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(self.labels):
            raise ValueError("transition matrix shape does not match state labels")
        if (m < -atol).any():
            raise ValueError("negative transition probability")
        rows = m.sum(axis=1)
        if not np.allclose(rows, 1.0, rtol=0.0, atol=atol):
            worst = float(np.abs(rows - 1.0).max())
            raise ValueError(f"rows must sum to 1 (worst deviation {worst:.3e})")
        for i in self.absorbing:
            if m[i, i] != 1.0:
                raise ValueError(f"absorbing state {self.labels[i]!r} has outgoing mass")


# --------------------------------------------------------------------------
# Doubling step, n = 1: expected time to the first success
# --------------------------------------------------------------------------

VACUUM = "vacuum"
INFLIGHT = "inflight"
DONE = "done"


def build_doubling_chain(p_gen: float, p_conn: float, tau: int) -> ChainSpec:
    """Absorbing chain for the n=1 doubling step at memory lifetime tau.

    States: vacuum; (side, age) for a single held link whose partner segment
    is still generating (age runs 0..tau-1: an unmatched link is dropped the
    instant its age reaches tau); a one-unit in-flight connection; done.
    """
    if not 0.0 < p_gen <= 1.0:
        raise ValueError(f"p_gen: must be in (0, 1], got {p_gen!r}")
    if not 0.0 < p_conn <= 1.0:
        raise ValueError(f"p_conn: must be in (0, 1], got {p_conn!r}")
    if not isinstance(tau, int) or tau < 0:
        raise ValueError(f"tau: must be a non-negative integer, got {tau!r}")

    labels: list[Hashable] = [VACUUM]
    labels += [("solo", side, age) for side in ("L", "R") for age in range(tau)]
    labels += [INFLIGHT, DONE]
    index = {lab: i for i, lab in enumerate(labels)}
    m = np.zeros((len(labels), len(labels)))
    q0 = 1.0 - p_gen

    def solo_or_vacuum(side: str, age: int) -> int:
        # an unmatched link is culled once its age reaches tau
        return index[("solo", side, age)] if age < tau else index[VACUUM]

    m[index[VACUUM], index[INFLIGHT]] += p_gen * p_gen
    m[index[VACUUM], solo_or_vacuum("L", 0)] += p_gen * q0
    m[index[VACUUM], solo_or_vacuum("R", 0)] += q0 * p_gen
    m[index[VACUUM], index[VACUUM]] += q0 * q0

    for side in ("L", "R"):
        for age in range(tau):
            i = index[("solo", side, age)]
            m[i, index[INFLIGHT]] += p_gen
            m[i, solo_or_vacuum(side, age + 1)] += q0

    m[index[INFLIGHT], index[DONE]] = p_conn
    m[index[INFLIGHT], index[VACUUM]] = 1.0 - p_conn
    m[index[DONE], index[DONE]] = 1.0

    return ChainSpec(
        labels=tuple(labels), matrix=m, start=index[VACUUM], absorbing=(index[DONE],)
    )


def expected_hitting_time(spec: ChainSpec) -> float:
    """Expected steps from spec.start to absorption, by direct linear solve."""
    spec.validate()
    if not spec.absorbing:
        raise ValueError("chain has no absorbing state")
    keep = [i for i in range(len(spec.labels)) if i not in spec.absorbing]
    pos = {i: k for k, i in enumerate(keep)}
    q = spec.matrix[np.ix_(keep, keep)]
    t = np.linalg.solve(np.eye(len(keep)) - q, np.ones(len(keep)))
    return float(t[pos[spec.start]])


def exact_mean_time_doubling(
    p_gen: float, p_conn: float, tau: int, tau_max: int = 64
) -> float:
    """Exact expected time to the first doubling success (n = 1)."""
    if tau > tau_max:
        raise OracleSizeError(
            f"oracle instance too large: tau={tau} exceeds tau_max={tau_max}"
        )
    return expected_hitting_time(build_doubling_chain(p_gen, p_conn, tau))


# --------------------------------------------------------------------------
# Doubling step, n element pairs, multiplexed: steady-state success rate
# --------------------------------------------------------------------------


def _binom_pmf(k: int, size: int, p: float) -> float:
    return math.comb(size, k) * p**k * (1.0 - p) ** (size - k)


def build_multiplexed_rate_chain(
    p_gen: float, p_conn: float, tau: int, n: int
) -> ChainSpec:
    """Recurrent chain for the continuing multiplexed doubling step.

    State: (side, ages, inflight) observed each unit after matching, where
    ``ages`` is the residual-link age multiset (descending, all < tau) on
    ``side`` ('L'/'R'/None) and ``inflight`` counts attempts resolving next
    unit. Residuals live on at most one side because matching launches
    min(k_left, k_right) attempts. Reward of a state is the expected number
    of successes its in-flight attempts deliver.
    """
    if not 0.0 < p_gen <= 1.0:
        raise ValueError(f"p_gen: must be in (0, 1], got {p_gen!r}")
    if not 0.0 < p_conn <= 1.0:
        raise ValueError(f"p_conn: must be in (0, 1], got {p_conn!r}")
    if not isinstance(tau, int) or tau < 0:
        raise ValueError(f"tau: must be a non-negative integer, got {tau!r}")
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n: must be a positive integer, got {n!r}")

    State = tuple  # (side, ages-desc tuple, inflight)
    start: State = (None, (), 0)

    def step(state: State) -> dict[State, float]:
        side, ages, inflight = state
        if inflight > 0:
            # resolving unit: both segments are covered, so no generation;
            # residuals age and any that reach tau unmatched are culled
            survivors = tuple(a + 1 for a in ages if a + 1 < tau)
            return {(side if survivors else None, survivors, 0): 1.0}

        n_left = len(ages) if side == "L" else 0
        n_right = len(ages) if side == "R" else 0
        vac_l, vac_r = n - n_left, n - n_right
        out: dict[State, float] = {}
        for g_l in range(vac_l + 1):
            pl = _binom_pmf(g_l, vac_l, p_gen)
            for g_r in range(vac_r + 1):
                pr = _binom_pmf(g_r, vac_r, p_gen)
                left = ([a + 1 for a in ages] if side == "L" else []) + [0] * g_l
                right = ([a + 1 for a in ages] if side == "R" else []) + [0] * g_r
                launched = min(len(left), len(right))
                if len(left) > launched:
                    rest, new_side = left[launched:], "L"  # youngest remain
                elif len(right) > launched:
                    rest, new_side = right[launched:], "R"
                else:
                    rest, new_side = [], None
                survivors = tuple(a for a in rest if a < tau)
                key = (new_side if survivors else None, survivors, launched)
                out[key] = out.get(key, 0.0) + pl * pr
        return out

    # breadth-first enumeration of the reachable state space
    order: list[State] = [start]
    seen = {start: 0}
    transitions: list[dict[State, float]] = []
    head = 0
    while head < len(order):
        dist = step(order[head])
        transitions.append(dist)
        for nxt in dist:
            if nxt not in seen:
                seen[nxt] = len(order)
                order.append(nxt)
        head += 1

    m = np.zeros((len(order), len(order)))
    for i, dist in enumerate(transitions):
        for nxt, p in dist.items():
            m[i, seen[nxt]] += p
    reward = np.array([s[2] * p_conn for s in order])
    return ChainSpec(
        labels=tuple(order), matrix=m, start=0, absorbing=(), reward=reward
    )


def stationary_distribution(spec: ChainSpec) -> np.ndarray:
    """Stationary distribution of a recurrent chain by direct solve."""
    spec.validate()
    size = spec.matrix.shape[0]
    a = spec.matrix.T - np.eye(size)
    a[-1, :] = 1.0
    b = np.zeros(size)
    b[-1] = 1.0
    pi = np.linalg.solve(a, b)
    if (pi < -1e-10).any():
        raise ValueError("stationary solve produced a negative probability")
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def exact_rate_multiplexed(
    p_gen: float,
    p_conn: float,
    tau: int,
    n: int,
    n_max: int = 3,
    tau_max: int = 8,
) -> float:
    """Exact steady-state success rate of the multiplexed doubling step."""
    if n > n_max or tau > tau_max:
        raise OracleSizeError(
            f"oracle instance too large: n={n}, tau={tau} exceed "
            f"caps n_max={n_max}, tau_max={tau_max}"
        )
    spec = build_multiplexed_rate_chain(p_gen, p_conn, tau, n)
    pi = stationary_distribution(spec)
    assert spec.reward is not None
    return float(pi @ spec.reward)


# --------------------------------------------------------------------------
# Minimal-memory (tau = 0) cycle enumeration, either architecture
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CycleStats:
    """Exact per-cycle outcome probabilities at tau = 0.

    A cycle is one all-vacuum generation unit plus, when at least one pair
    matched, the one-unit resolution that follows. With tau = 0 and
    generation-during-connection disabled, cycles are independent.
    """

    p_success: float
    p_no_match: float
    p_match_fail: float

    @property
    def mean_time_to_success(self) -> float:
        # failed cycles last 1 unit (no match) or 2 (match that failed);
        # the terminal cycle always lasts 2
        fail_mass = self.p_no_match + self.p_match_fail
        if self.p_success <= 0.0:
            raise ValueError("success probability is zero; mean time diverges")
        mean_fail_len = (self.p_no_match + 2.0 * self.p_match_fail) / fail_mass
        return (1.0 / self.p_success - 1.0) * mean_fail_len + 2.0


def cycle_stats_minimal_memory(
    p_gen: float, p_conn: float, n: int, architecture: str
) -> CycleStats:
    """Exhaustive per-cycle enumeration for the tau = 0 doubling step."""
    if architecture not in ("parallel", "multiplexed"):
        raise ValueError(f"architecture: expected parallel|multiplexed, got {architecture!r}")
    p_success = 0.0
    p_no_match = 0.0
    p_match_fail = 0.0
    if architecture == "parallel":
        # a lane matches when both of its ends generated this unit
        r = p_gen * p_gen
        for k in range(n + 1):
            pk = _binom_pmf(k, n, r)
            if k == 0:
                p_no_match += pk
            else:
                win = 1.0 - (1.0 - p_conn) ** k
                p_success += pk * win
                p_match_fail += pk * (1.0 - win)
    else:
        for k_l in range(n + 1):
            pl = _binom_pmf(k_l, n, p_gen)
            for k_r in range(n + 1):
                pr = _binom_pmf(k_r, n, p_gen)
                m = min(k_l, k_r)
                if m == 0:
                    p_no_match += pl * pr
                else:
                    win = 1.0 - (1.0 - p_conn) ** m
                    p_success += pl * pr * win
                    p_match_fail += pl * pr * (1.0 - win)
    return CycleStats(p_success, p_no_match, p_match_fail)
