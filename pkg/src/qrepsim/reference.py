"""Transparent object-level implementation of the unit-step contract.

This mirrors :mod:`qrepsim.engine` exactly, including the order in which
random draws are consumed, so the two implementations must produce
identical trajectories for identical seeds. It trades speed for clarity
and for the conservation checking it can run after every step, and serves
as the trusted half of the engine-equivalence tests.

See the engine module docstring for the full step contract.
"""

from __future__ import annotations

from .params import (
    LEFT,
    RIGHT,
    ChainState,
    Link,
    PendingAttempt,
    RepeaterParams,
    usable,
)
from .rng import SplitMix64


class ReferenceEngine:
    """One repeater chain advanced a unit at a time, with full bookkeeping."""

    def __init__(self, params: RepeaterParams, seed: int, validate: bool = True):
        self.params = params
        self.state = ChainState.initial(params)
        self.rng = SplitMix64(seed)
        self.validate = validate
        self.attempts_by_level = [0] * (params.N + 1)
        self.expiries = 0

    # ------------------------------------------------------------- plumbing

    def _covered_segments(self) -> set[int]:
        covered: set[int] = set()
        for att in self.state.pending:
            start = att.left_link.span_start
            covered.update(range(start, start + 2 * att.left_link.span_len))
        return covered

    def _free_end(self, link: Link, side: int) -> None:
        if side == LEFT:
            self.state.element(link.span_start, LEFT, link.left_address).link_id = None
        else:
            self.state.element(link.span_end - 1, RIGHT, link.right_address).link_id = None

    def _available(self, level: int, span_start: int) -> list[Link]:
        return [
            link
            for link in self.state.links.values()
            if link.level == level and link.span_start == span_start
        ]

    # ----------------------------------------------------------- the phases

    def _generate(self) -> None:
        state = self.state
        clock_next = state.clock + 1
        covered = self._covered_segments()
        for seg in state.segments:
            if not self.params.concurrent_generation and seg.index in covered:
                continue
            for j in range(self.params.n):
                left = state.element(seg.index, LEFT, j)
                right = state.element(seg.index, RIGHT, j)
                if left.is_vacuum and right.is_vacuum:
                    self.attempts_by_level[0] += 1
                    if self.rng.bernoulli(self.params.p_gen):
                        link = Link(
                            link_id=state.next_link_id,
                            level=0,
                            span_start=seg.index,
                            left_address=j,
                            right_address=j,
                            created_at=clock_next,
                        )
                        state.next_link_id += 1
                        state.links[link.link_id] = link
                        left.link_id = link.link_id
                        right.link_id = link.link_id

    def _resolve(self, stop_on_success: bool) -> list[bool | None]:
        """Resolve due attempts in launch order; return terminal successes."""
        state = self.state
        clock_next = state.clock + 1
        terminal: list[bool | None] = []
        remaining: list[PendingAttempt] = []
        for idx, att in enumerate(state.pending):
            if att.resolve_at != clock_next:
                remaining.append(att)
                continue
            left, right = att.left_link, att.right_link
            # middle elements return to vacuum whatever the outcome
            self._free_end(left, RIGHT)
            self._free_end(right, LEFT)
            if self.rng.bernoulli(self.params.p_conn[att.level - 1]):
                if att.level == self.params.N:
                    passed: bool | None = None
                    if self.params.final_projection is not None:
                        passed = self.rng.bernoulli(self.params.final_projection)
                    terminal.append(passed)
                    if stop_on_success:
                        # trial over: later due attempts stay unresolved
                        state.pending = remaining + state.pending[idx + 1 :]
                        return terminal
                    self._free_end(left, LEFT)
                    self._free_end(right, RIGHT)
                else:
                    joined = Link(
                        link_id=state.next_link_id,
                        level=att.level,
                        span_start=left.span_start,
                        left_address=left.left_address,
                        right_address=right.right_address,
                        created_at=clock_next,
                    )
                    state.next_link_id += 1
                    state.links[joined.link_id] = joined
                    self.state.element(
                        joined.span_start, LEFT, joined.left_address
                    ).link_id = joined.link_id
                    self.state.element(
                        joined.span_end - 1, RIGHT, joined.right_address
                    ).link_id = joined.link_id
            else:
                self._free_end(left, LEFT)
                self._free_end(right, RIGHT)
        state.pending = remaining
        return terminal

    def _match(self) -> None:
        state = self.state
        params = self.params
        clock_next = state.clock + 1

        def eligible(link: Link) -> bool:
            return usable(link.created_at, clock_next, params.tau)

        for level in range(1, params.N + 1):
            size = 2**level
            for block in range(0, params.segments, size):
                mid = block + size // 2
                lefts = [l for l in self._available(level - 1, block) if eligible(l)]
                rights = [l for l in self._available(level - 1, mid) if eligible(l)]
                if params.architecture.value == "parallel":
                    by_addr_left = {l.left_address: l for l in lefts}
                    by_addr_right = {l.left_address: l for l in rights}
                    pairs = [
                        (by_addr_left[j], by_addr_right[j])
                        for j in range(params.n)
                        if j in by_addr_left and j in by_addr_right
                    ]
                else:
                    order = lambda l: (l.created_at, l.left_address)  # noqa: E731
                    lefts.sort(key=order)
                    rights.sort(key=order)
                    pairs = list(zip(lefts, rights))
                for left, right in pairs:
                    del state.links[left.link_id]
                    del state.links[right.link_id]
                    state.pending.append(
                        PendingAttempt(
                            level=level,
                            node_index=mid,
                            resolve_at=clock_next + params.level_latency[level - 1],
                            left_link=left,
                            right_link=right,
                        )
                    )
                    self.attempts_by_level[level] += 1

    def _cull(self) -> None:
        state = self.state
        clock_next = state.clock + 1
        doomed = [
            link
            for link in state.links.values()
            if clock_next - link.created_at >= self.params.tau
        ]
        doomed.sort(key=lambda l: (l.level, l.span_start, l.left_address))
        for link in doomed:
            self._free_end(link, LEFT)
            self._free_end(link, RIGHT)
            del state.links[link.link_id]
            self.expiries += 1

    # -------------------------------------------------------------- driving

    def step(self, stop_on_success: bool = False) -> list[bool | None]:
        """Advance one unit; return terminal successes completed this instant.

        With stop_on_success the step aborts at the first delivered pair
        (mid-resolution, exactly like the trial-mode kernel) and the state
        is no longer advanced past it.
        """
        self._generate()
        terminal = self._resolve(stop_on_success)
        if stop_on_success and terminal:
            self.state.clock += 1
            return terminal
        self._match()
        self._cull()
        self.state.clock += 1
        if self.validate:
            self.state.check_conservation()
        return terminal


def run_trial_reference(
    params: RepeaterParams, seed: int, max_time: int, validate: bool = True
):
    """Trial-mode mirror of the compiled kernel; same return fields."""
    eng = ReferenceEngine(params, seed, validate=validate)
    while eng.state.clock < max_time:
        terminal = eng.step(stop_on_success=True)
        if terminal:
            passed = terminal[0]
            return (
                False,
                eng.state.clock,
                eng.expiries,
                passed,
                tuple(eng.attempts_by_level),
            )
    return (True, max_time, eng.expiries, None, tuple(eng.attempts_by_level))


def run_horizon_reference(
    params: RepeaterParams,
    seed: int,
    horizon: int,
    batches: int,
    validate: bool = True,
):
    """Horizon-mode mirror of the compiled kernel; same counters."""
    if horizon % batches != 0:
        raise ValueError("horizon must be a multiple of the batch count")
    batch_len = horizon // batches
    eng = ReferenceEngine(params, seed, validate=validate)
    batch_succ = [0] * batches
    batch_proj = [0] * batches
    successes = 0
    successes_proj = 0
    for t in range(horizon):
        for passed in eng.step(stop_on_success=False):
            successes += 1
            batch_succ[t // batch_len] += 1
            if passed is None or passed:
                successes_proj += 1
                batch_proj[t // batch_len] += 1
    return (
        successes,
        successes_proj,
        eng.expiries,
        tuple(eng.attempts_by_level),
        batch_succ,
        batch_proj,
    )
