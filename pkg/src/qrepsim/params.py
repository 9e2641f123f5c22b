"""Core domain types for repeater-chain simulations.

Time is a discrete clock counting elementary units (the duration of one
entanglement-generation attempt over a fundamental segment). A stored link
created at clock ``c`` is usable while ``clock - c <= tau`` and is treated
exactly like vacuum once that bound is exceeded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from . import config as _cfg

TimeUnits = int
Probability = float


class ParameterError(ValueError):
    """A parameter failed validation; the message names the offending field."""


class Architecture(Enum):
    PARALLEL = "parallel"
    MULTIPLEXED = "multiplexed"

    def __str__(self) -> str:  # CSV / CLI friendly
        return self.value


def usable(created_at: TimeUnits, clock: TimeUnits, tau: TimeUnits) -> bool:
    """Expiry predicate: a link created at `created_at` is usable at `clock`.

    Inclusive convention: age equal to tau is still usable; age tau+1 is not.
    Pure function of its arguments.
    """
    return clock - created_at <= tau


def default_level_latency(N: int) -> tuple[TimeUnits, ...]:
    """Classical-signal cost of a level-k connection: half the joined span."""
    return tuple(2 ** (k - 1) for k in range(1, N + 1))


@dataclass(frozen=True)
class RepeaterParams:
    """Full parameter set for one repeater chain.

    Fields
    ------
    N : doubling levels; the chain has 2**N fundamental segments.
    n : memory-element pairs per segment.
    tau : memory lifetime in time units (inclusive usability bound).
    p_gen : success probability of one generation attempt (one pair, one unit).
    p_conn : success probability of a connection attempt at levels 1..N.
    level_latency : classical-transfer cost per connection level, units.
    architecture : connection matching policy.
    final_projection : optional success probability of the terminal projection
        applied to a distributed pair (None to disable).
    concurrent_generation : whether vacuum pairs in segments spanned by an
        in-flight connection keep attempting generation during the wait.
    """

    N: int
    n: int
    tau: TimeUnits
    p_gen: Probability
    p_conn: tuple[Probability, ...]
    level_latency: tuple[TimeUnits, ...] = ()
    architecture: Architecture = Architecture.MULTIPLEXED
    final_projection: Probability | None = None
    concurrent_generation: bool = True

    def __post_init__(self) -> None:
        if not self.level_latency:
            object.__setattr__(self, "level_latency", default_level_latency(self.N))
        if not isinstance(self.p_conn, tuple):
            object.__setattr__(self, "p_conn", tuple(self.p_conn))
        if not isinstance(self.level_latency, tuple):
            object.__setattr__(self, "level_latency", tuple(self.level_latency))
        validate(self)

    @property
    def segments(self) -> int:
        return 2**self.N

    def to_config_text(self) -> str:
        """Serialize to the flat key-value config format (round-trips)."""
        entries = {
            "chain.N": str(self.N),
            "chain.n": str(self.n),
            "chain.tau": str(self.tau),
            "chain.p_gen": _cfg.fmt_float(self.p_gen),
            "chain.p_conn": ",".join(_cfg.fmt_float(p) for p in self.p_conn),
            "chain.level_latency": ",".join(str(v) for v in self.level_latency),
            "chain.architecture": self.architecture.value,
            "chain.concurrent_generation": "true" if self.concurrent_generation else "false",
        }
        if self.final_projection is not None:
            entries["chain.final_projection"] = _cfg.fmt_float(self.final_projection)
        return _cfg.format_config_text(entries)

    @classmethod
    def from_config_text(cls, text: str) -> "RepeaterParams":
        raw = _cfg.parse_config_text(text)
        try:
            arch = Architecture(raw["chain.architecture"])
        except KeyError:
            raise ParameterError("architecture: missing from config") from None
        except ValueError:
            raise ParameterError(
                f"architecture: {raw['chain.architecture']!r} is not one of "
                f"{[a.value for a in Architecture]}"
            ) from None
        try:
            fp = raw.get("chain.final_projection")
            return cls(
                N=_cfg.as_int("chain.N", raw["chain.N"]),
                n=_cfg.as_int("chain.n", raw["chain.n"]),
                tau=_cfg.as_int("chain.tau", raw["chain.tau"]),
                p_gen=_cfg.as_float("chain.p_gen", raw["chain.p_gen"]),
                p_conn=tuple(_cfg.as_float_list("chain.p_conn", raw["chain.p_conn"])),
                level_latency=tuple(
                    _cfg.as_int_list("chain.level_latency", raw["chain.level_latency"])
                ),
                architecture=arch,
                final_projection=None if fp is None else _cfg.as_float("chain.final_projection", fp),
                concurrent_generation=_cfg.as_bool(
                    "chain.concurrent_generation", raw.get("chain.concurrent_generation", "true")
                ),
            )
        except KeyError as exc:
            raise ParameterError(f"{exc.args[0]}: missing from config") from None


def _check_probability(name: str, value: float) -> None:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ParameterError(f"{name}: expected a number, got {type(value).__name__}")
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name}: probability must be in [0, 1], got {value!r}")


def validate(params: RepeaterParams) -> None:
    """Raise ParameterError naming the first offending field, if any."""
    if not isinstance(params.N, int) or params.N < 1:
        raise ParameterError(f"N: must be a positive integer, got {params.N!r}")
    if not isinstance(params.n, int) or params.n < 1:
        raise ParameterError(f"n: must be a positive integer, got {params.n!r}")
    if not isinstance(params.tau, int) or params.tau < 0:
        raise ParameterError(f"tau: must be a non-negative integer, got {params.tau!r}")
    _check_probability("p_gen", params.p_gen)
    if len(params.p_conn) != params.N:
        raise ParameterError(
            f"p_conn: expected {params.N} entries (one per level), got {len(params.p_conn)}"
        )
    for k, p in enumerate(params.p_conn, start=1):
        _check_probability(f"p_conn[{k - 1}] (level {k})", p)
    if len(params.level_latency) != params.N:
        raise ParameterError(
            f"level_latency: expected {params.N} entries, got {len(params.level_latency)}"
        )
    for k, lat in enumerate(params.level_latency):
        if not isinstance(lat, int) or lat < 1:
            raise ParameterError(
                f"level_latency[{k}]: must be a positive integer of time units, got {lat!r}"
            )
    if not isinstance(params.architecture, Architecture):
        raise ParameterError(f"architecture: expected Architecture, got {params.architecture!r}")
    if params.final_projection is not None:
        _check_probability("final_projection", params.final_projection)
    if not isinstance(params.concurrent_generation, bool):
        raise ParameterError(
            f"concurrent_generation: expected bool, got {params.concurrent_generation!r}"
        )


# --------------------------------------------------------------------------
# Evolving chain state (used by the reference engine and state snapshots)
# --------------------------------------------------------------------------

LEFT = 0
RIGHT = 1


@dataclass
class Link:
    """A live entangled link spanning segments [span_start, span_start+2**level)."""

    link_id: int
    level: int
    span_start: int
    left_address: int
    right_address: int
    created_at: TimeUnits  # when this link came into existence at its level

    @property
    def span_len(self) -> int:
        return 2**self.level

    @property
    def span_end(self) -> int:  # exclusive
        return self.span_start + self.span_len

    def age(self, clock: TimeUnits) -> TimeUnits:
        return clock - self.created_at


@dataclass
class MemoryElement:
    """One memory element at a site; vacuum when link_id is None."""

    address: int
    link_id: int | None = None

    @property
    def is_vacuum(self) -> bool:
        return self.link_id is None


@dataclass
class Segment:
    """A fundamental segment: n element pairs, one left site and one right site."""

    index: int
    left: list[MemoryElement]
    right: list[MemoryElement]


@dataclass
class PendingAttempt:
    """A launched connection awaiting its classical-transfer result."""

    level: int
    node_index: int
    resolve_at: TimeUnits
    left_link: Link
    right_link: Link


@dataclass
class ChainState:
    """Complete evolving state of one chain."""

    params: RepeaterParams
    clock: TimeUnits = 0
    segments: list[Segment] = field(default_factory=list)
    links: dict[int, Link] = field(default_factory=dict)  # available links only
    pending: list[PendingAttempt] = field(default_factory=list)
    next_link_id: int = 0

    @classmethod
    def initial(cls, params: RepeaterParams) -> "ChainState":
        segs = [
            Segment(
                index=s,
                left=[MemoryElement(j) for j in range(params.n)],
                right=[MemoryElement(j) for j in range(params.n)],
            )
            for s in range(params.segments)
        ]
        return cls(params=params, segments=segs)

    def element(self, seg: int, side: int, address: int) -> MemoryElement:
        site = self.segments[seg].left if side == LEFT else self.segments[seg].right
        return site[address]

    def check_conservation(self) -> None:
        """Assert element/link occupancy bookkeeping is consistent.

        Every occupied element belongs to exactly one available link or one
        pending attempt; every link's two ends point back at it; live links
        per 2**k-segment block never exceed n.
        """
        claims: dict[tuple[int, int, int], int] = {}

        def claim(link: Link) -> None:
            lkey = (link.span_start, LEFT, link.left_address)
            rkey = (link.span_end - 1, RIGHT, link.right_address)
            for key in (lkey, rkey):
                if key in claims:
                    raise AssertionError(f"element {key} claimed twice")
                claims[key] = link.link_id

        for link in self.links.values():
            claim(link)
        for att in self.pending:
            claim(att.left_link)
            claim(att.right_link)

        for seg in self.segments:
            for side, site in ((LEFT, seg.left), (RIGHT, seg.right)):
                for elem in site:
                    key = (seg.index, side, elem.address)
                    if elem.is_vacuum:
                        if key in claims:
                            raise AssertionError(f"vacuum element {key} claimed by a link")
                    else:
                        if key not in claims:
                            raise AssertionError(f"occupied element {key} not claimed")

        per_block: dict[tuple[int, int], int] = {}
        for link in self.links.values():
            block = (link.level, link.span_start // link.span_len)
            per_block[block] = per_block.get(block, 0) + 1
        for att in self.pending:
            for link in (att.left_link, att.right_link):
                block = (link.level, link.span_start // link.span_len)
                per_block[block] = per_block.get(block, 0) + 1
        for (_, _), count in per_block.items():
            if count > self.params.n:
                raise AssertionError("more than n live links in one block")
