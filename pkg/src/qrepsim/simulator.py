"""Trial execution, rate estimation, and parameter sweeps.

Two estimation modes cover the two meanings of "rate":

* IndependentTrials runs many trials from the all-vacuum state and reports
  1 / mean(time_to_success) with a delta-method standard error. This is
  the right notion when every success resets the chain, i.e. n = 1.
* BatchMeans runs one long trajectory in which the chain keeps operating
  after each delivered pair, so residual links carry over; successes are
  counted per time in equal batches and the batch scatter gives the
  standard error. This is the steady-state rate notion, required for
  n > 1 where leftovers make the rate exceed 1/mean(time).

Seeds: trial ``j`` of an estimate runs on ``derive_stream(seed, j)``; a
batch-means trajectory runs on ``derive_stream(seed, 0)``; sweep point
``i`` receives ``derive_stream(base_seed, i)`` as its estimation seed.
Every stream is therefore reproducible from the one user-facing seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields as dataclass_fields, replace
from enum import Enum
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from . import engine as _engine
from . import reference as _reference
from .params import ParameterError, RepeaterParams, TimeUnits
from .rng import derive_stream

DEFAULT_MAX_TIME: TimeUnits = 10**9
DEFAULT_BATCHES = 20

FLAG_NO_SUCCESSES = "no successes"
FLAG_TRUNCATED = "truncated trials"


class Method(Enum):
    INDEPENDENT_TRIALS = "independent-trials"
    BATCH_MEANS = "batch-means"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one trial run from the all-vacuum state.

    attempts_by_level[0] counts generation attempts (Bernoulli draws);
    attempts_by_level[k] counts level-k connection launches. When the trial
    hits the max-time guard, truncated is True and time_to_success holds
    the cap rather than a success time.
    """

    time_to_success: TimeUnits
    attempts_by_level: tuple[int, ...]
    expiries: int
    final_projection_passed: bool | None
    truncated: bool


@dataclass(frozen=True)
class RateEstimate:
    """A success-rate estimate with its one-sigma error.

    Confidence intervals are mean_rate +/- z * std_error. trials_or_horizon
    echoes the budget actually consumed (trial count, or horizon length in
    units). successes_projected applies the final projection when the
    parameters carry one; otherwise it equals successes.
    """

    mean_rate: float
    std_error: float
    method: Method
    trials_or_horizon: int
    successes: int
    successes_projected: int
    flag: str = ""


def _kernel_args(params: RepeaterParams) -> tuple:
    return (
        params.N,
        params.n,
        params.tau,
        params.p_gen,
        np.asarray(params.p_conn, dtype=np.float64),
        np.asarray(params.level_latency, dtype=np.int64),
        params.architecture.value == "parallel",
        params.concurrent_generation,
        -1.0 if params.final_projection is None else params.final_projection,
    )


def run_trial(
    params: RepeaterParams,
    seed: int,
    max_time: TimeUnits = DEFAULT_MAX_TIME,
    backend: str = "compiled",
) -> TrialResult:
    """Simulate from all-vacuum until the first end-to-end pair.

    Deterministic in (params, seed): repeated calls return identical
    results, and the "reference" backend (slow, object-level, with
    conservation checks) returns the identical result as well.
    """
    if max_time < 1:
        raise ParameterError(f"max_time: must be positive, got {max_time!r}")
    if backend == "compiled":
        status, end_time, expiries, passed, attempts = _engine.simulate_trial(
            seed, max_time, *_kernel_args(params)
        )
        truncated = status == _engine.STATUS_TRUNCATED
        projection = None if passed < 0 else bool(passed)
        if truncated:
            projection = None
        return TrialResult(
            time_to_success=end_time,
            attempts_by_level=tuple(int(a) for a in attempts),
            expiries=expiries,
            final_projection_passed=projection,
            truncated=truncated,
        )
    if backend == "reference":
        truncated, end_time, expiries, passed, attempts = _reference.run_trial_reference(
            params, seed, max_time
        )
        return TrialResult(
            time_to_success=end_time,
            attempts_by_level=attempts,
            expiries=expiries,
            final_projection_passed=passed,
            truncated=truncated,
        )
    raise ParameterError(f"backend: expected compiled|reference, got {backend!r}")


def _parse_budget(budget: Mapping[str, int]) -> tuple[str, int]:
    if not isinstance(budget, Mapping) or len(budget) != 1:
        raise ParameterError(
            "budget: expected exactly one of {'trials': m} or {'horizon': h}"
        )
    ((kind, value),) = budget.items()
    if kind not in ("trials", "horizon"):
        raise ParameterError(f"budget: unknown key {kind!r}")
    if not isinstance(value, int) or value < 1:
        raise ParameterError(f"budget: {kind} must be a positive integer, got {value!r}")
    return kind, value


def estimate_rate(
    params: RepeaterParams,
    seed: int,
    budget: Mapping[str, int],
    max_time: TimeUnits = DEFAULT_MAX_TIME,
    batches: int = DEFAULT_BATCHES,
    backend: str = "compiled",
) -> RateEstimate:
    """Estimate the success rate under a trials or horizon budget.

    {'trials': m} selects IndependentTrials; {'horizon': h} selects
    BatchMeans with `batches` equal slices (h is rounded down to a
    multiple of the batch count). Truncated trials contribute the cap to
    the mean time, biasing the trial-mode rate upward; the returned flag
    marks such estimates. Zero successes return rate 0 and a flag.
    """
    kind, value = _parse_budget(budget)
    if backend not in ("compiled", "reference"):
        raise ParameterError(f"backend: expected compiled|reference, got {backend!r}")

    if kind == "trials":
        m = value
        if backend == "compiled":
            times = np.zeros(m, np.int64)
            truncated = np.zeros(m, np.uint8)
            attempts = np.zeros(params.N + 1, np.int64)
            successes, _expiries, proj_passes = _engine._trial_batch(
                np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
                0,
                m,
                max_time,
                *_kernel_args(params),
                times_out=times,
                truncated_out=truncated,
                attempts_out=attempts,
            )
            successes = int(successes)
            proj_passes = int(proj_passes)
            n_truncated = int(truncated.sum())
            times_f = times.astype(np.float64)
        else:
            results = [
                run_trial(params, derive_stream(seed, j), max_time, backend)
                for j in range(m)
            ]
            successes = sum(1 for r in results if not r.truncated)
            proj_passes = sum(
                1
                for r in results
                if not r.truncated and r.final_projection_passed in (None, True)
            )
            n_truncated = m - successes
            times_f = np.array([r.time_to_success for r in results], dtype=np.float64)
        if successes == 0:
            return RateEstimate(
                0.0, 0.0, Method.INDEPENDENT_TRIALS, m, 0, 0, FLAG_NO_SUCCESSES
            )
        mean_time = float(times_f.mean())
        se_time = float(times_f.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0
        rate = 1.0 / mean_time
        std_error = se_time / mean_time**2  # delta method for 1/x
        if params.final_projection is None:
            proj_passes = successes
        return RateEstimate(
            rate,
            std_error,
            Method.INDEPENDENT_TRIALS,
            m,
            successes,
            proj_passes,
            FLAG_TRUNCATED if n_truncated else "",
        )

    horizon = value
    if horizon < batches:
        raise ParameterError(
            f"budget: horizon {horizon} smaller than the batch count {batches}"
        )
    batch_len = horizon // batches
    used = batch_len * batches
    stream = derive_stream(seed, 0)
    if backend == "compiled":
        successes, proj, _expiries, _attempts, batch_succ, batch_proj = (
            _engine.simulate_horizon(stream, used, batches, *_kernel_args(params))
        )
        batch_succ = np.asarray(batch_succ, dtype=np.float64)
    else:
        successes, proj, _expiries, _attempts, batch_succ, batch_proj = (
            _reference.run_horizon_reference(params, stream, used, batches)
        )
        batch_succ = np.array(batch_succ, dtype=np.float64)
    if successes == 0:
        return RateEstimate(0.0, 0.0, Method.BATCH_MEANS, used, 0, 0, FLAG_NO_SUCCESSES)
    batch_rates = batch_succ / batch_len
    rate = float(batch_rates.mean())
    std_error = float(batch_rates.std(ddof=1) / math.sqrt(batches))
    return RateEstimate(rate, std_error, Method.BATCH_MEANS, used, successes, proj)


# --------------------------------------------------------------------------
# Parameter sweeps
# --------------------------------------------------------------------------

_SWEEPABLE = {f.name for f in dataclass_fields(RepeaterParams)}


@dataclass(frozen=True)
class SweepSpec:
    """A declarative cross-product of parameter values.

    axes is an ordered list of (field-name, values); the first axis varies
    slowest. Each grid point is the base parameter set with the axis
    fields replaced, re-validated on construction. Bases expressed as
    physical hardware parameters are derived into a RepeaterParams by the
    caller before constructing the SweepSpec.
    """

    base: RepeaterParams
    axes: tuple[tuple[str, tuple], ...]
    budget: Mapping[str, int]
    out_path: str | None = None
    out_format: str = "csv"

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "axes",
            tuple((name, tuple(values)) for name, values in self.axes),
        )
        for name, values in self.axes:
            if name not in _SWEEPABLE:
                raise ParameterError(
                    f"axes: {name!r} is not a chain parameter "
                    f"(expected one of {sorted(_SWEEPABLE)})"
                )
            if not values:
                raise ParameterError(f"axes: {name!r} has an empty value list")
        _parse_budget(self.budget)
        if self.out_format not in ("csv", "json"):
            raise ParameterError(
                f"out_format: expected csv|json, got {self.out_format!r}"
            )

    @property
    def size(self) -> int:
        size = 1
        for _, values in self.axes:
            size *= len(values)
        return size

    def grid(self) -> list[RepeaterParams]:
        """All grid points in row-major order (first axis slowest)."""
        if not self.axes:
            return [self.base]
        names = [name for name, _ in self.axes]
        points = []
        for combo in product(*(values for _, values in self.axes)):
            points.append(replace(self.base, **dict(zip(names, combo))))
        return points


@dataclass(frozen=True)
class SweepRow:
    """One sweep grid point: parameter echo plus estimate or failure."""

    index: int
    params: RepeaterParams
    seed: int
    estimate: RateEstimate | None
    error: str = ""


def _sweep_point(
    args: tuple[int, RepeaterParams, int, Mapping[str, int], int, int]
) -> SweepRow:
    index, params, seed, budget, max_time, batches = args
    try:
        est = estimate_rate(params, seed, budget, max_time=max_time, batches=batches)
        return SweepRow(index, params, seed, est)
    except Exception as exc:  # noqa: BLE001 - failures become flagged rows
        return SweepRow(index, params, seed, None, error=f"{type(exc).__name__}: {exc}")


def sweep(
    params_grid: SweepSpec,
    base_seed: int,
    workers: int | None = None,
    max_time: TimeUnits = DEFAULT_MAX_TIME,
    batches: int = DEFAULT_BATCHES,
) -> list[SweepRow]:
    """Estimate every grid point; rows come back in grid order.

    Point i uses the seed derive_stream(base_seed, i), so the output is
    a pure function of (spec, base_seed) no matter how many workers run
    the points. Per-point failures become rows with a non-empty error
    field; they never abort the sweep.
    """
    tasks = [
        (i, params, derive_stream(base_seed, i), params_grid.budget, max_time, batches)
        for i, params in enumerate(params_grid.grid())
    ]
    if workers is not None and workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, tasks))
    return [_sweep_point(task) for task in tasks]
