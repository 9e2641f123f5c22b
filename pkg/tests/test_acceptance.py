"""Release acceptance checks, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v`` to get one pass/fail line
per criterion. Statistical criteria run fixed seeds whose margins were
verified well inside the stated tolerances, so reruns are deterministic.
The whole file finishes in about a minute on one core.
"""

from __future__ import annotations

import math

from qrepsim.analytics import (
    asymptotic_in_regime,
    mean_Z_asymptotic,
    mean_Z_finite,
    mean_time_finite,
    mean_time_infinite,
    multiplexed_rate,
)
from qrepsim.dlcz import Detector, PhysicalParams, derive, lifetime_to_units
from qrepsim.oracle import (
    cycle_stats_minimal_memory,
    exact_mean_time_doubling,
    exact_rate_multiplexed,
)
from qrepsim.params import Architecture, RepeaterParams
from qrepsim.simulator import SweepSpec, estimate_rate, run_trial, sweep

P_GEN_GRID = (0.05, 0.2, 0.5)
P_CONN_GRID = (0.3, 1.0)
TAU_GRID = (0, 1, 2, 5, 10)

REFERENCE_HARDWARE = PhysicalParams(
    total_length_km=1000.0,
    levels=3,
    fiber_loss_db_per_km=0.16,
    eta0=0.01,
    eta=0.9,
    detector=Detector.NPRD,
)

# One-sided bound for a rate whose horizon produced zero successes: the
# largest mean count consistent with seeing none at the 3-sigma level
# (exp(-6.6) ~ 1.4e-3).
ZERO_COUNT_BOUND = 6.6


def _rate_upper(estimate) -> float:
    if estimate.successes == 0:
        return ZERO_COUNT_BOUND / estimate.trials_or_horizon
    return estimate.mean_rate + 3.0 * estimate.std_error


def _rate_lower(estimate) -> float:
    return estimate.mean_rate - 3.0 * estimate.std_error


def test_criterion_01_dlcz_derived_probabilities() -> None:
    """1000 km, 8 segments, NPRD: the five derived values hit their targets."""
    derived = derive(REFERENCE_HARDWARE)
    # 5e-4 absolute per the release contract; P_1 = 0.6975 sits exactly on
    # the boundary, so allow one ulp-scale epsilon for the float comparison
    tol = 5e-4 + 1e-9
    assert abs(derived.p0 - 0.001) <= tol
    targets = (0.698, 0.496, 0.311)
    assert len(derived.p_conn) == 3
    for got, want in zip(derived.p_conn, targets):
        assert abs(got - want) <= tol
    assert derived.epsilon is not None
    assert abs(derived.epsilon - 0.206) <= tol


def test_criterion_02_closed_form_matches_hitting_time_oracle() -> None:
    """Doubling-time closed form vs the absorbing-chain solver, 1e-9 relative."""
    for p_gen in P_GEN_GRID:
        for p_conn in P_CONN_GRID:
            for tau in TAU_GRID:
                closed = mean_time_finite(p_gen, p_conn, tau)
                exact = exact_mean_time_doubling(p_gen, p_conn, tau)
                assert abs(closed - exact) <= 1e-9 * exact, (p_gen, p_conn, tau)


def test_criterion_03_rate_identity_at_n_equal_one() -> None:
    """rate(n=1) * mean time == 1 to 1e-12, and alpha(n=1) is exactly 1."""
    for p_gen in P_GEN_GRID:
        for p_conn in P_CONN_GRID:
            for tau in TAU_GRID:
                result = multiplexed_rate(p_gen, p_conn, tau, 1)
                assert result.alpha == 1.0, (p_gen, p_conn, tau)
                product = result.rate * mean_time_finite(p_gen, p_conn, tau)
                assert abs(product - 1.0) <= 1e-12, (p_gen, p_conn, tau)


def test_criterion_04_simulated_mean_time_matches_closed_form() -> None:
    """1e6 independent trials of the unit doubling step land within 3 SE."""
    target = exact_mean_time_doubling(0.2, 1.0, 1)
    assert abs(target - 178.0 / 13.0) < 1e-12  # frozen oracle value 13.6923
    params = RepeaterParams(
        N=1, n=1, tau=1, p_gen=0.2, p_conn=(1.0,), concurrent_generation=False
    )
    estimate = estimate_rate(params, 424242, {"trials": 1_000_000})
    assert estimate.flag == ""
    mean_time = 1.0 / estimate.mean_rate
    se_time = estimate.std_error / estimate.mean_rate**2
    assert abs(mean_time - target) <= 3.0 * se_time


def test_criterion_05_simulated_rate_matches_exact_chain() -> None:
    """Multiplexed n=2 batch-means rate within 3 sigma of the exact chain."""
    for tau, seed in ((2, 5002), (4, 5004)):
        params = RepeaterParams(
            N=1,
            n=2,
            tau=tau,
            p_gen=0.2,
            p_conn=(0.5,),
            architecture=Architecture.MULTIPLEXED,
            concurrent_generation=False,
        )
        estimate = estimate_rate(params, seed, {"horizon": 10_000_000})
        exact = exact_rate_multiplexed(0.2, 0.5, tau, 2)
        assert abs(estimate.mean_rate - exact) <= 3.0 * estimate.std_error, tau


def test_criterion_06_multiplexing_beats_parallel_and_curves_collapse() -> None:
    """Ordering of architectures and the parallel fractional-rate collapse.

    Part one: multiplexed n=5 outruns parallel n=10 at every lifetime on
    the grid (verified margins are 9 sigma and larger). Part two: the
    parallel fractional curve rate(tau)/rate(large tau) is n-independent,
    so the n=5 and n=10 curves match the n=1 curve within combined noise.
    """
    horizon = 2_000_000
    for tau in (0, 1, 2, 5, 10, 20):
        mux = estimate_rate(
            RepeaterParams(
                N=1, n=5, tau=tau, p_gen=0.01, p_conn=(0.1,),
                architecture=Architecture.MULTIPLEXED,
            ),
            601 + tau,
            {"horizon": horizon},
        )
        par = estimate_rate(
            RepeaterParams(
                N=1, n=10, tau=tau, p_gen=0.01, p_conn=(0.1,),
                architecture=Architecture.PARALLEL,
            ),
            701 + tau,
            {"horizon": horizon},
        )
        assert mux.mean_rate >= par.mean_rate, tau

    tau_infinite = 2500  # effectively infinite: p_gen * tau >> 1
    fractions: dict[int, dict[int, tuple[float, float]]] = {}
    for n in (1, 5, 10):
        base = estimate_rate(
            RepeaterParams(
                N=1, n=n, tau=tau_infinite, p_gen=0.01, p_conn=(0.1,),
                architecture=Architecture.PARALLEL,
            ),
            811 + 17 * n + tau_infinite,
            {"horizon": 3_000_000},
        )
        fractions[n] = {}
        for tau in (0, 2, 10, 50):
            est = estimate_rate(
                RepeaterParams(
                    N=1, n=n, tau=tau, p_gen=0.01, p_conn=(0.1,),
                    architecture=Architecture.PARALLEL,
                ),
                811 + 17 * n + tau,
                {"horizon": 3_000_000},
            )
            ratio = est.mean_rate / base.mean_rate
            se = ratio * math.hypot(
                est.std_error / est.mean_rate, base.std_error / base.mean_rate
            )
            fractions[n][tau] = (ratio, se)
    for n in (5, 10):
        for tau in (0, 2, 10, 50):
            ratio_n, se_n = fractions[n][tau]
            ratio_1, se_1 = fractions[1][tau]
            assert abs(ratio_n - ratio_1) <= 3.0 * math.hypot(se_n, se_1), (n, tau)


def test_criterion_07_memory_insensitivity_of_multiplexed_chains() -> None:
    """Three-level chains on DLCZ-derived hardware, lifetimes from ms.

    With lifetimes of 300/1000/3000 ms (the converted grid points at or
    above 160 units; 100 ms floors to 159), the multiplexed n=10 rate
    varies by less than 2x while the parallel n=10 rate climbs more than
    10x over the same span. At 100 ms, multiplexed n=10 beats parallel
    n=1000 outright. Rates compare without the terminal projection, which
    rescales every architecture equally.
    """
    derived = derive(REFERENCE_HARDWARE)

    def chain(arch: Architecture, n: int, tau: int) -> RepeaterParams:
        return RepeaterParams(
            N=3,
            n=n,
            tau=tau,
            p_gen=derived.p0,
            p_conn=derived.p_conn,
            architecture=arch,
            concurrent_generation=True,
        )

    flat_taus = tuple(lifetime_to_units(ms, derived) for ms in (300.0, 1000.0, 3000.0))
    assert flat_taus == (479, 1598, 4796)
    assert all(tau >= 160 for tau in flat_taus)

    mux_rates = []
    for tau in flat_taus:
        est = estimate_rate(
            chain(Architecture.MULTIPLEXED, 10, tau), 2000 + tau, {"horizon": 4_000_000}
        )
        mux_rates.append(est)
    ratio_bound = max(_rate_upper(e) for e in mux_rates) / min(
        _rate_lower(e) for e in mux_rates
    )
    assert ratio_bound < 2.0

    par_low = estimate_rate(
        chain(Architecture.PARALLEL, 10, 479), 2479, {"horizon": 20_000_000}
    )
    par_high = estimate_rate(
        chain(Architecture.PARALLEL, 10, 4796), 2796, {"horizon": 4_000_000}
    )
    assert _rate_lower(par_high) > 10.0 * _rate_upper(par_low)

    tau_small = lifetime_to_units(100.0, derived)
    assert tau_small == 159
    mux_small = estimate_rate(
        chain(Architecture.MULTIPLEXED, 10, tau_small), 2259, {"horizon": 4_000_000}
    )
    par_wide = estimate_rate(
        chain(Architecture.PARALLEL, 1000, tau_small), 2959, {"horizon": 1_000_000}
    )
    assert _rate_lower(mux_small) > _rate_upper(par_wide)


def test_criterion_08_minimal_memory_scaling_laws() -> None:
    """Exhaustive tau=0 cycle enumeration follows the small-rate laws.

    Parallel per-cycle success tracks n * p_gen**2 * p_conn; multiplexed
    tracks (n * p_gen)**2 * p_conn; both within 10 percent relative while
    n * p_gen stays at or below 0.1.
    """
    for n in (1, 2, 5, 10):
        for p_gen in (0.002, 0.005, 0.01):
            if n * p_gen > 0.1:
                continue
            for p_conn in (0.3, 1.0):
                par = cycle_stats_minimal_memory(p_gen, p_conn, n, "parallel")
                law_par = n * p_gen**2 * p_conn
                assert abs(par.p_success - law_par) <= 0.10 * law_par, (n, p_gen, p_conn)
                mux = cycle_stats_minimal_memory(p_gen, p_conn, n, "multiplexed")
                law_mux = (n * p_gen) ** 2 * p_conn
                assert abs(mux.p_success - law_mux) <= 0.10 * law_mux, (n, p_gen, p_conn)


def test_criterion_09_determinism_and_parallel_sweep_invariance() -> None:
    """Equal seeds give equal trials; worker count cannot change a sweep."""
    params = RepeaterParams(
        N=2,
        n=3,
        tau=2,
        p_gen=0.35,
        p_conn=(0.6, 0.6),
        architecture=Architecture.MULTIPLEXED,
        final_projection=0.5,
    )
    first = run_trial(params, 987654321)
    assert run_trial(params, 987654321) == first
    assert run_trial(params, 987654321) == first

    spec = SweepSpec(
        base=RepeaterParams(N=1, n=2, tau=1, p_gen=0.3, p_conn=(0.8,)),
        axes=(
            ("architecture", (Architecture.PARALLEL, Architecture.MULTIPLEXED)),
            ("tau", (0, 2)),
        ),
        budget={"trials": 400},
    )
    serial = sweep(spec, 55, workers=1)
    concurrent = sweep(spec, 55, workers=3)
    assert serial == concurrent


def test_criterion_10_limit_behaviour() -> None:
    """Finite-lifetime means fall monotonically to the infinite-lifetime value,
    the small-p_gen expansion holds in its stated regime, and the
    residual-entanglement factor vanishes as n * p_gen * tau grows.
    """
    for p_gen, p_conn, tau_max in ((0.2, 0.5, 200), (0.05, 0.3, 800)):
        infinite = mean_time_infinite(p_gen, p_conn)
        previous = mean_time_finite(p_gen, p_conn, 0)
        for tau in range(1, tau_max + 1):
            current = mean_time_finite(p_gen, p_conn, tau)
            assert current <= previous + 1e-12
            assert current >= infinite - 1e-12
            previous = current
        assert abs(previous - infinite) <= 1e-12 * infinite

    for p_gen in (0.001, 0.002):
        for tau in (5, 10, 20):
            assert asymptotic_in_regime(p_gen, tau)
            exact = mean_Z_finite(p_gen, tau)
            approx = mean_Z_asymptotic(p_gen, tau)
            assert abs(approx - exact) <= 0.05 * exact, (p_gen, tau)

    alphas = [multiplexed_rate(0.1, 0.5, 50, n).alpha for n in (2, 20, 100, 400)]
    assert all(later < earlier for earlier, later in zip(alphas, alphas[1:]))
    assert alphas[-1] < 1e-10
