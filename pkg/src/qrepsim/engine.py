"""Compiled unit-step engine for repeater-chain Monte Carlo.

The same step contract is implemented twice in this package: here with
numba-compiled kernels for production runs, and in :mod:`qrepsim.reference`
as a transparent object-level implementation used to validate this one.
Both consume the SplitMix64 stream in the identical order, so equal seeds
must give identical trajectories, not merely statistically similar ones.

Step contract, one clock unit from t to t+1
-------------------------------------------
1. Generation. Every address whose two elements are vacuum at t attempts
   generation, provided its segment is not spanned by an in-flight
   connection (always allowed when concurrent generation is on). Draws run
   segment-ascending, address-ascending; a success stores a level-0 link
   with creation time t+1.
2. Resolution. Connection attempts due at t+1 resolve in launch order, one
   Bernoulli draw each. The two middle elements always return to vacuum.
   Failure clears the two outer elements as well. Success below the top
   level yields the joined link, stamped with the resolution instant: a
   connection writes new entanglement, so the stored pair starts a fresh
   lifetime and is eligible for further matching at this same instant.
   Success at the top level is one delivered end-to-end pair.
3. Matching. Levels ascend 1..N over nearest-neighbour blocks of 2**k
   segments. A link is eligible while its age is at most tau. The parallel
   policy joins only links holding the same address lane on both sides; the
   multiplexed policy sorts each side oldest-first (ties by left address)
   and pairs greedily. Matched links are consumed on launch; the attempt
   resolves level_latency[k-1] units later.
4. Cull. Unmatched links whose age has reached tau are dropped and their
   elements freed for the next unit. Running after matching grants an
   age-tau link its final matching chance before removal.

Storage notes
-------------
A link's storage slot equals its left-end address, which is unique within
its span block because two links cannot share a memory element. Level-N
links are never stored: a top-level connection success is terminal.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .rng import GOLDEN as _GOLDEN_INT

GOLDEN = np.uint64(_GOLDEN_INT)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0

# status codes returned by the kernels
STATUS_SUCCESS = 0
STATUS_TRUNCATED = 1
STATUS_HORIZON_DONE = 2

MODE_TRIAL = 0
MODE_HORIZON = 1


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _uniform(state):
    """Advance the SplitMix64 state and return (new_state, uniform)."""
    state = state + GOLDEN
    return state, np.float64(_mix(state) >> np.uint64(11)) * _INV53


@njit(cache=True)
def _simulate(
    state,
    mode,
    limit,
    n_levels,
    n_addr,
    tau,
    p_gen,
    p_conn,
    latency,
    parallel,
    concurrent,
    fproj,
    batch_len,
    attempts_out,
    batch_succ_out,
    batch_proj_out,
):
    """Run one trajectory; see the module docstring for the step contract.

    Trial mode stops at the first delivered pair; horizon mode keeps the
    chain running for exactly `limit` units, crediting each success to the
    batch of the unit that completed it.

    Returns (status, end_time, successes, successes_projected, expiries,
    projection_passed) with projection_passed in {-1: n/a, 0, 1} meaningful
    for trial mode only.
    """
    n_segments = 1 << n_levels

    occ_l = np.zeros((n_segments, n_addr), np.uint8)
    occ_r = np.zeros((n_segments, n_addr), np.uint8)
    # created[k, span, slot] < 0 means empty; slot index == left address
    created = np.full((n_levels, n_segments, n_addr), -1, np.int64)
    link_jr = np.zeros((n_levels, n_segments, n_addr), np.int64)
    cover = np.zeros(n_segments, np.int64)

    cap = 2 * n_segments * n_addr + 8
    att_level = np.zeros(cap, np.int64)
    att_block = np.zeros(cap, np.int64)
    att_resolve = np.zeros(cap, np.int64)
    att_jl = np.zeros(cap, np.int64)
    att_jr = np.zeros(cap, np.int64)
    att_jinl = np.zeros(cap, np.int64)  # left parent's right-end address
    att_jinr = np.zeros(cap, np.int64)  # right parent's left-end address
    att_count = 0

    # matching scratch: candidates on each side, slot-ascending
    lc = np.zeros(n_addr, np.int64)
    ljl = np.zeros(n_addr, np.int64)
    ljr = np.zeros(n_addr, np.int64)
    rc = np.zeros(n_addr, np.int64)
    rjl = np.zeros(n_addr, np.int64)
    rjr = np.zeros(n_addr, np.int64)

    expiries = np.int64(0)
    successes = np.int64(0)
    successes_proj = np.int64(0)

    t = np.int64(0)
    while t < limit:
        tnext = t + 1

        # ---- phase 1: generation during the unit (t, t+1)
        for s in range(n_segments):
            if concurrent or cover[s] == 0:
                for j in range(n_addr):
                    if occ_l[s, j] == 0 and occ_r[s, j] == 0:
                        attempts_out[0] += 1
                        state, u = _uniform(state)
                        if u < p_gen:
                            created[0, s, j] = tnext
                            link_jr[0, s, j] = j
                            occ_l[s, j] = 1
                            occ_r[s, j] = 1

        # ---- phase 2: resolve attempts due at t+1, in launch order
        write = 0
        for i in range(att_count):
            if att_resolve[i] != tnext:
                att_level[write] = att_level[i]
                att_block[write] = att_block[i]
                att_resolve[write] = att_resolve[i]
                att_jl[write] = att_jl[i]
                att_jr[write] = att_jr[i]
                att_jinl[write] = att_jinl[i]
                att_jinr[write] = att_jinr[i]
                write += 1
                continue
            k = att_level[i]
            a = att_block[i]
            size = np.int64(1) << k
            for s in range(a, a + size):
                cover[s] -= 1
            mid = a + (size >> 1)
            occ_r[mid - 1, att_jinl[i]] = 0
            occ_l[mid, att_jinr[i]] = 0
            state, u = _uniform(state)
            if u < p_conn[k - 1]:
                if k == n_levels:
                    successes += 1
                    passed = np.int64(1)
                    if fproj >= 0.0:
                        state, up = _uniform(state)
                        if up >= fproj:
                            passed = np.int64(0)
                    if mode == MODE_TRIAL:
                        return (
                            STATUS_SUCCESS,
                            tnext,
                            successes,
                            successes + passed - 1,
                            expiries,
                            passed if fproj >= 0.0 else np.int64(-1),
                        )
                    batch = t // batch_len
                    batch_succ_out[batch] += 1
                    if passed == 1:
                        successes_proj += 1
                        batch_proj_out[batch] += 1
                    occ_l[a, att_jl[i]] = 0
                    occ_r[a + size - 1, att_jr[i]] = 0
                else:
                    span = a >> k
                    created[k, span, att_jl[i]] = tnext
                    link_jr[k, span, att_jl[i]] = att_jr[i]
            else:
                occ_l[a, att_jl[i]] = 0
                occ_r[a + size - 1, att_jr[i]] = 0
        att_count = write

        # ---- phase 3: matching, levels ascending, blocks ascending
        for k in range(1, n_levels + 1):
            size = np.int64(1) << k
            half = size >> 1
            for a in range(0, n_segments, size):
                mid = a + half
                li = a >> (k - 1)
                ri = mid >> (k - 1)
                if parallel:
                    for j in range(n_addr):
                        clv = created[k - 1, li, j]
                        crv = created[k - 1, ri, j]
                        if (
                            clv >= 0
                            and tnext - clv <= tau
                            and crv >= 0
                            and tnext - crv <= tau
                        ):
                            att_level[att_count] = k
                            att_block[att_count] = a
                            att_resolve[att_count] = tnext + latency[k - 1]
                            att_jl[att_count] = j
                            att_jr[att_count] = link_jr[k - 1, ri, j]
                            att_jinl[att_count] = link_jr[k - 1, li, j]
                            att_jinr[att_count] = j
                            att_count += 1
                            attempts_out[k] += 1
                            for s in range(a, a + size):
                                cover[s] += 1
                            created[k - 1, li, j] = -1
                            created[k - 1, ri, j] = -1
                else:
                    nl = 0
                    for j in range(n_addr):
                        c = created[k - 1, li, j]
                        if c >= 0 and tnext - c <= tau:
                            lc[nl] = c
                            ljl[nl] = j
                            ljr[nl] = link_jr[k - 1, li, j]
                            nl += 1
                    nr = 0
                    for j in range(n_addr):
                        c = created[k - 1, ri, j]
                        if c >= 0 and tnext - c <= tau:
                            rc[nr] = c
                            rjl[nr] = j
                            rjr[nr] = link_jr[k - 1, ri, j]
                            nr += 1
                    # stable insertion sort by creation time; candidates
                    # entered slot-ascending, so ties stay address-ascending
                    for ii in range(1, nl):
                        ck, a1, a2 = lc[ii], ljl[ii], ljr[ii]
                        jj = ii - 1
                        while jj >= 0 and lc[jj] > ck:
                            lc[jj + 1] = lc[jj]
                            ljl[jj + 1] = ljl[jj]
                            ljr[jj + 1] = ljr[jj]
                            jj -= 1
                        lc[jj + 1] = ck
                        ljl[jj + 1] = a1
                        ljr[jj + 1] = a2
                    for ii in range(1, nr):
                        ck, a1, a2 = rc[ii], rjl[ii], rjr[ii]
                        jj = ii - 1
                        while jj >= 0 and rc[jj] > ck:
                            rc[jj + 1] = rc[jj]
                            rjl[jj + 1] = rjl[jj]
                            rjr[jj + 1] = rjr[jj]
                            jj -= 1
                        rc[jj + 1] = ck
                        rjl[jj + 1] = a1
                        rjr[jj + 1] = a2
                    pairs = min(nl, nr)
                    for ii in range(pairs):
                        att_level[att_count] = k
                        att_block[att_count] = a
                        att_resolve[att_count] = tnext + latency[k - 1]
                        att_jl[att_count] = ljl[ii]
                        att_jr[att_count] = rjr[ii]
                        att_jinl[att_count] = ljr[ii]
                        att_jinr[att_count] = rjl[ii]
                        att_count += 1
                        attempts_out[k] += 1
                        for s in range(a, a + size):
                            cover[s] += 1
                        created[k - 1, li, ljl[ii]] = -1
                        created[k - 1, ri, rjl[ii]] = -1

        # ---- phase 4: cull links whose age reached tau, unmatched above
        for k in range(n_levels):
            size = np.int64(1) << k
            for span in range(n_segments >> k):
                for j in range(n_addr):
                    c = created[k, span, j]
                    if c >= 0 and tnext - c >= tau:
                        created[k, span, j] = -1
                        a = span << k
                        occ_l[a, j] = 0
                        occ_r[a + size - 1, link_jr[k, span, j]] = 0
                        expiries += 1

        t = tnext

    if mode == MODE_TRIAL:
        return (STATUS_TRUNCATED, limit, np.int64(0), np.int64(0), expiries, np.int64(-1))
    return (
        STATUS_HORIZON_DONE,
        limit,
        successes,
        successes_proj,
        expiries,
        np.int64(-1),
    )


@njit(cache=True)
def _trial_batch(
    seed,
    first_index,
    count,
    max_time,
    n_levels,
    n_addr,
    tau,
    p_gen,
    p_conn,
    latency,
    parallel,
    concurrent,
    fproj,
    times_out,
    truncated_out,
    attempts_out,
):
    """Run `count` independent trials on derived streams.

    Trial j (0-based within this batch) runs on the stream derived from
    `seed` with index `first_index + j`, identical to calling the
    single-trial kernel on that stream, so batching is a pure speedup.
    Returns (successes, expiries_total, projection_passes); counters
    aggregate by summation, insensitive to trial order.
    """
    dummy = np.zeros(1, np.int64)
    expiries_total = np.int64(0)
    successes = np.int64(0)
    proj_passes = np.int64(0)
    for j in range(count):
        stream = _mix(
            np.uint64(seed) + np.uint64(first_index + j + 1) * GOLDEN
        )
        status, end_time, _succ, _proj, expiries, passed = _simulate(
            stream,
            MODE_TRIAL,
            max_time,
            n_levels,
            n_addr,
            tau,
            p_gen,
            p_conn,
            latency,
            parallel,
            concurrent,
            fproj,
            max_time,
            attempts_out,
            dummy,
            dummy,
        )
        times_out[j] = end_time
        truncated_out[j] = np.uint8(1) if status == STATUS_TRUNCATED else np.uint8(0)
        if status == STATUS_SUCCESS:
            successes += 1
            if passed == 1:
                proj_passes += 1
        expiries_total += expiries
    return successes, expiries_total, proj_passes


def simulate_trial(
    seed: int,
    max_time: int,
    n_levels: int,
    n_addr: int,
    tau: int,
    p_gen: float,
    p_conn: np.ndarray,
    latency: np.ndarray,
    parallel: bool,
    concurrent: bool,
    fproj: float,
):
    """Typed entry point for one trial; returns the raw kernel tuple plus counters."""
    attempts = np.zeros(n_levels + 1, np.int64)
    dummy = np.zeros(1, np.int64)
    status, end_time, successes, successes_proj, expiries, passed = _simulate(
        np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
        MODE_TRIAL,
        np.int64(max_time),
        np.int64(n_levels),
        np.int64(n_addr),
        np.int64(tau),
        float(p_gen),
        p_conn,
        latency,
        parallel,
        concurrent,
        float(fproj),
        np.int64(max_time),
        attempts,
        dummy,
        dummy,
    )
    return status, int(end_time), int(expiries), int(passed), attempts


def simulate_horizon(
    seed: int,
    horizon: int,
    batches: int,
    n_levels: int,
    n_addr: int,
    tau: int,
    p_gen: float,
    p_conn: np.ndarray,
    latency: np.ndarray,
    parallel: bool,
    concurrent: bool,
    fproj: float,
):
    """Typed entry point for one continuing trajectory cut into batches.

    `horizon` must be an exact multiple of `batches`; successes land in the
    batch owning the unit that completed them.
    """
    if horizon % batches != 0:
        raise ValueError("horizon must be a multiple of the batch count")
    attempts = np.zeros(n_levels + 1, np.int64)
    batch_succ = np.zeros(batches, np.int64)
    batch_proj = np.zeros(batches, np.int64)
    status, _end, successes, successes_proj, expiries, _passed = _simulate(
        np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
        MODE_HORIZON,
        np.int64(horizon),
        np.int64(n_levels),
        np.int64(n_addr),
        np.int64(tau),
        float(p_gen),
        p_conn,
        latency,
        parallel,
        concurrent,
        float(fproj),
        np.int64(horizon // batches),
        attempts,
        batch_succ,
        batch_proj,
    )
    assert status == STATUS_HORIZON_DONE
    return int(successes), int(successes_proj), int(expiries), attempts, batch_succ, batch_proj
