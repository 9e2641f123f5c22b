"""Tests for chain parameters, validation, and the config round trip."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrepsim.params import (
    Architecture,
    ParameterError,
    RepeaterParams,
    default_level_latency,
    usable,
)


def make_params(**overrides):
    base = dict(N=2, n=4, tau=10, p_gen=0.01, p_conn=(0.5, 0.5))
    base.update(overrides)
    return RepeaterParams(**base)


def test_segments_is_power_of_two():
    assert make_params(N=1, p_conn=(0.5,)).segments == 2
    assert make_params(N=3, p_conn=(0.5, 0.5, 0.5)).segments == 8


def test_default_level_latency_doubles():
    assert default_level_latency(1) == (1,)
    assert default_level_latency(4) == (1, 2, 4, 8)


def test_latency_default_applied():
    params = make_params(N=3, p_conn=(0.5, 0.5, 0.5))
    assert params.level_latency == (1, 2, 4)


def test_usable_boundary_is_inclusive():
    # a link created at 5 with tau = 3 is usable through clock 8
    assert usable(created_at=5, clock=8, tau=3)
    assert not usable(created_at=5, clock=9, tau=3)
    assert usable(created_at=5, clock=5, tau=0)
    assert not usable(created_at=5, clock=6, tau=0)


@pytest.mark.parametrize(
    "field,value",
    [
        ("N", 0),
        ("N", -1),
        ("n", 0),
        ("tau", -1),
        ("p_gen", -0.1),
        ("p_gen", 1.5),
        ("p_gen", float("nan")),
        ("final_projection", 2.0),
    ],
)
def test_validation_rejects_and_names_field(field, value):
    with pytest.raises(ParameterError, match=field):
        make_params(**{field: value})


def test_p_conn_length_must_match_levels():
    with pytest.raises(ParameterError, match="p_conn"):
        make_params(N=3, p_conn=(0.5, 0.5))


def test_level_latency_length_must_match_levels():
    with pytest.raises(ParameterError, match="level_latency"):
        make_params(level_latency=(1, 2, 4))


def test_level_latency_entries_positive():
    with pytest.raises(ParameterError, match="level_latency"):
        make_params(level_latency=(1, 0))


def test_architecture_string_values():
    assert str(Architecture.PARALLEL) == "parallel"
    assert str(Architecture.MULTIPLEXED) == "multiplexed"
    assert Architecture("parallel") is Architecture.PARALLEL


def test_config_round_trip_preserves_everything():
    params = make_params(
        N=3,
        n=7,
        tau=160,
        p_gen=0.0627,
        p_conn=(0.6975, 0.496, 0.31),
        architecture=Architecture.PARALLEL,
        final_projection=0.2,
        concurrent_generation=False,
    )
    assert RepeaterParams.from_config_text(params.to_config_text()) == params


def test_config_round_trip_defaults():
    params = make_params()
    restored = RepeaterParams.from_config_text(params.to_config_text())
    assert restored == params
    assert restored.final_projection is None
    assert restored.concurrent_generation is True


def test_from_config_missing_key_raises():
    text = make_params().to_config_text()
    broken = "\n".join(
        line for line in text.splitlines() if not line.startswith("chain.p_gen")
    )
    with pytest.raises(ParameterError, match="chain.p_gen"):
        RepeaterParams.from_config_text(broken)


@given(
    n_levels=st.integers(min_value=1, max_value=4),
    n=st.integers(min_value=1, max_value=50),
    tau=st.integers(min_value=0, max_value=10_000),
    p_gen=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    arch=st.sampled_from(list(Architecture)),
    concurrent=st.booleans(),
)
def test_round_trip_property(n_levels, n, tau, p_gen, arch, concurrent):
    params = RepeaterParams(
        N=n_levels,
        n=n,
        tau=tau,
        p_gen=p_gen,
        p_conn=tuple(0.5 for _ in range(n_levels)),
        architecture=arch,
        concurrent_generation=concurrent,
    )
    assert RepeaterParams.from_config_text(params.to_config_text()) == params
