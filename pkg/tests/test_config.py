"""Tests for the key = value config text format."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrepsim.config import (
    ConfigError,
    as_bool,
    as_float,
    as_float_list,
    as_int,
    as_int_list,
    format_config_text,
    parse_config_text,
)

SAMPLE = """
# chain geometry
chain.N = 2
chain.n = 10

chain.p_gen = 0.01          # per-unit generation probability
chain.p_conn = 0.5,0.5
chain.architecture = multiplexed
"""


def test_parse_sample():
    cfg = parse_config_text(SAMPLE)
    assert cfg["chain.N"] == "2"
    assert cfg["chain.p_conn"] == "0.5,0.5"
    assert cfg["chain.architecture"] == "multiplexed"


def test_inline_comment_stripped():
    cfg = parse_config_text(SAMPLE)
    assert cfg["chain.p_gen"] == "0.01"


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text("a = 1\na = 2\n")


def test_malformed_line_rejected():
    with pytest.raises(ConfigError):
        parse_config_text("this is not a key value pair\n")


def test_coercers():
    assert as_int("k", "3") == 3
    assert as_float("p", "0.25") == 0.25
    assert as_bool("flag", "true") is True
    assert as_bool("flag", "false") is False
    assert as_float_list("ps", "0.5, 0.25") == [0.5, 0.25]
    assert as_int_list("ls", "1,2,4") == [1, 2, 4]


def test_coercer_errors_name_the_key():
    with pytest.raises(ConfigError, match="chain.N"):
        as_int("chain.N", "abc")
    with pytest.raises(ConfigError, match="chain.p_gen"):
        as_float("chain.p_gen", "x")
    with pytest.raises(ConfigError, match="flag"):
        as_bool("flag", "maybe")


@given(
    st.dictionaries(
        st.from_regex(r"[a-z][a-z0-9_]{0,10}(\.[a-z][a-z0-9_]{0,10}){0,2}", fullmatch=True),
        st.from_regex(r"[A-Za-z0-9_.,+-]{1,20}", fullmatch=True),
        min_size=0,
        max_size=8,
    )
)
def test_format_parse_round_trip(mapping):
    assert parse_config_text(format_config_text(mapping)) == mapping
