"""Tests for the physical-parameter derivation.

The frozen regression values were confirmed with an independent scripted
evaluation of the recursion before being recorded here.
"""

from __future__ import annotations

import dataclasses
import math

import pytest

from qrepsim.dlcz import (
    Detector,
    DerivedProbabilities,
    PhysicalParams,
    derive,
    lifetime_to_units,
)
from qrepsim.params import ParameterError

HARDWARE = PhysicalParams(
    total_length_km=1000.0,
    levels=3,
    fiber_loss_db_per_km=0.16,
    eta0=0.01,
    eta=0.9,
    detector=Detector.NPRD,
)


def test_regression_non_resolving_detector():
    d = derive(HARDWARE)
    tol = 5e-4 + 1e-9
    assert abs(d.p0 - 0.001) <= tol
    assert abs(d.p_conn[0] - 0.698) <= tol
    assert abs(d.p_conn[1] - 0.496) <= tol
    assert abs(d.p_conn[2] - 0.311) <= tol
    assert d.epsilon is not None
    assert abs(d.epsilon - 0.206) <= tol


def test_exact_frozen_values_non_resolving():
    d = derive(HARDWARE)
    assert d.p_conn[0] == pytest.approx(0.6975, rel=1e-12)
    assert d.c == pytest.approx((0.0, 0.55, 1.65, 3.85), rel=1e-12)
    assert d.epsilon == pytest.approx(1 / 4.85, rel=1e-12)
    assert d.fidelity_bound == pytest.approx(8 * 0.99, rel=1e-12)


def test_exact_frozen_values_number_resolving():
    d = derive(dataclasses.replace(HARDWARE, detector=Detector.PNRD))
    assert d.p_conn[0] == pytest.approx(0.495, rel=1e-12)
    assert d.c[1] == pytest.approx(0.1, rel=1e-12)
    # scripted recursion value; exactly 117/242
    assert d.p_conn[1] == pytest.approx(117 / 242, rel=1e-12)
    assert d.p_conn[2] == pytest.approx(0.45266272189349117, rel=1e-12)
    assert d.epsilon is None


def test_perfect_efficiency_fixed_point():
    # eta = 1 with a number-resolving detector: c stays 0, every P_i = 1/2
    d = derive(
        dataclasses.replace(HARDWARE, eta=1.0, detector=Detector.PNRD)
    )
    assert d.c == pytest.approx((0.0, 0.0, 0.0, 0.0), abs=1e-15)
    assert d.p_conn == pytest.approx((0.5, 0.5, 0.5), rel=1e-15)
    assert d.fidelity_bound == pytest.approx(8 * 0.99, rel=1e-12)


def test_invariants_of_derivation():
    d = derive(HARDWARE)
    assert d.c[0] == 0.0
    assert list(d.c) == sorted(d.c)  # non-decreasing since eta/beta <= 1
    assert all(0.0 < p <= 1.0 for p in d.p_conn)
    assert len(d.p_conn) == HARDWARE.levels
    assert len(d.c) == HARDWARE.levels + 1


def test_derivation_is_deterministic():
    assert derive(HARDWARE) == derive(HARDWARE)


def test_p0_strictly_decreases_in_loss_and_length():
    base = derive(HARDWARE).p0
    lossier = derive(dataclasses.replace(HARDWARE, fiber_loss_db_per_km=0.2)).p0
    longer = derive(dataclasses.replace(HARDWARE, total_length_km=1200.0)).p0
    assert lossier < base
    assert longer < base


def test_p_conn_increases_in_eta():
    lo = derive(dataclasses.replace(HARDWARE, eta=0.8))
    hi = derive(HARDWARE)
    assert hi.p_conn[0] > lo.p_conn[0]


def test_time_unit_and_lifetime_conversion():
    d = derive(HARDWARE)
    # 125 km at c/1.5, with c = 299792.458 km/s = 299.792458 km/ms
    assert d.time_unit_ms == pytest.approx(125.0 / (299.792458 / 1.5), rel=1e-12)
    assert d.time_unit_ms == pytest.approx(0.6254, abs=5e-4)
    assert lifetime_to_units(100.0, d) == 159
    assert lifetime_to_units(0.0, d) == 0
    assert lifetime_to_units(d.time_unit_ms, d) == 1


def test_lifetime_rejects_negative():
    d = derive(HARDWARE)
    with pytest.raises(ParameterError, match="tau_ms"):
        lifetime_to_units(-1.0, d)


@pytest.mark.parametrize(
    "field,value",
    [
        ("total_length_km", 0.0),
        ("levels", 0),
        ("fiber_loss_db_per_km", -0.1),
        ("eta0", 1.5),
        ("eta", float("nan")),
        ("refractive_index", 0.9),
    ],
)
def test_physical_validation(field, value):
    with pytest.raises(ParameterError, match=field):
        dataclasses.replace(HARDWARE, **{field: value})


def test_detector_betas():
    assert Detector.PNRD.beta == 1
    assert Detector.NPRD.beta == 2
