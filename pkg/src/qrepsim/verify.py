"""Self-check suites comparing the closed forms against independent oracles.

Four suites are provided:

``oracle``
    Closed-form mean delivery time against the exact absorbing-chain
    solver over a grid of generation/connection probabilities and
    memory lifetimes, at 1e-9 relative tolerance.
``identity``
    Algebraic identities of the closed forms: the single-pair
    distribution rate times the mean delivery time equals one, the
    residual correction alpha equals one exactly at n = 1, and the
    delivery time equals (mean_Z + 1) / p_conn.
``limits``
    Limiting behaviour: convergence of the finite-lifetime delivery
    time to the unbounded-memory value from above, accuracy of the
    large-lifetime expansion inside its validity regime, and decay of
    alpha for large multiplexed blocks.
``dlcz``
    The derived elementary-link and connection probabilities for the
    reference hardware point, against published values.

Every check is reported as a :class:`CheckResult` with the observed and
expected values and the tolerance used, so failures are diagnosable
from the report alone. ``perturb_p_conn`` injects a multiplicative
error into the connection probability used by the closed forms (not
the oracles), which must make the oracle and identity suites fail;
it exists to prove the verifier can detect a miscalibration.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .analytics import (
    asymptotic_in_regime,
    mean_time_finite,
    mean_time_infinite,
    mean_Z_asymptotic,
    mean_Z_finite,
    multiplexed_rate,
)
from .dlcz import Detector, PhysicalParams, derive
from .oracle import exact_mean_time_doubling

SUITE_NAMES = ("oracle", "identity", "limits", "dlcz")

_P_GEN_GRID = (0.05, 0.2, 0.5)
_P_CONN_GRID = (0.3, 1.0)
_TAU_GRID = (0, 1, 2, 5, 10)

_REFERENCE_HARDWARE = PhysicalParams(
    total_length_km=1000.0,
    levels=3,
    fiber_loss_db_per_km=0.16,
    eta0=0.01,
    eta=0.9,
    detector=Detector.NPRD,
)
# published three-decimal values for the hardware point above
_DLCZ_EXPECTED = (
    ("p0", 0.001),
    ("p_conn[1]", 0.698),
    ("p_conn[2]", 0.496),
    ("p_conn[3]", 0.311),
    ("epsilon", 0.206),
)
# inclusive bound: p_conn[1] sits exactly on the rounding boundary
_DLCZ_TOL = 5e-4 + 1e-9


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a single verification check."""

    name: str
    passed: bool
    observed: float
    expected: float
    tolerance: float
    detail: str = ""


@dataclass(frozen=True)
class SuiteReport:
    """All check results for one named suite."""

    suite: str
    checks: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        """JSON-ready representation of the report."""
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [asdict(check) for check in self.checks],
        }


def _relative_check(name: str, observed: float, expected: float, rel_tol: float, detail: str = "") -> CheckResult:
    scale = max(abs(expected), 1e-300)
    passed = abs(observed - expected) <= rel_tol * scale
    return CheckResult(name, passed, observed, expected, rel_tol, detail)


def _absolute_check(name: str, observed: float, expected: float, abs_tol: float, detail: str = "") -> CheckResult:
    passed = abs(observed - expected) <= abs_tol
    return CheckResult(name, passed, observed, expected, abs_tol, detail)


def _suite_oracle(perturb_p_conn: float) -> SuiteReport:
    checks = []
    for p_gen in _P_GEN_GRID:
        for p_conn in _P_CONN_GRID:
            for tau in _TAU_GRID:
                closed = mean_time_finite(p_gen, min(p_conn * perturb_p_conn, 1.0), tau)
                exact = exact_mean_time_doubling(p_gen, p_conn, tau)
                checks.append(
                    _relative_check(
                        f"mean_time(p_gen={p_gen}, p_conn={p_conn}, tau={tau})",
                        closed,
                        exact,
                        1e-9,
                        detail="closed form vs absorbing-chain solve",
                    )
                )
    return SuiteReport("oracle", tuple(checks))


def _suite_identity(perturb_p_conn: float) -> SuiteReport:
    checks = []
    for p_gen in _P_GEN_GRID:
        for p_conn in _P_CONN_GRID:
            for tau in _TAU_GRID:
                perturbed = min(p_conn * perturb_p_conn, 1.0)
                rate, alpha = multiplexed_rate(p_gen, perturbed, tau, 1)
                mean_t = mean_time_finite(p_gen, p_conn, tau)
                label = f"(p_gen={p_gen}, p_conn={p_conn}, tau={tau})"
                checks.append(
                    _absolute_check(
                        f"rate*mean_time{label}",
                        rate * mean_t,
                        1.0,
                        1e-12,
                        detail="single-pair rate must invert the delivery time",
                    )
                )
                checks.append(
                    _absolute_check(
                        f"alpha(n=1){label}",
                        alpha,
                        1.0,
                        0.0,
                        detail="residual correction cancels exactly at n=1",
                    )
                )
                checks.append(
                    _relative_check(
                        f"mean_time_vs_Z{label}",
                        mean_time_finite(p_gen, perturbed, tau),
                        (mean_Z_finite(p_gen, tau) + 1.0) / p_conn,
                        1e-12,
                        detail="delivery time equals (mean_Z + 1) / p_conn",
                    )
                )
    return SuiteReport("identity", tuple(checks))


def _suite_limits() -> SuiteReport:
    checks = []
    # finite-lifetime delivery time decreases toward the unbounded value
    for p_gen, p_conn in ((0.05, 0.3), (0.2, 1.0)):
        times = [mean_time_finite(p_gen, p_conn, tau) for tau in (0, 1, 2, 5, 10, 50, 400)]
        drops = sum(1 for a, b in zip(times, times[1:]) if b <= a)
        checks.append(
            _absolute_check(
                f"monotone_tau(p_gen={p_gen}, p_conn={p_conn})",
                float(drops),
                float(len(times) - 1),
                0.0,
                detail="mean_time_finite non-increasing in tau",
            )
        )
        checks.append(
            _relative_check(
                f"converges_to_infinite(p_gen={p_gen}, p_conn={p_conn})",
                mean_time_finite(p_gen, p_conn, 400),
                mean_time_infinite(p_gen, p_conn),
                1e-6,
                detail="large tau approaches the unbounded-memory value",
            )
        )
    # the large-lifetime expansion holds to 5% inside its regime
    for p_gen, tau in ((0.001, 10), (0.002, 20), (0.0005, 40)):
        in_regime = asymptotic_in_regime(p_gen, tau)
        checks.append(
            _absolute_check(
                f"regime(p_gen={p_gen}, tau={tau})",
                float(in_regime),
                1.0,
                0.0,
                detail="point must satisfy p_gen*(tau+1) < 0.05",
            )
        )
        checks.append(
            _relative_check(
                f"asymptotic_Z(p_gen={p_gen}, tau={tau})",
                mean_Z_asymptotic(p_gen, tau),
                mean_Z_finite(p_gen, tau),
                5e-2,
                detail="large-tau expansion of mean_Z",
            )
        )
    # residual correction dies off once n * p_gen * tau is large
    alphas = [multiplexed_rate(0.1, 0.5, 50, n).alpha for n in (2, 20, 100, 400)]
    ordered = sum(1 for a, b in zip(alphas, alphas[1:]) if b <= a)
    checks.append(
        _absolute_check(
            "alpha_decreasing_in_n(p_gen=0.1, tau=50)",
            float(ordered),
            float(len(alphas) - 1),
            0.0,
            detail="alpha non-increasing along n = 2, 20, 100, 400",
        )
    )
    checks.append(
        _absolute_check(
            "alpha_vanishes(p_gen=0.1, tau=50, n=400)",
            alphas[-1],
            0.0,
            1e-10,
            detail="alpha -> 0 for large multiplexed blocks",
        )
    )
    return SuiteReport("limits", tuple(checks))


def _suite_dlcz() -> SuiteReport:
    derived = derive(_REFERENCE_HARDWARE)
    observed = {
        "p0": derived.p0,
        "p_conn[1]": derived.p_conn[0],
        "p_conn[2]": derived.p_conn[1],
        "p_conn[3]": derived.p_conn[2],
        "epsilon": derived.epsilon,
    }
    checks = [
        _absolute_check(
            f"dlcz_{name}",
            observed[name],
            expected,
            _DLCZ_TOL,
            detail="reference hardware point, published three-decimal value",
        )
        for name, expected in _DLCZ_EXPECTED
    ]
    return SuiteReport("dlcz", tuple(checks))


def run_suite(suite: str, perturb_p_conn: float = 1.0) -> SuiteReport:
    """Run one named verification suite.

    Parameters
    ----------
    suite : str
        One of ``SUITE_NAMES``.
    perturb_p_conn : float, optional
        Multiplicative miscalibration applied to the connection
        probability fed to the closed forms in the ``oracle`` and
        ``identity`` suites. The default of 1.0 runs the real checks;
        any other value must make those suites fail.

    Returns
    -------
    SuiteReport

    Raises
    ------
    ValueError
        If ``suite`` is not a known suite name or the perturbation
        factor is not positive and finite.
    """
    if not (math.isfinite(perturb_p_conn) and perturb_p_conn > 0.0):
        raise ValueError(f"perturb_p_conn: must be positive and finite, got {perturb_p_conn!r}")
    if suite == "oracle":
        return _suite_oracle(perturb_p_conn)
    if suite == "identity":
        return _suite_identity(perturb_p_conn)
    if suite == "limits":
        return _suite_limits()
    if suite == "dlcz":
        return _suite_dlcz()
    raise ValueError(f"suite: unknown suite {suite!r}, expected one of {SUITE_NAMES}")


def run_all(perturb_p_conn: float = 1.0) -> list[SuiteReport]:
    """Run every verification suite in declaration order."""
    return [run_suite(name, perturb_p_conn) for name in SUITE_NAMES]
