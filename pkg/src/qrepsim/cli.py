"""Command-line interface for the repeater-chain rate toolkit.

Four subcommands cover the package surface:

``analytic``
    Closed-form waiting times and distribution rates over a parameter
    grid (columns p0, p1, tau, n, mean_Z, mean_T, rate, alpha,
    regime_flag).
``dlcz``
    Elementary-link and connection probabilities derived from fiber
    hardware, plus the time unit and an optional lifetime conversion.
``simulate``
    Monte Carlo rate estimates over a sweep grid, with either a trial
    budget (independent delivery times) or a horizon budget (one long
    run split into batches).
``verify``
    Self-check suites with a machine-readable report; exits 2 when any
    check fails.

Output is CSV by default or JSON lines with ``--json``, written to
stdout or to ``--out``. Every run logs its fully resolved configuration
to stderr as ``# resolved`` lines, so any output row can be reproduced
from the logged values plus the row's own seed column. Settings may
also come from a config file (``--config``) in the flat ``key = value``
format: a dotted key scopes a value to one subcommand
(``simulate.horizon = 2e6`` only affects ``simulate``), a bare key
applies to any subcommand that understands it, and command-line flags
always win over file values.

Exit codes: 0 on success, 1 on a usage error, 2 when verification
fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Callable

from . import config as _cfg
from .analytics import (
    DivergenceError,
    asymptotic_in_regime,
    mean_time_finite,
    mean_Z_finite,
    multiplexed_rate,
)
from .dlcz import Detector, PhysicalParams, derive, lifetime_to_units
from .params import Architecture, ParameterError, RepeaterParams
from .simulator import (
    DEFAULT_BATCHES,
    DEFAULT_MAX_TIME,
    SweepSpec,
    sweep,
)
from .verify import SUITE_NAMES, run_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2

PROG = "qrepsim"

ANALYTIC_COLUMNS = (
    "p0", "p1", "tau", "n", "mean_Z", "mean_T", "rate", "alpha", "regime_flag",
)
DLCZ_COLUMNS = (
    "total_length_km", "levels", "fiber_loss_db_per_km", "eta0", "eta",
    "detector", "refractive_index", "segment_length_km", "p0", "p_conn",
    "epsilon", "fidelity_bound", "time_unit_ms", "tau_ms", "tau_units",
)
SIMULATE_COLUMNS = (
    "index", "preset", "architecture", "N", "n", "p_gen", "p_conn", "tau",
    "tau_ms", "concurrent_generation", "final_projection", "method",
    "trials_or_horizon", "batches", "max_time", "seed", "rate", "std_error",
    "successes", "successes_projected", "epsilon", "rate_eps", "flag", "note",
)

# hardware point behind the fig4 preset: a 1000 km chain split into
# 2^3 segments, 0.16 dB/km fiber, eta0 = 0.01, eta = 0.9, NPRD detectors
_FIG4_HARDWARE = PhysicalParams(
    total_length_km=1000.0,
    levels=3,
    fiber_loss_db_per_km=0.16,
    eta0=0.01,
    eta=0.9,
    detector=Detector.NPRD,
)
_FIG4_SCALED_N = 1000

_DETECTORS = {"pnrd": Detector.PNRD, "nprd": Detector.NPRD}


class CliError(Exception):
    """Usage-level failure; the message is printed and the exit code is 1."""


class _Parser(argparse.ArgumentParser):
    # usage errors must exit with code 1, not argparse's default 2
    def error(self, message: str) -> None:  # type: ignore[override]
        raise CliError(message)


# --------------------------------------------------------------- options


def _as_str(key: str, value: str) -> str:
    return value


def _as_count(key: str, value: str) -> int:
    # accepts scientific notation for large budgets ("1e7")
    try:
        as_float = float(value)
    except ValueError:
        raise _cfg.ConfigError(f"{key}: expected a number, got {value!r}") from None
    as_int = int(as_float)
    if as_int != as_float:
        raise _cfg.ConfigError(f"{key}: expected an integer, got {value!r}")
    return as_int


def _count_flag(value: str) -> int:
    try:
        return _as_count("value", value)
    except _cfg.ConfigError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}") from None


@dataclass(frozen=True)
class _Option:
    """One resolvable setting: CLI flag value > config file > preset > default."""

    name: str
    coerce: Callable[[str, str], object]
    default: object = None


_ANALYTIC_OPTIONS = (
    _Option("p0", _cfg.as_float_list),
    _Option("p1", _cfg.as_float_list),
    _Option("tau", _cfg.as_int_list),
    _Option("n", _cfg.as_int_list, default=[1]),
    _Option("preset", _as_str),
    _Option("json", _cfg.as_bool, default=False),
    _Option("out", _as_str),
)

_DLCZ_OPTIONS = (
    _Option("total_length_km", _cfg.as_float, default=1000.0),
    _Option("N", _cfg.as_int, default=3),
    _Option("fiber_loss_db_per_km", _cfg.as_float, default=0.16),
    _Option("eta0", _cfg.as_float, default=0.01),
    _Option("eta", _cfg.as_float, default=0.9),
    _Option("detector", _as_str, default="nprd"),
    _Option("refractive_index", _cfg.as_float, default=1.5),
    _Option("tau_ms", _cfg.as_float),
    _Option("json", _cfg.as_bool, default=False),
    _Option("out", _as_str),
)

_SIMULATE_OPTIONS = (
    _Option("N", _cfg.as_int, default=1),
    _Option("n", _cfg.as_int_list, default=[1]),
    _Option("p0", _cfg.as_float),
    _Option("p1", _cfg.as_float_list),
    _Option("tau", _cfg.as_int_list),
    _Option("tau_ms", _cfg.as_float_list),
    _Option("architecture", _as_str, default="multiplexed"),
    _Option("concurrent", _cfg.as_bool, default=False),
    _Option("final_projection", _cfg.as_float),
    _Option("trials", _as_count),
    _Option("horizon", _as_count),
    _Option("seed", _cfg.as_int, default=0),
    _Option("batches", _cfg.as_int, default=DEFAULT_BATCHES),
    _Option("max_time", _as_count, default=DEFAULT_MAX_TIME),
    _Option("workers", _cfg.as_int),
    _Option("preset", _as_str),
    _Option("json", _cfg.as_bool, default=False),
    _Option("out", _as_str),
)

_VERIFY_OPTIONS = (
    _Option("suite", _as_str, default="all"),
    _Option("perturb_p1", _cfg.as_float, default=1.0),
    _Option("json", _cfg.as_bool, default=False),
    _Option("out", _as_str),
)

_ANALYTIC_PRESETS = {
    "fig2": {
        "p0": [0.01],
        "p1": [0.5],
        "tau": [0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000],
        "n": [1],
    },
}

_SIMULATE_PRESETS = {
    "fig3": {
        "N": 1,
        "p0": 0.01,
        "p1": [0.1],
        "tau": [0, 1, 2, 5, 10, 20, 50, 100, 200, 500],
        "n": [1, 5, 10],
        "architecture": "both",
        "concurrent": True,
        "horizon": 1_000_000,
    },
    "fig4": {
        "N": 3,
        "n": [10],
        "tau_ms": [1.0, 3.0, 10.0, 30.0, 100.0, 300.0],
        "architecture": "both",
        "concurrent": True,
        "horizon": 10_000_000,
    },
}

_OPTION_TABLES = {
    "analytic": _ANALYTIC_OPTIONS,
    "dlcz": _DLCZ_OPTIONS,
    "simulate": _SIMULATE_OPTIONS,
    "verify": _VERIFY_OPTIONS,
}
_PRESET_TABLES = {
    "analytic": _ANALYTIC_PRESETS,
    "dlcz": {},
    "simulate": _SIMULATE_PRESETS,
    "verify": {},
}
_ALL_OPTION_NAMES = {
    opt.name for table in _OPTION_TABLES.values() for opt in table
} | {"config"}


def _check_config_keys(command: str, file_cfg: dict[str, str]) -> None:
    known_here = {opt.name for opt in _OPTION_TABLES[command]}
    for key in file_cfg:
        if "." in key:
            scope, _, bare = key.partition(".")
            if scope == command and bare not in known_here:
                raise CliError(f"config: {key!r} is not a {command} setting")
            if scope not in _OPTION_TABLES:
                raise CliError(f"config: {key!r} does not name a subcommand")
        elif key not in _ALL_OPTION_NAMES:
            raise CliError(f"config: unknown key {key!r}")


def _resolve_options(
    command: str,
    args: argparse.Namespace,
    file_cfg: dict[str, str],
) -> dict[str, object]:
    """Merge flag, config-file, preset, and default values for one command."""

    def from_file(opt: _Option) -> object | None:
        raw = file_cfg.get(f"{command}.{opt.name}", file_cfg.get(opt.name))
        return None if raw is None else opt.coerce(opt.name, raw)

    table = _OPTION_TABLES[command]
    by_name = {opt.name: opt for opt in table}
    preset_name = getattr(args, "preset", None)
    if preset_name is None and "preset" in by_name:
        preset_name = from_file(by_name["preset"])
    presets = _PRESET_TABLES[command]
    if preset_name is not None and preset_name not in presets:
        raise CliError(
            f"{command}: unknown preset {preset_name!r}, expected one of {sorted(presets)}"
        )
    preset_values = presets.get(preset_name, {})

    resolved: dict[str, object] = {}
    for opt in table:
        value = getattr(args, opt.name, None)
        if value is None:
            value = from_file(opt)
        if value is None and opt.name != "preset":
            value = preset_values.get(opt.name)
        if value is None:
            value = opt.default
        resolved[opt.name] = value
    resolved["preset"] = preset_name
    return resolved


def _format_setting(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _cfg.fmt_float(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_format_setting(item) for item in value)
    return str(value)


def _log_resolved(command: str, resolved: dict[str, object]) -> None:
    for name in sorted(resolved):
        print(
            f"# resolved {command}.{name} = {_format_setting(resolved[name])}",
            file=sys.stderr,
        )


# ---------------------------------------------------------------- output


def _csv_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _cfg.fmt_float(value)
    return str(value)


def _emit_rows(
    rows: list[dict[str, object]],
    columns: tuple[str, ...],
    as_json: bool,
    out_path: str | None,
) -> None:
    if as_json:
        text = "".join(
            json.dumps({c: row.get(c) for c in columns}) + "\n" for row in rows
        )
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(row.get(c)) for c in columns])
        text = buf.getvalue()
    _write_text(text, out_path)


def _write_text(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


# -------------------------------------------------------------- commands


def _require(value: object, message: str) -> object:
    if value is None:
        raise CliError(message)
    return value


def cmd_analytic(resolved: dict[str, object]) -> int:
    """Closed-form table over the (p0, p1, tau, n) cross product."""
    p0s = _require(resolved["p0"], "analytic: --p0 is required (or use --preset fig2)")
    p1s = _require(resolved["p1"], "analytic: --p1 is required (or use --preset fig2)")
    taus = _require(resolved["tau"], "analytic: --tau is required (or use --preset fig2)")
    ns = resolved["n"]
    rows = []
    try:
        for p0 in p0s:
            for p1 in p1s:
                for tau in taus:
                    for n in ns:
                        rate, alpha = multiplexed_rate(p0, p1, tau, n)
                        rows.append(
                            {
                                "p0": p0,
                                "p1": p1,
                                "tau": tau,
                                "n": n,
                                "mean_Z": mean_Z_finite(p0, tau),
                                "mean_T": mean_time_finite(p0, p1, tau),
                                "rate": rate,
                                "alpha": alpha,
                                "regime_flag": asymptotic_in_regime(p0, tau),
                            }
                        )
    except (DivergenceError, ValueError) as exc:
        raise CliError(f"analytic: invalid grid: {exc}") from None
    _emit_rows(rows, ANALYTIC_COLUMNS, resolved["json"], resolved["out"])
    return EXIT_OK


def cmd_dlcz(resolved: dict[str, object]) -> int:
    """Derived probabilities and the time unit for one hardware point."""
    detector_name = str(resolved["detector"]).lower()
    if detector_name not in _DETECTORS:
        raise CliError(
            f"dlcz: unknown detector {resolved['detector']!r}, expected pnrd or nprd"
        )
    phys = PhysicalParams(
        total_length_km=resolved["total_length_km"],
        levels=resolved["N"],
        fiber_loss_db_per_km=resolved["fiber_loss_db_per_km"],
        eta0=resolved["eta0"],
        eta=resolved["eta"],
        detector=_DETECTORS[detector_name],
        refractive_index=resolved["refractive_index"],
    )
    derived = derive(phys)
    tau_ms = resolved["tau_ms"]
    row = {
        "total_length_km": phys.total_length_km,
        "levels": phys.levels,
        "fiber_loss_db_per_km": phys.fiber_loss_db_per_km,
        "eta0": phys.eta0,
        "eta": phys.eta,
        "detector": detector_name,
        "refractive_index": phys.refractive_index,
        "segment_length_km": phys.segment_length_km,
        "p0": derived.p0,
        "p_conn": ";".join(_cfg.fmt_float(p) for p in derived.p_conn),
        "epsilon": derived.epsilon,
        "fidelity_bound": derived.fidelity_bound,
        "time_unit_ms": derived.time_unit_ms,
        "tau_ms": tau_ms,
        "tau_units": None if tau_ms is None else lifetime_to_units(tau_ms, derived),
    }
    _emit_rows([row], DLCZ_COLUMNS, resolved["json"], resolved["out"])
    return EXIT_OK


def _architectures(value: str) -> tuple[Architecture, ...]:
    if value == "both":
        return (Architecture.MULTIPLEXED, Architecture.PARALLEL)
    try:
        return (Architecture(value),)
    except ValueError:
        raise CliError(
            f"simulate: unknown architecture {value!r}, expected parallel, "
            "multiplexed, or both"
        ) from None


def _simulate_grid(resolved: dict[str, object]):
    """Build (base params, taus, tau_ms echo list, epsilon) for the sweep."""
    preset = resolved["preset"]
    epsilon = None
    if preset == "fig4":
        if resolved["p0"] is not None or resolved["p1"] is not None:
            raise CliError("simulate: the fig4 preset derives p0/p1 from hardware")
        if resolved["N"] not in (None, _FIG4_HARDWARE.levels):
            raise CliError("simulate: the fig4 preset fixes N = 3")
        derived = derive(_FIG4_HARDWARE)
        p_gen = derived.p0
        p_conn = derived.p_conn
        epsilon = derived.epsilon
        levels = _FIG4_HARDWARE.levels
    else:
        derived = None
        levels = resolved["N"]
        p_gen = _require(resolved["p0"], "simulate: --p0 is required (or use a preset)")
        p1s = _require(resolved["p1"], "simulate: --p1 is required (or use a preset)")
        if len(p1s) == 1:
            p_conn = tuple(p1s) * levels
        elif len(p1s) == levels:
            p_conn = tuple(p1s)
        else:
            raise CliError(
                f"simulate: --p1 takes 1 or N={levels} values, got {len(p1s)}"
            )

    if resolved["tau"] is not None:
        taus = list(resolved["tau"])
        tau_ms_echo = [None] * len(taus)
    elif resolved["tau_ms"] is not None:
        if derived is None:
            raise CliError("simulate: --tau-ms requires the fig4 preset")
        tau_ms_echo = list(resolved["tau_ms"])
        taus = [lifetime_to_units(ms, derived) for ms in tau_ms_echo]
    else:
        raise CliError("simulate: --tau is required (or use a preset)")
    return levels, p_gen, p_conn, taus, tau_ms_echo, epsilon


def _estimate_cells(estimate, error: str, epsilon: float | None) -> dict[str, object]:
    if estimate is None:
        return {
            "method": None,
            "trials_or_horizon": None,
            "rate": None,
            "std_error": None,
            "successes": None,
            "successes_projected": None,
            "epsilon": epsilon,
            "rate_eps": None,
            "flag": error,
        }
    return {
        "method": str(estimate.method),
        "trials_or_horizon": estimate.trials_or_horizon,
        "rate": estimate.mean_rate,
        "std_error": estimate.std_error,
        "successes": estimate.successes,
        "successes_projected": estimate.successes_projected,
        "epsilon": epsilon,
        "rate_eps": None if epsilon is None else estimate.mean_rate * epsilon,
        "flag": estimate.flag,
    }


def cmd_simulate(resolved: dict[str, object]) -> int:
    """Sweep the simulator over (architecture, n, tau) and emit one row each."""
    levels, p_gen, p_conn, taus, tau_ms_echo, epsilon = _simulate_grid(resolved)
    arches = _architectures(str(resolved["architecture"]))
    ns = list(resolved["n"])

    if resolved["trials"] is not None and resolved["horizon"] is not None:
        raise CliError("simulate: give exactly one of --trials or --horizon")
    if resolved["trials"] is not None:
        budget = {"trials": resolved["trials"]}
    elif resolved["horizon"] is not None:
        budget = {"horizon": resolved["horizon"]}
    else:
        raise CliError("simulate: a --trials or --horizon budget is required")

    try:
        base = RepeaterParams(
            N=levels,
            n=ns[0],
            tau=taus[0],
            p_gen=p_gen,
            p_conn=p_conn,
            architecture=arches[0],
            final_projection=resolved["final_projection"],
            concurrent_generation=bool(resolved["concurrent"]),
        )
        spec = SweepSpec(
            base=base,
            axes=(
                ("architecture", arches),
                ("n", tuple(ns)),
                ("tau", tuple(taus)),
            ),
            budget=budget,
        )
        spec.grid()  # validates every grid point before any work starts
    except ParameterError as exc:
        raise CliError(f"simulate: invalid grid: {exc}") from None

    print(f"# sweep {spec.size} points", file=sys.stderr)
    sweep_rows = sweep(
        spec,
        int(resolved["seed"]),
        workers=resolved["workers"],
        max_time=int(resolved["max_time"]),
        batches=int(resolved["batches"]),
    )

    preset = resolved["preset"]
    rows = []
    for row in sweep_rows:
        params = row.params
        tau_index = row.index % len(taus)
        rows.append(
            {
                "index": row.index,
                "preset": preset,
                "architecture": str(params.architecture),
                "N": params.N,
                "n": params.n,
                "p_gen": params.p_gen,
                "p_conn": ";".join(_cfg.fmt_float(p) for p in params.p_conn),
                "tau": params.tau,
                "tau_ms": tau_ms_echo[tau_index],
                "concurrent_generation": params.concurrent_generation,
                "final_projection": params.final_projection,
                "batches": resolved["batches"],
                "max_time": resolved["max_time"],
                "seed": row.seed,
                "note": None,
                **_estimate_cells(row.estimate, row.error, epsilon),
            }
        )

    if preset == "fig4" and any(a is Architecture.PARALLEL for a in arches):
        # the n = 1000 parallel curve is exact linear scaling of the widest
        # simulated parallel block: independent lanes deliver independently
        src_n = max(ns)
        factor = _FIG4_SCALED_N / src_n
        index = len(rows)
        for row in rows[: len(sweep_rows)]:
            if row["architecture"] != str(Architecture.PARALLEL) or row["n"] != src_n:
                continue
            scaled = dict(row)
            scaled["index"] = index
            scaled["n"] = _FIG4_SCALED_N
            scaled["note"] = f"rate scaled x{factor:g} from the parallel n={src_n} row"
            if row["rate"] is not None:
                scaled["rate"] = row["rate"] * factor
                scaled["std_error"] = row["std_error"] * factor
                if epsilon is not None:
                    scaled["rate_eps"] = scaled["rate"] * epsilon
            rows.append(scaled)
            index += 1

    _emit_rows(rows, SIMULATE_COLUMNS, resolved["json"], resolved["out"])
    return EXIT_OK


def cmd_verify(resolved: dict[str, object]) -> int:
    """Run the named check suite (or all) and report pass/fail."""
    suite = str(resolved["suite"])
    if suite == "all":
        names = list(SUITE_NAMES)
    elif suite in SUITE_NAMES:
        names = [suite]
    else:
        raise CliError(
            f"verify: unknown suite {suite!r}, expected all or one of {list(SUITE_NAMES)}"
        )
    perturb = float(resolved["perturb_p1"])
    try:
        reports = [run_suite(name, perturb_p_conn=perturb) for name in names]
    except ValueError as exc:
        raise CliError(f"verify: {exc}") from None

    all_passed = all(report.passed for report in reports)
    if resolved["json"]:
        payload = {
            "passed": all_passed,
            "perturb_p1": perturb,
            "suites": [report.to_dict() for report in reports],
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = []
        failed_total = 0
        for report in reports:
            passed = sum(1 for check in report.checks if check.passed)
            lines.append(f"suite {report.suite}: {passed}/{len(report.checks)} checks passed")
            for check in report.checks:
                if not check.passed:
                    failed_total += 1
                    lines.append(
                        f"  FAIL {check.name}: observed={_cfg.fmt_float(check.observed)} "
                        f"expected={_cfg.fmt_float(check.expected)} "
                        f"tolerance={_cfg.fmt_float(check.tolerance)}"
                    )
        lines.append(
            f"verify: {'PASS' if all_passed else 'FAIL'} "
            f"({len(reports)} suites, {failed_total} failed checks)"
        )
        text = "\n".join(lines) + "\n"
    _write_text(text, resolved["out"])
    return EXIT_OK if all_passed else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------- parser


def _build_parser() -> _Parser:
    parser = _Parser(prog=PROG, description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")

    analytic = sub.add_parser(
        "analytic", help="closed-form rates over a grid", prog=f"{PROG} analytic"
    )
    analytic.add_argument("--p0", nargs="+", type=float, help="generation probabilities")
    analytic.add_argument("--p1", nargs="+", type=float, help="connection probabilities")
    analytic.add_argument("--tau", nargs="+", type=int, help="memory lifetimes (units)")
    analytic.add_argument("--n", nargs="+", type=int, help="elements per segment")
    analytic.add_argument("--preset", choices=sorted(_ANALYTIC_PRESETS))

    dlcz = sub.add_parser(
        "dlcz", help="derive probabilities from hardware", prog=f"{PROG} dlcz"
    )
    dlcz.add_argument("--length-km", dest="total_length_km", type=float)
    dlcz.add_argument("--N", type=int, help="doubling levels")
    dlcz.add_argument("--loss-db-per-km", dest="fiber_loss_db_per_km", type=float)
    dlcz.add_argument("--eta0", type=float, help="retrieval-and-detection efficiency")
    dlcz.add_argument("--eta", type=float, help="memory readout efficiency")
    dlcz.add_argument("--detector", choices=sorted(_DETECTORS))
    dlcz.add_argument("--refractive-index", dest="refractive_index", type=float)
    dlcz.add_argument("--tau-ms", dest="tau_ms", type=float, help="lifetime to convert")

    simulate = sub.add_parser(
        "simulate", help="Monte Carlo rate estimates", prog=f"{PROG} simulate"
    )
    simulate.add_argument("--N", type=int, help="doubling levels")
    simulate.add_argument("--n", nargs="+", type=int, help="elements per segment")
    simulate.add_argument("--p0", type=float, help="generation probability")
    simulate.add_argument("--p1", nargs="+", type=float, help="connection probability (1 or N values)")
    simulate.add_argument("--tau", nargs="+", type=int, help="memory lifetimes (units)")
    simulate.add_argument("--tau-ms", dest="tau_ms", nargs="+", type=float,
                          help="lifetimes in ms (fig4 preset only)")
    simulate.add_argument("--architecture", choices=("parallel", "multiplexed", "both"))
    simulate.add_argument("--concurrent", action=argparse.BooleanOptionalAction,
                          help="keep generating on segments covered by in-flight connections")
    simulate.add_argument("--final-projection", dest="final_projection", type=float)
    simulate.add_argument("--trials", type=_count_flag, help="independent-trial budget")
    simulate.add_argument("--horizon", type=_count_flag, help="single-run step budget")
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--batches", type=int, help="batch count for horizon runs")
    simulate.add_argument("--max-time", dest="max_time", type=_count_flag,
                          help="per-trial step cap")
    simulate.add_argument("--workers", type=int, help="parallel sweep processes")
    simulate.add_argument("--preset", choices=sorted(_SIMULATE_PRESETS))

    verify = sub.add_parser(
        "verify", help="run the self-check suites", prog=f"{PROG} verify"
    )
    verify.add_argument("--suite", choices=("all",) + SUITE_NAMES)
    verify.add_argument("--perturb-p1", dest="perturb_p1", type=float,
                        help="miscalibration factor for verifier sensitivity tests")

    for command in (analytic, dlcz, simulate, verify):
        command.add_argument("--json", action="store_const", const=True,
                             help="emit JSON lines instead of CSV")
        command.add_argument("--out", help="output path (default: stdout)")
        command.add_argument("--config", help="key-value settings file")
    return parser


_HANDLERS = {
    "analytic": cmd_analytic,
    "dlcz": cmd_dlcz,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            print("error: a subcommand is required", file=sys.stderr)
            return EXIT_USAGE
        file_cfg = {}
        if args.config is not None:
            try:
                with open(args.config, "r", encoding="utf-8") as handle:
                    file_cfg = _cfg.parse_config_text(handle.read())
            except OSError as exc:
                raise CliError(f"config: {exc}") from None
        _check_config_keys(args.command, file_cfg)
        resolved = _resolve_options(args.command, args, file_cfg)
        _log_resolved(args.command, resolved)
        return _HANDLERS[args.command](resolved)
    except (CliError, _cfg.ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
