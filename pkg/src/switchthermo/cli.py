"""Command-line front end.

    switchthermo theorem1
    switchthermo case1-fixed --p 0.8 --r-min 0.5 --r-max 1.0 --steps 51 --out fig2.csv
    switchthermo sweep --p 0.6,0.8 --q 0,0.5,1 --gamma 0.5,1 --format json

Values are resolved as flags > ``--config`` file > built-in defaults. The
config file holds ``key=value`` lines whose keys are the long flag names.
Exit codes: 0 success, 1 runtime or invariant failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from dataclasses import dataclass
from typing import Sequence

from . import experiments as ex
from .errors import SwitchThermoError

SCENARIOS = ("theorem1", "case1-fixed", "case1-varying", "case2-fixed", "case2-varying", "sweep")
FORMATS = ("csv", "json")
ASSIGNMENTS = ("case1", "case2")

DEFAULTS = {
    "p": (0.8,),
    "q": None,
    "gamma": (1.0,),
    "r_min": 0.5,
    "r_max": 1.0,
    "steps": 51,
    "lambda_steps": 11,
    "samples": 200,
    "seed": 42,
    "out": None,
    "format": "csv",
    "assignment": "case1",
}
SWEEP_DEFAULTS = {
    "p": (0.6, 0.7, 0.8, 0.9, 0.95),
    "q": (0.0, 0.25, 0.5, 0.75, 1.0),
    "gamma": (0.5, 0.75, 1.0),
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    p: tuple[float, ...]
    q: tuple[float, ...] | None
    gamma: tuple[float, ...]
    r_min: float
    r_max: float
    steps: int
    lambda_steps: int
    samples: int
    seed: int
    out: str | None
    format: str
    assignment: str

    @property
    def q_values(self) -> tuple[float, ...]:
        return self.p if self.q is None else self.q

    def to_argv(self) -> list[str]:
        """Flag list that parses back to this exact config."""
        argv = [self.scenario]
        for f in dataclasses.fields(self):
            if f.name == "scenario":
                continue
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, tuple):
                value = ",".join(repr(v) for v in value)
            argv += ["--" + f.name.replace("_", "-"), str(value)]
        return argv


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values or not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return values


def _finite(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


# dest -> (flag converter, help)
_FLAGS = {
    "p": (_float_list, "channel equilibrium population (comma list for sweep)"),
    "q": (_float_list, "phase-flip keep probability; defaults to p"),
    "gamma": (_float_list, "damping strength (comma list for sweep)"),
    "r_min": (_finite, "smallest input ground population"),
    "r_max": (_finite, "largest input ground population"),
    "steps": (int, "number of r grid points"),
    "lambda_steps": (int, "theorem1: number of mixture weights in [0, 1]"),
    "samples": (int, "theorem1: number of random input states"),
    "seed": (int, "theorem1: RNG seed"),
    "out": (str, "output path (default: stdout)"),
    "format": (str, "csv or json"),
    "assignment": (str, "sweep: control assignment, case1 or case2"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="switchthermo",
        description="Free energy and work under coherently controlled channel order.",
    )
    sub = parser.add_subparsers(dest="scenario", required=True, parser_class=_Parser)
    for name in SCENARIOS:
        sp = sub.add_parser(name, argument_default=argparse.SUPPRESS)
        for dest, (conv, help_) in _FLAGS.items():
            kwargs = {"type": conv, "help": help_, "dest": dest}
            if dest == "format":
                kwargs["choices"] = FORMATS
            if dest == "assignment":
                kwargs["choices"] = ASSIGNMENTS
            sp.add_argument("--" + dest.replace("_", "-"), **kwargs)
        sp.add_argument("--config", dest="config", help="key=value file of flag values")
    return parser


def read_config_file(path: str) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, text = (s.strip() for s in line.split("=", 1))
            dest = key.lstrip("-").replace("-", "_")
            if dest not in _FLAGS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            conv = _FLAGS[dest][0]
            try:
                values[dest] = conv(text)
            except (ValueError, argparse.ArgumentTypeError) as err:
                raise UsageError(f"{path}:{lineno}: bad value for --{key}: {err}")
    return values


def _in_range(flag: str, values, lo, hi, lo_open: bool, hi_open: bool) -> None:
    for v in values if isinstance(values, tuple) else (values,):
        ok = (v > lo if lo_open else v >= lo) and (v < hi if hi_open else v <= hi)
        if not ok:
            bounds = f"{'(' if lo_open else '['}{lo:g}, {hi:g}{')' if hi_open else ']'}"
            raise UsageError(f"--{flag} must lie in {bounds}, got {v:g}")


def validate(cfg: RunConfig) -> None:
    """Raise UsageError naming the first offending flag."""
    sweep = cfg.scenario == "sweep"
    if not sweep:
        for flag, vals in (("p", cfg.p), ("q", cfg.q), ("gamma", cfg.gamma)):
            if vals is not None and len(vals) != 1:
                raise UsageError(f"--{flag} takes a single value for {cfg.scenario}")

    if cfg.scenario == "theorem1":
        _in_range("p", cfg.p, 0, 1, False, False)
    else:
        _in_range("p", cfg.p, 0.5, 1, True, True)
    if cfg.q is not None:
        _in_range("q", cfg.q, 0, 1, False, False)
    _in_range("gamma", cfg.gamma, 0, 1, False, False)

    if cfg.scenario.startswith("case"):
        if cfg.q is not None and cfg.q != cfg.p:
            raise UsageError("--q must equal --p in case scenarios; use sweep for q != p")
        if cfg.gamma != (1.0,):
            raise UsageError("--gamma must be 1 in case scenarios; use sweep for gamma < 1")

    if cfg.scenario.endswith("varying"):
        # the closed endpoints are accepted and clipped into (0.5, 1) later
        for flag, v in (("r-min", cfg.r_min), ("r-max", cfg.r_max)):
            if not 0.5 <= v <= 1.0:
                raise UsageError(
                    f"--{flag} must lie in (0.5, 1) for varying-bath runs, got {v:g} "
                    "(endpoints 0.5 and 1 are pulled inward by 1e-6)"
                )
    else:
        _in_range("r-min", cfg.r_min, 0.5, 1, False, False)
        _in_range("r-max", cfg.r_max, 0.5, 1, False, False)
    if cfg.r_min > cfg.r_max:
        raise UsageError(f"--r-min ({cfg.r_min:g}) exceeds --r-max ({cfg.r_max:g})")
    if cfg.steps < 1:
        raise UsageError(f"--steps must be at least 1, got {cfg.steps}")
    if cfg.lambda_steps < 1:
        raise UsageError(f"--lambda-steps must be at least 1, got {cfg.lambda_steps}")
    if cfg.samples < 1:
        raise UsageError(f"--samples must be at least 1, got {cfg.samples}")
    if not 0 <= cfg.seed < 2**64:
        raise UsageError(f"--seed must lie in [0, 2^64), got {cfg.seed}")
    if cfg.format not in FORMATS:
        raise UsageError(f"--format must be one of {', '.join(FORMATS)}, got {cfg.format!r}")
    if cfg.assignment not in ASSIGNMENTS:
        raise UsageError(f"--assignment must be one of {', '.join(ASSIGNMENTS)}")


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    """Build a validated RunConfig; exits with status 2 on any usage error."""
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    scenario = ns.pop("scenario")
    values = dict(DEFAULTS)
    if scenario == "sweep":
        values.update(SWEEP_DEFAULTS)
    try:
        if "config" in ns:
            values.update(read_config_file(ns.pop("config")))
        values.update(ns)
        cfg = RunConfig(scenario=scenario, **values)
        validate(cfg)
    except (UsageError, OSError) as err:
        parser.error(str(err))
    return cfg


def _lambda_grid(steps: int) -> list[float]:
    if steps == 1:
        return [0.0]
    return [k / (steps - 1) for k in range(steps)]


def execute(cfg: RunConfig) -> tuple[list, str, bool]:
    """Run the configured scenario: (rows, summary line, invariants ok)."""
    if cfg.scenario == "theorem1":
        report = ex.run_theorem1(
            cfg.p[0], cfg.q_values[0], cfg.gamma[0],
            _lambda_grid(cfg.lambda_steps), cfg.samples, cfg.seed,
        )
        verdict = "pass" if report.passed else ("fail" if report.in_theorem else "outside-theorem")
        summary = (
            f"scenario=theorem1 rows={len(report.rows)} "
            f"max_trace_distance={report.max_distance:.3e} {verdict}"
        )
        return list(report.rows), summary, report.passed or not report.in_theorem

    grid = ex.r_grid(cfg.r_min, cfg.r_max, cfg.steps)
    p = cfg.p[0]
    if cfg.scenario == "sweep":
        rows = ex.run_general_sweep(
            cfg.p, cfg.q_values, cfg.gamma, grid, assignment=cfg.assignment
        )
        errors = sum(r.status != "ok" for r in rows)
        summary = f"scenario=sweep rows={len(rows)} point_errors={errors}"
        return rows, summary, True

    if cfg.scenario == "case1-fixed":
        rows = ex.run_case1_fixed(p, grid)
    elif cfg.scenario == "case1-varying":
        rows = ex.run_case1_varying(p, ex.clip_varying(grid))
    elif cfg.scenario == "case2-fixed":
        rows = ex.run_case2(p, grid, ex.FIXED)
    else:
        rows = ex.run_case2(p, ex.clip_varying(grid), ex.VARYING)
    deviation = max(r.cf_deviation for r in rows)
    slack = min(r.W_switch - r.W_separable for r in rows)
    ok = deviation <= ex.CONSISTENCY_TOL and slack >= -ex.DOMINANCE_SLACK
    summary = (
        f"scenario={cfg.scenario} rows={len(rows)} max_closed_form_deviation={deviation:.3e} "
        f"min_dominance_slack={slack:.3e} {'pass' if ok else 'fail'}"
    )
    return rows, summary, ok


def run(cfg: RunConfig) -> int:
    try:
        rows, summary, ok = execute(cfg)
        text = ex.to_table(rows, cfg.format)
        if cfg.out is None:
            sys.stdout.write(text)
            print(summary, file=sys.stderr)
        else:
            with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            print(summary)
    except (OSError, SwitchThermoError) as err:
        print(f"switchthermo: error: {err}", file=sys.stderr)
        return 1
    return 0 if ok else 1


def main(argv: Sequence[str] | None = None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
