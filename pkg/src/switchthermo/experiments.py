"""Scenario runners producing plot-ready rows.

Each runner evaluates the switch through the full Kraus pipeline and, where a
closed form exists (p = q, gamma = 1), cross-checks it; the deviation is kept
in the ``cf_deviation`` column. Rows come out in grid order.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .channels import (
    KrausChannel,
    SeparableMixture,
    apply,
    apply_separable,
    compose,
    gad_channel,
    pf_channel,
)
from .errors import DomainError, SwitchThermoError
from .qmat import KET_PLUS, DensityMatrix, partial_trace, trace_distance
from .switch import (
    CASE1_ASSIGNMENT,
    CASE2_ASSIGNMENT,
    X_BASIS,
    Z_BASIS,
    Basis,
    ControlAssignment,
    OutcomeEnsemble,
    SwitchConfig,
    apply_switch,
    switch_kraus,
    closed_form_ensemble_case1,
    closed_form_ensemble_case2,
    controller_coherence,
    measure_controller,
)
from .thermo import ThermalBath, bath_from_state, free_energy, tau

THEOREM1_TOL = 1e-12
CONSISTENCY_TOL = 1e-12
DOMINANCE_SLACK = 1e-12
VARYING_EDGE = 1e-6

FIXED = "fixed"
VARYING = "varying"


@dataclass(frozen=True)
class Setup:
    """Controller preparation, control assignment and readout of one scenario."""

    name: str
    assignment: ControlAssignment
    measurement: Basis
    controller: Callable[[float], DensityMatrix]
    lam_index: int
    closed_form: Callable[[float, float], OutcomeEnsemble]


CASE1 = Setup(
    "case1",
    CASE1_ASSIGNMENT,
    X_BASIS,
    lambda r: DensityMatrix.pure(KET_PLUS),
    1,
    closed_form_ensemble_case1,
)
CASE2 = Setup(
    "case2",
    CASE2_ASSIGNMENT,
    Z_BASIS,
    lambda r: DensityMatrix.diag(r, 1.0 - r),
    0,
    closed_form_ensemble_case2,
)
SETUPS = {s.name: s for s in (CASE1, CASE2)}


@dataclass(frozen=True)
class SweepRecord:
    """One grid point. ``W_*`` columns are free-energy gaps above the bath state.

    ``prob_k``/``pop_k`` describe controller outcome k in measurement-basis
    order; ``lam`` repeats the probability of the outcome the scenario calls
    lambda (outcome 1 for case 1, outcome 0 for case 2). ``W_input`` is the
    summed gap of the system and controller inputs.
    """

    scenario: str
    r: float
    p: float
    q: float
    gamma: float
    lam: float
    prob_0: float
    pop_0: float
    prob_1: float
    pop_1: float
    marginal_pop: float
    marginal_dist: float
    coherence: float
    F_input: float
    F_switch: float
    F_separable: float
    F_gad_after_pf: float
    F_pf_after_gad: float
    W_input: float
    W_switch: float
    W_separable: float
    W_gad_after_pf: float
    W_pf_after_gad: float
    cf_deviation: float | None = None
    status: str = "ok"


COLUMNS = tuple(f.name for f in dataclasses.fields(SweepRecord))


@dataclass(frozen=True)
class Theorem1Row:
    lam: float
    max_trace_distance: float
    n_samples: int


@dataclass(frozen=True)
class Theorem1Report:
    p: float
    q: float
    gamma: float
    seed: int
    rows: tuple[Theorem1Row, ...]
    max_distance: float
    in_theorem: bool
    passed: bool


def r_grid(r_min: float = 0.5, r_max: float = 1.0, steps: int = 51) -> list[float]:
    """Evenly spaced r values, r_min + s * step; the defaults give 0.5 + 0.01 s."""
    if steps < 1:
        raise DomainError("grid needs at least one point")
    if steps == 1:
        return [float(r_min)]
    step = (r_max - r_min) / (steps - 1)
    grid = [r_min + s * step for s in range(steps - 1)]
    grid.append(float(r_max))
    return grid


def clip_varying(grid: Iterable[float]) -> list[float]:
    """Pull grid endpoints into (0.5, 1), where the input temperature is finite."""
    lo, hi = 0.5 + VARYING_EDGE, 1.0 - VARYING_EDGE
    return [min(max(r, lo), hi) for r in grid]


def random_bloch_states(n: int, seed: int) -> list[DensityMatrix]:
    """States with Bloch vectors uniform in the unit ball (PCG64 stream)."""
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((n, 3))
    radii = rng.random(n) ** (1.0 / 3.0)
    states = []
    for d, rad in zip(directions, radii):
        x, y, z = rad * d / math.sqrt(float(d @ d))
        states.append(DensityMatrix.from_bloch(x, y, z))
    return states


def run_theorem1(
    p: float = 0.8,
    q: float = 0.8,
    gamma: float = 1.0,
    lambda_grid: Sequence[float] | None = None,
    n_samples: int = 200,
    seed: int = 42,
) -> Theorem1Report:
    """Distance of every separable mixture output from diag(p, 1-p).

    Only ``gamma = 1`` is covered by the no-go claim; other values are run and
    reported with ``in_theorem=False``.
    """
    if lambda_grid is None:
        lambda_grid = [k / 10 for k in range(11)]
    gad, pf = gad_channel(p, gamma), pf_channel(q)
    target = tau(p)
    states = random_bloch_states(n_samples, seed)
    rows = []
    for lam in lambda_grid:
        mix = SeparableMixture(lam, first=gad, second=pf)
        worst = max(trace_distance(apply_separable(mix, s), target) for s in states)
        rows.append(Theorem1Row(float(lam), worst, n_samples))
    max_distance = max(r.max_trace_distance for r in rows)
    in_theorem = gamma == 1.0
    return Theorem1Report(
        p=p,
        q=q,
        gamma=gamma,
        seed=seed,
        rows=tuple(rows),
        max_distance=max_distance,
        in_theorem=in_theorem,
        passed=in_theorem and max_distance <= THEOREM1_TOL,
    )


@dataclass(frozen=True)
class _Channels:
    gad: KrausChannel
    pf: KrausChannel
    gad_after_pf: KrausChannel
    pf_after_gad: KrausChannel
    even_mixture: SeparableMixture


@lru_cache(maxsize=256)
def _channels(p: float, q: float, gamma: float) -> _Channels:
    gad, pf = gad_channel(p, gamma), pf_channel(q)
    return _Channels(
        gad, pf, compose(gad, pf), compose(pf, gad), SeparableMixture(0.5, gad, pf)
    )


@lru_cache(maxsize=256)
def _switch_ops(setup_name: str, p: float, q: float, gamma: float) -> tuple[np.ndarray, ...]:
    ch = _channels(p, q, gamma)
    dummy = DensityMatrix.diag(1.0, 0.0)
    return tuple(switch_kraus(SwitchConfig(SETUPS[setup_name].assignment, dummy, ch.gad, ch.pf)))


def _ensemble_deviation(a: OutcomeEnsemble, b: OutcomeEnsemble) -> float:
    dev = 0.0
    for x, y in zip(a, b):
        dev = max(dev, abs(x.prob - y.prob), float(np.max(np.abs(x.state.mat - y.state.mat))))
    return dev


def evaluate_point(
    setup: Setup,
    p: float,
    q: float,
    gamma: float,
    r: float,
    bath_mode: str = FIXED,
    measurement: Basis | None = None,
    scenario: str | None = None,
    use_closed_form: bool = False,
) -> SweepRecord:
    """Run the switch, both definite orders and the even mixture at one point."""
    bath: ThermalBath = ThermalBath(p) if bath_mode == FIXED else bath_from_state(r)
    measurement = measurement or setup.measurement
    rho = DensityMatrix.diag(r, 1.0 - r)
    controller = setup.controller(r)
    ch = _channels(p, q, gamma)
    cfg = SwitchConfig(setup.assignment, controller, ch.gad, ch.pf)

    joint = apply_switch(cfg, rho, _switch_ops(setup.name, p, q, gamma))
    ensemble = measure_controller(joint, measurement)
    cf_deviation = None
    if use_closed_form:
        closed = setup.closed_form(p, r)
        cf_deviation = _ensemble_deviation(closed, ensemble)
        ensemble = closed
    marginal = DensityMatrix(partial_trace(joint, "system"))

    f_ref = free_energy(tau(bath.p), bath)
    f_switch = sum(o.prob * free_energy(o.state, bath) for o in ensemble)
    f_gad_after_pf = free_energy(apply(ch.gad_after_pf, rho), bath)
    f_pf_after_gad = free_energy(apply(ch.pf_after_gad, rho), bath)
    f_sep = free_energy(apply_separable(ch.even_mixture, rho), bath)
    f_input = free_energy(rho, bath)
    w_input = (f_input - f_ref) + (free_energy(controller, bath) - f_ref)

    return SweepRecord(
        scenario=scenario or f"{setup.name}-{bath_mode}",
        r=r,
        p=p,
        q=q,
        gamma=gamma,
        lam=ensemble[setup.lam_index].prob,
        prob_0=ensemble[0].prob,
        pop_0=ensemble[0].ground_population,
        prob_1=ensemble[1].prob,
        pop_1=ensemble[1].ground_population,
        marginal_pop=float(marginal.mat[0, 0].real),
        marginal_dist=trace_distance(marginal, tau(p)),
        coherence=controller_coherence(joint, measurement),
        F_input=f_input,
        F_switch=f_switch,
        F_separable=f_sep,
        F_gad_after_pf=f_gad_after_pf,
        F_pf_after_gad=f_pf_after_gad,
        W_input=w_input,
        W_switch=f_switch - f_ref,
        W_separable=f_sep - f_ref,
        W_gad_after_pf=f_gad_after_pf - f_ref,
        W_pf_after_gad=f_pf_after_gad - f_ref,
        cf_deviation=cf_deviation,
    )


def _check_bath_p(p: float) -> None:
    if not 0.5 < p < 1.0:
        raise DomainError(f"p must lie in (0.5, 1), got {p}")


def _check_fixed_grid(grid: Sequence[float]) -> None:
    for r in grid:
        if not 0.5 <= r <= 1.0:
            raise DomainError(f"r must lie in [0.5, 1], got {r}")


def _check_varying_grid(grid: Sequence[float]) -> None:
    for r in grid:
        if not 0.5 < r < 1.0:
            raise DomainError(f"varying-bath r must lie in (0.5, 1), got {r}")


def run_case1_fixed(p: float = 0.8, grid: Sequence[float] | None = None) -> list[SweepRecord]:
    """|+> controller, bath at the channel temperature (free-energy curve vs r)."""
    _check_bath_p(p)
    grid = r_grid() if grid is None else list(grid)
    _check_fixed_grid(grid)
    return [evaluate_point(CASE1, p, p, 1.0, r, FIXED, use_closed_form=True) for r in grid]


def run_case1_varying(p: float = 0.8, grid: Sequence[float] | None = None) -> list[SweepRecord]:
    """|+> controller, bath at the input state's own temperature."""
    _check_bath_p(p)
    grid = clip_varying(r_grid()) if grid is None else list(grid)
    _check_varying_grid(grid)
    return [evaluate_point(CASE1, p, p, 1.0, r, VARYING, use_closed_form=True) for r in grid]


def run_case2(
    p: float = 0.8, grid: Sequence[float] | None = None, scenario: str = FIXED
) -> list[SweepRecord]:
    """Thermal controller diag(r, 1-r) in the Hadamard-basis assignment."""
    _check_bath_p(p)
    if scenario == FIXED:
        grid = r_grid() if grid is None else list(grid)
        _check_fixed_grid(grid)
    elif scenario == VARYING:
        grid = clip_varying(r_grid()) if grid is None else list(grid)
        _check_varying_grid(grid)
    else:
        raise ValueError(f"scenario must be {FIXED!r} or {VARYING!r}, got {scenario!r}")
    return [evaluate_point(CASE2, p, p, 1.0, r, scenario, use_closed_form=True) for r in grid]


def _nan_record(scenario: str, r: float, p: float, q: float, gamma: float, err: Exception):
    values = {name: math.nan for name in COLUMNS}
    values.update(
        scenario=scenario, r=r, p=p, q=q, gamma=gamma,
        cf_deviation=None, status=f"error: {err}",
    )
    return SweepRecord(**values)


def run_general_sweep(
    p_grid: Sequence[float],
    q_grid: Sequence[float],
    gamma_grid: Sequence[float],
    grid: Sequence[float],
    assignment: str = "case1",
    measurement_basis: Basis | None = None,
) -> list[SweepRecord]:
    """Brute-force pipeline over (p, q, gamma, r), fixed bath at p.

    Rows are ordered p-major, then q, gamma, r. Per-point failures are
    recorded in ``status`` with NaN outputs instead of aborting the sweep.
    """
    setup = SETUPS[assignment]
    for p in p_grid:
        _check_bath_p(p)
    for name, values in (("q", q_grid), ("gamma", gamma_grid)):
        for v in values:
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
    _check_fixed_grid(grid)

    scenario = f"sweep-{assignment}"
    records = []
    for p in p_grid:
        for q in q_grid:
            for gamma in gamma_grid:
                for r in grid:
                    try:
                        rec = evaluate_point(
                            setup, p, q, gamma, r, FIXED, measurement_basis, scenario
                        )
                    except SwitchThermoError as err:
                        rec = _nan_record(scenario, r, p, q, gamma, err)
                    records.append(rec)
    return records


def _render(value):
    if value is None:
        return None
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.15g}")
    return value


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def to_table(records: Sequence, fmt: str = "csv", columns: Sequence[str] | None = None) -> str:
    """Render dataclass rows as CSV (header + LF lines) or a JSON array.

    Floats carry 15 significant digits. ``columns`` defaults to the fields of
    the row type (``SweepRecord`` when ``records`` is empty).
    """
    if columns is None:
        columns = [f.name for f in dataclasses.fields(records[0])] if records else list(COLUMNS)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for rec in records:
            writer.writerow([_csv_cell(_render(getattr(rec, c))) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        rows = []
        for rec in records:
            row = {}
            for c in columns:
                v = _render(getattr(rec, c))
                row[c] = None if isinstance(v, float) and not math.isfinite(v) else v
            rows.append(row)
        return json.dumps(rows, indent=1) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")
