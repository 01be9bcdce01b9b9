import csv
import io
import json
import math

import pytest

from switchthermo import experiments as ex
from switchthermo.errors import DomainError, InvalidStateError
from switchthermo.switch import closed_form_case1, closed_form_case2


def f_gap(x, p):
    """Independent free-energy gap of diag(x, 1-x) above diag(p, 1-p) at bath p."""
    t = 1 / math.log(p / (1 - p))

    def f(y):
        ent = sum(v * math.log(v) for v in (y, 1 - y) if v > 0)
        return (1 - y) + t * ent

    return f(x) - f(p)


def test_r_grid_defaults():
    grid = ex.r_grid()
    assert len(grid) == 51
    assert grid[0] == 0.5 and grid[-1] == 1.0
    assert grid[30] == pytest.approx(0.8, abs=1e-15)
    assert all(b > a for a, b in zip(grid, grid[1:]))
    assert ex.r_grid(0.6, 0.6, 1) == [0.6]
    clipped = ex.clip_varying(grid)
    assert clipped[0] == 0.5 + 1e-6 and clipped[-1] == 1 - 1e-6
    assert clipped[1:-1] == grid[1:-1]


def test_theorem1_default_passes():
    rep = ex.run_theorem1(0.8, 0.8, 1.0, None, 200, 42)
    assert rep.passed and rep.in_theorem
    assert rep.max_distance <= 1e-12
    assert [r.lam for r in rep.rows] == [k / 10 for k in range(11)]


def test_theorem1_single_order():
    rep = ex.run_theorem1(lambda_grid=[0.0])
    assert len(rep.rows) == 1 and rep.passed


def test_theorem1_outside_hypothesis():
    rep = ex.run_theorem1(0.8, 0.8, 0.5, None, 200, 42)
    assert not rep.in_theorem and not rep.passed
    assert rep.max_distance > 1e-6


def test_theorem1_deterministic():
    a = ex.run_theorem1(seed=7, n_samples=20)
    b = ex.run_theorem1(seed=7, n_samples=20)
    assert a == b


def test_random_bloch_states_inside_ball():
    states = ex.random_bloch_states(500, 3)
    for s in states:
        m = s.mat
        x, y, z = 2 * m[1, 0].real, 2 * m[1, 0].imag, (m[0, 0] - m[1, 1]).real
        assert x * x + y * y + z * z <= 1 + 1e-12


def test_case1_fixed_rows():
    rows = ex.run_case1_fixed(0.8)
    assert len(rows) == 51
    first = rows[0]
    assert first.F_switch == pytest.approx(first.F_separable, abs=1e-12)
    assert first.W_switch == pytest.approx(0, abs=1e-12)
    for row in rows[1:]:
        assert row.F_switch > row.F_separable
    row = rows[30]
    lam, pm, pp = closed_form_case1(0.8, row.r)
    expected = lam * f_gap(pm, 0.8) + (1 - lam) * f_gap(pp, 0.8)
    assert row.W_switch == pytest.approx(expected, abs=1e-12)
    assert row.lam == pytest.approx(0.064, abs=1e-12)


def test_case1_varying_rows():
    rows = ex.run_case1_varying(0.8)
    at_p = next(r for r in rows if abs(r.r - 0.8) < 1e-12)
    assert at_p.W_separable == pytest.approx(0, abs=1e-12)
    assert at_p.W_switch > 0
    for row in rows:
        assert row.W_switch >= row.W_separable - 1e-12
    with pytest.raises(DomainError):
        ex.run_case1_varying(0.8, [0.5, 0.7])


def test_case2_rows():
    fixed = ex.run_case2(0.8, scenario="fixed")
    assert fixed[0].pop_0 == pytest.approx(0.8, abs=1e-12)
    assert fixed[0].pop_1 == pytest.approx(0.8, abs=1e-12)
    assert fixed[0].W_switch == pytest.approx(0, abs=1e-12)
    for row in fixed:
        assert row.F_switch >= row.F_separable - 1e-12
    row = fixed[30]
    lam, p0, p1 = closed_form_case2(0.8, row.r)
    assert row.W_switch == pytest.approx(lam * f_gap(p0, 0.8) + (1 - lam) * f_gap(p1, 0.8), abs=1e-12)
    varying = ex.run_case2(0.8, scenario="varying")
    assert all(r.W_switch >= r.W_separable - 1e-12 for r in varying)
    with pytest.raises(ValueError):
        ex.run_case2(0.8, scenario="lukewarm")


def test_domain_guards():
    with pytest.raises(DomainError):
        ex.run_case1_fixed(0.5)
    with pytest.raises(DomainError):
        ex.run_case1_fixed(0.8, [0.4])


@pytest.mark.parametrize(
    "runner",
    [
        ex.run_case1_fixed,
        ex.run_case1_varying,
        lambda p: ex.run_case2(p, scenario="fixed"),
        lambda p: ex.run_case2(p, scenario="varying"),
    ],
)
def test_runner_invariants(runner):
    for p in (0.6, 0.8, 0.9):
        for row in runner(p):
            assert row.cf_deviation <= 1e-12
            assert row.W_switch >= row.W_separable - 1e-12
            assert row.marginal_dist <= 1e-12
            assert row.prob_0 + row.prob_1 == pytest.approx(1, abs=1e-12)
            for name in ex.COLUMNS:
                v = getattr(row, name)
                if isinstance(v, float):
                    assert math.isfinite(v)


def test_second_law_bound():
    for p in (0.6, 0.8, 0.9):
        for row in ex.run_case1_fixed(p):
            assert row.W_switch <= row.W_input + 1e-12


def test_sweep_slice_matches_case1():
    grid = ex.r_grid(steps=11)
    sweep = ex.run_general_sweep([0.8], [0.8], [1.0], grid, "case1")
    case1 = ex.run_case1_fixed(0.8, grid)
    for a, b in zip(sweep, case1):
        assert a.cf_deviation is None
        for name in ("lam", "pop_0", "pop_1", "F_switch", "W_switch", "W_separable"):
            assert getattr(a, name) == pytest.approx(getattr(b, name), abs=1e-12)


def test_sweep_definite_orders_pinned_for_unequal_q():
    rows = ex.run_general_sweep([0.7], [0.0, 0.3, 1.0], [1.0], ex.r_grid(steps=6))
    for row in rows:
        assert row.W_gad_after_pf == pytest.approx(0, abs=1e-12)
        assert row.W_pf_after_gad == pytest.approx(0, abs=1e-12)
        assert row.marginal_dist <= 1e-12


def test_sweep_partial_damping_is_informational():
    rows = ex.run_general_sweep([0.8], [0.8], [0.5], ex.r_grid(steps=6))
    assert all(r.status == "ok" for r in rows)
    # with gamma < 1 the definite orders no longer reach diag(p, 1-p)
    assert any(r.W_gad_after_pf > 1e-6 for r in rows)
    assert all(r.coherence <= 1e-15 for r in rows)


def test_sweep_order_and_error_rows(monkeypatch):
    calls = []
    original = ex.evaluate_point

    def flaky(setup, p, q, gamma, r, *args, **kwargs):
        calls.append((p, q, gamma, r))
        if q == 0.5 and r == 1.0:
            raise InvalidStateError("synthetic failure")
        return original(setup, p, q, gamma, r, *args, **kwargs)

    monkeypatch.setattr(ex, "evaluate_point", flaky)
    rows = ex.run_general_sweep([0.7, 0.8], [0.5, 1.0], [1.0], [0.5, 1.0], "case2")
    assert [(r.p, r.q, r.r) for r in rows] == [(c[0], c[1], c[3]) for c in calls]
    bad = [r for r in rows if r.status != "ok"]
    assert len(bad) == 2 and all("synthetic" in r.status for r in bad)
    assert math.isnan(bad[0].F_switch)
    assert rows[0].scenario == "sweep-case2"


def test_sweep_validates_grids():
    with pytest.raises(DomainError):
        ex.run_general_sweep([0.4], [0.5], [1.0], [0.6])
    with pytest.raises(DomainError):
        ex.run_general_sweep([0.8], [1.5], [1.0], [0.6])


def test_to_table_shapes():
    header = ex.to_table([])
    assert header == ",".join(ex.COLUMNS) + "\n"
    one = ex.to_table(ex.run_case1_fixed(0.8, [0.8]))
    assert one.count("\n") == 2
    full = ex.to_table(ex.run_case1_fixed(0.8))
    assert len(full.splitlines()) == 52
    assert "\r" not in full
    assert full == ex.to_table(ex.run_case1_fixed(0.8))


def test_to_table_csv_content():
    rows = ex.run_case1_fixed(0.8, [0.8])
    parsed = list(csv.DictReader(io.StringIO(ex.to_table(rows))))
    assert parsed[0]["scenario"] == "case1-fixed"
    assert float(parsed[0]["lam"]) == pytest.approx(0.064, abs=1e-15)
    assert parsed[0]["status"] == "ok"
    # 15 significant digits at most
    mantissa = parsed[0]["pop_1"].lstrip("-").split("e")[0].replace(".", "").lstrip("0")
    assert len(mantissa) <= 15


def test_to_table_json():
    rows = ex.run_case1_fixed(0.8, [0.5, 0.8])
    data = json.loads(ex.to_table(rows, "json"))
    assert [d["r"] for d in data] == [0.5, 0.8]
    assert list(data[0]) == list(ex.COLUMNS)
    theorem = ex.run_theorem1(n_samples=5)
    data = json.loads(ex.to_table(list(theorem.rows), "json"))
    assert set(data[0]) == {"lam", "max_trace_distance", "n_samples"}
    with pytest.raises(ValueError):
        ex.to_table(rows, "xml")
