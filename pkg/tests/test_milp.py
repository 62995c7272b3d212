import itertools

import numpy as np
import pytest

from oracles import random_model, scipy_lp, vertex_oracle
from segbound.errors import NodeLimit, SolverInfeasible
from segbound.milp import LpSession, MilpModel, solve_lp, solve_milp, write_lp


def test_bound_attained_lp():
    md = MilpModel()
    md.add_var("x", 0.0, 3.0)
    md.set_objective({0: -1.0})
    res = solve_lp(md)
    assert res.status == "optimal" and res.x[0] == pytest.approx(3.0)
    assert res.objective == pytest.approx(-3.0)


def test_tight_row_lp():
    md = MilpModel()
    x, y = md.add_var("x", 0, 1), md.add_var("y", 0, 1)
    md.add_row({x: 1, y: 1}, "<=", 1.5)
    md.set_objective({x: -1, y: -1})
    assert solve_lp(md).objective == pytest.approx(-1.5)


def test_infeasible_lp():
    md = MilpModel()
    x = md.add_var("x", 0, 1)
    md.add_row({x: 1}, ">=", 2)
    assert solve_lp(md).status == "infeasible"
    with pytest.raises(SolverInfeasible):
        solve_milp(md)


@pytest.mark.parametrize("seed", range(20))
def test_lp_vs_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    md = random_model(rng, int(rng.integers(2, 9)), int(rng.integers(1, 9)))
    want = vertex_oracle(md)
    res = solve_lp(md)
    assert want is not None and res.status == "optimal"
    scale = max(1.0, abs(want))
    assert res.objective == pytest.approx(want, abs=1e-8 * scale)
    assert md.max_violation(res.x) <= 1e-7


def test_knapsack_milp():
    md = MilpModel()
    a, b = md.add_var("a", binary=True), md.add_var("b", binary=True)
    md.add_row({a: 3, b: 2}, "<=", 4)
    md.set_objective({a: 5, b: 4}, "max")
    sol = solve_milp(md)
    assert sol.status == "optimal" and sol.objective == pytest.approx(5.0)
    assert list(np.round(sol.values)) == [1, 0]


def test_fixed_binaries_pass_through():
    rng = np.random.default_rng(11)
    md = random_model(rng, 6, 4, nb=3)
    for j in range(3):
        md.fix(j, 1.0 if j % 2 else 0.0)
    lp = solve_lp(md)
    sol = solve_milp(md)
    assert sol.objective == pytest.approx(lp.objective, abs=1e-9)
    assert sol.nodes <= 1


@pytest.mark.parametrize("seed", range(50))
def test_milp_vs_enumeration(seed):
    rng = np.random.default_rng(1000 + seed)
    nb = int(rng.integers(1, 11))
    md = random_model(rng, nb + int(rng.integers(1, 5)), int(rng.integers(2, 8)), nb=nb, eq=False)
    vals = [scipy_lp(md, dict(enumerate(bits))) for bits in itertools.product((0, 1), repeat=nb)]
    vals = [v for v in vals if v is not None]
    want = min(vals) if md.sense == "min" else max(vals)
    sol = solve_milp(md)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(want, abs=1e-6 * max(1.0, abs(want)))
    assert np.all(np.abs(sol.values[:nb] - np.round(sol.values[:nb])) <= 1e-6)
    assert md.max_violation(sol.values) <= 1e-7
    # relaxation bounds the integer optimum
    relax = solve_lp(md).objective
    assert (relax <= want + 1e-7) if md.sense == "min" else (relax >= want - 1e-7)


def test_determinism():
    rng = np.random.default_rng(5)
    md = random_model(rng, 14, 7, nb=10, eq=False)
    a, b = solve_milp(md), solve_milp(md.copy())
    assert a.objective == b.objective and a.nodes == b.nodes
    assert np.array_equal(a.values, b.values)


def test_node_limit():
    # many equal-weight binaries against a fractional capacity: the root LP is fractional
    md = MilpModel()
    xs = [md.add_var(f"b{j}", binary=True) for j in range(12)]
    md.add_row({j: 2.0 for j in xs}, "<=", 11.0)
    md.set_objective({j: 1.0 + 1e-3 * j for j in xs}, "max")
    with pytest.raises(NodeLimit):
        solve_milp(md, node_limit=1)
    assert solve_milp(md).objective == pytest.approx(sum(1.0 + 1e-3 * j for j in range(7, 12)))


def test_start_vector_becomes_incumbent():
    rng = np.random.default_rng(9)
    md = random_model(rng, 12, 6, nb=8, eq=False)
    plain = solve_milp(md)
    warm = solve_milp(md, start=plain.values)
    assert warm.objective == pytest.approx(plain.objective, abs=1e-9)


def test_lp_session_matches_fresh_solves():
    rng = np.random.default_rng(2)
    md = random_model(rng, 6, 5)
    sess = LpSession(md)
    for j in range(md.n):
        for sense in ("min", "max"):
            val, _ = sess.optimize({j: 1.0}, sense)
            fresh = md.copy()
            fresh.set_objective({j: 1.0}, sense)
            assert val == pytest.approx(solve_lp(fresh).objective, abs=1e-8)


def test_model_validation():
    md = MilpModel()
    with pytest.raises(ValueError):
        md.add_var("x", 0, np.inf)
    with pytest.raises(ValueError):
        md.add_var("x", 1, 0)
    md.add_var("x")
    with pytest.raises(IndexError):
        md.add_row({3: 1.0}, "<=", 0)
    with pytest.raises(ValueError):
        md.add_row({0: 1.0}, "<", 0)


def test_lp_file():
    md = MilpModel("demo")
    x = md.add_var("x[1]", -1.0, 2.0)
    b = md.add_var("1b", binary=True)
    md.add_row({x: 1.0, b: -0.1}, "<=", 0.3, name="cap")
    md.set_objective({x: 1.0, b: 2.0}, "max")
    text = write_lp(md)
    lines = text.splitlines()
    assert "Maximize" in lines and "Subject To" in lines and lines[-1] == "End"
    assert " cap: 1.0 x_1_ - 0.1 x_1b <= 0.3" in lines
    assert " -1.0 <= x_1_ <= 2.0" in lines
    assert lines[lines.index("Binaries") + 1].strip() == "x_1b"
    assert write_lp(md) == text
