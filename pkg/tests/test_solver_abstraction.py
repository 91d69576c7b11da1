import time

import pytest
from hypothesis import given, settings

from fgsolve.errors import SolverTimeout
from fgsolve.graph import FunctionalGraph, cycle_graph, product_component
from fgsolve.multiset import parse_multiset as M
from fgsolve.solver_abstraction import (
    admissible_periods,
    solve_abstraction,
    trace_alignment,
)
from fgsolve.tabstraction import TAbstraction, abstraction_product_check, t_abstraction

import worked
from strategies import connected_graphs


def test_worked_example_full_solve():
    [sol] = solve_abstraction(worked.TA, worked.TB, 3)
    assert sol.alignment == 0
    assert sol.tx == worked.TX
    assert abstraction_product_check(worked.TA, sol.tx, worked.TB, 0)


def test_printed_matrix_gives_first_two_columns_then_breaks():
    trace = trace_alignment(worked.TA, worked.TB_PRINTED, 3, 0)
    cols = [[trace.columns[r][h] for h in (0, 1)] for r in range(3)]
    assert cols == [[M("[2]"), M("[2]")], [M("[4]"), M("[0,0,0]")], [M("[3]"), M("[0,1]")]]
    assert trace.completed_columns == 2
    assert trace.failure is not None and trace.failure.cell == (0, 3)
    assert solve_abstraction(worked.TA, worked.TB_PRINTED, 3) == []


def test_trace_of_a_successful_alignment():
    trace = trace_alignment(worked.TA, worked.TB, 3, 0)
    assert trace.failure is None and trace.completed_columns == worked.TB.width


def test_identity_factor():
    tc = t_abstraction(cycle_graph(4))
    [sol] = solve_abstraction(t_abstraction(FunctionalGraph([0])), tc, 4)
    assert sol.tx == tc
    sols = solve_abstraction(tc, tc, 1)
    assert [s.tx for s in sols] == [TAbstraction.from_rows([["[1]"]])] * 4


def test_bad_period_rejected():
    with pytest.raises(ValueError):
        solve_abstraction(worked.TA, worked.TB, 4)
    with pytest.raises(ValueError):
        solve_abstraction(worked.TA, worked.TB, 0)


def test_deadline():
    with pytest.raises(SolverTimeout):
        solve_abstraction(worked.TA, worked.TB, 3, deadline=time.monotonic() - 1)


@pytest.mark.parametrize(
    "p_a, p_b, expected",
    [(2, 6, [3, 6]), (1, 4, [4]), (4, 4, [1, 2, 4]), (3, 4, [])],
)
def test_admissible_periods(p_a, p_b, expected):
    assert admissible_periods(p_a, p_b) == expected


@settings(max_examples=150)
@given(connected_graphs(max_n=8), connected_graphs(max_n=8))
def test_forward_instances_are_recovered(a, x):
    b, _ = product_component(a, x, a.component().cycle[0], x.component().cycle[0])
    ta, tb = t_abstraction(a), t_abstraction(b)
    sols = solve_abstraction(ta, tb, x.cycle_length())
    assert t_abstraction(x) in [s.tx for s in sols]
    assert len(sols) <= a.cycle_length()
    for s in sols:
        assert abstraction_product_check(ta, s.tx, tb, s.alignment)
    assert [s.alignment for s in sols] == sorted(s.alignment for s in sols)
    assert solve_abstraction(ta, tb, x.cycle_length()) == sols
