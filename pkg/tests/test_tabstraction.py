from math import gcd
from pathlib import Path

import pytest
from hypothesis import given

from fgsolve.graph import FunctionalGraph, cycle_graph, product_component, read_fg
from fgsolve.multiset import EMPTY, Multiset, parse_multiset as M
from fgsolve.tabstraction import (
    TAbstraction,
    abstraction_product_check,
    layer_matrix,
    m1_term,
    m2_term,
    product_cell,
    t_abstraction,
    t_abstractions,
)

import worked
from figures import TABS_MATRIX, SHARED_MATRIX, same_abstraction_pair, tabs, two_cycles
from strategies import connected_graphs, graphs

DATA = Path(__file__).parent / "data"


def test_figure_abstraction():
    assert t_abstraction(tabs()) == TAbstraction.from_rows(TABS_MATRIX)
    ta = t_abstraction(tabs())
    assert ta[0, 1] == M("[2]")
    assert ta[1, 2] == M("[2,2]")
    assert ta[2, 3] == M("[3,1]")
    assert ta[1, 4] == M("[0,0,0]")


def test_figure_node_matrix_shape():
    lm = layer_matrix(tabs())
    sizes = [[len(lm.cell(r, h)) for h in (1, 2, 3)] for r in range(4)]
    assert sizes == [[1, 1, 0], [2, 4, 3], [2, 2, 4], [4, 2, 0]]
    assert lm.h_max == 3


def test_shared_abstraction():
    left, right = same_abstraction_pair()
    target = TAbstraction.from_rows(SHARED_MATRIX)
    assert t_abstraction(left) == target == t_abstraction(right)


def test_trivial_abstractions():
    assert t_abstraction(FunctionalGraph([0])) == TAbstraction.from_rows([["[1]"]])
    lm = layer_matrix(cycle_graph(3))
    assert lm.h_max == 0 and lm.cell(0, 1) == frozenset()
    assert t_abstraction(cycle_graph(3)).width == 1


def test_multiple_components():
    abs_ = t_abstractions(two_cycles())
    assert sorted(a.p for a in abs_) == [2, 3]


def test_render_and_rotate():
    ta = worked.TA
    assert ta.render() == "0: [2] [0] []\n1: [5] [0,0,0,1] [0]"
    assert ta.rotated(1).cell(0, 1) == M("[5]")
    assert ta.cell(0, 9) == EMPTY and ta.cell(3, 1) == M("[5]")


def test_from_rows_trims_empty_columns():
    t = TAbstraction.from_rows([["[1]", "[]", "[]"]])
    assert t.width == 1


def test_m1_examples():
    assert m1_term(worked.TA, 0, 2, 0) == M("[0,5]")
    assert m1_term(worked.TA, 1, 2, 0) == M("[0,0,0,1,2]")
    for r in range(6):
        m1 = m1_term(worked.TA, r, 1, 0)
        assert len(m1) == 1 and m1.max() > 0


def test_m2_examples():
    assert m2_term(worked.TA, worked.TX, 0, 1, 0) == EMPTY
    assert m2_term(worked.TA, worked.TX, 1, 2, 0) == M("[0,0,0,2]")
    assert m2_term(worked.TA, worked.TX, 0, 3, 0) == EMPTY


def test_product_cells_from_worked_example():
    assert product_cell(worked.TA, worked.TX, 3, 1, 0) == M("[10]")
    assert product_cell(worked.TA, worked.TX, 5, 2, 0) == Multiset([0] * 11 + [1, 2, 4])


def test_worked_example_graphs_realise_the_matrices():
    a, x, b = (read_fg(DATA / f"worked.{k}.fg") for k in "AXB")
    assert t_abstraction(a) == worked.TA
    assert t_abstraction(x) == worked.TX
    assert t_abstraction(b) == worked.TB
    assert t_abstraction(b) != worked.TB_PRINTED


def test_product_check():
    assert abstraction_product_check(worked.TA, worked.TX, worked.TB, 0)
    assert not abstraction_product_check(worked.TA, worked.TX, worked.TB, 1)
    rows = [list(r) for r in worked.TB.cells]
    rows[4][1] = M("[0,0,0,0,0,0,1]")
    assert not abstraction_product_check(worked.TA, worked.TX, TAbstraction.from_rows(rows), 0)


def test_printed_row_zero_breaks_telescoping():
    # |cell(r, h)| must equal the number of nodes one layer down
    tb = worked.TB_PRINTED
    assert len(tb[0, 3]) != tb[0, 2].total()
    tb = worked.TB
    assert all(len(tb[r, h + 1]) == tb[r, h].total() - (h == 1) for r in range(6) for h in range(1, 6))


@given(graphs(max_n=10))
def test_layer_matrix_partitions_transients(g):
    for comp in g.components():
        lm = layer_matrix(g, comp)
        seen = [v for r in range(lm.p) for h in range(1, lm.h_max + 1) for v in lm.cell(r, h)]
        assert sorted(seen) == sorted(comp.transients)
        # independent check: walk each transient down to the cycle
        for v in comp.transients:
            steps, u = 0, v
            while not g.is_cyclic[u]:
                u, steps = g.succ[u], steps + 1
            assert v in lm.cell(lm.cycle.index(u), steps)


@given(graphs(max_n=10))
def test_abstraction_invariants(g):
    for comp in g.components():
        lm = layer_matrix(g, comp)
        ta = t_abstraction(g, comp)
        for r in range(ta.p):
            assert ta[r, 1] == Multiset([len(g.preds[lm.cycle[r]])])
            for h in range(1, ta.width):
                assert len(ta[r, h + 1]) == len(lm.cell(r, h))
                assert ta[r, h].total() - (h == 1) == len(lm.cell(r, h))


@given(graphs(max_n=8))
def test_abstraction_relabel_invariant(g):
    perm = list(reversed(range(g.n)))
    h = g.relabel(perm)
    for comp in g.components():
        mine = t_abstraction(g, comp)
        theirs = t_abstraction(h, start=perm[comp.cycle[0]], comp=h.components()[h.component_ids[perm[comp.cycle[0]]]])
        assert mine == theirs


@given(connected_graphs(max_n=10), connected_graphs(max_n=10))
def test_product_formula_holds_at_the_true_alignment(a, x):
    # every component contains a pair (a_k, x_0); reading B from there, k is the alignment
    ta, tx = t_abstraction(a), t_abstraction(x)
    ca, cx = a.component().cycle, x.component().cycle
    for k in range(gcd(len(ca), len(cx))):
        b, _ = product_component(a, x, ca[k], cx[0])
        assert abstraction_product_check(ta, tx, t_abstraction(b, start=0), k)


def test_product_check_rejects_wrong_period():
    assert not abstraction_product_check(worked.TA, worked.TX, worked.TA, 0)


@pytest.mark.parametrize("start", [0, 1])
def test_start_rotates_rows(start):
    g = FunctionalGraph([1, 0, 0, 1, 1, 4, 4])
    assert t_abstraction(g, start=start) == t_abstraction(g).rotated(start)
