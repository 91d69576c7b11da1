"""Hypothesis strategies for functional graphs."""

from hypothesis import strategies as st

from fgsolve.graph import FunctionalGraph
from fgsolve.oracle import InstanceSpec, SplitMix64, random_connected_fg


def graphs(min_n=1, max_n=8):
    return st.integers(min_n, max_n).flatmap(
        lambda n: st.lists(st.integers(0, n - 1), min_size=n, max_size=n)
    ).map(FunctionalGraph)


@st.composite
def connected_graphs(draw, max_n=8, max_p=None, max_indegree=3):
    n = draw(st.integers(1, max_n))
    p = draw(st.integers(1, min(n, max_p or n)))
    seed = draw(st.integers(0, 2**64 - 1))
    cap = max_indegree if n == p else max(max_indegree, 2)
    return random_connected_fg(n, p, cap, SplitMix64(seed))


def permutations(n):
    return st.permutations(list(range(n)))


def in_trees(max_n=7):
    """Parents-first in-trees: node v > 0 hangs off a node with a smaller index."""
    from fgsolve.trees import InTree

    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(*[st.just(0)] + [st.integers(0, v - 1) for v in range(1, n)])
    ).map(InTree)


def small_digraphs(max_n=3):
    """Arbitrary digraphs (loops allowed) as ``(n, edges)``."""
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=4, unique=True),
        )
    )


@st.composite
def in_trees_of_height(draw, height, max_extra=4):
    """A spine of ``height`` edges plus extra nodes that never go deeper."""
    from fgsolve.trees import InTree

    parent = [0] + list(range(height))
    level = list(range(height + 1))
    for _ in range(draw(st.integers(0, max_extra))):
        shallow = [v for v in range(len(parent)) if level[v] < height]
        if not shallow:
            break
        p = draw(st.sampled_from(shallow))
        parent.append(p)
        level.append(level[p] + 1)
    return InTree(tuple(parent))
