import math

import pytest
from hypothesis import given, strategies as st

from typent.graph import (
    EdgeDistribution,
    QuditGraph,
    boundary_edges,
    boundary_fraction,
    build_chain,
    build_cycle,
    interval_mask,
    mask_vertices,
    subset_mask,
    uniform_edge_distribution,
)


def test_build_chain_small():
    g = build_chain(2, 2)
    assert g.edges == ((0, 1),)
    assert build_chain(4, 2).edges == ((0, 1), (1, 2), (2, 3))
    g8 = build_chain(8, 3)
    assert len(g8.edges) == 7 and g8.d == 3


@pytest.mark.parametrize("L,d", [(1, 2), (4, 1)])
def test_build_chain_rejects(L, d):
    with pytest.raises(ValueError):
        build_chain(L, d)


@pytest.mark.parametrize("L,d,m", [(3, 2, 3), (12, 2, 12), (4, 5, 4)])
def test_build_cycle(L, d, m):
    g = build_cycle(L, d)
    assert len(g.edges) == m and g.d == d


def test_build_cycle_rejects_short():
    with pytest.raises(ValueError):
        build_cycle(2, 2)


@pytest.mark.parametrize(
    "edges",
    [((0, 0),), ((0, 3),), ((0, 1), (1, 0))],
    ids=["self-loop", "out-of-range", "duplicate"],
)
def test_graph_invariants(edges):
    with pytest.raises(ValueError):
        QuditGraph(3, edges, 2)


def test_boundary_examples():
    assert boundary_edges(build_chain(4, 2), interval_mask(0, 2)) == [(1, 2)]
    assert len(boundary_edges(build_cycle(12, 2), interval_mask(0, 4))) == 2
    assert boundary_edges(build_cycle(12, 2), 0) == []


def test_uniform_distribution():
    d = uniform_edge_distribution(build_chain(4, 2))
    assert d.probs == pytest.approx((1 / 3,) * 3)
    assert uniform_edge_distribution(build_chain(2, 2)).probs == (1.0,)
    assert boundary_fraction(build_cycle(12, 2), interval_mask(0, 4)) == pytest.approx(2 / 12)


def test_distribution_must_normalize():
    with pytest.raises(ValueError):
        EdgeDistribution(((0, 1), (1, 2)), (0.5, 0.6))
    with pytest.raises(ValueError):
        uniform_edge_distribution(QuditGraph(1, (), 2))


def test_mask_helpers():
    assert subset_mask([0, 2], 3) == 0b101
    assert mask_vertices(0b1011) == [0, 1, 3]
    assert interval_mask(2, 5) == 0b11100
    with pytest.raises(ValueError):
        subset_mask([3], 3)


graphs = st.one_of(
    st.builds(build_chain, st.integers(2, 14), st.integers(2, 4)),
    st.builds(build_cycle, st.integers(3, 14), st.integers(2, 4)),
)


@given(graphs, st.data())
def test_boundary_symmetric_under_complement(g, data):
    A = data.draw(st.integers(0, g.full_mask))
    assert boundary_edges(g, A) == boundary_edges(g, g.full_mask ^ A)


@given(graphs, st.data())
def test_empty_boundary_only_for_trivial_subsets(g, data):
    A = data.draw(st.integers(0, g.full_mask))
    assert (len(boundary_edges(g, A)) == 0) == (A in (0, g.full_mask))


@given(graphs)
def test_uniform_probabilities_sum_to_one(g):
    assert abs(math.fsum(uniform_edge_distribution(g).probs) - 1.0) <= 1e-12
