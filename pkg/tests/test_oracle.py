import numpy as np
import pytest

from treesampler.errors import EmptySupport, SupportExhausted, TooLarge
from treesampler.fixtures import random_graph
from treesampler.graph import Graph, TreeKind, is_tree, tree_weight
from treesampler.oracle import enumerate_trees, exact_distribution, exact_marginals, exact_swor_conditional


def test_g2_enumeration(G2):
    assert enumerate_trees(G2, TreeKind.SPANNING) == [(0, 0), (0, 1), (2, 0)]
    assert enumerate_trees(G2, TreeKind.DEPENDENCY) == [(0, 1), (2, 0)]


def test_g1_enumeration(G1):
    for kind in TreeKind:
        assert enumerate_trees(G1, kind) == [(0,)]


def test_exact_distribution_values(G2, G3):
    dep = exact_distribution(G2, TreeKind.DEPENDENCY)
    assert dep.z == 2.0
    assert all(dep.prob(t) == 0.5 for t in dep.trees())
    span = exact_distribution(G2, TreeKind.SPANNING)
    assert span.z == 3.0
    assert all(span.prob(t) == pytest.approx(1 / 3) for t in span.trees())
    d3 = exact_distribution(G3, TreeKind.DEPENDENCY)
    assert d3.z == 1.5
    assert d3.trees() == [(0, 1, 1), (0, 1, 2), (3, 0, 2)]
    assert all(d3.prob(t) == pytest.approx(1 / 3) for t in d3.trees())


def test_exact_marginals(G2, G3):
    m = exact_marginals(G2, TreeKind.SPANNING)
    assert m[0, 1] == pytest.approx(2 / 3)
    assert m[2, 1] == pytest.approx(1 / 3)
    m3 = exact_marginals(G3, TreeKind.DEPENDENCY)
    assert m3[0, 1] == pytest.approx(2 / 3)
    assert m3[0, 2] == pytest.approx(1 / 3)


def test_g3_spanning_root_edge_marginal(G3):
    # trees [0,0,1] .25, [0,0,2] .25, [0,1,1] .5, [0,1,2] .5, [3,0,2] .5; the first four use root->1
    dist = exact_distribution(G3, TreeKind.SPANNING)
    assert dist.z == 2.0
    assert exact_marginals(G3, TreeKind.SPANNING)[0, 1] == pytest.approx(0.75)


def test_dependency_is_filtered_spanning(rng):
    for n in range(1, 5):
        g = random_graph(n, rng)
        span = enumerate_trees(g, TreeKind.SPANNING)
        dep = enumerate_trees(g, TreeKind.DEPENDENCY)
        assert dep == [t for t in span if t.count(0) == 1]
        assert all(is_tree(g, t, TreeKind.SPANNING) for t in span)


def test_distribution_invariants(rng):
    g = random_graph(4, rng)
    for kind in TreeKind:
        dist = exact_distribution(g, kind)
        assert sum(e.probability for e in dist.entries.values()) == pytest.approx(1.0, abs=1e-12)
        for e in dist.entries.values():
            assert e.weight == tree_weight(g, e.tree)
        m = dist.marginals(g.n)
        np.testing.assert_allclose(m[:, 1:].sum(axis=0), 1.0, atol=1e-12)


def test_cayley_count():
    # complete graph on n+1 nodes rooted at 0: (n+1)^(n-1) spanning trees
    for n in range(1, 6):
        w = np.ones((n + 1, n + 1))
        w[:, 0] = 0
        np.fill_diagonal(w, 0)
        assert len(enumerate_trees(Graph(w), TreeKind.SPANNING)) == (n + 1) ** (n - 1)


def test_too_large(rng):
    with pytest.raises(TooLarge):
        enumerate_trees(random_graph(9, rng), TreeKind.SPANNING)
    assert len(enumerate_trees(random_graph(3, rng), TreeKind.SPANNING, cap=3)) == 16


def test_empty_support():
    w = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    with pytest.raises(EmptySupport):
        exact_distribution(Graph(w), TreeKind.SPANNING)


def test_swor_conditional(G2, G3):
    base = exact_swor_conditional(G2, [])
    assert base.entries == exact_distribution(G2, TreeKind.DEPENDENCY).entries
    one = exact_swor_conditional(G2, [(0, 1)])
    assert one.trees() == [(2, 0)]
    assert one.z == 1.0
    assert one.prob((2, 0)) == 1.0
    with pytest.raises(SupportExhausted):
        exact_swor_conditional(G3, [(0, 1, 1), (0, 1, 2), (3, 0, 2)])


def test_restrict(G3):
    dist = exact_distribution(G3, TreeKind.DEPENDENCY)
    r = dist.restrict([(0, 2)])
    assert r.trees() == [(3, 0, 2)]
    assert r.z == 0.5
