import numpy as np
import pytest

from treesampler.errors import NoRootEdge, RetryCapExceeded, Unreachable
from treesampler.fixtures import random_graph
from treesampler.graph import Graph, TreeKind, is_tree, normalize_stochastic
from treesampler.oracle import exact_distribution, exact_marginals
from treesampler.stats import EmpiricalDistribution, binomial_two_sided, chi_square_gof, collect
from treesampler.wilson import RootedWilson, WalkStats, unreachable_nodes, wilson, wilson_rc, wilson_reject


def star_only(n: int) -> Graph:
    w = np.zeros((n + 1, n + 1))
    w[0, 1:] = 1.0
    return Graph(w)


def single_root_edge() -> Graph:
    # root -> 1 only; chain-like structure below
    w = np.zeros((4, 4))
    w[0, 1] = 1.0
    w[1, 2] = w[2, 3] = w[1, 3] = w[3, 2] = 1.0
    return Graph(w)


def test_star_graph_always_star():
    g = star_only(4)
    for seed in range(20):
        t, _ = wilson(g, seed)
        assert t == (0, 0, 0, 0)


def test_unreachable_detected():
    w = np.zeros((4, 4))
    w[0, 1] = 1.0
    w[3, 2] = w[2, 3] = 1.0
    g = Graph(w)
    assert unreachable_nodes(w) == [2, 3]
    with pytest.raises(Unreachable) as exc:
        wilson(g, 0)
    assert exc.value.j == 2


def test_rerooted_unreachable_uses_original_labels():
    # with root child 1 fixed, node 3 can only be reached from the root
    w = np.zeros((4, 4))
    w[0, 1] = w[0, 3] = 1.0
    w[1, 2] = w[3, 2] = 1.0
    g = Graph(w)
    with pytest.raises(Unreachable) as exc:
        RootedWilson(g).rerooted(1)
    assert exc.value.j == 3


def test_no_root_edge():
    w = np.zeros((3, 3))
    w[1, 2] = w[2, 1] = 1.0
    with pytest.raises(NoRootEdge):
        RootedWilson(Graph(w)).wilson_rc(np.random.default_rng(0))


def test_forced_root_edge():
    g = single_root_edge()
    for seed in range(30):
        t, _ = wilson_rc(g, seed)
        assert t[0] == 0 and t.count(0) == 1


def test_reject_without_rejections():
    g = single_root_edge()
    for seed in range(30):
        _, stats = wilson_reject(g, seed)
        assert stats.rejections == 0


def test_retry_cap():
    w = np.zeros((3, 3))
    w[0, 1] = w[0, 2] = 1.0
    w[1, 2] = w[2, 1] = 1e-12
    with pytest.raises(RetryCapExceeded):
        wilson_reject(Graph(w), 0, cap=5)


def test_determinism(G3):
    a = wilson(G3, 42)
    b = wilson(G3, 42)
    assert a == b
    assert a[1].steps_taken > 0


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_outputs_are_valid_trees(n):
    rng = np.random.default_rng(n)
    g = random_graph(n, rng)
    sampler = RootedWilson(g)
    for _ in range(200):
        assert is_tree(g, sampler.wilson(rng)[0], TreeKind.SPANNING)
        assert is_tree(g, sampler.wilson_rc(rng)[0], TreeKind.DEPENDENCY)
        assert is_tree(g, sampler.wilson_reject(rng)[0], TreeKind.DEPENDENCY)


def test_g2_spanning_uniform(G2):
    emp = collect(RootedWilson(G2).wilson, 200_000, np.random.default_rng(0))
    for t in [(0, 0), (0, 1), (2, 0)]:
        assert emp.freq(t) == pytest.approx(1 / 3, abs=0.01)


def test_g3_spanning_root_edge(G3):
    # the oracle value is 0.75 (four of the five spanning trees use root->1)
    want = exact_marginals(G3, TreeKind.SPANNING)[0, 1]
    assert want == pytest.approx(0.75)
    emp = collect(RootedWilson(G3).wilson, 200_000, np.random.default_rng(1))
    got = sum(c for t, c in emp.counts.items() if t[0] == 0) / emp.total
    assert got == pytest.approx(want, abs=0.01)


def test_g3_rc_bias_and_reject_fix(G3):
    rooted = RootedWilson(G3)
    rc = collect(rooted.wilson_rc, 200_000, np.random.default_rng(2))
    hits = sum(c for t, c in rc.counts.items() if t[0] == 0)
    assert hits / rc.total == pytest.approx(0.5, abs=0.01)
    assert binomial_two_sided(hits, rc.total, 2 / 3) < 1e-6
    assert binomial_two_sided(hits, rc.total, 0.5) > 1e-3

    rej = collect(rooted.wilson_reject, 200_000, np.random.default_rng(3))
    hits = sum(c for t, c in rej.counts.items() if t[0] == 0)
    assert hits / rej.total == pytest.approx(2 / 3, abs=0.01)
    assert binomial_two_sided(hits, rej.total, 2 / 3) > 1e-3
    assert binomial_two_sided(hits, rej.total, 0.5) < 1e-6


def test_g2_rc_unbiased(G2):
    emp = collect(RootedWilson(G2).wilson_rc, 200_000, np.random.default_rng(4))
    assert emp.freq((0, 1)) == pytest.approx(0.5, abs=0.01)
    assert emp.freq((2, 0)) == pytest.approx(0.5, abs=0.01)


def test_g2_acceptance_rate(G2):
    stats = WalkStats()
    sampler = RootedWilson(G2)
    rng = np.random.default_rng(5)
    accepted = 30_000
    for _ in range(accepted):
        stats.rejections += sampler.wilson_reject(rng)[1].rejections
    assert accepted / (accepted + stats.rejections) == pytest.approx(2 / 3, abs=0.01)


def test_stochastic_and_raw_weights_agree():
    g = random_graph(3, np.random.default_rng(6))
    exact = exact_distribution(g, TreeKind.SPANNING)
    for graph in (g, normalize_stochastic(g)):
        emp = collect(RootedWilson(graph).wilson, 50_000, np.random.default_rng(7))
        assert not chi_square_gof(emp, exact).reject
