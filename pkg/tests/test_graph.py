import json

import numpy as np
import pytest

from treesampler.errors import EdgeIntoRoot, GraphFormatError, IsolatedNode, NegativeWeight, ParentOutOfRange, SelfLoop
from treesampler.graph import (
    Graph,
    TreeKind,
    canonical_key,
    is_acyclic,
    is_tree,
    log_tree_weight,
    normalize_stochastic,
    root_children,
    tree_weight,
    validate_graph,
)


def test_minimal_graph_is_valid(G1):
    validate_graph(G1)
    assert G1.n == 1


def test_edge_into_root_rejected():
    w = np.array([[0.0, 1.0], [0.3, 0.0]])
    with pytest.raises(EdgeIntoRoot) as exc:
        validate_graph(Graph(w))
    assert exc.value.i == 1
    assert str(exc.value) == "EdgeIntoRoot(1)"


def test_isolated_node_names_the_column():
    w = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    with pytest.raises(IsolatedNode) as exc:
        validate_graph(Graph(w))
    assert str(exc.value) == "IsolatedNode(2)"


def test_negative_and_self_loop():
    w = np.array([[0.0, 1.0, 1.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
    with pytest.raises(NegativeWeight):
        validate_graph(Graph(w))
    w = np.array([[0.0, 1.0, 1.0], [0.0, 0.5, 1.0], [0.0, 1.0, 0.0]])
    with pytest.raises(SelfLoop):
        validate_graph(Graph(w))


def test_graph_is_immutable(G2):
    with pytest.raises(ValueError):
        G2.weights[0, 1] = 5.0
    src = np.array([[0.0, 1.0], [0.0, 0.0]])
    g = Graph(src)
    src[0, 1] = 9.0
    assert g.weights[0, 1] == 1.0


def test_tree_weight_examples(G1, G2, G3):
    assert tree_weight(G1, (0,)) == 2.0
    assert tree_weight(G2, (0, 1)) == 1.0
    assert tree_weight(G3, (0, 1, 1)) == 0.5


def test_tree_weight_zero_edge_and_log(G3):
    assert tree_weight(G3, (2, 0, 1)) == 0.0
    assert log_tree_weight(G3, (2, 0, 1)) == -np.inf
    assert log_tree_weight(G3, (0, 1, 1)) == pytest.approx(np.log(0.5))


def test_parent_out_of_range(G2):
    with pytest.raises(ParentOutOfRange):
        tree_weight(G2, (0, 3))
    with pytest.raises(ParentOutOfRange):
        tree_weight(G2, (1, 0))
    with pytest.raises(ParentOutOfRange):
        tree_weight(G2, (0,))


def test_is_tree_examples(G2):
    assert is_tree(G2, (0, 0), TreeKind.SPANNING)
    assert not is_tree(G2, (0, 0), TreeKind.DEPENDENCY)
    assert not is_tree(G2, (2, 1), TreeKind.SPANNING)
    assert is_tree(G2, (2, 0), TreeKind.DEPENDENCY)


def test_acyclic_and_root_children():
    assert is_acyclic((0, 1, 2))
    assert not is_acyclic((3, 0, 1))
    assert root_children((0, 1, 0)) == [1, 3]


def test_normalize_stochastic_examples(G2, G3):
    s = normalize_stochastic(G2)
    assert s.weights[0, 1] == pytest.approx(0.5)
    assert s.weights[2, 1] == pytest.approx(0.5)
    s3 = normalize_stochastic(G3)
    assert s3.weights[1, 3] == pytest.approx(0.5)
    assert s3.weights[2, 3] == pytest.approx(0.5)
    again = normalize_stochastic(s)
    np.testing.assert_array_equal(again.weights, s.weights)


def test_canonical_key_order(G2):
    from treesampler.oracle import enumerate_trees

    keys = [canonical_key(t) for t in enumerate_trees(G2, TreeKind.SPANNING)]
    assert keys == sorted(keys)
    assert canonical_key([0, 1]) == canonical_key((0, 1))
    assert canonical_key([0, 1]) != canonical_key([2, 0])


def test_tree_kind_parse():
    assert TreeKind.parse("Spanning") is TreeKind.SPANNING
    assert TreeKind.parse(TreeKind.DEPENDENCY) is TreeKind.DEPENDENCY
    with pytest.raises(ValueError):
        TreeKind.parse("forest")


def test_json_roundtrip(tmp_path, G3):
    path = tmp_path / "g.json"
    path.write_text(json.dumps(G3.to_json()))
    g = Graph.load(path)
    np.testing.assert_array_equal(g.weights, G3.weights)


@pytest.mark.parametrize(
    "obj",
    [
        {"n": 1},
        {"n": 2, "weights": [[0, 1], [0, 0]]},
        {"n": 1, "weights": [[0, "x"], [0, 0]]},
        {"n": 0, "weights": [[0]]},
        [[0, 1], [0, 0]],
    ],
)
def test_json_format_errors(obj):
    with pytest.raises(GraphFormatError):
        Graph.from_json(obj)


def test_load_missing_file(tmp_path):
    with pytest.raises(GraphFormatError):
        Graph.load(tmp_path / "missing.json")
