import io
import json

import numpy as np
import pytest

from treesampler.cli import main
from treesampler.fixtures import g2, g3


def write_graph(tmp_path, name, weights):
    p = tmp_path / f"{name}.json"
    w = np.asarray(weights, float)
    p.write_text(json.dumps({"n": len(w) - 1, "weights": w.tolist()}))
    return str(p)


@pytest.fixture
def files(tmp_path):
    return {
        "g1": write_graph(tmp_path, "g1", [[0, 2], [0, 0]]),
        "g2": write_graph(tmp_path, "g2", g2().weights),
        "g3": write_graph(tmp_path, "g3", g3().weights),
        "iso": write_graph(tmp_path, "iso", [[0, 1, 0], [0, 0, 0], [0, 0, 0]]),
        "noroot": write_graph(tmp_path, "noroot", [[0, 0, 0], [0, 0, 1], [0, 1, 0]]),
        "bad": str(tmp_path / "missing.json"),
    }


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines() if line]


def test_sample_g1(files):
    code, text = run(["sample", files["g1"], "-k", "3"])
    assert code == 0
    recs = records(text)
    assert [r["parents"] for r in recs] == [[0]] * 3
    assert all(r["weight"] == 2.0 for r in recs)


@pytest.mark.parametrize("alg", ["colbourn", "wilson", "wilson-rc", "wilson-reject"])
def test_sample_is_reproducible(files, alg):
    a = run(["sample", files["g3"], "-k", "20", "--seed", "7", "--algorithm", alg])
    b = run(["sample", files["g3"], "-k", "20", "--seed", "7", "--algorithm", alg])
    assert a == b and a[0] == 0


def test_sample_csv(files):
    code, text = run(["sample", files["g2"], "-k", "2", "--output", "csv"])
    assert code == 0
    assert text.splitlines()[0].startswith("parents,weight")


def test_invalid_graph_exit_code(files, capsys):
    code, _ = run(["sample", files["iso"]])
    assert code == 2
    assert "IsolatedNode" in capsys.readouterr().err


def test_missing_file(files):
    assert run(["sample", files["bad"]])[0] == 2


def test_singular_exit_code(files):
    assert run(["sample", files["noroot"]])[0] == 3


def test_usage_errors(files):
    assert run(["sample", files["g2"], "-k", "0"])[0] == 1
    assert run(["sample", files["g2"], "--algorithm", "wilson", "--kind", "dependency"])[0] == 1
    assert run(["nonsense"])[0] == 1


def test_swor_exhaustion(files):
    code, text = run(["swor", files["g2"], "-k", "5"])
    assert code == 0
    recs = records(text)
    assert len(recs) == 3
    assert recs[-1] == {"summary": "exhausted", "requested": 5, "returned": 2}
    assert recs[0]["conditional_probability"] == pytest.approx(0.5)


def test_partition(files):
    code, text = run(["partition", files["g2"]])
    rec = records(text)[0]
    assert code == 0 and rec["z_mtt"] == pytest.approx(2.0) and rec["z_oracle"] == pytest.approx(2.0)
    code, text = run(["partition", files["noroot"]])
    assert code == 0 and records(text)[0]["z_mtt"] == 0.0


def test_marginals_csv(files):
    code, text = run(["marginals", files["g3"], "--output", "csv"])
    rows = text.splitlines()
    assert code == 0 and rows[0].startswith("head,")
    assert float(rows[1].split(",")[2]) == pytest.approx(2 / 3)
    assert float(rows[4].split(",")[2]) == pytest.approx(1 / 3)


def test_enumerate(files):
    code, text = run(["enumerate", files["g3"]])
    assert code == 0 and len(text.splitlines()) == 3


def test_enum_cap_warning(files, capsys):
    run(["enumerate", files["g2"], "--enum-cap", "9"])
    assert "cap" in capsys.readouterr().err.lower()


def test_bench_small(files):
    code, text = run(["bench", "--sizes", "3,5", "--samples-per-size", "2", "--graphs-per-size", "2", "--output", "csv"])
    assert code == 0
    assert text.count("slope") == 2


def test_selftest_command():
    code, text = run(["selftest"])
    assert code == 0
    assert text.count("[PASS]") == 6
