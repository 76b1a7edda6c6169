import numpy as np
import pytest

from treesampler.bench import BenchConfig, loglog_slope, slopes, time_sizes


def test_loglog_slope_recovers_power():
    ns = [5, 10, 20, 40]
    assert loglog_slope(ns, [3e-6 * n**1.5 for n in ns]) == pytest.approx(1.5)


def test_tiny_run_shape():
    cfg = BenchConfig(sizes=[3, 4], graphs_per_size=2, samples_per_graph=2)
    rows = time_sizes(cfg)
    assert [(r.n, r.algorithm) for r in rows] == [(3, "colbourn"), (3, "wilson-rc"), (4, "colbourn"), (4, "wilson-rc")]
    assert all(r.mean_seconds > 0 and np.isfinite(r.std_seconds) for r in rows)
    assert set(slopes(rows)) == {"colbourn", "wilson-rc"}


@pytest.mark.parametrize("bad", [dict(sizes=[1, 5]), dict(algorithms=["nope"]), dict(graphs_per_size=0)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        BenchConfig(**bad)
