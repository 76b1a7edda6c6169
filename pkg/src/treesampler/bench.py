"""Per-sample runtime of the samplers on random complete graphs, with log-log fits."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .colbourn import ColbournSampler
from .fixtures import random_graph
from .graph import TreeKind
from .rng import spawn_rng
from .wilson import RootedWilson

WARMUP = 3

# name -> factory(graph) returning draw(rng); the factory does the per-graph setup
ALGORITHMS = {
    "colbourn": lambda g: ColbournSampler(g, TreeKind.DEPENDENCY).sample,
    "wilson-rc": lambda g: RootedWilson(g).wilson_rc,
    "wilson-reject": lambda g: RootedWilson(g).wilson_reject,
    "wilson": lambda g: RootedWilson(g).wilson,
}


@dataclass
class BenchConfig:
    sizes: list[int] = field(default_factory=lambda: [5, 10, 20, 40])
    algorithms: list[str] = field(default_factory=lambda: ["colbourn", "wilson-rc"])
    graphs_per_size: int = 20
    samples_per_graph: int = 20
    weight_distribution: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if not self.sizes or min(self.sizes) < 2:
            raise ValueError("graph sizes must be at least 2")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}")
        if self.graphs_per_size < 1 or self.samples_per_graph < 1:
            raise ValueError("graphs_per_size and samples_per_graph must be positive")


@dataclass
class BenchRow:
    n: int
    algorithm: str
    mean_seconds: float
    std_seconds: float


def loglog_slope(ns, seconds) -> float:
    """Least-squares slope of log(seconds) against log(n)."""
    x, y = np.log(np.asarray(ns, float)), np.log(np.asarray(seconds, float))
    return float(np.polyfit(x, y, 1)[0])


def time_sizes(cfg: BenchConfig) -> list[BenchRow]:
    """Mean and spread of the per-sample time at each size.

    Each graph gets one sampler; its setup time is split evenly over that
    graph's samples and added to each timed draw. Graph generation is not
    timed. Each algorithm gets its own pass, in which sizes are interleaved
    (graph ``k`` of every size before graph ``k + 1``) so slow stretches of a
    shared machine hit all sizes alike.
    """
    graphs = {}
    for n in cfg.sizes:
        graph_rng = spawn_rng(cfg.seed, n)
        graphs[n] = [random_graph(n, graph_rng, cfg.weight_distribution) for _ in range(cfg.graphs_per_size)]
    rngs = {(n, name): spawn_rng(cfg.seed + 1, n) for n in cfg.sizes for name in cfg.algorithms}
    times: dict[tuple[int, str], list[float]] = {key: [] for key in rngs}
    for name in cfg.algorithms:
        for n in cfg.sizes:
            warm = ALGORITHMS[name](graphs[n][0])
            for _ in range(WARMUP):
                warm(rngs[n, name])
        for k in range(cfg.graphs_per_size):
            for n in cfg.sizes:
                g = graphs[n][k]
                rng = rngs[n, name]
                t0 = time.perf_counter()
                draw = ALGORITHMS[name](g)
                share = (time.perf_counter() - t0) / cfg.samples_per_graph
                out = times[n, name]
                for _ in range(cfg.samples_per_graph):
                    t0 = time.perf_counter()
                    draw(rng)
                    out.append(time.perf_counter() - t0 + share)
    return [
        BenchRow(n, name, float(np.mean(times[n, name])), float(np.std(times[n, name])))
        for n in cfg.sizes
        for name in cfg.algorithms
    ]


def slopes(rows: list[BenchRow]) -> dict[str, float]:
    out = {}
    for name in dict.fromkeys(r.algorithm for r in rows):
        mine = [r for r in rows if r.algorithm == name]
        if len({r.n for r in mine}) >= 2:
            out[name] = loglog_slope([r.n for r in mine], [r.mean_seconds for r in mine])
    return out
