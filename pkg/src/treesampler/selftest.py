"""Built-in self-check: exact quantities against the oracle, then sampler statistics.

Every suite pulls its samplers and marginal routine from a ``Registry`` so a
caller can swap in a broken implementation and confirm the suite notices.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .colbourn import ColbournSampler, build_laplacian, condition, edge_marginals_into, mtt_marginals, partition_function
from .errors import TreeSamplerError
from .fixtures import g1, g2, g3, random_graph, random_sparse_graph
from .graph import ROOT, Graph, TreeKind
from .oracle import exact_distribution
from .rng import spawn_rng
from .stats import EmpiricalDistribution, binomial_two_sided, chi_square_gof
from .swor import swor
from .wilson import RootedWilson

# draw(graph, kind, rng, size) -> (size, n) parent array
BatchDraw = Callable[[Graph, TreeKind, np.random.Generator, int], np.ndarray]


def _colbourn_draw(g: Graph, kind: TreeKind, rng, size: int) -> np.ndarray:
    return ColbournSampler(g, kind).sample_batch(rng, size)


def _loop(method: str) -> BatchDraw:
    def draw(g: Graph, kind: TreeKind, rng, size: int) -> np.ndarray:
        sampler = getattr(RootedWilson(g), method)
        return np.array([sampler(rng)[0] for _ in range(size)])

    return draw


@dataclass
class Registry:
    partition: Callable[[Graph, TreeKind], float] = partition_function
    marginals: Callable[[Graph, TreeKind], np.ndarray] = mtt_marginals
    colbourn: BatchDraw = _colbourn_draw
    wilson: BatchDraw = field(default_factory=lambda: _loop("wilson"))
    wilson_rc: BatchDraw = field(default_factory=lambda: _loop("wilson_rc"))
    wilson_reject: BatchDraw = field(default_factory=lambda: _loop("wilson_reject"))
    swor: Callable = swor

    def with_(self, **changes) -> "Registry":
        return replace(self, **changes)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    lines: list[str] = field(default_factory=list)


@dataclass
class SelftestConfig:
    seed: int = 0
    random_graphs_per_size: int = 10
    samples: int = 20_000
    alpha: float = 1e-3
    # root-child frequency on G3 must be this far from the biased value 1/2
    bias_p_value: float = 1e-6


def _graphs(cfg: SelftestConfig) -> list[tuple[str, Graph]]:
    out = [("G1", g1()), ("G2", g2()), ("G3", g3())]
    rng = spawn_rng(cfg.seed, 0)
    for n in range(2, 6):
        for k in range(cfg.random_graphs_per_size):
            g = random_sparse_graph(n, rng) if k % 2 else random_graph(n, rng)
            out.append((f"random n={n} #{k}", g))
    return out


def _close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


def suite_partition(reg: Registry, cfg: SelftestConfig) -> SuiteResult:
    res = SuiteResult("partition", True)
    for name, g in _graphs(cfg):
        for kind in TreeKind:
            try:
                z_oracle = exact_distribution(g, kind).z
            except TreeSamplerError:
                z_oracle = 0.0
            z = reg.partition(g, kind)
            if not _close(z, z_oracle, 1e-9) and not (z == 0.0 == z_oracle):
                res.passed = False
                res.lines.append(f"{name} {kind.value}: det {z!r} vs enumeration {z_oracle!r}")
    res.lines.append(f"{len(_graphs(cfg)) * 2} partition functions checked")
    return res


def suite_marginals(reg: Registry, cfg: SelftestConfig) -> SuiteResult:
    res = SuiteResult("marginal-agreement", True)
    for name, g in _graphs(cfg):
        for kind in TreeKind:
            try:
                exact = exact_distribution(g, kind).marginals(g.n)
            except TreeSamplerError:
                continue
            got = reg.marginals(g, kind)
            err = float(np.abs(got - exact).max())
            if not err <= 1e-9:
                res.passed = False
                res.lines.append(f"{name} {kind.value}: max marginal error {err:.3e}")
    return res


def suite_conditioning(reg: Registry, cfg: SelftestConfig) -> SuiteResult:
    res = SuiteResult("conditioning", True)
    for name, g in [("G1", g1()), ("G2", g2()), ("G3", g3())]:
        for kind in TreeKind:
            dist = exact_distribution(g, kind)
            for j in range(1, g.n + 1):
                for i in range(g.n + 1):
                    if i == j or g.weights[i, j] <= 0:
                        continue
                    try:
                        cond = dist.restrict([(i, j)])
                    except TreeSamplerError:
                        continue
                    state = build_laplacian(g, kind)
                    condition(state, g, (i, j))
                    want = cond.marginals(g.n)
                    worst = 0.0
                    for jj in range(1, g.n + 1):
                        worst = max(worst, float(np.abs(edge_marginals_into(state, g, jj) - want[:, jj]).max()))
                    if not _close(state.z, cond.z, 1e-8):
                        res.passed = False
                        res.lines.append(f"{name} {kind.value} on {i}->{j}: Z {state.z} vs {cond.z}")
                    if worst > 1e-8:
                        res.passed = False
                        res.lines.append(f"{name} {kind.value} on {i}->{j}: marginal error {worst:.3e}")
    return res


def _gof_line(label: str, parents: np.ndarray, g: Graph, kind: TreeKind, alpha: float) -> tuple[bool, str]:
    exact = exact_distribution(g, kind)
    try:
        report = chi_square_gof(EmpiricalDistribution.from_array(parents), exact, alpha)
    except TreeSamplerError as exc:
        return False, f"{label}: {exc}"
    return not report.reject, f"{label}: {report.line()}"


def suite_distributional(reg: Registry, cfg: SelftestConfig) -> SuiteResult:
    res = SuiteResult("distributional", True)
    rand = random_graph(4, spawn_rng(cfg.seed, 1))
    cases = [
        ("wilson", reg.wilson, TreeKind.SPANNING),
        ("colbourn", reg.colbourn, TreeKind.SPANNING),
        ("colbourn", reg.colbourn, TreeKind.DEPENDENCY),
        ("wilson-reject", reg.wilson_reject, TreeKind.DEPENDENCY),
    ]
    for gi, (gname, g) in enumerate([("G2", g2()), ("G3", g3()), ("random n=4", rand)]):
        for ci, (alg, draw, kind) in enumerate(cases):
            rng = spawn_rng(cfg.seed + 1, 10 * gi + ci)
            ok, line = _gof_line(f"{gname} {alg} {kind.value}", draw(g, kind, rng, cfg.samples), g, kind, cfg.alpha)
            res.passed &= ok
            res.lines.append(line)
    return res


def suite_bias(reg: Registry, cfg: SelftestConfig) -> SuiteResult:
    """On G3 the exact root-child-1 probability is 2/3; the raw-weight heuristic gives 1/2."""
    res = SuiteResult("bias-detection", True)
    g = g3()
    for k, (alg, draw, biased) in enumerate(
        [("colbourn", reg.colbourn, False), ("wilson-reject", reg.wilson_reject, False), ("wilson-rc", reg.wilson_rc, True)]
    ):
        parents = draw(g, TreeKind.DEPENDENCY, spawn_rng(cfg.seed + 2, k), cfg.samples)
        hits = int((parents[:, 0] == ROOT).sum())
        p = binomial_two_sided(hits, len(parents), 2 / 3)
        freq = hits / len(parents)
        if biased:
            ok = p < cfg.bias_p_value
            want = "should differ from 2/3"
        else:
            ok = p >= cfg.alpha
            want = "should match 2/3"
        res.passed &= ok
        res.lines.append(f"{alg}: p(root child 1) = {freq:.4f}, p-value vs 2/3 = {p:.3g} ({want}) {'ok' if ok else 'FAIL'}")
    return res


def suite_swor(reg: Registry, cfg: SelftestConfig) -> SuiteResult:
    res = SuiteResult("swor", True)
    for name, g in [("G1", g1()), ("G2", g2()), ("G3", g3())]:
        for kind in TreeKind:
            support = set(exact_distribution(g, kind).trees())
            for seed in range(20):
                out = reg.swor(g, kind, len(support) + 1, spawn_rng(cfg.seed + 3, seed))
                got = out.trees
                if len(set(got)) != len(got) or set(got) != support or not out.exhausted:
                    res.passed = False
                    res.lines.append(f"{name} {kind.value} seed {seed}: drew {got}, exhausted={out.exhausted}")
                    break
    # k = 1 must follow the tree distribution
    g = g3()
    draws = [reg.swor(g, TreeKind.DEPENDENCY, 1, spawn_rng(cfg.seed + 4, s)).trees[0] for s in range(cfg.samples // 4)]
    ok, line = _gof_line("G3 k=1", np.array(draws), g, TreeKind.DEPENDENCY, cfg.alpha)
    res.passed &= ok
    res.lines.append(line)
    return res


SUITES = {
    "partition": suite_partition,
    "marginal-agreement": suite_marginals,
    "conditioning": suite_conditioning,
    "distributional": suite_distributional,
    "bias-detection": suite_bias,
    "swor": suite_swor,
}


def run_selftest(
    registry: Registry | None = None, cfg: SelftestConfig | None = None, only: list[str] | None = None
) -> list[SuiteResult]:
    """Run the named suites (all by default); a suite that raises counts as failed."""
    registry = registry or Registry()
    cfg = cfg or SelftestConfig()
    results = []
    for name, suite in SUITES.items():
        if only is not None and name not in only:
            continue
        try:
            results.append(suite(registry, cfg))
        except (TreeSamplerError, ValueError, FloatingPointError, IndexError) as exc:
            results.append(SuiteResult(name, False, [f"raised {exc}"]))
    return results
