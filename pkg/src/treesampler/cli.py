"""``treesampler`` command line.

Exit codes: 0 success, 1 usage, 2 invalid graph, 3 domain error, 4 selftest failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Sequence, TextIO

from .bench import ALGORITHMS as BENCH_ALGORITHMS
from .bench import BenchConfig, slopes, time_sizes
from .colbourn import ColbournSampler, mtt_marginals, partition_function
from .errors import DomainError, GraphError, SupportExhausted
from .graph import Graph, TreeKind, log_tree_weight, tree_weight
from .oracle import ENUM_CAP, exact_distribution
from .rng import make_rng, spawn_rng
from .selftest import SelftestConfig, run_selftest
from .swor import SworSampler
from .wilson import RootedWilson

EXIT_OK, EXIT_USAGE, EXIT_GRAPH, EXIT_DOMAIN, EXIT_SELFTEST = 0, 1, 2, 3, 4

SAMPLERS = ("wilson", "wilson-rc", "wilson-reject", "colbourn")
# kind each walk-based sampler produces; colbourn handles both
FIXED_KIND = {"wilson": TreeKind.SPANNING, "wilson-rc": TreeKind.DEPENDENCY, "wilson-reject": TreeKind.DEPENDENCY}
DEFAULT_SIZES = [5, 10, 20, 40]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclass
class CliConfig:
    command: str
    graph_path: str | None = None
    algorithm: str = "colbourn"
    kind: TreeKind | None = None
    k: int = 1
    seed: int = 0
    output: str = "jsonl"
    enum_cap: int = ENUM_CAP
    sizes: list[int] = field(default_factory=lambda: list(DEFAULT_SIZES))
    bench_algorithms: list[str] = field(default_factory=lambda: ["colbourn", "wilson-rc"])
    samples_per_size: int = 20
    graphs_per_size: int = 20
    weight_distribution: str = "uniform"

    def resolved_kind(self) -> TreeKind:
        """Kind to use, checking it against the algorithm; raises UsageError on a mismatch."""
        fixed = FIXED_KIND.get(self.algorithm) if self.command == "sample" else None
        if fixed is not None:
            if self.kind is not None and self.kind is not fixed:
                raise UsageError(f"{self.algorithm} samples {fixed.value} trees only")
            return fixed
        return self.kind or TreeKind.DEPENDENCY


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="treesampler", description="Sample and count weighted directed spanning trees.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, graph=True, kind=True):
        if graph:
            sp.add_argument("graph_path", help='graph JSON: {"n": N, "weights": [[...], ...]}')
        if kind:
            sp.add_argument("--kind", type=TreeKind.parse, choices=list(TreeKind), metavar="{spanning,dependency}")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--output", choices=["jsonl", "csv"], default=None)

    sp = sub.add_parser("sample", help="draw k trees")
    common(sp)
    sp.add_argument("--algorithm", choices=SAMPLERS, default="colbourn")
    sp.add_argument("-k", type=int, default=1)

    sp = sub.add_parser("swor", help="draw k distinct trees without replacement")
    common(sp)
    sp.add_argument("-k", type=int, default=1)

    for name, text in [
        ("enumerate", "list every tree with its probability"),
        ("marginals", "edge marginal matrix"),
        ("partition", "partition function by determinant and by enumeration"),
    ]:
        sp = sub.add_parser(name, help=text)
        common(sp)
        sp.add_argument("--enum-cap", type=int, default=ENUM_CAP)

    sp = sub.add_parser("bench", help="per-sample runtime against graph size")
    common(sp, graph=False, kind=False)
    sp.add_argument("--algorithm", action="append", choices=sorted(BENCH_ALGORITHMS), dest="bench_algorithms")
    sp.add_argument("--sizes", type=lambda s: [int(x) for x in s.split(",")], help="comma-separated sizes")
    sp.add_argument("--n-min", type=int)
    sp.add_argument("--n-max", type=int)
    sp.add_argument("--n-step", type=int, default=5)
    sp.add_argument("--samples-per-size", type=int, default=20, help="timed samples per graph")
    sp.add_argument("--graphs-per-size", type=int, default=20)
    sp.add_argument(
        "--weight-distribution", choices=["uniform", "exponential", "softmax-gumbel"], default="uniform"
    )

    sp = sub.add_parser("selftest", help="check exact quantities and sampler statistics")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=20_000)
    return p


def config_from_args(ns: argparse.Namespace) -> CliConfig:
    cfg = CliConfig(command=ns.command, seed=ns.seed)
    for name in ("graph_path", "algorithm", "kind", "k", "enum_cap", "weight_distribution"):
        if getattr(ns, name, None) is not None:
            setattr(cfg, name, getattr(ns, name))
    cfg.output = getattr(ns, "output", None) or ("csv" if ns.command in ("marginals", "bench") else "jsonl")
    if cfg.k < 1:
        raise UsageError("k must be at least 1")
    if ns.command == "bench":
        if ns.bench_algorithms:
            cfg.bench_algorithms = list(dict.fromkeys(ns.bench_algorithms))
        if ns.sizes and (ns.n_min is not None or ns.n_max is not None):
            raise UsageError("give either --sizes or --n-min/--n-max")
        if ns.sizes:
            cfg.sizes = ns.sizes
        elif ns.n_min is not None or ns.n_max is not None:
            lo = ns.n_min if ns.n_min is not None else ns.n_max
            hi = ns.n_max if ns.n_max is not None else ns.n_min
            if lo > hi:
                raise UsageError("--n-min must not exceed --n-max")
            if ns.n_step < 1:
                raise UsageError("--n-step must be positive")
            cfg.sizes = list(range(lo, hi + 1, ns.n_step))
        if min(cfg.sizes) < 2:
            raise UsageError("graph sizes must be at least 2")
        if ns.samples_per_size < 1 or ns.graphs_per_size < 1:
            raise UsageError("--samples-per-size and --graphs-per-size must be positive")
        cfg.samples_per_size, cfg.graphs_per_size = ns.samples_per_size, ns.graphs_per_size
    if ns.command in ("enumerate", "marginals", "partition") and cfg.enum_cap < 1:
        raise UsageError("--enum-cap must be positive")
    cfg.resolved_kind()
    return cfg


def _fmt(x: float) -> str:
    return repr(float(x))


class Writer:
    """Emits records as JSON lines or CSV rows with a header taken from the first record."""

    def __init__(self, out: TextIO, fmt: str):
        self.out, self.fmt = out, fmt
        self._csv = None

    def record(self, rec: dict) -> None:
        if self.fmt == "jsonl":
            self.out.write(json.dumps(rec) + "\n")
            return
        if self._csv is None:
            self._csv = csv.DictWriter(self.out, fieldnames=list(rec), lineterminator="\n", extrasaction="ignore")
            self._csv.writeheader()
        row = {k: " ".join(map(str, v)) if isinstance(v, list) else v for k, v in rec.items()}
        self._csv.writerow(row)


def _tree_record(g: Graph, t) -> dict:
    lw = log_tree_weight(g, t)
    return {"parents": list(t), "weight": tree_weight(g, t), "log_weight": lw if math.isfinite(lw) else None}


def cmd_sample(cfg: CliConfig, out: TextIO) -> int:
    g = Graph.load(cfg.graph_path)
    kind = cfg.resolved_kind()
    if cfg.algorithm == "colbourn":
        sampler = ColbournSampler(g, kind)
        draw = lambda rng: (sampler.sample(rng), None)  # noqa: E731
    else:
        rooted = RootedWilson(g)
        method = {"wilson": rooted.wilson, "wilson-rc": rooted.wilson_rc, "wilson-reject": rooted.wilson_reject}
        draw = method[cfg.algorithm]
    w = Writer(out, cfg.output)
    for idx in range(cfg.k):
        t, stats = draw(spawn_rng(cfg.seed, idx))
        rec = _tree_record(g, t)
        if stats is not None:
            rec["steps"] = stats.steps_taken
        w.record(rec)
    return EXIT_OK


def cmd_swor(cfg: CliConfig, out: TextIO) -> int:
    g = Graph.load(cfg.graph_path)
    sampler = SworSampler(g, cfg.resolved_kind())
    rng = make_rng(cfg.seed)
    w = Writer(out, cfg.output)
    returned = 0
    exhausted = False
    for _ in range(cfg.k):
        try:
            t, p = sampler.draw(rng)
        except SupportExhausted:
            exhausted = True
            break
        returned += 1
        w.record({**_tree_record(g, t), "conditional_probability": p})
    if exhausted:
        summary = {"summary": "exhausted", "requested": cfg.k, "returned": returned}
        if cfg.output == "jsonl":
            out.write(json.dumps(summary) + "\n")
        else:
            print(f"# exhausted: requested {cfg.k}, returned {returned}", file=out)
    return EXIT_OK


def _check_cap(cfg: CliConfig) -> None:
    if cfg.enum_cap > ENUM_CAP:
        print(f"warning: enumeration cap raised to {cfg.enum_cap}; runtime grows like n^n", file=sys.stderr)


def cmd_enumerate(cfg: CliConfig, out: TextIO) -> int:
    _check_cap(cfg)
    g = Graph.load(cfg.graph_path)
    dist = exact_distribution(g, cfg.resolved_kind(), cfg.enum_cap)
    w = Writer(out, cfg.output)
    for e in dist.entries.values():
        w.record({"parents": list(e.tree), "weight": e.weight, "probability": e.probability})
    return EXIT_OK


def cmd_marginals(cfg: CliConfig, out: TextIO) -> int:
    g = Graph.load(cfg.graph_path)
    kind = cfg.resolved_kind()
    m = mtt_marginals(g, kind)
    if cfg.output == "csv":
        wr = csv.writer(out, lineterminator="\n")
        wr.writerow(["head"] + [f"to_{j}" for j in range(g.n + 1)])
        for i, row in enumerate(m):
            wr.writerow([i] + [_fmt(x) for x in row])
    else:
        for i, row in enumerate(m):
            out.write(json.dumps({"head": i, "marginals": row.tolist()}) + "\n")
    return EXIT_OK


def cmd_partition(cfg: CliConfig, out: TextIO) -> int:
    _check_cap(cfg)
    g = Graph.load(cfg.graph_path)
    kind = cfg.resolved_kind()
    rec = {"kind": kind.value, "z_mtt": partition_function(g, kind)}
    if g.n <= cfg.enum_cap:
        try:
            rec["z_oracle"] = exact_distribution(g, kind, cfg.enum_cap).z
        except DomainError:
            rec["z_oracle"] = 0.0
    Writer(out, cfg.output).record(rec)
    return EXIT_OK


def cmd_bench(cfg: CliConfig, out: TextIO) -> int:
    bc = BenchConfig(
        sizes=cfg.sizes,
        algorithms=cfg.bench_algorithms,
        graphs_per_size=cfg.graphs_per_size,
        samples_per_graph=cfg.samples_per_size,
        weight_distribution=cfg.weight_distribution,
        seed=cfg.seed,
    )
    rows = time_sizes(bc)
    w = Writer(out, cfg.output)
    for r in rows:
        w.record({"n": r.n, "algorithm": r.algorithm, "mean_seconds": r.mean_seconds, "std_seconds": r.std_seconds})
    for name, s in slopes(rows).items():
        w.record({"n": "slope", "algorithm": name, "mean_seconds": s, "std_seconds": ""})
    return EXIT_OK


def cmd_selftest(ns: argparse.Namespace, out: TextIO) -> int:
    results = run_selftest(cfg=SelftestConfig(seed=ns.seed, samples=ns.samples))
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}", file=out)
        for line in r.lines:
            print(f"    {line}", file=out)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"selftest failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_SELFTEST
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "swor": cmd_swor,
    "enumerate": cmd_enumerate,
    "marginals": cmd_marginals,
    "partition": cmd_partition,
    "bench": cmd_bench,
}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if ns.command == "selftest":
            return cmd_selftest(ns, out)
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg, out)
    except UsageError as exc:
        print(f"treesampler: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GraphError as exc:
        print(f"invalid graph: {exc}", file=sys.stderr)
        return EXIT_GRAPH
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
