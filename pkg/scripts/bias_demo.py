"""Show the root-child bias of the raw-weight walk on the three-node example graph.

The exact probability that node 1 hangs off the root is 2/3. Fixing the root
child in proportion to the raw root weights gives 1/2 instead; the rejection
walk and the marginal-based sampler both recover 2/3.
"""

import argparse

from treesampler.colbourn import ColbournSampler
from treesampler.fixtures import g3
from treesampler.graph import ROOT, TreeKind
from treesampler.oracle import exact_marginals
from treesampler.rng import spawn_rng
from treesampler.stats import binomial_two_sided
from treesampler.wilson import RootedWilson


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    g = g3()
    exact = exact_marginals(g, TreeKind.DEPENDENCY)[ROOT, 1]
    rooted = RootedWilson(g)
    draws = {
        "wilson-rc": lambda rng: [rooted.wilson_rc(rng)[0] for _ in range(args.samples)],
        "wilson-reject": lambda rng: [rooted.wilson_reject(rng)[0] for _ in range(args.samples)],
        "colbourn": lambda rng: ColbournSampler(g, TreeKind.DEPENDENCY).sample_batch(rng, args.samples).tolist(),
    }
    print(f"exact p(root -> 1) = {exact:.4f}")
    for k, (name, draw) in enumerate(draws.items()):
        trees = draw(spawn_rng(args.seed, k))
        hits = sum(t[0] == ROOT for t in trees)
        p = binomial_two_sided(hits, len(trees), exact)
        print(f"{name:<14} {hits / len(trees):.4f}   p-value vs exact {p:.3g}")


if __name__ == "__main__":
    main()
