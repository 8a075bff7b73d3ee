"""Check that structure assignments commute on many random graphs.

For each assignment h ↦ μ in a link l out of S, S/h ; l must equal μ, by
both the rewriting and the extensional morphism equality.

usage: python3 scripts/strass_sweep.py [--graphs N] [--seed K]
"""

import argparse
import time

from mmt.ast import Link, comp, show
from mmt.check import morphisms_equal, morphisms_equal_extensional
from mmt.elaborate import Elaborator
from mmt.foundations import OPENMATH
from mmt.randomgraph import GenConfig, random_graph, strass_sites


def sweep(n: int, seed: int) -> int:
    cfg = GenConfig(require_strass=True)
    sites = failures = 0
    start = time.perf_counter()
    for k in range(seed, seed + n):
        tg = random_graph(k, cfg)
        el = Elaborator(tg)
        for l, a in strass_sites(tg):
            sites += 1
            info = el.link_info(l)
            inner = info.domain.child(*a.name)
            lhs = comp(Link(inner), Link(l))
            args = (lhs, a.morphism, el.link_info(inner).domain, info.codomain)
            rewrite = morphisms_equal(el, OPENMATH, *args)
            extensional = morphisms_equal_extensional(el, OPENMATH, *args)
            if not (rewrite and extensional):
                failures += 1
                print(f"seed {k}: {show(lhs)} vs {show(a.morphism)} (rewrite={rewrite}, extensional={extensional})")
    print(f"{n} graphs, {sites} assignments, {failures} failures, {time.perf_counter() - start:.1f}s")
    return failures


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graphs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ns = ap.parse_args()
    raise SystemExit(1 if sweep(ns.graphs, ns.seed) else 0)
