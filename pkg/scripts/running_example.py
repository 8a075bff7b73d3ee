"""Elaborate, check and flatten the algebra example and print what happens.

usage: python3 scripts/running_example.py [--xml]
"""

import argparse

from mmt import examples as ex
from mmt.ast import show
from mmt.check import check_graph
from mmt.elaborate import Elaborator
from mmt.flatten import flatten_graph, semantically_equivalent
from mmt.foundations import make_foundation
from mmt.normalize import normalize
from mmt.xmlio import write_document


def main(xml: bool = False) -> None:
    tg = ex.running_example()
    el = Elaborator(tg)
    lf = make_foundation("lf")
    print("diagnostics under LF:", check_graph(tg, lf) or "none")
    for t in el.theories():
        print(f"\n{t}")
        for c in el.constant_names(t):
            tp, df = el.constant(t, c)
            line = f"  {'/'.join(c)} : {show(normalize(el, tp)) if tp is not None else '_'}"
            if df is not None:
                line += f" = {show(normalize(el, df))}"
            print(line)
    for l in el.all_links():
        info = el.link_info(l)
        print(f"\nlink {l}: {info.domain.module[-1]} -> {info.codomain.module[-1]}")
        for c in el.constant_names(info.domain):
            print(f"  {'/'.join(c)} ↦ {show(normalize(el, el.assignment(l, c)[0]))}")
    flat = flatten_graph(tg)
    print("\nflattened graph equivalent to the original:", semantically_equivalent(flat, tg))
    if xml:
        print(write_document(ex.algebra_document()))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--xml", action="store_true", help="also print the algebra document as OMDoc")
    main(ap.parse_args().xml)
