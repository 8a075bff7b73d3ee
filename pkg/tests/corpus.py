"""Seeded random graphs and terms shared by the property suites."""

from __future__ import annotations

import random
from functools import lru_cache

from mmt import examples as ex
from mmt.ast import App, Bind, Const, Link, MorphApp, TheoryGraph, Var, VarDecl, comp
from mmt.elaborate import Elaborator
from mmt.normalize import normalize
from mmt.randomgraph import GenConfig, random_graph

CORPUS_SIZE = 500
LAMBDA = ex.c(ex.LF, "lambda")
IOTA, O = ex.IOTA, ex.O


@lru_cache(maxsize=None)
def graphs(n: int = 100, require_strass: bool = False, offset: int = 0) -> tuple[TheoryGraph, ...]:
    cfg = GenConfig(require_strass=require_strass)
    return tuple(random_graph(offset + seed, cfg) for seed in range(n))


def term(rng: random.Random, el: Elaborator, theory, depth: int = 3, bound: tuple = ()):
    """A structurally well-formed term over ``theory``, possibly with morphism applications."""
    consts = [Const(theory.at(c)) for c in el.constant_names(theory)]
    atoms = consts + [Var(x) for x in bound]
    roll = rng.random()
    if depth <= 0 or roll < 0.3:
        return rng.choice(atoms)
    if roll < 0.45:
        into = [l for l in el.all_links() if el.link_info(l).codomain == theory]
        if into:
            l = rng.choice(into)
            dom = el.link_info(l).domain
            return MorphApp(term(rng, el, dom, depth - 1), Link(l))
    if roll < 0.6:
        x = f"v{len(bound)}"
        return Bind(rng.choice(consts), (VarDecl(x),), term(rng, el, theory, depth - 1, bound + (x,)))
    head = rng.choice(atoms)
    return App(head, tuple(term(rng, el, theory, depth - 1, bound) for _ in range(rng.randint(1, 3))))


def links_by_ends(el: Elaborator):
    out = {}
    for l in el.all_links():
        info = el.link_info(l)
        out.setdefault((info.domain, info.codomain), []).append(l)
    return out


def composable_pairs(el: Elaborator):
    ends = {l: (el.link_info(l).domain, el.link_info(l).codomain) for l in el.all_links()}
    return [
        (l1, l2) for l1, (_, b) in ends.items() for l2, (c, _) in ends.items() if b == c
    ]


def chain_of(*links):
    return comp(*(Link(l) for l in links))


# --- term corpora for the foundation laws -------------------------------------------


def ring_operations():
    """Terms over Ring of each LF type, including ones reached through links."""
    r = ex.RING
    return {
        "i": [ex.c(r, "add/mon/unit"), ex.c(r, "mult/unit"),
              MorphApp(ex.c(ex.MONOID, "unit"), Link(ex.RING_MULT)),
              MorphApp(ex.c(ex.MONOID, "unit"), comp(Link(ex.CGROUP_MON), Link(ex.RING_ADD)))],
        "ii": [ex.c(r, "add/inv"), MorphApp(ex.c(ex.CGROUP, "inv"), Link(ex.RING_ADD))],
        "iii": [ex.c(r, "add/mon/comp"), ex.c(r, "mult/comp"),
                MorphApp(ex.c(ex.MONOID, "comp"), Link(ex.RING_ADD_MON)),
                MorphApp(ex.c(ex.CGROUP, "mon/comp"), Link(ex.RING_ADD))],
    }


def lf_term(rng: random.Random, kind: str, depth: int, scope: tuple = ()):
    """A well-typed LF term over Ring of type ι ("i") or o ("o")."""
    ops = ring_operations()
    if kind == "o":
        if depth > 0 and rng.random() < 0.3:
            x = f"x{len(scope)}"
            body = lf_term(rng, "o", depth - 1, scope + (x,))
            return App(ex.c(ex.FOL, "forall"), (Bind(LAMBDA, (VarDecl(x, IOTA),), body),))
        return App(ex.c(ex.FOL, "equal"), (lf_term(rng, "i", depth - 1, scope), lf_term(rng, "i", depth - 1, scope)))
    if depth <= 0 or rng.random() < 0.25:
        return rng.choice(ops["i"] + [Var(x) for x in scope])
    roll = rng.random()
    if roll < 0.2:
        x = f"x{len(scope)}"
        fun = Bind(LAMBDA, (VarDecl(x, IOTA),), lf_term(rng, "i", depth - 1, scope + (x,)))
        return App(fun, (lf_term(rng, "i", depth - 1, scope),))
    if roll < 0.5:
        return App(rng.choice(ops["ii"]), (lf_term(rng, "i", depth - 1, scope),))
    args = (lf_term(rng, "i", depth - 1, scope), lf_term(rng, "i", depth - 1, scope))
    if rng.random() < 0.3:
        return App(App(rng.choice(ops["iii"]), args[:1]), args[1:])
    return App(rng.choice(ops["iii"]), args)


@lru_cache(maxsize=None)
def lf_corpus():
    """(el, theory, term, type) with the intended type of each term."""
    el = Elaborator(ex.running_example())
    rng = random.Random(12)
    out = []
    for _ in range(CORPUS_SIZE):
        kind = rng.choice("io")
        tp = IOTA if kind == "i" else O
        out.append((el, ex.RING, lf_term(rng, kind, rng.randint(0, 4)), tp))
    return tuple(out)


@lru_cache(maxsize=None)
def untyped_corpus():
    """(el, theory, term, None) over the random graphs."""
    rng = random.Random(21)
    out = []
    els = [Elaborator(g) for g in graphs(50)]
    while len(out) < CORPUS_SIZE:
        el = rng.choice(els)
        theories = [t for t in el.theories() if el.constant_names(t)]
        t = rng.choice(theories)
        out.append((el, t, term(rng, el, t, rng.randint(0, 3)), None))
    return tuple(out)


def equal_pairs(name, foundation, terms):
    """Pairs of terms the foundation should identify: each term with its
    normal form, and for LF also with its beta normal form."""
    for el, t, w, tp in terms:
        yield el, t, w, normalize(el, w)
        if name == "lf":
            yield el, t, w, foundation.nf(foundation.canon(normalize(el, w)))


def contexts(name, rng, el, theory):
    """One-hole contexts over ``theory`` as functions of the hole."""
    if name == "lf":
        f = rng.choice(ring_operations()["ii"])
        g = rng.choice(ring_operations()["iii"])
        u = rng.choice(ring_operations()["i"])
        return [
            lambda h: App(f, (h,)),
            lambda h: App(g, (u, h)),
            lambda h: App(Bind(LAMBDA, (VarDecl("y", IOTA),), App(g, (Var("y"), Var("y")))), (h,)),
        ]
    consts = [Const(theory.at(c)) for c in el.constant_names(theory)]
    head = rng.choice(consts)
    return [
        lambda h: App(head, (h,)),
        lambda h: App(head, (head, h)),
        lambda h: Bind(head, (VarDecl("y"),), App(head, (h, Var("y")))),
    ]
