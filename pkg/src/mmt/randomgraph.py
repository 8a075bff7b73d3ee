"""Random small theory graphs for property testing.

Graphs are untyped (suitable for the OpenMath foundation) and have no
meta-theories.  Every returned graph passes ``check_graph`` under OpenMath;
candidates that do not are discarded and redrawn from the same stream.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Union

from .ast import (
    FILTERED,
    App,
    Bind,
    ConAss,
    Const,
    ConstantDecl,
    Link,
    MorphApp,
    Morphism,
    StrAss,
    StructureDecl,
    Term,
    TheoryDecl,
    TheoryGraph,
    Var,
    VarDecl,
    ViewDecl,
    comp,
)
from .check import check_graph
from .elaborate import Elaborator
from .foundations import OPENMATH
from .ids import Identifier


@dataclass(frozen=True)
class GenConfig:
    doc: str = "http://example.org/random"
    max_theories: int = 4
    max_structures: int = 3
    max_constants: int = 3
    max_views: int = 2
    p_definition: float = 0.3
    p_conass: float = 0.5
    p_strass: float = 0.7
    p_filter: float = 0.1
    p_defined_link: float = 0.1
    p_binder: float = 0.15
    p_morph_app: float = 0.15
    term_depth: int = 2
    require_strass: bool = False
    attempts: int = 500


def strass_sites(tg: TheoryGraph) -> list[tuple[Identifier, StrAss]]:
    """Every declared link together with each of its structure assignments."""
    out = []
    for mod in tg.modules:
        if isinstance(mod, TheoryDecl):
            for d in mod.body:
                if isinstance(d, StructureDecl):
                    l = mod.id.child(*d.name)
                    out.extend((l, a) for a in d.assignments if isinstance(a, StrAss))
        else:
            out.extend((mod.id, a) for a in mod.assignments if isinstance(a, StrAss))
    return out


class _Drawer:
    def __init__(self, rng: random.Random, cfg: GenConfig):
        self.rng = rng
        self.cfg = cfg
        self.mods: list = []

    def el(self, partial=None) -> Elaborator:
        return Elaborator(TheoryGraph(self.mods + ([partial] if partial is not None else [])))

    # terms ----------------------------------------------------------------

    def term(self, el: Elaborator, theory: Identifier, depth: int, bound: tuple = ()) -> Optional[Term]:
        rng, cfg = self.rng, self.cfg
        consts = [Const(theory.at(c)) for c in el.constant_names(theory)]
        atoms = consts + [Var(x) for x in bound]
        if not atoms:
            return None
        if depth <= 0 or rng.random() < 0.4:
            if depth > 0 and rng.random() < cfg.p_morph_app:
                lifted = self.lifted(el, theory)
                if lifted is not None:
                    return lifted
            return rng.choice(atoms)
        if consts and rng.random() < cfg.p_binder:
            x = f"x{len(bound)}"
            scope = self.term(el, theory, depth - 1, bound + (x,))
            return Bind(rng.choice(consts), (VarDecl(x),), scope)
        head = rng.choice(atoms)
        args = tuple(self.term(el, theory, depth - 1, bound) for _ in range(rng.randint(1, 2)))
        return App(head, args)

    def lifted(self, el: Elaborator, theory: Identifier) -> Optional[Term]:
        """A constant of another theory moved into ``theory`` along a link."""
        options = []
        for l in el.all_links():
            info = el.link_info(l)
            if info.codomain == theory:
                options.extend((c, l, info.domain) for c in el.constant_names(info.domain))
        if not options:
            return None
        c, l, dom = self.rng.choice(options)
        return MorphApp(Const(dom.at(c)), Link(l))

    # morphisms --------------------------------------------------------------

    def morphisms(self, el: Elaborator, source: Identifier, target: Identifier, exclude=()) -> list[Morphism]:
        links = {}
        for l in el.all_links():
            if any(l.doc == x.doc and l.module[: len(x.module)] == x.module for x in exclude):
                continue
            info = el.link_info(l)
            links[l] = (info.domain, info.codomain)
        out: list[Morphism] = [Link(l) for l, (s, t) in links.items() if s == source and t == target]
        for l1, (s1, t1) in links.items():
            if s1 != source:
                continue
            for l2, (s2, t2) in links.items():
                if s2 == t1 and t2 == target:
                    out.append(comp(Link(l1), Link(l2)))
        return out

    def assignments(self, el: Elaborator, domain: Identifier, target: Identifier, in_view: bool,
                    exclude=(), term_el: Optional[Elaborator] = None) -> tuple:
        rng, cfg = self.rng, self.cfg
        term_el = term_el or el
        out = []
        covered: list[tuple] = []
        for h in el.structure_names(domain):
            if any(h[: len(p)] == p for p in covered):
                continue
            sub = el.link_info(domain.child(*h))
            cands = self.morphisms(el, sub.domain, target, exclude)
            if cands and rng.random() < cfg.p_strass:
                out.append(StrAss(h, rng.choice(cands)))
                covered.append(h)
        for c in el.constant_names(domain):
            if any(c[: len(p)] == p for p in covered):
                continue
            if el.constant(domain, c)[1] is not None:
                continue
            if not in_view and rng.random() >= cfg.p_conass:
                continue
            if in_view and rng.random() < cfg.p_filter:
                out.append(ConAss(c, FILTERED))
                continue
            t = self.term(term_el, target, cfg.term_depth)
            if t is not None:
                out.append(ConAss(c, t))
            elif in_view:
                out.append(ConAss(c, FILTERED))
        rng.shuffle(out)
        return tuple(out)

    # modules ----------------------------------------------------------------

    def theory(self, i: int, structures: int) -> TheoryDecl:
        rng, cfg = self.rng, self.cfg
        tid = Identifier(cfg.doc, (f"T{i}",))
        plan = ["c"] * rng.randint(1, cfg.max_constants) + ["s"] * structures
        rng.shuffle(plan)
        th = TheoryDecl(tid, None, ())
        n_const = n_struct = 0
        for step in plan:
            el = self.el(th)
            if step == "c":
                df = self.term(el, tid, cfg.term_depth) if rng.random() < cfg.p_definition else None
                decl = ConstantDecl(f"c{n_const}", None, df)
                n_const += 1
            else:
                dom = rng.choice([m.id for m in self.mods if isinstance(m, TheoryDecl)])
                name = f"s{n_struct}"
                n_struct += 1
                cands = self.morphisms(el, dom, tid)
                if cands and rng.random() < cfg.p_defined_link:
                    decl = StructureDecl(name, dom, None, (), rng.choice(cands))
                else:
                    decl = StructureDecl(name, dom, None, ())
                    with_decl = TheoryDecl(tid, None, th.body + (decl,))
                    asg = self.assignments(self.el(with_decl), dom, tid, False, {tid.child(name)}, el)
                    decl = StructureDecl(name, dom, None, asg)
            th = TheoryDecl(tid, None, th.body + (decl,))
        return th

    def view(self, k: int) -> Optional[ViewDecl]:
        rng, cfg = self.rng, self.cfg
        theories = [m.id for m in self.mods if isinstance(m, TheoryDecl)]
        dom, cod = rng.sample(theories, 2)
        vid = Identifier(cfg.doc, (f"v{k}",))
        el = self.el()
        cands = self.morphisms(el, dom, cod)
        if cands and rng.random() < cfg.p_defined_link:
            return ViewDecl(vid, dom, cod, None, (), rng.choice(cands))
        return ViewDecl(vid, dom, cod, None, self.assignments(el, dom, cod, True))

    def graph(self) -> TheoryGraph:
        rng, cfg = self.rng, self.cfg
        n = rng.randint(2, max(2, cfg.max_theories))
        budget = rng.randint(1, cfg.max_structures)
        for i in range(n):
            s = 0 if i == 0 else rng.randint(0, budget)
            if i == n - 1 and budget and s == 0:
                s = budget
            budget -= s
            self.mods.append(self.theory(i, s))
        for k in range(rng.randint(0, cfg.max_views)):
            v = self.view(k)
            if v is not None:
                self.mods.append(v)
        return TheoryGraph(self.mods)


def random_graph(seed: Union[int, random.Random], cfg: GenConfig = GenConfig()) -> TheoryGraph:
    """A well-formed random graph, determined by ``seed``."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    for _ in range(cfg.attempts):
        tg = _Drawer(rng, cfg).graph()
        if cfg.require_strass and not strass_sites(tg):
            continue
        if not check_graph(tg, OPENMATH):
            return tg
    raise RuntimeError(f"no well-formed graph within {cfg.attempts} attempts")


__all__ = ["GenConfig", "random_graph", "strass_sites"]
