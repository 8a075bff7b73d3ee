"""Flattening: eliminating structures while preserving the meaning of a graph.

:func:`flatten_graph` replaces every theory by the list of all its constants
(declared and induced) and every link by a view; :func:`flatten_structure`
eliminates a single structure in place.  Both results can be compared with
the input using :func:`semantically_equivalent`.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from .ast import (
    FILTERED,
    App,
    Bind,
    ConAss,
    Const,
    ConstantDecl,
    Ident,
    Link,
    MorphApp,
    Morphism,
    StrAss,
    StructureDecl,
    Term,
    TheoryDecl,
    TheoryGraph,
    VarDecl,
    ViewDecl,
    alpha_equal,
    chain,
    comp,
)
from .elaborate import Elaborator
from .errors import IllFormed, NoAssignment
from .ids import Identifier, LocalPath
from .normalize import normalize


def flatten_graph(tg: TheoryGraph, normalized: bool = True) -> TheoryGraph:
    el = Elaborator(tg)

    def norm(t: Optional[Term]) -> Optional[Term]:
        return normalize(el, t) if normalized else t

    out = []
    for mod in tg.modules:
        if isinstance(mod, TheoryDecl):
            t = mod.id
            consts = []
            for c in el.constant_names(t):
                tp, df = el.constant(t, c)
                consts.append(ConstantDecl(c, norm(tp), norm(df)))
            out.append(TheoryDecl(t, mod.meta, consts))
            names = el.structure_names(t)
            declared = [d.name for d in mod.body if isinstance(d, StructureDecl)]
            for name in declared + [n for n in names if n not in declared]:
                out.append(_flat_link(el, t.child(*name), norm))
        else:
            out.append(_flat_link(el, mod.id, norm))
    return TheoryGraph(out)


def _flat_link(el: Elaborator, l: Identifier, norm) -> ViewDecl:
    info = el.link_info(l)
    if info.is_defined:
        return ViewDecl(l, info.domain, info.codomain, definition=info.definition)
    body = [ConAss(c, norm(el.assignment(l, c)[0])) for c in el.assignment_names(l)]
    return ViewDecl(l, info.domain, info.codomain, info.meta_morphism, body)


# --- equivalence -------------------------------------------------------------------


def differences(tg1: TheoryGraph, tg2: TheoryGraph, semantic: bool = True) -> list[str]:
    """Human-readable reasons why the two graphs are not equivalent."""
    e1, e2 = Elaborator(tg1), Elaborator(tg2)
    out: list[str] = []
    th1, th2 = set(e1.theories()), set(e2.theories())
    if th1 != th2:
        out.append(f"theories differ: {sorted(map(str, th1 ^ th2))}")
    links1 = {l: e1.link_info(l) for l in e1.all_links()}
    links2 = {l: e2.link_info(l) for l in e2.all_links()}
    if set(links1) != set(links2):
        out.append(f"links differ: {sorted(map(str, set(links1) ^ set(links2)))}")
    for t in sorted(th1 & th2, key=str):
        if e1.meta_of(t) != e2.meta_of(t):
            out.append(f"meta-theory of {t} differs")
        c1, c2 = e1.constant_names(t), e2.constant_names(t)
        if set(c1) != set(c2):
            out.append(f"constants of {t} differ: {sorted(set(c1) ^ set(c2))}")
            continue
        if semantic:
            for c in c1:
                a, b = e1.constant(t, c), e2.constant(t, c)
                for what, x, y in (("type", a[0], b[0]), ("definition", a[1], b[1])):
                    if not alpha_equal(normalize(e1, x), normalize(e2, y)):
                        out.append(f"{what} of {t.at(c)} differs")
    for l in sorted(set(links1) & set(links2), key=str):
        i1, i2 = links1[l], links2[l]
        if (i1.domain, i1.codomain) != (i2.domain, i2.codomain):
            out.append(f"endpoints of {l} differ")
            continue
        if not semantic:
            continue
        for c in e1.constant_names(i1.domain):
            try:
                a = e1.assignment(l, c)[0]
                b = e2.assignment(l, c)[0]
            except NoAssignment:
                continue
            if not alpha_equal(normalize(e1, a), normalize(e2, b)):
                out.append(f"assignment of {l} to {'/'.join(c)} differs")
    return out


def structurally_equivalent(tg1: TheoryGraph, tg2: TheoryGraph) -> bool:
    return not differences(tg1, tg2, semantic=False)


def semantically_equivalent(tg1: TheoryGraph, tg2: TheoryGraph) -> bool:
    return not differences(tg1, tg2, semantic=True)


# --- eliminating a single structure ----------------------------------------------


class _Translator:
    """Rewrites declarations of a structure's domain ``S`` into its codomain ``T``."""

    def __init__(self, el: Elaborator, theory: Identifier, name: LocalPath, decl: StructureDecl):
        self.el = el
        self.theory = theory
        self.name = name
        self.source = decl.domain
        self.meta_morphism = decl.meta_morphism

    def term(self, t: Optional[Term]) -> Optional[Term]:
        if t is None:
            return None
        if isinstance(t, Const):
            home = t.id.module_id()
            if home == self.source:
                return Const(self.theory.at(self.name + t.id.symbol))
            if not self.el.is_meta_ancestor(home, self.source):
                raise IllFormed(f"{t.id} is not visible in {self.source}")
            mm = self.meta_morphism
            if mm is None or all(isinstance(a, Ident) for a in chain(mm)):
                return t
            return MorphApp(t, mm)
        if isinstance(t, App):
            return App(self.term(t.head), tuple(self.term(a) for a in t.args))
        if isinstance(t, Bind):
            ctx = tuple(VarDecl(d.name, self.term(d.type), self.term(d.definition)) for d in t.context)
            return Bind(self.term(t.binder), ctx, self.term(t.scope))
        if isinstance(t, MorphApp):
            return MorphApp(t.term, self.morphism(t.morphism))
        return t

    def morphism(self, m: Morphism) -> Morphism:
        atoms = chain(m)
        last = atoms[-1]
        if isinstance(last, Ident) and last.theory == self.source:
            if len(atoms) == 1:
                raise IllFormed(f"identity of {self.source} cannot be translated")
            return self.morphism(comp(*atoms[:-1]))
        if isinstance(last, Link):
            info = self.el.link_info(last.link)
            if info.codomain == self.source:
                if info.kind != "structure":
                    raise IllFormed(f"cannot translate view {last.link} into {self.source}")
                rest = last.link.module[len(self.source.module):]
                return comp(*atoms[:-1], Link(self.theory.child(*self.name, *rest)))
        mm = self.meta_morphism
        if mm is None:
            raise IllFormed(f"{m} leaves {self.source} without a meta-morphism")
        if all(isinstance(a, Ident) for a in chain(mm)):
            return m
        return comp(m, mm)

    def assignment(self, a):
        if isinstance(a, ConAss):
            return ConAss(a.name, self.term(a.term))
        return StrAss(a.name, self.morphism(a.morphism))


def _names_overlap(a: LocalPath, b: LocalPath) -> bool:
    n = min(len(a), len(b))
    return a[:n] == b[:n]


def flatten_structure(tg: TheoryGraph, theory: Identifier, name) -> TheoryGraph:
    """Replace structure ``name`` of ``theory`` by copies of its domain's declarations.

    Structures of the domain become structures ``name/h`` of ``theory``; the
    link ``theory/name`` itself survives as a view declared right after the
    theory.  Terms are translated but not normalized.
    """
    name = tuple(name.split("/")) if isinstance(name, str) else tuple(name)
    el = Elaborator(tg)
    th = el.theory(theory)
    pos = next(
        (k for k, d in enumerate(th.body) if isinstance(d, StructureDecl) and d.name == name), None
    )
    if pos is None:
        raise IllFormed(f"{theory} declares no structure {'/'.join(name)}")
    decl = th.body[pos]
    if decl.definition is not None:
        raise IllFormed(f"structure {'/'.join(name)} is defined by a morphism")
    tr = _Translator(el, theory, name, decl)
    source = decl.domain
    sigma = {a.name: a for a in decl.assignments}
    link_id = theory.child(*name)

    copies: list = []
    for d in el.theory(source).body:
        if isinstance(d, ConstantDecl):
            df = tr.term(d.definition)
            a = sigma.get(d.name)
            if d.definition is None and isinstance(a, ConAss):
                df = a.term
            copies.append(ConstantDecl(name + d.name, tr.term(d.type), df))
            continue
        new_name = name + d.name
        if d.definition is not None:
            copies.append(StructureDecl(new_name, d.domain, definition=tr.morphism(d.definition)))
            continue
        a = sigma.get(d.name)
        if isinstance(a, StrAss):
            copies.append(StructureDecl(new_name, d.domain, definition=a.morphism))
            continue
        inner = [tr.assignment(x) for x in d.assignments]
        for key, x in sigma.items():
            if len(key) <= len(d.name) or key[: len(d.name)] != d.name:
                continue
            rest = key[len(d.name):]
            if any(_names_overlap(rest, y.name) for y in inner):
                continue
            if isinstance(x, ConAss) and el.constant(source, key)[1] is not None:
                continue
            inner.append(replace(x, name=rest))
        mm = None if d.meta_morphism is None else tr.morphism(d.meta_morphism)
        copies.append(StructureDecl(new_name, d.domain, mm, inner))

    # the surviving view maps every undefined constant to its copy; explicit
    # hiding of defined constants is kept
    view_body = []
    for c in el.constant_names(source):
        if el.constant(source, c)[1] is None:
            view_body.append(ConAss(c, Const(theory.at(name + c))))
        elif isinstance(sigma.get(c), ConAss) and sigma[c].term == FILTERED:
            view_body.append(ConAss(c, FILTERED))

    later = [_replace_link_uses(tr, link_id, x) for x in th.body[pos + 1:]]
    new_theory = replace(th, body=th.body[:pos] + tuple(copies) + tuple(later))
    view = ViewDecl(link_id, source, theory, decl.meta_morphism, view_body)
    mods = list(tg.modules)
    k = mods.index(th)
    mods[k:k + 1] = [new_theory, view]
    return TheoryGraph(mods)


def _replace_link_uses(tr: _Translator, link_id: Identifier, d):
    """Rewrite uses of the eliminated link inside the rest of its theory.

    The link itself is only declared after the theory, so where it is used on
    its own (as a structure's definiens or as the target of a structure
    assignment) it is spelled out as assignments ``c ↦ i/c``.
    """
    target = Link(link_id)
    el = tr.el

    def alone(m: Optional[Morphism]) -> bool:
        return m is not None and [a for a in chain(m) if not isinstance(a, Ident)] == [target]

    def spelled_out(domain: Identifier, prefix: LocalPath) -> list:
        return [
            ConAss(prefix + c, Const(tr.theory.at(tr.name + c)))
            for c in el.constant_names(tr.source)
            if el.constant(domain, prefix + c)[1] is None
        ]

    def morph(m: Optional[Morphism]) -> Optional[Morphism]:
        if m is None:
            return None
        atoms = chain(m)
        if target not in atoms:
            return m
        k = atoms.index(target)
        if k == 0:
            raise IllFormed(f"{link_id} is used on its own inside its theory")
        return morph(comp(tr.morphism(comp(*atoms[:k])), *atoms[k + 1:]))

    def term(t: Optional[Term]) -> Optional[Term]:
        if t is None:
            return None
        if isinstance(t, App):
            return App(term(t.head), tuple(term(a) for a in t.args))
        if isinstance(t, Bind):
            ctx = tuple(VarDecl(v.name, term(v.type), term(v.definition)) for v in t.context)
            return Bind(term(t.binder), ctx, term(t.scope))
        if isinstance(t, MorphApp):
            atoms = chain(t.morphism)
            if atoms[0] == target:
                inner = tr.term(t.term)
                return inner if len(atoms) == 1 else MorphApp(inner, morph(comp(*atoms[1:])))
            return MorphApp(term(t.term), morph(t.morphism))
        return t

    def asg(a, domain) -> list:
        if isinstance(a, ConAss):
            return [ConAss(a.name, term(a.term))]
        if alone(a.morphism):
            return spelled_out(domain, a.name)
        return [StrAss(a.name, morph(a.morphism))]

    if isinstance(d, ConstantDecl):
        return ConstantDecl(d.name, term(d.type), term(d.definition))
    if alone(d.definition):
        return StructureDecl(d.name, d.domain, tr.meta_morphism, spelled_out(d.domain, ()))
    body = [x for a in d.assignments for x in asg(a, d.domain)]
    return StructureDecl(d.name, d.domain, morph(d.meta_morphism), body, morph(d.definition))


def next_structure(tg: TheoryGraph) -> Optional[tuple[Identifier, LocalPath]]:
    """A structure with a body in the last theory that still has one."""
    for mod in reversed(tg.modules):
        if isinstance(mod, TheoryDecl):
            for d in mod.body:
                if isinstance(d, StructureDecl) and d.definition is None:
                    return mod.id, d.name
    return None


def flatten_all_structures(tg: TheoryGraph) -> TheoryGraph:
    """Eliminate structures one at a time until only defined ones remain.

    Later theories go first, so links induced through a structure of an
    earlier theory are still available when the later theory is flattened.
    """
    while True:
        nxt = next_structure(tg)
        if nxt is None:
            return tg
        tg = flatten_structure(tg, *nxt)
