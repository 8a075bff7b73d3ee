"""Well-formedness checking of theory graphs.

The graph is replayed declaration by declaration: every module, symbol and
assignment is checked against the graph built so far and then added to it.
Typing and equality of terms are delegated to a :class:`Foundation`.
Problems are reported as :class:`Diagnostic` values; checking never stops
at the first error.
"""

from __future__ import annotations

import enum
import graphlib
from collections import deque
from dataclasses import dataclass, replace
from typing import Optional, Union

from .ast import (
    FILTERED,
    App,
    Bind,
    Comp,
    ConAss,
    Const,
    ConstantDecl,
    Filtered,
    Ident,
    Link,
    MorphApp,
    Morphism,
    StrAss,
    StructureDecl,
    Term,
    TheoryDecl,
    TheoryGraph,
    Var,
    ViewDecl,
    chain,
    comp,
    free_vars,
    module_dependencies,
)
from .elaborate import ElaborationErrors, Elaborator, module_clashes
from .errors import IllFormed
from .foundations import STRUCTURAL, Foundation
from .ids import Identifier
from .normalize import normalize


class Level(enum.Enum):
    XML_ONLY = "xml"
    STRUCTURAL = "structural"
    FOUNDATIONAL = "foundational"


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    at: str
    message: str
    level: str = "error"

    def render(self) -> str:
        return f"{self.level.upper()} rule={self.rule} at={self.at} msg={self.message}"

    def as_dict(self) -> dict:
        return {"level": self.level, "rule": self.rule, "at": self.at, "message": self.message}


_Failures = (IllFormed, *ElaborationErrors)


# --- morphism typing ---------------------------------------------------------


def morphism_type(el: Elaborator, m: Morphism) -> tuple[Identifier, Identifier]:
    """The principal ``(domain, codomain)`` of ``m``; raises IllFormed."""
    if isinstance(m, Ident):
        if not el.is_theory(m.theory):
            raise IllFormed(f"identity of unknown theory {m.theory}")
        return m.theory, m.theory
    if isinstance(m, Link):
        info = el.link_info(m.link)
        return info.domain, info.codomain
    if isinstance(m, Comp):
        r, s1 = morphism_type(el, m.first)
        s2, t = morphism_type(el, m.second)
        if not el.is_meta_ancestor(s1, s2):
            raise IllFormed(f"cannot compose: codomain {s1} does not fit domain {s2}")
        return r, t
    raise IllFormed(f"not a morphism: {m!r}")


def has_type(el: Elaborator, m: Morphism, source: Identifier, target: Identifier) -> bool:
    """Whether ``m : source → target``, allowing meta-theory co- and contravariance."""
    try:
        dom, cod = morphism_type(el, m)
    except _Failures:
        return False
    return el.is_meta_ancestor(source, dom) and el.is_meta_ancestor(cod, target)


def check_morphism(el: Elaborator, m: Morphism, at: str = "") -> list[Diagnostic]:
    try:
        morphism_type(el, m)
        return []
    except _Failures as exc:
        return [Diagnostic("TMcomp" if isinstance(m, Comp) else "TMmor", at, str(exc))]


# --- structural well-formedness of terms -------------------------------------


def term_diagnostics(el: Elaborator, theory: Identifier, ctx, t: Term, at: str = "") -> list[Diagnostic]:
    """Structural well-formedness of ``t`` over ``theory`` in context ``ctx``."""
    out: list[Diagnostic] = []
    _check_term(el, theory, [d.name for d in ctx], t, at or str(theory), out)
    return out


def _check_term(el, theory, scope: list, t, at, out):
    if isinstance(t, Filtered):
        return
    if isinstance(t, Var):
        if t.name not in scope:
            out.append(Diagnostic("TOvar", at, f"variable {t.name} is not in scope"))
    elif isinstance(t, Const):
        home = t.id.module_id()
        if not el.is_meta_ancestor(home, theory):
            out.append(Diagnostic("TOsym", at, f"{t.id} is not visible in {theory}"))
        elif not el.has_constant(home, t.id.symbol):
            out.append(Diagnostic("TOsym", at, f"unknown constant {t.id}"))
    elif isinstance(t, App):
        _check_term(el, theory, scope, t.head, at, out)
        for a in t.args:
            _check_term(el, theory, scope, a, at, out)
    elif isinstance(t, Bind):
        _check_term(el, theory, scope, t.binder, at, out)
        inner = list(scope)
        for d in t.context:
            for part in (d.type, d.definition):
                if part is not None:
                    _check_term(el, theory, inner, part, at, out)
            inner.append(d.name)
        _check_term(el, theory, inner, t.scope, at, out)
    elif isinstance(t, MorphApp):
        if free_vars(t.term):
            out.append(Diagnostic("TOmor", at, "morphism applied to an open term"))
            return
        try:
            dom, cod = morphism_type(el, t.morphism)
        except _Failures as exc:
            out.append(Diagnostic("TOmor", at, str(exc)))
            return
        if not el.is_meta_ancestor(cod, theory):
            out.append(Diagnostic("TOmor", at, f"morphism into {cod} used in {theory}"))
            return
        _check_term(el, dom, [], t.term, at, out)
    else:
        out.append(Diagnostic("TOsym", at, f"not a term: {t!r}"))


# --- morphism equality and totality ------------------------------------------


def _rewrite_steps(el: Elaborator, atoms: tuple) -> list[tuple]:
    """One-step rewrites of a link chain: unfold defined links, apply
    structure assignments ``S/h ; l = μ`` and drop identities."""
    out = []
    for k, a in enumerate(atoms):
        if isinstance(a, Ident) and len(atoms) > 1:
            out.append(atoms[:k] + atoms[k + 1:])
        if not isinstance(a, Link):
            continue
        try:
            info = el.link_info(a.link)
        except _Failures:
            continue
        if info.is_defined:
            out.append(atoms[:k] + chain(info.definition) + atoms[k + 1:])
        elif k > 0 and isinstance(atoms[k - 1], Link):
            prev = atoms[k - 1].link
            s = info.domain
            if prev.doc == s.doc and prev.module[: len(s.module)] == s.module:
                h = prev.module[len(s.module):]
                for asg in info.assignments:
                    if isinstance(asg, StrAss) and asg.name == h:
                        out.append(atoms[: k - 1] + chain(asg.morphism) + atoms[k + 1:])
    return out


def _reachable(el: Elaborator, m: Morphism, limit: int) -> set:
    start = chain(m)
    seen = {start}
    todo = deque([start])
    while todo and len(seen) < limit:
        for nxt in _rewrite_steps(el, todo.popleft()):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def morphisms_equal(
    el: Elaborator,
    f: Foundation,
    m1: Morphism,
    m2: Morphism,
    source: Identifier,
    target: Identifier,
    rewrite_limit: int = 64,
) -> bool:
    """Whether ``m1`` and ``m2`` agree as morphisms ``source → target``.

    Tries syntactic identity, then the equational theory of defined links
    and structure assignments, and finally compares the images of the local
    constants of ``source`` (recursing into its structures and meta-theory).
    """
    if chain(m1) == chain(m2):
        return True
    if _reachable(el, m1, rewrite_limit) & _reachable(el, m2, rewrite_limit):
        return True
    return _equal_local(el, f, m1, m2, source, target, rewrite_limit)


def _equal_local(el, f, m1, m2, source, target, limit) -> bool:
    try:
        body, meta = el.theory_body(source)
    except _Failures:
        return False
    for d in body:
        if isinstance(d, ConstantDecl):
            if d.definition is not None:
                continue
            c = Const(source.at(d.name))
            if not f.equal(el, target, (), MorphApp(c, m1), MorphApp(c, m2)):
                return False
        elif d.definition is None:
            s_i = Link(source.child(*d.name))
            if not morphisms_equal(el, f, comp(s_i, m1), comp(s_i, m2), d.domain, target, limit):
                return False
    if meta is not None:
        return morphisms_equal(el, f, m1, m2, meta, target, limit)
    return True


def morphisms_equal_extensional(
    el: Elaborator, f: Foundation, m1: Morphism, m2: Morphism, source: Identifier, target: Identifier
) -> bool:
    """Compare the images of every undefined constant of ``source`` and its meta-theories."""
    for theory in el.meta_chain(source):
        for name in el.constant_names(theory):
            if el.constant(theory, name)[1] is not None:
                continue
            c = Const(theory.at(name))
            if not f.equal(el, target, (), MorphApp(c, m1), MorphApp(c, m2)):
                return False
    return True


def is_total(el: Elaborator, m: Morphism) -> bool:
    """No constant of the domain (or its meta-theories) is mapped to the hidden term."""
    dom, _ = morphism_type(el, m)
    for theory in el.meta_chain(dom):
        for name in el.constant_names(theory):
            if normalize(el, MorphApp(Const(theory.at(name)), m)) == FILTERED:
                return False
    return True


# --- graph checking ------------------------------------------------------------


class Checker:
    """Incremental checker: modules are checked and added one at a time."""

    def __init__(self, foundation: Foundation = STRUCTURAL):
        self.foundation = foundation
        self.modules: list = []
        self._el: Optional[Elaborator] = None
        self.diagnostics: list[Diagnostic] = []

    @property
    def graph(self) -> TheoryGraph:
        return TheoryGraph(self.modules)

    @property
    def el(self) -> Elaborator:
        if self._el is None:
            self._el = Elaborator(self.graph)
        return self._el

    def _set_last(self, mod) -> None:
        self.modules[-1] = mod
        self._el = None

    def _push(self, mod) -> None:
        self.modules.append(mod)
        self._el = None

    def _report(self, out: list, rule: str, at, message: str) -> None:
        out.append(Diagnostic(rule, str(at), message))

    def add_module(self, mod) -> list[Diagnostic]:
        out: list[Diagnostic] = []
        for c in module_clashes(self.modules, mod):
            self._report(out, "clash", c.second, f"{c.message} ({c.first})")
        if isinstance(mod, TheoryDecl):
            self._add_theory(mod, out)
        else:
            self._add_view(mod, out)
        self.diagnostics.extend(out)
        return out

    # theories ---------------------------------------------------------------

    def _add_theory(self, th: TheoryDecl, out: list) -> None:
        if th.meta is not None and not self.el.is_theory(th.meta):
            self._report(out, "TGemptytheory", th.id, f"unknown meta-theory {th.meta}")
        self._push(TheoryDecl(th.id, th.meta, ()))
        for d in th.body:
            if isinstance(d, ConstantDecl):
                self._check_constant(th.id, d, out)
                self._append_symbol(d)
            else:
                self._add_structure(th.id, d, out)

    def _append_symbol(self, d) -> None:
        cur = self.modules[-1]
        self._set_last(replace(cur, body=cur.body + (d,)))

    def _check_constant(self, t: Identifier, d: ConstantDecl, out: list) -> None:
        at = t.at(d.name)
        el = self.el
        ok = True
        for part in (d.type, d.definition):
            if part is not None:
                diags = term_diagnostics(el, t, (), part, str(at))
                out.extend(diags)
                ok = ok and not diags
        if ok and not self._typed(t, d.definition, d.type):
            self._report(out, "TGsymbol", at, "definition does not have the declared type" if d.definition is not None
                         else "type is not well-formed")

    def _typed(self, t, term, tp) -> bool:
        try:
            return self.foundation.typed(self.el, t, (), term, tp)
        except _Failures:
            return False

    def _equal(self, t, a, b) -> bool:
        try:
            return self.foundation.equal(self.el, t, (), a, b)
        except _Failures:
            return False

    def _add_structure(self, t: Identifier, d: StructureDecl, out: list) -> None:
        at = t.child(*d.name)
        el = self.el
        if d.domain == t or not el.is_theory(d.domain):
            self._report(out, "TGemptyimport", at, f"unknown or cyclic domain {d.domain}")
        elif d.definition is not None:
            if not has_type(el, d.definition, d.domain, t):
                self._report(out, "TGemptyimportmapall", at, f"definiens is not a morphism {d.domain} → {t}")
        else:
            self._check_meta_morphism(el, d.domain, t, d.meta_morphism, at, "TGemptyimport", out)
        if d.definition is not None:
            self._append_symbol(d)
            return
        self._append_symbol(replace(d, assignments=()))
        for a in d.assignments:
            self._add_assignment(at, a, out, lambda asg: self._extend_structure(d.name, asg))
        self._recheck_strass(at, d.assignments, out)

    def _extend_structure(self, name, a) -> None:
        cur = self.modules[-1]
        body = list(cur.body)
        for k, d in enumerate(body):
            if isinstance(d, StructureDecl) and d.name == name:
                body[k] = replace(d, assignments=d.assignments + (a,))
        self._set_last(replace(cur, body=tuple(body)))

    def _check_meta_morphism(self, el, source, target, mm, at, rule, out) -> None:
        try:
            meta = el.meta_of(source)
        except _Failures:
            return
        if meta is None:
            if mm is not None:
                self._report(out, rule, at, f"meta-morphism given but {source} has no meta-theory")
        elif mm is None:
            self._report(out, rule, at, f"missing meta-morphism for meta-theory {meta}")
        elif not has_type(el, mm, meta, target):
            self._report(out, rule, at, f"meta-morphism is not a morphism {meta} → {target}")

    # views --------------------------------------------------------------------

    def _add_view(self, v: ViewDecl, out: list) -> None:
        el = self.el
        ok = True
        for end in (v.domain, v.codomain):
            if not el.is_theory(end):
                self._report(out, "TGemptyview", v.id, f"unknown theory {end}")
                ok = False
        if ok and v.definition is not None:
            if not has_type(el, v.definition, v.domain, v.codomain):
                self._report(out, "TGemptyviewmapall", v.id, f"definiens is not a morphism {v.domain} → {v.codomain}")
        elif ok:
            self._check_meta_morphism(el, v.domain, v.codomain, v.meta_morphism, v.id, "TGemptyview", out)
        if v.definition is not None:
            self._push(v)
            return
        self._push(replace(v, assignments=()))
        for a in v.assignments:
            self._add_assignment(v.id, a, out, self._extend_view)
        self._recheck_strass(v.id, v.assignments, out)

    def _extend_view(self, a) -> None:
        cur = self.modules[-1]
        self._set_last(replace(cur, assignments=cur.assignments + (a,)))

    # assignments ----------------------------------------------------------------

    def _add_assignment(self, l: Identifier, a, out: list, extend) -> None:
        try:
            info = self.el.link_info(l)
        except _Failures as exc:
            self._report(out, "TGinstsymb", l, str(exc))
            extend(a)
            return
        if isinstance(a, ConAss):
            self._check_conass(l, info, a, out)
            extend(a)
        else:
            extend(a)
            self._check_strass(l, info, a, out)

    def _check_conass(self, l, info, a: ConAss, out) -> None:
        at = f"{l}?{'/'.join(a.name)}"
        el = self.el
        try:
            tp, df = el.constant(info.domain, a.name)
        except _Failures:
            self._report(out, "TGinstsymb", at, f"{info.domain} has no constant {'/'.join(a.name)}")
            return
        if df is not None:
            if a.term != FILTERED:
                self._report(out, "TGhidesymb", at, "defined constants may only be hidden")
            return
        diags = term_diagnostics(el, info.codomain, (), a.term, at)
        out.extend(diags)
        if diags or a.term == FILTERED:
            return
        expected = None if tp is None else MorphApp(tp, Link(l))
        if not self._typed(info.codomain, a.term, expected):
            self._report(out, "TGinstsymb", at, "assigned term does not have the translated type")

    def _recheck_strass(self, l: Identifier, assignments, out: list) -> None:
        # later assignments of the same link may change the translation of
        # definitions an earlier structure assignment was checked against
        if not any(isinstance(a, StrAss) for a in assignments) or out:
            return
        info = self.el.link_info(l)
        for a in assignments:
            if isinstance(a, StrAss):
                late: list[Diagnostic] = []
                self._check_strass(l, info, a, late)
                out.extend(replace(d, message=d.message + " once the link is complete") for d in late)

    def _check_strass(self, l, info, a: StrAss, out) -> None:
        # checked against the link extended by this assignment, so that the
        # constants it covers are translated by it
        at = f"{l}?{'/'.join(a.name)}"
        el = self.el
        s, t = info.domain, info.codomain
        sh = Identifier(s.doc, s.module + a.name)
        try:
            sub = el.link_info(sh)
            if sub.codomain != s:
                raise IllFormed(f"{sh} is not a structure of {s}")
        except _Failures as exc:
            self._report(out, "TGinstimp", at, str(exc))
            return
        r = sub.domain
        if not has_type(el, a.morphism, r, t):
            self._report(out, "TGinstimp", at, f"assigned morphism is not a morphism {r} → {t}")
            return
        meta = el.meta_of(r)
        if meta is not None:
            via = sub.meta_morphism if sub.meta_morphism is not None else Link(sh)
            if not morphisms_equal(el, self.foundation, a.morphism, comp(via, Link(l)), meta, t):
                self._report(out, "TGinstimp", at, "assigned morphism disagrees on the meta-theory")
        for c in el.constant_names(r):
            try:
                _, df = el.constant(s, a.name + c)
            except _Failures:
                continue
            if df is None:
                continue
            left = MorphApp(df, Link(l))
            right = MorphApp(Const(r.at(c)), a.morphism)
            if not self._equal(t, left, right):
                self._report(out, "TGinstimp", at, f"disagrees with the definition of {'/'.join(a.name + c)}")


def dependency_cycle(tg: TheoryGraph) -> Optional[list]:
    try:
        graphlib.TopologicalSorter(module_dependencies(tg)).prepare()
    except graphlib.CycleError as exc:
        return list(exc.args[1])
    return None


def check_graph(tg: TheoryGraph, foundation: Foundation = STRUCTURAL) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    cycle = dependency_cycle(tg)
    if cycle:
        out.append(Diagnostic("acyclic", str(cycle[0]), "cyclic module dependency: " + " -> ".join(map(str, cycle))))
    checker = Checker(foundation)
    for mod in tg.modules:
        out.extend(checker.add_module(mod))
    return out


def validate(tg: TheoryGraph, level: Union[Level, str], foundation: Foundation = STRUCTURAL) -> list[Diagnostic]:
    level = Level(level) if isinstance(level, str) else level
    if level is Level.XML_ONLY:
        return []
    return check_graph(tg, STRUCTURAL if level is Level.STRUCTURAL else foundation)


__all__ = [
    "Checker",
    "Diagnostic",
    "Level",
    "check_graph",
    "check_morphism",
    "dependency_cycle",
    "has_type",
    "is_total",
    "morphism_type",
    "morphisms_equal",
    "morphisms_equal_extensional",
    "term_diagnostics",
    "validate",
]
