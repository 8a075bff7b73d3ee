"""Elaboration: looking up the (possibly induced) declarations of a theory graph.

A graph declares theories, views and structures.  Structures induce further
constants (``T?i/c``), links (``T/i``, ``T/i/h``) and assignments.  The
:class:`Elaborator` answers lookups for all of them with memoization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .ast import (
    FILTERED,
    Comp,
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
    ViewDecl,
)
from .errors import IllFormed, NoAssignment, UnknownConstant, UnknownLink, UnknownModule
from .ids import Identifier, LocalPath

# rule names reported alongside assignments
EXPLICIT = "ELass"
INDUCED = "ELindass"
VIA_DEFINITION = "ELassdeflink"
DEFAULT_STRUCTURE = "ELdefassstr"
DEFAULT_VIEW = "ELdefassview"


@dataclass(frozen=True)
class LinkInfo:
    id: Identifier
    domain: Identifier
    codomain: Identifier
    kind: str  # "view" or "structure"
    meta_morphism: Optional[Morphism] = None
    assignments: tuple = ()
    definition: Optional[Morphism] = None
    # for structures: the theory declaring it and its name there
    home: Optional[Identifier] = None
    name: LocalPath = ()
    declared: bool = True

    @property
    def is_defined(self) -> bool:
        return self.definition is not None


@dataclass(frozen=True)
class ClashReport:
    first: Identifier
    second: Identifier
    message: str


def _is_prefix(p: LocalPath, q: LocalPath) -> bool:
    return len(p) < len(q) and q[: len(p)] == p


class Elaborator:
    def __init__(self, tg: TheoryGraph):
        self.graph = tg
        self._theories: dict[Identifier, TheoryDecl] = {}
        self._views: dict[Identifier, ViewDecl] = {}
        for mod in tg.modules:
            table = self._theories if isinstance(mod, TheoryDecl) else self._views
            table.setdefault(mod.id, mod)
        self._symbols: dict[Identifier, dict[LocalPath, object]] = {}
        self._links: dict[Identifier, LinkInfo] = {}
        self._constants: dict[tuple, tuple] = {}
        self._assignments: dict[tuple, tuple] = {}
        self._assign_index: dict[Identifier, dict[LocalPath, object]] = {}
        self._constant_lists: dict[Identifier, list] = {}
        self._structure_lists: dict[Identifier, list] = {}
        self._busy: set = set()

    # --- modules -----------------------------------------------------------

    def is_theory(self, t: Identifier) -> bool:
        return t in self._theories

    def theory(self, t: Identifier) -> TheoryDecl:
        try:
            return self._theories[t]
        except KeyError:
            raise UnknownModule(f"no theory {t}") from None

    def theory_body(self, t: Identifier) -> tuple[tuple, Optional[Identifier]]:
        th = self.theory(t)
        return th.body, th.meta

    def meta_of(self, t: Identifier) -> Optional[Identifier]:
        return self.theory(t).meta

    def meta_chain(self, t: Identifier) -> list[Identifier]:
        """``t`` followed by its meta-theory, its meta-meta-theory, and so on."""
        out = [t]
        while True:
            m = self.theory(out[-1]).meta
            if m is None:
                return out
            if m in out:
                raise IllFormed(f"cyclic meta-theory chain at {m}")
            out.append(m)

    def is_meta_ancestor(self, ancestor: Identifier, t: Identifier) -> bool:
        """True iff ``ancestor`` is ``t`` or occurs in the meta chain of ``t``."""
        try:
            return ancestor in self.meta_chain(t)
        except (UnknownModule, IllFormed):
            return False

    def theories(self) -> list[Identifier]:
        return list(self._theories)

    def views(self) -> list[Identifier]:
        return list(self._views)

    def _symbol_index(self, t: Identifier) -> dict[LocalPath, object]:
        idx = self._symbols.get(t)
        if idx is None:
            idx = {}
            for d in self.theory(t).body:
                idx.setdefault(d.name, d)
            self._symbols[t] = idx
        return idx

    def _structure_prefix(self, t: Identifier, path: LocalPath) -> Optional[StructureDecl]:
        """The structure of ``t`` whose name is a proper prefix of ``path``."""
        idx = self._symbol_index(t)
        for k in range(len(path) - 1, 0, -1):
            d = idx.get(path[:k])
            if isinstance(d, StructureDecl):
                return d
        return None

    # --- links -------------------------------------------------------------

    def is_link(self, l: Identifier) -> bool:
        try:
            self.link_info(l)
            return True
        except ElaborationErrors:
            return False

    def link_info(self, l: Identifier) -> LinkInfo:
        info = self._links.get(l)
        if info is None:
            key = ("link", l)
            if key in self._busy:
                raise IllFormed(f"cyclic structure dependency at {l}")
            self._busy.add(key)
            try:
                info = self._link_info(l)
            finally:
                self._busy.discard(key)
            self._links[l] = info
        return info

    def _link_info(self, l: Identifier) -> LinkInfo:
        view = self._views.get(l)
        if view is not None:
            return LinkInfo(
                l, view.domain, view.codomain, "view", view.meta_morphism,
                view.assignments, view.definition,
            )
        for k in range(len(l.module) - 1, 0, -1):
            home = Identifier(l.doc, l.module[:k])
            if home not in self._theories:
                continue
            rest = l.module[k:]
            d = self._symbol_index(home).get(rest)
            if isinstance(d, StructureDecl):
                return LinkInfo(
                    l, d.domain, home, "structure", d.meta_morphism,
                    d.assignments, d.definition, home, rest,
                )
            s = self._structure_prefix(home, rest)
            if s is not None:
                outer = Identifier(l.doc, home.module + s.name)
                inner = Identifier(s.domain.doc, s.domain.module + rest[len(s.name):])
                sub = self.link_info(inner)
                return LinkInfo(
                    l, sub.domain, home, "structure", None, (),
                    Comp(Link(inner), Link(outer)), home, rest, declared=False,
                )
        raise UnknownLink(f"no link {l}")

    def structure_names(self, t: Identifier) -> list[LocalPath]:
        """Names of all structures of ``t``, declared and induced, in order."""
        out = self._structure_lists.get(t)
        if out is None:
            key = ("structures", t)
            if key in self._busy:
                raise IllFormed(f"cyclic structure dependency at {t}")
            self._busy.add(key)
            try:
                out = []
                for d in self.theory(t).body:
                    if isinstance(d, StructureDecl):
                        out.append(d.name)
                        out.extend(d.name + h for h in self.structure_names(d.domain))
            finally:
                self._busy.discard(key)
            self._structure_lists[t] = out
        return out

    def all_links(self) -> list[Identifier]:
        out = []
        for t in self._theories:
            out.extend(Identifier(t.doc, t.module + n) for n in self.structure_names(t))
        out.extend(self._views)
        return out

    # --- constants ---------------------------------------------------------

    def constant(self, t: Identifier, c: LocalPath) -> tuple[Optional[Term], Optional[Term]]:
        """The ``(type, definition)`` of constant ``c`` in theory ``t``."""
        c = tuple(c)
        key = (t, c)
        hit = self._constants.get(key)
        if hit is None:
            if key in self._busy:
                raise IllFormed(f"cyclic elaboration of {t.at(c)}")
            self._busy.add(key)
            try:
                hit = self._constant(t, c)
            finally:
                self._busy.discard(key)
            self._constants[key] = hit
        return hit

    def _constant(self, t: Identifier, c: LocalPath):
        d = self._symbol_index(t).get(c)
        if isinstance(d, ConstantDecl):
            return d.type, d.definition
        s = self._structure_prefix(t, c)
        if s is None:
            raise UnknownConstant(f"no constant {t.at(c)}")
        link = Link(Identifier(t.doc, t.module + s.name))
        inner = c[len(s.name):]
        tp, df = self.constant(s.domain, inner)
        new_tp = None if tp is None else MorphApp(tp, link)
        if df is not None:
            return new_tp, MorphApp(df, link)
        ass, rule = self.assignment(link.link, inner)
        return new_tp, (None if rule == DEFAULT_STRUCTURE else ass)

    def has_constant(self, t: Identifier, c: LocalPath) -> bool:
        try:
            self.constant(t, c)
            return True
        except ElaborationErrors:
            return False

    def lookup(self, ident: Identifier) -> tuple[Optional[Term], Optional[Term]]:
        return self.constant(ident.module_id(), ident.symbol)

    def constant_names(self, t: Identifier) -> list[LocalPath]:
        """Names of all constants of ``t``, declared and induced, in order."""
        out = self._constant_lists.get(t)
        if out is None:
            key = ("constants", t)
            if key in self._busy:
                raise IllFormed(f"cyclic structure dependency at {t}")
            self._busy.add(key)
            try:
                out = []
                for d in self.theory(t).body:
                    if isinstance(d, ConstantDecl):
                        out.append(d.name)
                    else:
                        out.extend(d.name + c for c in self.constant_names(d.domain))
            finally:
                self._busy.discard(key)
            self._constant_lists[t] = out
        return out

    def undefined_constants(self, t: Identifier) -> list[LocalPath]:
        return [c for c in self.constant_names(t) if self.constant(t, c)[1] is None]

    # --- assignments -------------------------------------------------------

    def _assignment_index(self, l: Identifier, info: LinkInfo) -> dict[LocalPath, object]:
        idx = self._assign_index.get(l)
        if idx is None:
            idx = {}
            for a in info.assignments:
                idx.setdefault(a.name, a)
            self._assign_index[l] = idx
        return idx

    def assignment(self, l: Identifier, c: LocalPath) -> tuple[Term, str]:
        """The term assigned by link ``l`` to domain constant ``c``, with the rule used."""
        c = tuple(c)
        key = (l, c)
        hit = self._assignments.get(key)
        if hit is None:
            if key in self._busy:
                raise IllFormed(f"cyclic elaboration of assignment {l}?{'/'.join(c)}")
            self._busy.add(key)
            try:
                hit = self._assignment(l, c)
            finally:
                self._busy.discard(key)
            self._assignments[key] = hit
        return hit

    def _assignment(self, l: Identifier, c: LocalPath) -> tuple[Term, str]:
        info = self.link_info(l)
        s = info.domain
        if info.is_defined:
            if self.constant(s, c)[1] is not None:
                raise NoAssignment(f"{s.at(c)} is defined")
            return MorphApp(Const(s.at(c)), info.definition), VIA_DEFINITION
        idx = self._assignment_index(l, info)
        a = idx.get(c)
        if isinstance(a, ConAss):
            return a.term, EXPLICIT
        defined = self.constant(s, c)[1] is not None
        for k in range(len(c) - 1, 0, -1):
            a = idx.get(c[:k])
            if isinstance(a, StrAss):
                if defined:
                    break
                sub = self.link_info(Identifier(s.doc, s.module + a.name))
                return MorphApp(Const(sub.domain.at(c[k:])), a.morphism), INDUCED
        if defined:
            raise NoAssignment(f"{l} assigns nothing to defined constant {s.at(c)}")
        if info.kind == "structure":
            return Const(info.home.at(info.name + c)), DEFAULT_STRUCTURE
        return FILTERED, DEFAULT_VIEW

    def assignment_names(self, l: Identifier) -> list[LocalPath]:
        """Domain constants for which ``l`` provides an assignment."""
        info = self.link_info(l)
        out = []
        for c in self.constant_names(info.domain):
            try:
                self.assignment(l, c)
            except NoAssignment:
                continue
            out.append(c)
        return out

    def iter_declared_links(self) -> Iterator[LinkInfo]:
        for t, th in self._theories.items():
            for d in th.body:
                if isinstance(d, StructureDecl):
                    yield self.link_info(Identifier(t.doc, t.module + d.name))
        for v in self._views:
            yield self.link_info(v)


ElaborationErrors = (UnknownModule, UnknownLink, UnknownConstant, IllFormed)


def theory_body(tg: TheoryGraph, t: Identifier):
    return Elaborator(tg).theory_body(t)


def link_info(tg: TheoryGraph, l: Identifier) -> LinkInfo:
    return Elaborator(tg).link_info(l)


def constant(tg: TheoryGraph, t: Identifier, c: LocalPath):
    return Elaborator(tg).constant(t, c)


def assignment(tg: TheoryGraph, l: Identifier, c: LocalPath) -> Term:
    return Elaborator(tg).assignment(l, c)[0]


def _names_clash(a: LocalPath, b: LocalPath) -> bool:
    return a == b or _is_prefix(a, b) or _is_prefix(b, a)


def _pair_clashes(a, b) -> list[ClashReport]:
    if a.id == b.id:
        return [ClashReport(a.id, b.id, "duplicate module name")]
    out = []
    for x, y in ((a, b), (b, a)):
        if x.id.doc == y.id.doc and _is_prefix(x.id.module, y.id.module):
            rest = y.id.module[len(x.id.module):]
            if any(d.name == rest for d in _body(x)):
                out.append(ClashReport(x.id, y.id, f"module name collides with declaration {'/'.join(rest)}"))
    return out


def _internal_clashes(mod) -> list[ClashReport]:
    out = _body_clashes(mod.id, _body(mod))
    if isinstance(mod, TheoryDecl):
        for d in mod.body:
            if isinstance(d, StructureDecl):
                out.extend(_body_clashes(mod.id.child(*d.name), d.assignments))
    return out


def module_clashes(existing, mod) -> list[ClashReport]:
    """Clashes introduced by adding ``mod`` after the modules ``existing``."""
    out = []
    for other in existing:
        out.extend(_pair_clashes(other, mod))
    return out + _internal_clashes(mod)


def clashes(tg: TheoryGraph) -> list[ClashReport]:
    """Violations of the two clash-freeness conditions (empty iff clash-free)."""
    out: list[ClashReport] = []
    mods = list(tg.modules)
    for i, mod in enumerate(mods):
        out.extend(module_clashes(mods[:i], mod))
    return out


def _body(mod) -> tuple:
    return mod.body if isinstance(mod, TheoryDecl) else mod.assignments


def _body_clashes(where: Identifier, decls) -> list[ClashReport]:
    out = []
    decls = list(decls)
    for i, a in enumerate(decls):
        for b in decls[i + 1:]:
            if _names_clash(a.name, b.name):
                out.append(ClashReport(where.at(a.name), where.at(b.name), "clashing declaration names"))
    return out


def is_clash_free(tg: TheoryGraph) -> bool:
    return not clashes(tg)
