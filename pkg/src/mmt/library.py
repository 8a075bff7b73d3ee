"""Libraries: validated document stores with catalog lookup and queries."""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field
from typing import Optional, Union

from .ast import (
    ConAss,
    ConstantDecl,
    Document,
    StrAss,
    StructureDecl,
    TheoryGraph,
    ViewDecl,
    constants_of,
    module_dependencies,
    owner,
    referenced_modules,
)
from .check import Checker, Diagnostic, Level, dependency_cycle
from .elaborate import ElaborationErrors, Elaborator
from .errors import DocumentRejected, NoAssignment, NotFound, UnresolvableReference
from .foundations import STRUCTURAL, Foundation
from .ids import Identifier, as_id

CATALOG_ENV = "MMT_CATALOG"

Relation = str
Triple = tuple[str, Relation, str]

OCCURS_IN_TYPE = "occurs-in-type-of"
OCCURS_IN_DEFINIENS = "occurs-in-definiens-of"
HAS_DOMAIN = "has-domain"
HAS_CODOMAIN = "has-codomain"
HAS_META = "has-meta"
DECLARES = "declares"
IMPORTS_FROM = "imports-from"
RELATIONS = (OCCURS_IN_TYPE, OCCURS_IN_DEFINIENS, HAS_DOMAIN, HAS_CODOMAIN, HAS_META, DECLARES, IMPORTS_FROM)


# --- catalog -----------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogRule:
    prefix: str
    location: str


@dataclass
class Catalog:
    """Maps URI prefixes to storage locations; the longest matching prefix wins."""

    rules: list[CatalogRule] = field(default_factory=list)

    @classmethod
    def parse(cls, text: str, relative_to: Optional[str] = None) -> "Catalog":
        rules = []
        for n, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] != "PREFIX":
                raise ValueError(f"catalog line {n}: expected 'PREFIX <uri-prefix> <location>'")
            loc = parts[2]
            if relative_to and "://" not in loc and not os.path.isabs(loc):
                loc = os.path.join(relative_to, loc)
            rules.append(CatalogRule(parts[1], loc))
        return cls(rules)

    @classmethod
    def load(cls, path) -> "Catalog":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read(), os.path.dirname(os.path.abspath(path)))

    @classmethod
    def from_env(cls) -> "Catalog":
        path = os.environ.get(CATALOG_ENV)
        return cls.load(path) if path else cls()

    def locate(self, uri: str) -> Optional[str]:
        best = None
        for r in self.rules:
            if uri.startswith(r.prefix) and (best is None or len(r.prefix) > len(best.prefix)):
                best = r
        if best is None:
            return None
        rest = uri[len(best.prefix):].strip("/")
        if not rest:
            return best.location
        loc = best.location.rstrip("/") + "/" + rest
        return loc if loc.endswith(".omdoc") else loc + ".omdoc"


# --- relational index -----------------------------------------------------------


class RelationalIndex:
    def __init__(self, triples=()):
        self.triples: frozenset[Triple] = frozenset(triples)
        self._by_rel: dict[str, list[Triple]] = {}
        for tr in sorted(self.triples):
            self._by_rel.setdefault(tr[1], []).append(tr)

    @classmethod
    def build(cls, el: Elaborator) -> "RelationalIndex":
        out: set[Triple] = set()
        for t in el.theories():
            th = el.theory(t)
            if th.meta is not None:
                out.add((str(t), HAS_META, str(th.meta)))
            for d in th.body:
                if isinstance(d, StructureDecl):
                    out.add((str(t), IMPORTS_FROM, str(d.domain)))
            for c in el.constant_names(t):
                cid = t.at(c)
                out.add((str(t), DECLARES, str(cid)))
                try:
                    tp, df = el.constant(t, c)
                except ElaborationErrors:
                    continue
                for rel, part in ((OCCURS_IN_TYPE, tp), (OCCURS_IN_DEFINIENS, df)):
                    if part is not None:
                        out.update((str(x), rel, str(cid)) for x in constants_of(part))
        for l in el.all_links():
            info = el.link_info(l)
            out.add((str(l), HAS_DOMAIN, str(info.domain)))
            out.add((str(l), HAS_CODOMAIN, str(info.codomain)))
        return cls(out)

    def query(self, subject=None, relation: Optional[str] = None, obj=None) -> list[Triple]:
        s = None if subject is None else str(subject)
        o = None if obj is None else str(obj)
        pool = self._by_rel.get(relation, []) if relation is not None else sorted(self.triples)
        return [tr for tr in pool if (s is None or tr[0] == s) and (o is None or tr[2] == o)]


# --- library ---------------------------------------------------------------------


class _Snapshot:
    """An immutable library state with lazily derived elaborator and index."""

    def __init__(self, documents: tuple, modules: tuple):
        self.documents = documents
        self.modules = modules
        self.graph = TheoryGraph(list(modules))
        self._el: Optional[Elaborator] = None
        self._index: Optional[RelationalIndex] = None
        self._lock = threading.Lock()

    @property
    def el(self) -> Elaborator:
        with self._lock:
            if self._el is None:
                self._el = Elaborator(self.graph)
            return self._el

    @property
    def index(self) -> RelationalIndex:
        el = self.el
        with self._lock:
            if self._index is None:
                self._index = RelationalIndex.build(el)
            return self._index


class Library:
    """Documents that jointly form one well-formed theory graph.

    Readers always see a consistent snapshot; ``add_document`` is serialized and
    either commits completely or leaves the library untouched.
    """

    def __init__(self, catalog: Optional[Catalog] = None, foundation: Foundation = STRUCTURAL):
        self.catalog = catalog if catalog is not None else Catalog()
        self.foundation = foundation
        self._lock = threading.Lock()
        self._snap = _Snapshot((), ())

    @property
    def documents(self) -> tuple[Document, ...]:
        return self._snap.documents

    @property
    def graph(self) -> TheoryGraph:
        return self._snap.graph

    @property
    def elaborator(self) -> Elaborator:
        return self._snap.el

    @property
    def index(self) -> RelationalIndex:
        return self._snap.index

    def document(self, uri: str) -> Optional[Document]:
        for d in self._snap.documents:
            if d.uri == uri:
                return d
        return None

    # adding -----------------------------------------------------------------

    def add_document(
        self,
        doc: Document,
        level: Union[Level, str] = Level.STRUCTURAL,
        foundation: Optional[Foundation] = None,
    ) -> list[Diagnostic]:
        level = Level(level) if isinstance(level, str) else level
        foundation = foundation or self.foundation
        with self._lock:
            docs = list(self._snap.documents)
            mods = list(self._snap.modules)
            warnings: list[Diagnostic] = []
            self._stage(doc, docs, mods, level, foundation, [], warnings)
            self._snap = _Snapshot(tuple(docs), tuple(mods))
        return warnings

    def load(self, path, level: Union[Level, str] = Level.STRUCTURAL) -> list[Diagnostic]:
        from .xmlio import read_file

        doc, diags = read_file(path, self.graph)
        return diags + self.add_document(doc, level)

    def _stage(self, doc, docs, mods, level, foundation, loading, warnings) -> None:
        """Validate ``doc`` against the staged state and append it; pure on failure."""
        existing = next((d for d in docs if d.uri == doc.uri), None)
        if existing is not None:
            if existing == doc:
                return
            raise DocumentRejected(
                f"document {doc.uri} is already present with different content",
                [Diagnostic("duplicate", doc.uri, "document differs from the stored one")],
            )
        loading = loading + [doc.uri]
        by_id = {m.id: m for m in mods}
        fresh = []
        for m in doc.modules:
            old = by_id.get(m.id)
            if old is None:
                fresh.append(m)
            elif old != m:
                raise DocumentRejected(
                    f"module {m.id} conflicts with an existing declaration",
                    [Diagnostic("duplicate", str(m.id), "module differs from the stored one")],
                )
        self._resolve_remote(doc, fresh, docs, mods, level, foundation, loading, warnings)
        diags = self._validate(mods, fresh, level, foundation)
        errors = [d for d in diags if d.level == "error"]
        if errors:
            raise DocumentRejected(f"document {doc.uri} is not well-formed", errors)
        warnings.extend(diags)
        docs.append(doc)
        mods.extend(fresh)

    def _resolve_remote(self, doc, fresh, docs, mods, level, foundation, loading, warnings) -> None:
        from .xmlio import read_file

        local = {m.id for m in fresh}
        for m in fresh:
            for ref in sorted(referenced_modules(m), key=str):
                known = {x.id for x in mods} | local
                if owner(ref, known) is not None:
                    continue
                if ref.doc in loading:
                    raise DocumentRejected(
                        f"cyclic dependency between documents {' -> '.join(loading + [ref.doc])}",
                        [Diagnostic("acyclic", ref.doc, "cyclic inter-document dependency")],
                    )
                if any(d.uri == ref.doc for d in docs):
                    raise UnresolvableReference(f"{ref} is not declared in {ref.doc}")
                loc = self.catalog.locate(ref.doc)
                if loc is None or "://" in loc or not os.path.exists(loc):
                    raise UnresolvableReference(f"cannot resolve {ref}")
                remote, diags = read_file(loc, TheoryGraph(mods))
                if remote.uri != ref.doc:
                    raise UnresolvableReference(f"{loc} holds {remote.uri}, not {ref.doc}")
                warnings.extend(diags)
                self._stage(remote, docs, mods, level, foundation, loading, warnings)
                if owner(ref, {x.id for x in mods} | local) is None:
                    raise UnresolvableReference(f"{ref} is not declared in {ref.doc}")

    @staticmethod
    def _validate(mods, fresh, level, foundation) -> list[Diagnostic]:
        cycle = dependency_cycle(TheoryGraph(list(mods) + fresh))
        if cycle:
            return [Diagnostic("acyclic", str(cycle[0]), "cyclic module dependency")]
        if level is Level.XML_ONLY:
            return []
        checker = Checker(STRUCTURAL if level is Level.STRUCTURAL else foundation)
        checker.modules = list(mods)
        out = []
        for m in fresh:
            out.extend(checker.add_module(m))
        return out

    # queries -----------------------------------------------------------------

    def atomic_query(self, uri: Union[Identifier, str]):
        ident = as_id(uri)
        snap = self._snap
        el = snap.el
        if ident.is_relative:
            raise NotFound(f"{uri} is not an absolute URI")
        if not ident.module:
            for d in snap.documents:
                if d.uri == ident.doc:
                    return d
            raise NotFound(f"no document {ident.doc}")
        mod = ident.module_id()
        try:
            if not ident.symbol:
                if el.is_theory(mod):
                    return el.theory(mod)
                if el.is_link(mod):
                    return _link_declaration(el, mod)
                raise NotFound(f"no module {mod}")
            c = ident.symbol
            if el.is_theory(mod):
                if el.has_constant(mod, c):
                    tp, df = el.constant(mod, c)
                    return ConstantDecl(c, tp, df)
                raise NotFound(f"no constant {ident}")
            if el.is_link(mod):
                info = el.link_info(mod)
                if el.has_constant(info.domain, c):
                    term, _ = el.assignment(mod, c)
                    return ConAss(c, term)
                for a in info.assignments:
                    if isinstance(a, StrAss) and a.name == c:
                        return a
                raise NotFound(f"no assignment {ident}")
        except NoAssignment as exc:
            raise NotFound(str(exc)) from exc
        except ElaborationErrors as exc:
            raise NotFound(str(exc)) from exc
        raise NotFound(f"nothing is declared at {ident}")

    def query_relations(self, subject=None, relation: Optional[str] = None, obj=None) -> list[Triple]:
        return self.index.query(subject, relation, obj)

    def deps_closure(self, module: Union[Identifier, str]) -> list[Identifier]:
        """``module`` and everything it transitively depends on, in library order."""
        mod = as_id(module)
        graph = self.graph
        deps = module_dependencies(graph)
        known = set(deps)
        start = owner(mod, known)
        if start is None:
            raise NotFound(f"no module {mod}")
        seen, todo = {start}, [start]
        while todo:
            for d in deps[todo.pop()]:
                if d not in seen:
                    seen.add(d)
                    todo.append(d)
        return [m.id for m in graph.modules if m.id in seen]

    def self_contained(self, module: Union[Identifier, str]) -> Document:
        wanted = set(self.deps_closure(module))
        mods = [m for m in self.graph.modules if m.id in wanted]
        return Document(as_id(module).doc, mods)


def _link_declaration(el: Elaborator, l: Identifier) -> ViewDecl:
    info = el.link_info(l)
    if info.definition is not None:
        return ViewDecl(l, info.domain, info.codomain, None, (), info.definition)
    return ViewDecl(l, info.domain, info.codomain, info.meta_morphism, tuple(info.assignments))


def open_library(paths=(), catalog: Optional[Catalog] = None, level: Union[Level, str] = Level.STRUCTURAL) -> Library:
    lib = Library(catalog if catalog is not None else Catalog.from_env())
    for p in paths:
        lib.load(p, level)
    return lib


__all__ = [
    "CATALOG_ENV",
    "Catalog",
    "CatalogRule",
    "Library",
    "RELATIONS",
    "RelationalIndex",
    "open_library",
]
