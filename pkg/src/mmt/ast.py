"""Abstract syntax of theory graphs, declarations, terms and morphisms.

``None`` marks an absent type, definition or meta-morphism.  It is kept
apart from ``FILTERED`` (the hidden term), which is an ordinary term.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Union

from .ids import Identifier, LocalPath


def _path(name) -> LocalPath:
    return tuple(name.split("/")) if isinstance(name, str) else tuple(name)


# --- terms -----------------------------------------------------------------


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Filtered(Term):
    def __repr__(self):
        return "FILTERED"


FILTERED = Filtered()


@dataclass(frozen=True)
class Const(Term):
    id: Identifier


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class App(Term):
    head: Term
    args: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("application needs at least one argument")


@dataclass(frozen=True)
class VarDecl:
    name: str
    type: Optional[Term] = None
    definition: Optional[Term] = None


@dataclass(frozen=True)
class Bind(Term):
    binder: Term
    context: tuple[VarDecl, ...]
    scope: Term

    def __post_init__(self):
        object.__setattr__(self, "context", tuple(self.context))


@dataclass(frozen=True)
class MorphApp(Term):
    term: Term
    morphism: "Morphism"


# --- morphisms -------------------------------------------------------------


class Morphism:
    __slots__ = ()


@dataclass(frozen=True)
class Ident(Morphism):
    theory: Identifier


@dataclass(frozen=True)
class Link(Morphism):
    link: Identifier


@dataclass(frozen=True)
class Comp(Morphism):
    """Diagrammatic composition: ``first`` is applied before ``second``."""

    first: Morphism
    second: Morphism


def comp(*ms: Morphism) -> Morphism:
    if not ms:
        raise ValueError("empty composition")
    out = ms[-1]
    for m in reversed(ms[:-1]):
        out = Comp(m, out)
    return out


def chain(m: Morphism) -> tuple[Morphism, ...]:
    """The atomic morphisms of ``m`` in application order."""
    if isinstance(m, Comp):
        return chain(m.first) + chain(m.second)
    return (m,)


# --- declarations ----------------------------------------------------------


@dataclass(frozen=True)
class ConstantDecl:
    name: LocalPath
    type: Optional[Term] = None
    definition: Optional[Term] = None

    def __post_init__(self):
        object.__setattr__(self, "name", _path(self.name))


@dataclass(frozen=True)
class ConAss:
    name: LocalPath
    term: Term

    def __post_init__(self):
        object.__setattr__(self, "name", _path(self.name))


@dataclass(frozen=True)
class StrAss:
    name: LocalPath
    morphism: Morphism

    def __post_init__(self):
        object.__setattr__(self, "name", _path(self.name))


Assignment = Union[ConAss, StrAss]


@dataclass(frozen=True)
class StructureDecl:
    """``name : domain [meta] = {assignments}`` or ``name : domain = definition``."""

    name: LocalPath
    domain: Identifier
    meta_morphism: Optional[Morphism] = None
    assignments: tuple[Assignment, ...] = ()
    definition: Optional[Morphism] = None

    def __post_init__(self):
        object.__setattr__(self, "name", _path(self.name))
        object.__setattr__(self, "assignments", tuple(self.assignments))


SymbolDecl = Union[ConstantDecl, StructureDecl]


@dataclass(frozen=True)
class TheoryDecl:
    id: Identifier
    meta: Optional[Identifier] = None
    body: tuple[SymbolDecl, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))


@dataclass(frozen=True)
class ViewDecl:
    id: Identifier
    domain: Identifier
    codomain: Identifier
    meta_morphism: Optional[Morphism] = None
    assignments: tuple[Assignment, ...] = ()
    definition: Optional[Morphism] = None

    def __post_init__(self):
        object.__setattr__(self, "assignments", tuple(self.assignments))


ModuleDecl = Union[TheoryDecl, ViewDecl]


@dataclass(frozen=True)
class TheoryGraph:
    modules: tuple[ModuleDecl, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "modules", tuple(self.modules))

    def __iter__(self):
        return iter(self.modules)

    def __len__(self):
        return len(self.modules)

    def __add__(self, other: "TheoryGraph") -> "TheoryGraph":
        return TheoryGraph(self.modules + tuple(other.modules))


@dataclass(frozen=True)
class Document:
    uri: str
    modules: tuple[ModuleDecl, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "modules", tuple(self.modules))

    @property
    def graph(self) -> TheoryGraph:
        return TheoryGraph(self.modules)


# --- traversals ------------------------------------------------------------


def subterms(t: Term) -> Iterator[Term]:
    """All subterms of ``t`` (pre-order), including those under morphism application."""
    yield t
    if isinstance(t, App):
        yield from subterms(t.head)
        for a in t.args:
            yield from subterms(a)
    elif isinstance(t, Bind):
        yield from subterms(t.binder)
        for d in t.context:
            if d.type is not None:
                yield from subterms(d.type)
            if d.definition is not None:
                yield from subterms(d.definition)
        yield from subterms(t.scope)
    elif isinstance(t, MorphApp):
        yield from subterms(t.term)


def constants_of(t: Term) -> set[Identifier]:
    return {s.id for s in subterms(t) if isinstance(s, Const)}


def morphisms_of(t: Term) -> Iterator[Morphism]:
    for s in subterms(t):
        if isinstance(s, MorphApp):
            yield s.morphism


def free_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        out = free_vars(t.head)
        for a in t.args:
            out |= free_vars(a)
        return out
    if isinstance(t, Bind):
        out = free_vars(t.binder)
        bound: set[str] = set()
        for d in t.context:
            for part in (d.type, d.definition):
                if part is not None:
                    out |= free_vars(part) - bound
            bound.add(d.name)
        return out | (free_vars(t.scope) - bound)
    if isinstance(t, MorphApp):
        return free_vars(t.term)
    return set()


def term_size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def alpha_equal(a: Optional[Term], b: Optional[Term]) -> bool:
    """Syntactic equality up to renaming of bound variables."""
    return _alpha(a, b, {}, {}, 0)


def _alpha(a, b, env_a: dict, env_b: dict, depth: int) -> bool:
    if a is None or b is None:
        return a is None and b is None
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        ia, ib = env_a.get(a.name), env_b.get(b.name)
        if ia is None and ib is None:
            return a.name == b.name
        return ia == ib
    if isinstance(a, App):
        return (
            len(a.args) == len(b.args)
            and _alpha(a.head, b.head, env_a, env_b, depth)
            and all(_alpha(x, y, env_a, env_b, depth) for x, y in zip(a.args, b.args))
        )
    if isinstance(a, Bind):
        if len(a.context) != len(b.context) or not _alpha(a.binder, b.binder, env_a, env_b, depth):
            return False
        env_a, env_b = dict(env_a), dict(env_b)
        for da, db in zip(a.context, b.context):
            if not _alpha(da.type, db.type, env_a, env_b, depth):
                return False
            if not _alpha(da.definition, db.definition, env_a, env_b, depth):
                return False
            depth += 1
            env_a[da.name] = depth
            env_b[db.name] = depth
        return _alpha(a.scope, b.scope, env_a, env_b, depth)
    if isinstance(a, MorphApp):
        return chain(a.morphism) == chain(b.morphism) and _alpha(a.term, b.term, env_a, env_b, depth)
    return a == b


def has_morph_app(t: Optional[Term]) -> bool:
    return t is not None and any(isinstance(s, MorphApp) for s in subterms(t))


def is_flat(tg: TheoryGraph) -> bool:
    """True iff ``tg`` uses no structures, structure assignments or morphism applications."""
    for mod in tg.modules:
        if isinstance(mod, TheoryDecl):
            for d in mod.body:
                if isinstance(d, StructureDecl):
                    return False
                if has_morph_app(d.type) or has_morph_app(d.definition):
                    return False
        else:
            for a in mod.assignments:
                if isinstance(a, StrAss) or has_morph_app(a.term):
                    return False
    return True


# --- base identifiers ------------------------------------------------------


def base_of(
    ancestors: list,
    domain_of: Callable[[Morphism], Identifier],
) -> Identifier:
    """Base identifier at the last node of ``ancestors``.

    ``ancestors`` runs from a Document down to the node of interest;
    ``domain_of`` returns the domain theory of a morphism.
    """
    doc = ancestors[0]
    base = Identifier(doc.uri)
    for parent, child in zip(ancestors, ancestors[1:]):
        if isinstance(child, (TheoryDecl, ViewDecl)):
            base = Identifier(doc.uri)
        elif isinstance(parent, TheoryDecl) and isinstance(child, (ConstantDecl, StructureDecl)):
            base = parent.id
        elif isinstance(child, (ConAss, StrAss)):
            base = parent.codomain if isinstance(parent, ViewDecl) else _enclosing_theory(ancestors, parent)
        elif isinstance(parent, MorphApp) and child is parent.term:
            base = domain_of(parent.morphism)
        elif isinstance(parent, Comp) and child is parent.first:
            base = domain_of(parent.second)
    return base


def _enclosing_theory(ancestors: list, node) -> Identifier:
    for a in reversed(ancestors[: ancestors.index(node)]):
        if isinstance(a, TheoryDecl):
            return a.id
    raise ValueError("structure outside a theory")


# --- rendering -------------------------------------------------------------


def show(t, short: bool = True) -> str:
    """Compact human-readable rendering, e.g. ``@(→, ι, ι)``."""
    if t is None:
        return "_"
    if isinstance(t, Filtered):
        return "⊥"
    if isinstance(t, Const):
        return "/".join(t.id.symbol) if short else str(t.id)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, App):
        return "@(" + ", ".join(show(x, short) for x in (t.head,) + t.args) + ")"
    if isinstance(t, Bind):
        ctx = ", ".join(
            d.name
            + ("" if d.type is None else ":" + show(d.type, short))
            + ("" if d.definition is None else "=" + show(d.definition, short))
            for d in t.context
        )
        return f"{show(t.binder, short)}[{ctx}].{show(t.scope, short)}"
    if isinstance(t, MorphApp):
        return f"({show(t.term, short)})^{{{show(t.morphism, short)}}}"
    if isinstance(t, Ident):
        return f"id_{'/'.join(t.theory.module) if short else t.theory}"
    if isinstance(t, Link):
        return "/".join(t.link.module) if short else str(t.link)
    if isinstance(t, Comp):
        return " ; ".join(show(m, short) for m in chain(t))
    raise TypeError(f"cannot show {t!r}")


# --- module references -----------------------------------------------------


def morphism_refs(m: Morphism) -> set[Identifier]:
    out = set()
    for a in chain(m):
        out.add(a.theory if isinstance(a, Ident) else a.link)
    return out


def term_refs(t: Optional[Term]) -> set[Identifier]:
    if t is None:
        return set()
    out = {c.module_id() for c in constants_of(t)}
    for m in morphisms_of(t):
        out |= morphism_refs(m)
    return out


def _assignment_refs(assignments) -> set[Identifier]:
    out = set()
    for a in assignments:
        out |= term_refs(a.term) if isinstance(a, ConAss) else morphism_refs(a.morphism)
    return out


def referenced_modules(mod: ModuleDecl) -> set[Identifier]:
    """Module-level identifiers (theories or links) that ``mod`` refers to."""
    out: set[Identifier] = set()
    if isinstance(mod, TheoryDecl):
        if mod.meta is not None:
            out.add(mod.meta)
        for d in mod.body:
            if isinstance(d, ConstantDecl):
                out |= term_refs(d.type) | term_refs(d.definition)
            else:
                out.add(d.domain)
                for m in (d.meta_morphism, d.definition):
                    if m is not None:
                        out |= morphism_refs(m)
                out |= _assignment_refs(d.assignments)
    else:
        out |= {mod.domain, mod.codomain}
        for m in (mod.meta_morphism, mod.definition):
            if m is not None:
                out |= morphism_refs(m)
        out |= _assignment_refs(mod.assignments)
    return out


def owner(ident: Identifier, known) -> Optional[Identifier]:
    """The declared module among ``known`` that introduces ``ident``.

    Induced links such as ``T/i/h`` belong to the theory ``T``.
    """
    for k in range(len(ident.module), 0, -1):
        cand = Identifier(ident.doc, ident.module[:k])
        if cand in known:
            return cand
    return None


def module_dependencies(tg: TheoryGraph) -> dict[Identifier, list[Identifier]]:
    """For every module, the other modules of ``tg`` it refers to."""
    known = {m.id for m in tg.modules}
    out = {}
    for mod in tg.modules:
        deps = []
        for ref in referenced_modules(mod):
            o = owner(ref, known)
            if o is not None and o != mod.id and o not in deps:
                deps.append(o)
        out[mod.id] = sorted(deps, key=str)
    return out
