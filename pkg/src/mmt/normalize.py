"""Normalization: expanding definitions and pushing morphisms through terms.

The result of normalizing a term never contains a morphism application,
and a hidden subterm anywhere collapses the whole term to ``FILTERED``.
"""

from __future__ import annotations

from typing import Optional, Union

from .ast import (
    FILTERED,
    App,
    Bind,
    Const,
    Filtered,
    Ident,
    MorphApp,
    Morphism,
    Term,
    TheoryGraph,
    Var,
    VarDecl,
    chain,
)
from .elaborate import Elaborator
from .errors import CyclicDefinition, IllFormed
from .ids import Identifier

MAX_DEPTH = 2000


class Normalizer:
    def __init__(self, el: Elaborator, max_depth: int = MAX_DEPTH):
        self.el = el
        self.max_depth = max_depth
        self._const: dict[Identifier, Term] = {}
        self._linked: dict[tuple, Term] = {}
        self._active: set = set()
        self._depth = 0

    # public entry points translate runaway recursion into CyclicDefinition
    def term(self, t: Optional[Term]) -> Optional[Term]:
        if t is None:
            return None
        try:
            return self._norm(t)
        except RecursionError:
            self._active.clear()
            self._depth = 0
            raise CyclicDefinition("normalization did not terminate") from None

    def apply(self, t: Term, m: Morphism) -> Term:
        return self.term(MorphApp(t, m))

    def context(self, ctx) -> Union[tuple, Filtered]:
        out = self._context(tuple(ctx), self._norm)
        return out

    # --- plain normalization -----------------------------------------------

    def _norm(self, t: Term) -> Term:
        if isinstance(t, (Filtered, Var)):
            return t
        if isinstance(t, Const):
            return self._norm_const(t)
        if isinstance(t, App):
            parts = [self._norm(x) for x in (t.head,) + t.args]
            return _app(parts)
        if isinstance(t, Bind):
            return self._bind(t, self._norm)
        if isinstance(t, MorphApp):
            return self._apply(t.term, t.morphism)
        raise IllFormed(f"not a term: {t!r}")

    def _norm_const(self, t: Const) -> Term:
        hit = self._const.get(t.id)
        if hit is not None:
            return hit
        _, df = self.el.lookup(t.id)
        if df is None:
            out = t
        else:
            with self._guard(t.id):
                out = self._norm(df)
        self._const[t.id] = out
        return out

    def _bind(self, t: Bind, f) -> Term:
        binder = f(t.binder)
        ctx = self._context(t.context, f)
        scope = f(t.scope)
        if isinstance(binder, Filtered) or isinstance(ctx, Filtered) or isinstance(scope, Filtered):
            return FILTERED
        return Bind(binder, ctx, scope)

    @staticmethod
    def _context(ctx, f):
        out = []
        for d in ctx:
            tp = None if d.type is None else f(d.type)
            df = None if d.definition is None else f(d.definition)
            if isinstance(tp, Filtered) or isinstance(df, Filtered):
                return FILTERED
            out.append(VarDecl(d.name, tp, df))
        return tuple(out)

    # --- morphism application ----------------------------------------------

    def _apply(self, t: Term, m: Morphism) -> Term:
        links = [a.link for a in chain(m) if not isinstance(a, Ident)]
        if not links:
            return self._norm(t)
        for l in links:
            t = self._apply_link(t, l)
        return t

    def _apply_link(self, t: Term, l: Identifier) -> Term:
        if isinstance(t, (Filtered, Var)):
            return t
        if isinstance(t, App):
            return _app([self._apply_link(x, l) for x in (t.head,) + t.args])
        if isinstance(t, Bind):
            return self._bind(t, lambda x: self._apply_link(x, l))
        if isinstance(t, MorphApp):
            return self._apply_link(self._apply(t.term, t.morphism), l)
        if isinstance(t, Const):
            key = (t.id, l)
            hit = self._linked.get(key)
            if hit is None:
                with self._guard(key):
                    hit = self._apply_link_const(t, l)
                self._linked[key] = hit
            return hit
        raise IllFormed(f"not a term: {t!r}")

    def _apply_link_const(self, t: Const, l: Identifier) -> Term:
        _, df = self.el.lookup(t.id)
        if df is not None:
            return self._apply_link(df, l)
        info = self.el.link_info(l)
        home = t.id.module_id()
        if home == info.domain:
            ass, _ = self.el.assignment(l, t.id.symbol)
            return self._norm(ass)
        if self.el.is_meta_ancestor(home, info.domain):
            # meta-theory symbols travel along the meta-morphism; defined links
            # carry them along their definiens
            via = info.meta_morphism if info.meta_morphism is not None else info.definition
            if via is None:
                raise IllFormed(f"{l} has no meta-morphism to translate {t.id}")
            return self._apply(t, via)
        raise IllFormed(f"{t.id} is not in the domain {info.domain} of {l}")

    def _guard(self, key):
        return _Guard(self, key)


class _Guard:
    def __init__(self, n: Normalizer, key):
        self.n, self.key = n, key

    def __enter__(self):
        n = self.n
        if self.key in n._active:
            raise CyclicDefinition(f"cyclic definition through {self.key}")
        n._depth += 1
        if n._depth > n.max_depth:
            n._depth -= 1
            raise CyclicDefinition("normalization depth exceeded")
        n._active.add(self.key)

    def __exit__(self, *exc):
        self.n._active.discard(self.key)
        self.n._depth -= 1
        return False


def _app(parts: list[Term]) -> Term:
    if any(isinstance(p, Filtered) for p in parts):
        return FILTERED
    return App(parts[0], tuple(parts[1:]))


def normalizer(src: Union[TheoryGraph, Elaborator]) -> Normalizer:
    el = src if isinstance(src, Elaborator) else Elaborator(src)
    n = el.__dict__.get("_normalizer")
    if n is None:
        n = el.__dict__["_normalizer"] = Normalizer(el)
    return n


def normalize(src: Union[TheoryGraph, Elaborator], t: Optional[Term]) -> Optional[Term]:
    return normalizer(src).term(t)


def apply_morphism(src: Union[TheoryGraph, Elaborator], t: Term, m: Morphism) -> Term:
    return normalizer(src).apply(t, m)


def normalize_context(src: Union[TheoryGraph, Elaborator], ctx):
    return normalizer(src).context(ctx)
