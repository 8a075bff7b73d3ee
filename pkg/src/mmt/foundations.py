"""Foundations supply the typing and equality judgments the kernel defers to.

Three are provided: ``structural`` (accepts everything), ``openmath``
(untyped, equality up to normalization) and ``lf`` (the dependently typed
logical framework LF).  A :class:`FoundationRegistry` picks one per theory by
walking up its meta-theory chain.
"""

from __future__ import annotations

import itertools
from typing import Optional

from .ast import (
    App,
    Bind,
    Const,
    Filtered,
    Term,
    Var,
    VarDecl,
    alpha_equal,
    free_vars,
)
from .elaborate import ElaborationErrors, Elaborator
from .errors import IllFormed
from .ids import Identifier
from .normalize import normalize


class Foundation:
    key = "abstract"

    def typed(self, el: Elaborator, theory: Identifier, ctx, term: Optional[Term], tp: Optional[Term]) -> bool:
        raise NotImplementedError

    def equal(self, el: Elaborator, theory: Identifier, ctx, a: Optional[Term], b: Optional[Term]) -> bool:
        raise NotImplementedError

    def __repr__(self):
        return f"<foundation {self.key}>"


class StructuralFoundation(Foundation):
    key = "structural"

    def typed(self, el, theory, ctx, term, tp):
        return True

    def equal(self, el, theory, ctx, a, b):
        return True


class OpenMathFoundation(Foundation):
    """Untyped: only absent types are allowed; equality is equality of normal forms."""

    key = "openmath"

    def typed(self, el, theory, ctx, term, tp):
        if tp is not None:
            return False
        if term is None:
            return True
        from .check import term_diagnostics

        return not term_diagnostics(el, theory, tuple(ctx), term)

    def equal(self, el, theory, ctx, a, b):
        if a is None or b is None:
            return a is None and b is None
        try:
            return alpha_equal(normalize(el, a), normalize(el, b))
        except (IllFormed, *ElaborationErrors):
            return alpha_equal(a, b)


# --- LF ------------------------------------------------------------------------


class LFTypeError(Exception):
    pass


LF_DOC_DEFAULT = "http://cds.omdoc.org/lf"
LF_THEORY = Identifier(LF_DOC_DEFAULT, ("LF",))


class LFFoundation(Foundation):
    """Dependent type theory with ``type``, ``kind``, ``Pi``, ``lambda`` and ``→``.

    ``Pi`` and ``lambda`` are binders (``Bind`` with one or more typed
    variables); ``→`` is applied to argument types followed by the result
    type.  Equality is beta-conversion, plus eta when ``eta`` is set.
    """

    key = "lf"

    def __init__(self, theory: Identifier = LF_THEORY, eta: bool = False, max_steps: int = 20000):
        self.theory = theory
        self.eta = eta
        self.max_steps = max_steps
        self.TYPE = Const(theory.sym("type"))
        self.KIND = Const(theory.sym("kind"))
        self.PI = Const(theory.sym("Pi"))
        self.LAMBDA = Const(theory.sym("lambda"))
        self.ARROW = Const(theory.sym("→"))
        self._fresh = itertools.count()

    # judgments ------------------------------------------------------------

    def typed(self, el, theory, ctx, term, tp):
        if theory == self.theory:
            return term is None and tp is None
        if term is None and tp is None:
            return True
        try:
            gamma = self._context(el, ctx)
            if term is None:
                return self._infer(el, gamma, self._prep(el, tp)) in (self.TYPE, self.KIND)
            t = self._prep(el, term)
            if tp is None:
                self._infer(el, gamma, t)
                return True
            a = self._prep(el, tp)
            if a == self.KIND:
                return self._infer(el, gamma, t) == self.KIND
            if self._infer(el, gamma, a) not in (self.TYPE, self.KIND):
                return False
            return self.convertible(self._infer(el, gamma, t), a)
        except (LFTypeError, IllFormed, *ElaborationErrors):
            return False

    def equal(self, el, theory, ctx, a, b):
        if a is None or b is None:
            return a is None and b is None
        try:
            return self.convertible(self._prep(el, a), self._prep(el, b))
        except (LFTypeError, IllFormed, *ElaborationErrors):
            return alpha_equal(a, b)

    def convertible(self, a: Term, b: Term) -> bool:
        if alpha_equal(a, b):
            return True
        return alpha_equal(self.nf(a), self.nf(b))

    def infer(self, el: Elaborator, ctx, term: Term) -> Term:
        """The type of ``term`` (``kind`` for kinds), raising LFTypeError."""
        return self._infer(el, self._context(el, ctx), self._prep(el, term))

    # canonical form: curried applications, one variable per binder --------

    def _prep(self, el, t: Term) -> Term:
        return self.canon(normalize(el, t))

    def canon(self, t: Term) -> Term:
        if isinstance(t, App):
            if t.head == self.ARROW:
                if len(t.args) < 2:
                    raise LFTypeError("→ needs at least one argument type and a result")
                out = self.canon(t.args[-1])
                for a in reversed(t.args[:-1]):
                    out = Bind(self.PI, (VarDecl(self._fresh_name(out), self.canon(a)),), out)
                return out
            out = self.canon(t.head)
            for a in t.args:
                out = App(out, (self.canon(a),))
            return out
        if isinstance(t, Bind):
            if t.binder not in (self.PI, self.LAMBDA):
                raise LFTypeError(f"{t.binder} is not an LF binder")
            scope = self.canon(t.scope)
            for d in reversed(t.context):
                if d.definition is not None:
                    scope = self.subst(scope, d.name, self.canon(d.definition))
                    continue
                if d.type is None:
                    raise LFTypeError(f"LF variable {d.name} needs a type")
                scope = Bind(t.binder, (VarDecl(d.name, self.canon(d.type)),), scope)
            return scope
        if isinstance(t, Filtered):
            raise LFTypeError("hidden term")
        if isinstance(t, (Const, Var)):
            return t
        raise LFTypeError(f"not an LF term: {t!r}")

    def _fresh_name(self, *avoid: Term) -> str:
        used = set().union(*(free_vars(a) for a in avoid)) if avoid else set()
        while True:
            name = f"_x{next(self._fresh)}"
            if name not in used:
                return name

    # substitution and beta/eta normal forms ----------------------------------

    def subst(self, t: Term, x: str, a: Term) -> Term:
        if isinstance(t, Var):
            return a if t.name == x else t
        if isinstance(t, App):
            return App(self.subst(t.head, x, a), tuple(self.subst(s, x, a) for s in t.args))
        if isinstance(t, Bind):
            if x not in free_vars(t):
                return t
            fv = free_vars(a)
            ctx, scope = list(t.context), t.scope
            out = []
            for i, d in enumerate(ctx):
                tp = None if d.type is None else self.subst(d.type, x, a)
                df = None if d.definition is None else self.subst(d.definition, x, a)
                if d.name == x:
                    out.append(VarDecl(d.name, tp, df))
                    out.extend(ctx[i + 1:])
                    return Bind(t.binder, tuple(out), scope)
                name = d.name
                if name in fv:
                    name = self._fresh_name(a, scope, *(e.type for e in ctx if e.type is not None))
                    ren = Var(name)
                    ctx[i + 1:] = [
                        VarDecl(
                            e.name,
                            None if e.type is None else self.subst(e.type, d.name, ren),
                            None if e.definition is None else self.subst(e.definition, d.name, ren),
                        )
                        for e in ctx[i + 1:]
                    ]
                    scope = self.subst(scope, d.name, ren)
                out.append(VarDecl(name, tp, df))
            return Bind(t.binder, tuple(out), self.subst(scope, x, a))
        return t

    def nf(self, t: Term) -> Term:
        budget = [self.max_steps]
        return self._nf(t, budget)

    def _nf(self, t: Term, budget) -> Term:
        budget[0] -= 1
        if budget[0] < 0:
            raise LFTypeError("no normal form within step budget")
        if isinstance(t, App):
            head = self._nf(t.head, budget)
            if isinstance(head, Bind) and head.binder == self.LAMBDA:
                d = head.context[0]
                return self._nf(self.subst(head.scope, d.name, t.args[0]), budget)
            return App(head, tuple(self._nf(a, budget) for a in t.args))
        if isinstance(t, Bind):
            ctx = tuple(VarDecl(d.name, None if d.type is None else self._nf(d.type, budget)) for d in t.context)
            scope = self._nf(t.scope, budget)
            if (
                self.eta
                and t.binder == self.LAMBDA
                and isinstance(scope, App)
                and scope.args == (Var(ctx[0].name),)
                and ctx[0].name not in free_vars(scope.head)
            ):
                return scope.head
            return Bind(t.binder, ctx, scope)
        return t

    def _whnf(self, t: Term) -> Term:
        if isinstance(t, Bind) and t.binder == self.PI:
            return t
        return self.nf(t)

    # type inference ----------------------------------------------------------

    def _context(self, el, ctx) -> list:
        gamma: list = []
        for d in ctx:
            if d.type is None:
                raise LFTypeError(f"context variable {d.name} has no type")
            tp = self._prep(el, d.type)
            if self._infer(el, gamma, tp) not in (self.TYPE, self.KIND):
                raise LFTypeError(f"type of {d.name} is not a type")
            gamma.append((d.name, tp))
        return gamma

    def _const_type(self, el, ident: Identifier) -> Term:
        cache = el.__dict__.setdefault("_lf_types", {})
        key = (self.theory, ident)
        hit = cache.get(key)
        if hit is None:
            tp, _ = el.lookup(ident)
            if tp is None:
                raise LFTypeError(f"{ident} has no type")
            hit = cache[key] = self._prep(el, tp)
        return hit

    def _infer(self, el, gamma: list, t: Term) -> Term:
        if isinstance(t, Var):
            for name, tp in reversed(gamma):
                if name == t.name:
                    return tp
            raise LFTypeError(f"unbound variable {t.name}")
        if isinstance(t, Const):
            if t == self.TYPE:
                return self.KIND
            if t.id.module_id() == self.theory:
                raise LFTypeError(f"{t.id} cannot be used on its own")
            return self._const_type(el, t.id)
        if isinstance(t, App):
            fun = self._whnf(self._infer(el, gamma, t.head))
            if not (isinstance(fun, Bind) and fun.binder == self.PI):
                raise LFTypeError("application of a non-function")
            d = fun.context[0]
            arg = t.args[0]
            if not self.convertible(self._infer(el, gamma, arg), d.type):
                raise LFTypeError("argument type mismatch")
            return self.subst(fun.scope, d.name, arg)
        if isinstance(t, Bind):
            d = t.context[0]
            if not self.convertible(self._infer(el, gamma, d.type), self.TYPE):
                raise LFTypeError(f"domain of {d.name} is not a type")
            body = self._infer(el, gamma + [(d.name, d.type)], t.scope)
            if t.binder == self.PI:
                if body == self.KIND:
                    return self.KIND
                if self.convertible(body, self.TYPE):
                    return self.TYPE
                raise LFTypeError("Pi body is neither a type nor a kind")
            if body == self.KIND:
                raise LFTypeError("lambda over a kind")
            return Bind(self.PI, (VarDecl(d.name, d.type),), body)
        raise LFTypeError(f"cannot type {t!r}")


# --- registry --------------------------------------------------------------------

STRUCTURAL = StructuralFoundation()
OPENMATH = OpenMathFoundation()
OPENMATH_ROOT = Identifier("http://cds.omdoc.org/foundations/openmath", ("OpenMath",))


class FoundationRegistry(Foundation):
    """Dispatches each judgment to the foundation registered for the root
    of the theory's meta chain, falling back to ``default``."""

    key = "registry"

    def __init__(self, table: Optional[dict] = None, default: Foundation = STRUCTURAL):
        self.table = dict(table or {})
        self.default = default

    def resolve(self, el: Elaborator, theory: Identifier) -> Foundation:
        try:
            chain = el.meta_chain(theory)
        except (IllFormed, *ElaborationErrors):
            return self.default
        for t in reversed(chain):
            f = self.table.get(t)
            if f is not None:
                return f
        return self.default

    def typed(self, el, theory, ctx, term, tp):
        return self.resolve(el, theory).typed(el, theory, ctx, term, tp)

    def equal(self, el, theory, ctx, a, b):
        return self.resolve(el, theory).equal(el, theory, ctx, a, b)


def resolve_foundation(registry: FoundationRegistry, el: Elaborator, theory: Identifier) -> Foundation:
    return registry.resolve(el, theory)


def make_foundation(key: str, lf_theory: Identifier = LF_THEORY, eta: bool = False) -> Foundation:
    """Foundation for a command-line key: ``structural``, ``openmath`` or ``lf``.

    ``lf`` applies LF to theories rooted in ``lf_theory`` and the structural
    foundation elsewhere; ``openmath`` treats every theory as untyped, whether
    it has no meta-theory or the empty OpenMath root as meta-theory.
    """
    if key == "structural":
        return STRUCTURAL
    if key == "openmath":
        return FoundationRegistry({OPENMATH_ROOT: OPENMATH}, default=OPENMATH)
    if key == "lf":
        return FoundationRegistry({lf_theory: LFFoundation(lf_theory, eta=eta)})
    raise ValueError(f"unknown foundation {key!r}")
