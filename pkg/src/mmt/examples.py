"""The elementary-algebra theory graph used throughout tests, scripts and docs.

Three documents: ``LF_DOC`` holds the logical framework LF, ``FOL_DOC`` the
syntax of first-order logic, ``ALG_DOC`` monoids, commutative groups, rings,
the integers and two views into them.
"""

from __future__ import annotations

from .ast import (
    App,
    Bind,
    ConAss,
    Const,
    ConstantDecl,
    Document,
    Ident,
    Link,
    StrAss,
    StructureDecl,
    TheoryDecl,
    TheoryGraph,
    Var,
    VarDecl,
    ViewDecl,
)
from .ids import Identifier

LF_DOC = "http://cds.omdoc.org/lf"
FOL_DOC = "http://cds.omdoc.org/fol"
ALG_DOC = "http://cds.omdoc.org/algebra"

LF = Identifier(LF_DOC, ("LF",))
FOL = Identifier(FOL_DOC, ("FOLSyn",))
MONOID = Identifier(ALG_DOC, ("Monoid",))
CGROUP = Identifier(ALG_DOC, ("CGroup",))
RING = Identifier(ALG_DOC, ("Ring",))
INTEGERS = Identifier(ALG_DOC, ("integers",))
V1 = Identifier(ALG_DOC, ("v1",))
V2 = Identifier(ALG_DOC, ("v2",))

CGROUP_MON = CGROUP.child("mon")
RING_ADD = RING.child("add")
RING_MULT = RING.child("mult")
RING_ADD_MON = RING.child("add", "mon")


def c(theory: Identifier, name: str) -> Const:
    return Const(theory.sym(name))


def arrow(*args):
    return App(c(LF, "→"), args)


TYPE = c(LF, "type")
IOTA = c(FOL, "ι")
O = c(FOL, "o")


def lf_theory() -> TheoryDecl:
    return TheoryDecl(LF, None, [ConstantDecl(n) for n in ("type", "kind", "lambda", "Pi", "→")])


def fol_theory() -> TheoryDecl:
    return TheoryDecl(
        FOL,
        LF,
        [
            ConstantDecl("ι", TYPE),
            ConstantDecl("o", TYPE),
            ConstantDecl("equal", arrow(IOTA, IOTA, O)),
            ConstantDecl("forall", arrow(arrow(IOTA, O), O)),
        ],
    )


def monoid(with_univ: bool = False) -> TheoryDecl:
    body = [ConstantDecl("univ", TYPE)] if with_univ else []
    body += [ConstantDecl("comp", arrow(IOTA, IOTA, IOTA)), ConstantDecl("unit", IOTA)]
    return TheoryDecl(MONOID, FOL, body)


def cgroup() -> TheoryDecl:
    return TheoryDecl(
        CGROUP,
        FOL,
        [
            StructureDecl("mon", MONOID, Ident(FOL)),
            ConstantDecl("inv", arrow(IOTA, IOTA)),
        ],
    )


def ring(sharing: bool = False) -> TheoryDecl:
    mult = [ConAss("univ", c(RING, "add/mon/univ"))] if sharing else []
    return TheoryDecl(
        RING,
        FOL,
        [
            StructureDecl("add", CGROUP, Ident(FOL)),
            StructureDecl("mult", MONOID, Ident(FOL), mult),
        ],
    )


def integers() -> TheoryDecl:
    return TheoryDecl(
        INTEGERS,
        FOL,
        [
            ConstantDecl("0", IOTA),
            ConstantDecl("+", arrow(IOTA, IOTA, IOTA)),
            ConstantDecl("-", arrow(IOTA, IOTA)),
        ],
    )


def v1() -> ViewDecl:
    return ViewDecl(
        V1, MONOID, INTEGERS, Ident(FOL),
        [ConAss("comp", c(INTEGERS, "+")), ConAss("unit", c(INTEGERS, "0"))],
    )


def v2() -> ViewDecl:
    return ViewDecl(
        V2, CGROUP, INTEGERS, Ident(FOL),
        [ConAss("inv", c(INTEGERS, "-")), StrAss("mon", Link(V1))],
    )


def lf_document() -> Document:
    return Document(LF_DOC, [lf_theory()])


def fol_document() -> Document:
    return Document(FOL_DOC, [fol_theory()])


def algebra_document(with_views: bool = True) -> Document:
    mods = [monoid(), cgroup(), ring()]
    if with_views:
        mods += [integers(), v1(), v2()]
    return Document(ALG_DOC, mods)


def documents() -> list[Document]:
    return [lf_document(), fol_document(), algebra_document()]


def running_example(with_views: bool = True) -> TheoryGraph:
    return TheoryGraph([lf_theory(), fol_theory()] + list(algebra_document(with_views).modules))


def sharing_example() -> TheoryGraph:
    """Monoids with a universe ``univ``; a ring's two monoids share it."""
    return TheoryGraph([lf_theory(), fol_theory(), monoid(True), cgroup(), ring(True)])


def monoid_axiom():
    """``forall x:ι. equal(comp(unit, x), x)`` over Monoid."""
    body = App(c(FOL, "equal"), [App(c(MONOID, "comp"), [c(MONOID, "unit"), Var("x")]), Var("x")])
    return Bind(c(FOL, "forall"), [VarDecl("x", IOTA)], body)
