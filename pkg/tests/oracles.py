"""Independent reference computations used as test oracles.

``eager_elaboration`` builds every induced constant and assignment in one
forward pass over the graph, directly from the elaboration rules, without
memoized on-demand lookup.  ``expected_flat_running_example`` is a hand
encoding of the flattened running example.
"""

from __future__ import annotations

from mmt import examples as ex
from mmt.ast import (
    FILTERED,
    ConAss,
    Const,
    ConstantDecl,
    Ident,
    Link,
    MorphApp,
    StrAss,
    TheoryDecl,
    TheoryGraph,
    ViewDecl,
    comp,
)

NO_ASSIGNMENT = object()


def eager_elaboration(tg: TheoryGraph):
    """Return (constants, names, links, assignments) tables.

    constants: (T, c) -> (type, definition)
    names: T -> ordered constant names
    links: l -> (domain, codomain)
    assignments: (l, c) -> term or NO_ASSIGNMENT, for every constant c of the domain
    """
    constants, names, links, assignments = {}, {}, {}, {}
    structures = {}  # T -> ordered structure names (declared and induced)

    def assign_all(l, dom, cod, kind, sigma, definition, home_path=None):
        links[l] = (dom, cod)
        by_name = {}
        for a in sigma:
            by_name.setdefault(a.name, a)
        for c in names[dom]:
            defined = constants[(dom, c)][1] is not None
            if definition is not None:
                assignments[(l, c)] = NO_ASSIGNMENT if defined else MorphApp(Const(dom.at(c)), definition)
                continue
            a = by_name.get(c)
            if isinstance(a, ConAss):
                assignments[(l, c)] = a.term
                continue
            strass = None
            for k in range(len(c) - 1, 0, -1):
                if isinstance(by_name.get(c[:k]), StrAss):
                    strass = (k, by_name[c[:k]])
                    break
            if defined:
                assignments[(l, c)] = NO_ASSIGNMENT
            elif strass is not None:
                k, sa = strass
                inner_dom = links[dom.child(*sa.name)][0]
                assignments[(l, c)] = MorphApp(Const(inner_dom.at(c[k:])), sa.morphism)
            elif kind == "structure":
                assignments[(l, c)] = Const(cod.at(home_path + c))
            else:
                assignments[(l, c)] = FILTERED

    for mod in tg.modules:
        if isinstance(mod, ViewDecl):
            assign_all(mod.id, mod.domain, mod.codomain, "view", mod.assignments, mod.definition)
            continue
        t = mod.id
        names[t], structures[t] = [], []
        for d in mod.body:
            if isinstance(d, ConstantDecl):
                constants[(t, d.name)] = (d.type, d.definition)
                names[t].append(d.name)
                continue
            s = d.domain
            l = t.child(*d.name)
            assign_all(l, s, t, "structure", d.assignments, d.definition, d.name)
            structures[t].append(d.name)
            for h in structures[s]:
                induced = t.child(*(d.name + h))
                inner = s.child(*h)
                assign_all(induced, links[inner][0], t, "structure", (), comp(Link(inner), Link(l)))
                structures[t].append(d.name + h)
            for c in names[s]:
                tp, df = constants[(s, c)]
                new_tp = None if tp is None else MorphApp(tp, Link(l))
                if df is not None:
                    new_df = MorphApp(df, Link(l))
                else:
                    a = assignments[(l, c)]
                    new_df = None if a == Const(t.at(d.name + c)) else a
                constants[(t, d.name + c)] = (new_tp, new_df)
                names[t].append(d.name + c)
    return constants, names, links, assignments


def expected_flat_running_example() -> TheoryGraph:
    """The flattened running example (without the views into the integers), by hand.

    Types are the normal forms of the declared types.
    """
    e, fol = ex.ALG_DOC, ex.FOL
    iota = ex.IOTA
    binop = ex.arrow(iota, iota, iota)
    unop = ex.arrow(iota, iota)

    def k(theory, path):
        return Const(theory.sym(path))

    monoid = TheoryDecl(ex.MONOID, fol, (ConstantDecl("comp", binop), ConstantDecl("unit", iota)))
    cgroup = TheoryDecl(ex.CGROUP, fol, (
        ConstantDecl("mon/comp", binop), ConstantDecl("mon/unit", iota), ConstantDecl("inv", unop),
    ))
    cgroup_mon = ViewDecl(ex.CGROUP_MON, ex.MONOID, ex.CGROUP, Ident(fol), (
        ConAss("comp", k(ex.CGROUP, "mon/comp")),
        ConAss("unit", k(ex.CGROUP, "mon/unit")),
    ))
    ring = TheoryDecl(ex.RING, fol, (
        ConstantDecl("add/mon/comp", binop), ConstantDecl("add/mon/unit", iota), ConstantDecl("add/inv", unop),
        ConstantDecl("mult/comp", binop), ConstantDecl("mult/unit", iota),
    ))
    ring_add = ViewDecl(ex.RING_ADD, ex.CGROUP, ex.RING, Ident(fol), (
        ConAss("mon/comp", k(ex.RING, "add/mon/comp")),
        ConAss("mon/unit", k(ex.RING, "add/mon/unit")),
        ConAss("inv", k(ex.RING, "add/inv")),
    ))
    ring_mult = ViewDecl(ex.RING_MULT, ex.MONOID, ex.RING, Ident(fol), (
        ConAss("comp", k(ex.RING, "mult/comp")),
        ConAss("unit", k(ex.RING, "mult/unit")),
    ))
    ring_add_mon = ViewDecl(ex.RING_ADD_MON, ex.MONOID, ex.RING, None, (),
                            comp(Link(ex.CGROUP_MON), Link(ex.RING_ADD)))
    assert e == ex.MONOID.doc
    return TheoryGraph([
        ex.lf_theory(), ex.fol_theory(),
        monoid, cgroup, cgroup_mon, ring, ring_add, ring_mult, ring_add_mon,
    ])
