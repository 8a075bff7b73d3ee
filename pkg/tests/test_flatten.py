import time

import pytest

from mmt import examples as ex
from mmt.ast import (
    FILTERED,
    ConAss,
    Const,
    ConstantDecl,
    Ident,
    Link,
    StructureDecl,
    TheoryDecl,
    TheoryGraph,
    ViewDecl,
    is_flat,
)
from mmt.check import check_graph
from mmt.elaborate import Elaborator
from mmt.errors import IllFormed
from mmt.flatten import (
    differences,
    flatten_all_structures,
    flatten_graph,
    flatten_structure,
    next_structure,
    semantically_equivalent,
    structurally_equivalent,
)
from mmt.foundations import OPENMATH, make_foundation
from mmt.ids import Identifier
from mmt.normalize import normalize

import corpus
from oracles import eager_elaboration, expected_flat_running_example

LF = make_foundation("lf")


def _body(tg, ident):
    return next(m for m in tg.modules if m.id == ident)


def _shape(tg):
    theories = [m for m in tg.modules if isinstance(m, TheoryDecl)]
    views = [m for m in tg.modules if isinstance(m, ViewDecl)]
    return (
        sum(len(m.body) for m in theories if m.id != ex.LF and m.id != ex.FOL),
        sum(1 for v in views if v.definition is None and v.assignments),
        sum(1 for v in views if v.definition is not None),
    )


# --- the running example -----------------------------------------------------------


def test_golden_flattening():
    started = time.perf_counter()
    flat = flatten_graph(ex.running_example(with_views=False))
    assert time.perf_counter() - started < 1
    assert differences(flat, expected_flat_running_example()) == []


def test_hand_encoding_has_expected_shape():
    assert _shape(expected_flat_running_example()) == (10, 3, 1)
    assert _shape(flatten_graph(ex.running_example(with_views=False))) == (10, 3, 1)


def test_flat_output_is_flat_and_valid():
    tg = ex.running_example()
    flat = flatten_graph(tg)
    assert not is_flat(tg)
    assert is_flat(flat)
    assert is_flat(TheoryGraph([]))
    assert check_graph(flat, LF) == []
    assert semantically_equivalent(tg, flat)
    assert structurally_equivalent(tg, flat)


def test_flatten_keeps_meta_theories():
    flat = flatten_graph(ex.running_example())
    assert _body(flat, ex.RING).meta == ex.FOL
    assert _body(flat, ex.FOL).meta == ex.LF


def test_constant_count_matches_elaboration():
    tg = ex.running_example()
    el = Elaborator(tg)
    flat = flatten_graph(tg)
    for t in el.theories():
        assert [d.name for d in _body(flat, t).body] == el.constant_names(t)


def test_unnormalized_flattening_is_still_equivalent():
    tg = ex.running_example()
    raw = flatten_graph(tg, normalized=False)
    assert semantically_equivalent(raw, flatten_graph(tg))


def test_flattening_shared_constants():
    tg = ex.sharing_example()
    flat = flatten_graph(tg)
    ring = {d.name: d for d in _body(flat, ex.RING).body}
    assert ring[("mult", "univ")].definition == Const(ex.RING.sym("add/mon/univ"))
    assert ring[("add", "mon", "univ")].definition is None
    # brute force: every constant and its definition as computed eagerly
    constants, names, _, _ = eager_elaboration(tg)
    el = Elaborator(tg)
    for t, ns in names.items():
        assert [d.name for d in _body(flat, t).body] == ns
        for d in _body(flat, t).body:
            expected = constants[(t, d.name)][1]
            assert d.definition == (None if expected is None else normalize(el, expected))


def test_filtering_is_kept():
    tg = TheoryGraph([
        TheoryDecl(ex.MONOID, None, [ConstantDecl("comp"), ConstantDecl("unit")]),
        TheoryDecl(ex.INTEGERS, None, [ConstantDecl("0"), ConstantDecl("d", None, ex.c(ex.INTEGERS, "0"))]),
        ViewDecl(ex.V1, ex.MONOID, ex.INTEGERS, None, [ConAss("unit", ex.c(ex.INTEGERS, "0"))]),
    ])
    assert check_graph(tg, OPENMATH) == []
    view = _body(flatten_graph(tg), ex.V1)
    assert ConAss("comp", FILTERED) in view.assignments


def test_equivalence_detects_changes():
    tg = ex.running_example()
    mods = list(tg.modules)
    k = mods.index(_body(tg, ex.INTEGERS))
    changed = TheoryDecl(ex.INTEGERS, ex.FOL, [ConstantDecl("0", ex.O), *mods[k].body[1:]])
    smaller = TheoryDecl(ex.INTEGERS, ex.FOL, mods[k].body[:2])
    assert structurally_equivalent(tg, TheoryGraph(mods[:k] + [changed] + mods[k + 1:]))
    assert not semantically_equivalent(tg, TheoryGraph(mods[:k] + [changed] + mods[k + 1:]))
    assert not structurally_equivalent(tg, TheoryGraph(mods[:k] + [smaller] + mods[k + 1:]))


# --- incremental flattening -------------------------------------------------------


def test_flatten_cgroup_mon_only():
    tg = ex.running_example()
    out = flatten_structure(tg, ex.CGROUP, "mon")
    names = [d.name for d in _body(out, ex.CGROUP).body]
    assert names == [("mon", "comp"), ("mon", "unit"), ("inv",)]
    assert _body(out, ex.RING) == _body(tg, ex.RING)
    view = _body(out, ex.CGROUP_MON)
    assert isinstance(view, ViewDecl) and view.meta_morphism == Ident(ex.FOL)
    assert check_graph(out, LF) == []
    # Ring imports CGroup, so the link Ring/add/mon it induced through the
    # structure is gone; every constant and assignment is unchanged.
    assert differences(out, tg) == [f"links differ: ['{ex.RING_ADD_MON}']"]
    without_ring = TheoryGraph([m for m in tg.modules if m.id != ex.RING])
    assert semantically_equivalent(flatten_structure(without_ring, ex.CGROUP, "mon"), without_ring)


def test_flatten_ring_add_without_recursing():
    tg = ex.running_example()
    out = flatten_structure(tg, ex.RING, ("add",))
    body = _body(out, ex.RING).body
    assert [type(d).__name__ for d in body] == ["StructureDecl", "ConstantDecl", "StructureDecl"]
    assert body[0].name == ("add", "mon") and body[0].domain == ex.MONOID
    assert body[1].name == ("add", "inv")
    assert check_graph(out, LF) == []
    assert semantically_equivalent(out, tg)


def test_flatten_structure_rejects_non_structures():
    tg = ex.running_example()
    with pytest.raises(IllFormed):
        flatten_structure(tg, ex.RING, "nope")
    defined = TheoryGraph(list(tg.modules) + [
        TheoryDecl(Identifier(ex.ALG_DOC, ("R2",)), ex.FOL, [
            StructureDecl("m", ex.MONOID, definition=Link(ex.RING_MULT)),
        ]),
    ])
    with pytest.raises(IllFormed):
        flatten_structure(defined, defined.modules[-1].id, "m")


def test_flatten_all_structures_matches_flatten_graph():
    for tg in (ex.running_example(), ex.sharing_example()):
        stepwise = flatten_all_structures(tg)
        assert next_structure(stepwise) is None
        assert semantically_equivalent(stepwise, flatten_graph(tg))
        assert check_graph(stepwise, LF) == []


# --- the property corpus ------------------------------------------------------------


def test_corpus_flattening_is_valid_and_idempotent():
    failures = []
    for i, tg in enumerate(corpus.graphs()):
        flat = flatten_graph(tg)
        problems = (
            check_graph(flat, OPENMATH)
            or differences(flat, tg)
            or differences(flatten_graph(flat), flat)
            or ([] if is_flat(flat) else ["not flat"])
        )
        if problems:
            failures.append((i, problems))
    assert failures == []


def test_corpus_incremental_flattening():
    failures = []
    for i, tg in enumerate(corpus.graphs()):
        out = flatten_all_structures(tg)
        problems = check_graph(out, OPENMATH) or differences(out, tg)
        if problems:
            failures.append((i, problems))
    assert failures == []


def test_equivalent_graphs_accept_the_same_extensions():
    # Extending a graph and its flattening with the same view gives the same verdict.
    tested = 0
    for tg in corpus.graphs():
        *prefix, last = tg.modules
        if not isinstance(last, ViewDecl) or last.definition is not None:
            continue
        flat_prefix = list(flatten_graph(TheoryGraph(prefix)).modules)
        assert check_graph(TheoryGraph(flat_prefix + [last]), OPENMATH) == []
        broken = ViewDecl(last.id, last.domain, last.codomain, None,
                          tuple(last.assignments) + (ConAss("no_such_constant", FILTERED),))
        assert check_graph(TheoryGraph(prefix + [broken]), OPENMATH)
        assert check_graph(TheoryGraph(flat_prefix + [broken]), OPENMATH)
        tested += 1
    assert tested >= 10
