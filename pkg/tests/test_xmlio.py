import xml.etree.ElementTree as ET

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mmt import examples as ex
from mmt.ast import (
    FILTERED,
    App,
    Bind,
    ConAss,
    Const,
    ConstantDecl,
    Document,
    Ident,
    Link,
    MorphApp,
    StructureDecl,
    TheoryDecl,
    TheoryGraph,
    Var,
    VarDecl,
    ViewDecl,
    comp,
)
from mmt.errors import UnresolvableReference, XmlSyntax
from mmt.ids import Identifier
from mmt.randomgraph import GenConfig
from mmt.xmlio import (
    MATHML_NS,
    MMT_BASE,
    declaration_xml,
    read_document,
    read_file,
    term_element,
    write_document,
    write_file,
)

import corpus

DOC = "http://example.org/alg"
HEAD = f'<omdoc xmlns="http://www.omdoc.org/ns/omdoc" xmlns:m="{MATHML_NS}" base="{DOC}">'
MMT = f'base="{MMT_BASE}" cd="mmt"'
M = Identifier(DOC, ("M",))
G = Identifier(DOC, ("G",))


def roundtrip(doc, context=None):
    back, warnings = read_document(write_document(doc), context)
    assert warnings == []
    return back


def _read(body: str, context=None):
    return read_document(HEAD + body + "</omdoc>", context)


# --- round trips ---------------------------------------------------------------------


@pytest.mark.parametrize("make", [ex.lf_document, ex.fol_document, ex.algebra_document])
def test_example_documents_roundtrip(make):
    doc = make()
    back = roundtrip(doc)
    assert back == doc
    assert write_document(back) == write_document(doc)


def test_random_graphs_roundtrip():
    cfg = GenConfig()
    for tg in corpus.graphs():
        doc = Document(cfg.doc, list(tg.modules))
        assert roundtrip(doc) == doc


def test_modules_from_other_documents_keep_their_base():
    doc = Document(DOC, [ex.monoid(), TheoryDecl(M, None, [ConstantDecl("c")])])
    text = write_document(doc)
    assert f'base="{ex.ALG_DOC}"' in text
    assert roundtrip(doc) == doc


def test_file_roundtrip(tmp_path):
    path = tmp_path / "alg.omdoc"
    write_file(ex.algebra_document(), path)
    doc, warnings = read_file(path)
    assert warnings == [] and doc == ex.algebra_document()


segments = st.text(alphabet="abcxyz?#[]@%é ", min_size=1, max_size=5).filter(lambda s: s.strip() == s)
names = st.lists(segments, min_size=1, max_size=3).map(tuple)


@given(st.lists(names, min_size=1, max_size=3, unique=True))
def test_reserved_characters_in_names_roundtrip(parts):
    decls = [ConstantDecl(p) for p in parts]
    body = App(Const(M.at(decls[0].name)), tuple(Const(M.at(d.name)) for d in decls))
    doc = Document(DOC, [TheoryDecl(M, None, decls + [ConstantDecl("use", None, body)])])
    assert roundtrip(doc) == doc


def test_terms_of_every_shape_roundtrip():
    c = Const(M.sym("comp"))
    u = Const(M.sym("unit"))
    terms = [
        FILTERED,
        App(c, (u, Var("x"))),
        Bind(c, (VarDecl("x"), VarDecl("y", u), VarDecl("z", None, u), VarDecl("w", u, u)), Var("x")),
        MorphApp(u, Link(G.child("mon"))),
        MorphApp(u, comp(Link(G.child("mon")), Ident(G))),
    ]
    mods = [
        TheoryDecl(M, None, [ConstantDecl("comp"), ConstantDecl("unit")]),
        TheoryDecl(G, None, [ConstantDecl(f"t{i}", None, t) for i, t in enumerate(terms)]),
    ]
    doc = Document(DOC, mods)
    assert roundtrip(doc) == doc


# --- encoding details ------------------------------------------------------------------


def test_constant_is_a_csymbol():
    e = term_element(ex.c(ex.CGROUP, "mon/comp"))
    assert e.tag == f"{{{MATHML_NS}}}csymbol"
    assert e.attrib == {"base": ex.ALG_DOC, "cd": "CGroup"}
    assert e.text == "mon/comp"


def test_bvar_without_annotations_has_no_semantics_wrapper():
    e = term_element(Bind(ex.c(M, "comp"), (VarDecl("x"),), Var("x")))
    bvar = e[1]
    assert [k.tag for k in bvar] == [f"{{{MATHML_NS}}}ci"]
    typed = term_element(Bind(ex.c(M, "comp"), (VarDecl("x", ex.IOTA),), Var("x")))
    assert [k.tag for k in typed[1]] == [f"{{{MATHML_NS}}}semantics"]


def test_declaration_xml_fragments():
    assert declaration_xml(ConAss("comp", ex.c(ex.INTEGERS, "+"))).startswith("<conass")
    assert "<structure" in declaration_xml(ex.cgroup().body[0])
    assert "<view" in declaration_xml(ex.v1())
    assert declaration_xml(ex.lf_document()) == write_document(ex.lf_document())
    with pytest.raises(TypeError):
        declaration_xml(42)


# --- relative references ---------------------------------------------------------------


def test_relative_references_resolve_against_their_position():
    doc, warnings = _read(f"""
      <theory name="M">
        <constant name="comp"/>
        <constant name="unit"/>
        <constant name="sq"><definition><m:apply>
          <m:csymbol>comp</m:csymbol>
          <m:csymbol cd="M">unit</m:csymbol>
          <m:csymbol base="{DOC}" cd="M">unit</m:csymbol>
        </m:apply></definition></constant>
      </theory>
      <theory name="G">
        <structure name="mon" from="?M"/>
        <constant name="e"><definition><m:apply>
          <m:csymbol {MMT} name="morphism-application"/>
          <m:csymbol>unit</m:csymbol>
          <m:csymbol cd="G/mon"/>
        </m:apply></definition></constant>
      </theory>
      <view name="v" from="?M" to="?G"><conass name="comp"><m:csymbol>e</m:csymbol></conass></view>
    """)
    assert warnings == []
    m, g, v = doc.modules
    unit = Const(M.sym("unit"))
    assert m.body[2].definition == App(Const(M.sym("comp")), (unit, unit))
    assert g.body[0].domain == M
    # the term under a morphism application is read relative to the morphism's domain
    assert g.body[1].definition == MorphApp(unit, Link(G.child("mon")))
    # assignments are read relative to the codomain
    assert v.assignments == (ConAss("comp", Const(G.sym("e"))),)


def test_composition_components_resolve_against_the_next_domain():
    ctx = TheoryGraph([
        TheoryDecl(M, None, [ConstantDecl("c")]),
        TheoryDecl(G, None, [StructureDecl("s", M)]),
        TheoryDecl(Identifier(DOC, ("H",)), None, [StructureDecl("t", G)]),
    ])
    doc, _ = _read(f"""
      <theory name="K">
        <constant name="k"><definition><m:apply>
          <m:csymbol {MMT} name="morphism-application"/>
          <m:csymbol>c</m:csymbol>
          <m:apply><m:csymbol {MMT} name="composition"/><m:csymbol cd="G/s"/><m:csymbol cd="H/t"/></m:apply>
        </m:apply></definition></constant>
      </theory>
    """, ctx)
    d = doc.modules[0].body[0].definition
    assert d == MorphApp(Const(M.sym("c")), comp(Link(G.child("s")), Link(Identifier(DOC, ("H", "t")))))


def test_bvar_annotations_are_read():
    doc, warnings = _read(f"""
      <theory name="M"><constant name="c"/>
        <constant name="d"><definition><m:bind>
          <m:csymbol>c</m:csymbol>
          <m:bvar><m:ci>x</m:ci></m:bvar>
          <m:bvar><m:semantics><m:ci name="y"/>
            <m:annotation-xml {MMT} name="type"><m:csymbol>c</m:csymbol></m:annotation-xml>
            <m:annotation-xml {MMT} name="value"><m:ci>x</m:ci></m:annotation-xml>
            <m:annotation-xml {MMT} name="colour"><m:ci>x</m:ci></m:annotation-xml>
          </m:semantics></m:bvar>
          <m:ci>y</m:ci>
        </m:bind></definition></constant>
      </theory>
    """)
    c = Const(M.sym("c"))
    assert doc.modules[0].body[1].definition == Bind(c, (VarDecl("x"), VarDecl("y", c, Var("x"))), Var("y"))
    assert [w.message for w in warnings] == ["unknown annotation ignored"]


def test_unknown_elements_warn():
    doc, warnings = _read("""
      <theory name="M"><constant name="c"><note/></constant><remark/></theory>
      <view name="v" from="?M" to="?M"><foo/></view>
      <bar/>
    """)
    assert len(doc.modules) == 2
    assert len(warnings) == 4 and all(w.level == "warning" for w in warnings)


@pytest.mark.parametrize("text", [
    "<omdoc",
    "<theory/>",
    '<omdoc xmlns="http://www.omdoc.org/ns/omdoc" base="relative"/>',
    HEAD + "<theory/></omdoc>",
    HEAD + '<view name="v" from="?M"/></omdoc>',
    HEAD + '<theory name="M"><constant name="c"><type/></constant></theory></omdoc>',
    HEAD + '<theory name="M"><constant name="c"><type><m:apply/></type></constant></theory></omdoc>',
    HEAD + '<theory name="M"><constant name="c"><type><m:foo/></type></constant></theory></omdoc>',
    HEAD + '<theory name="?M"/></omdoc>',
])
def test_malformed_documents(text):
    with pytest.raises(XmlSyntax):
        read_document(text)


def test_unresolvable_morphism_domain():
    with pytest.raises(UnresolvableReference):
        _read(f"""
          <theory name="K"><constant name="k"><definition><m:apply>
            <m:csymbol {MMT} name="morphism-application"/>
            <m:csymbol>c</m:csymbol>
            <m:csymbol cd="Nowhere/s"/>
          </m:apply></definition></constant></theory>
        """)


def test_written_references_are_absolute():
    root = ET.fromstring(write_document(ex.algebra_document()))
    for e in root.iter(f"{{{MATHML_NS}}}csymbol"):
        assert "://" in e.get("base")


def test_views_with_definitions_and_filtering_roundtrip():
    doc = Document(DOC, [
        TheoryDecl(M, None, [ConstantDecl("c"), ConstantDecl("d")]),
        ViewDecl(Identifier(DOC, ("v",)), M, M, None, [ConAss("c", FILTERED)]),
        ViewDecl(Identifier(DOC, ("w",)), M, M, None, (), Link(Identifier(DOC, ("v",)))),
    ])
    assert roundtrip(doc) == doc
