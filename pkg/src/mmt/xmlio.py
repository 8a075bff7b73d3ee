"""OMDoc/MathML serialization of documents.

Identifiers are written as ``<m:csymbol base=g cd=module>symbol</m:csymbol>``
(always absolute on output).  On input, references may be relative; they
are resolved against the base identifier of their position.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from typing import Optional

from .ast import (
    FILTERED,
    App,
    Bind,
    ConAss,
    Const,
    ConstantDecl,
    Document,
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
    VarDecl,
    ViewDecl,
    chain,
    comp,
)
from .check import Diagnostic, morphism_type
from .elaborate import ElaborationErrors, Elaborator
from .errors import IllFormed, MalformedUri, NoModuleContext, UnresolvableReference, XmlSyntax
from .ids import Identifier, encode_path, parse, parse_path, resolve

OMDOC_NS = "http://www.omdoc.org/ns/omdoc"
MATHML_NS = "http://www.w3.org/1998/Math/MathML"
MMT_BASE = "http://cds.omdoc.org/omdoc/mmt.omdoc"
MMT_CD = "mmt"

ET.register_namespace("", OMDOC_NS)
ET.register_namespace("m", MATHML_NS)


def _o(tag: str) -> str:
    return f"{{{OMDOC_NS}}}{tag}"


def _m(tag: str) -> str:
    return f"{{{MATHML_NS}}}{tag}"


# --- writing ---------------------------------------------------------------------


def _mmt_symbol(name: str) -> ET.Element:
    return ET.Element(_m("csymbol"), {"base": MMT_BASE, "cd": MMT_CD, "name": name})


def _module_ref(ident: Identifier) -> ET.Element:
    return ET.Element(_m("csymbol"), {"base": ident.doc, "cd": encode_path(ident.module)})


def term_element(t: Term) -> ET.Element:
    if isinstance(t, Filtered):
        return _mmt_symbol("filtered")
    if isinstance(t, Const):
        e = ET.Element(_m("csymbol"), {"base": t.id.doc, "cd": encode_path(t.id.module)})
        e.text = encode_path(t.id.symbol)
        return e
    if isinstance(t, Var):
        e = ET.Element(_m("ci"))
        e.text = t.name
        return e
    if isinstance(t, App):
        e = ET.Element(_m("apply"))
        e.extend(term_element(x) for x in (t.head,) + t.args)
        return e
    if isinstance(t, MorphApp):
        e = ET.Element(_m("apply"))
        e.extend([_mmt_symbol("morphism-application"), term_element(t.term), morphism_element(t.morphism)])
        return e
    if isinstance(t, Bind):
        e = ET.Element(_m("bind"))
        e.append(term_element(t.binder))
        for d in t.context:
            e.append(_bvar(d))
        e.append(term_element(t.scope))
        return e
    raise TypeError(f"not a term: {t!r}")


def _bvar(d: VarDecl) -> ET.Element:
    bv = ET.Element(_m("bvar"))
    if d.type is None and d.definition is None:
        ci = ET.SubElement(bv, _m("ci"))
        ci.text = d.name
        return bv
    sem = ET.SubElement(bv, _m("semantics"))
    ET.SubElement(sem, _m("ci"), {"name": d.name})
    for key, part in (("type", d.type), ("value", d.definition)):
        if part is not None:
            ann = ET.SubElement(sem, _m("annotation-xml"), {"base": MMT_BASE, "cd": MMT_CD, "name": key})
            ann.append(term_element(part))
    return bv


def morphism_element(m: Morphism) -> ET.Element:
    atoms = chain(m)
    if len(atoms) > 1:
        e = ET.Element(_m("apply"))
        e.append(_mmt_symbol("composition"))
        e.extend(morphism_element(a) for a in atoms)
        return e
    if isinstance(m, Link):
        return _module_ref(m.link)
    if isinstance(m, Ident):
        e = ET.Element(_m("apply"))
        e.extend([_mmt_symbol("identity"), _module_ref(m.theory)])
        return e
    raise TypeError(f"not a morphism: {m!r}")


def _wrap(tag: str, child: ET.Element) -> ET.Element:
    e = ET.Element(_o(tag))
    e.append(child)
    return e


def _assignment_element(a) -> ET.Element:
    if isinstance(a, ConAss):
        e = ET.Element(_o("conass"), {"name": encode_path(a.name)})
        e.append(term_element(a.term))
    else:
        e = ET.Element(_o("strass"), {"name": encode_path(a.name)})
        e.append(morphism_element(a.morphism))
    return e


def _link_body(e: ET.Element, meta: Optional[Morphism], assignments, definition: Optional[Morphism]) -> None:
    if definition is not None:
        e.append(_wrap("definition", morphism_element(definition)))
        return
    if meta is not None:
        e.append(_wrap("include", morphism_element(meta)))
    e.extend(_assignment_element(a) for a in assignments)


def symbol_element(d) -> ET.Element:
    if isinstance(d, ConstantDecl):
        c = ET.Element(_o("constant"), {"name": encode_path(d.name)})
        if d.type is not None:
            c.append(_wrap("type", term_element(d.type)))
        if d.definition is not None:
            c.append(_wrap("definition", term_element(d.definition)))
        return c
    s = ET.Element(_o("structure"), {"name": encode_path(d.name), "from": str(d.domain)})
    _link_body(s, d.meta_morphism, d.assignments, d.definition)
    return s


def module_element(mod, doc_uri: str) -> ET.Element:
    attrs = {"name": encode_path(mod.id.module)}
    if mod.id.doc != doc_uri:
        attrs["base"] = mod.id.doc
    if isinstance(mod, TheoryDecl):
        if mod.meta is not None:
            attrs["meta"] = str(mod.meta)
        e = ET.Element(_o("theory"), attrs)
        e.extend(symbol_element(d) for d in mod.body)
        return e
    attrs.update({"from": str(mod.domain), "to": str(mod.codomain)})
    e = ET.Element(_o("view"), attrs)
    _link_body(e, mod.meta_morphism, mod.assignments, mod.definition)
    return e


def document_element(doc: Document) -> ET.Element:
    root = ET.Element(_o("omdoc"), {"base": doc.uri})
    root.extend(module_element(m, doc.uri) for m in doc.modules)
    return root


def write_document(doc: Document) -> str:
    root = document_element(doc)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


def declaration_xml(decl) -> str:
    """Serialize any single query result: document, module, symbol or assignment."""
    if isinstance(decl, Document):
        return write_document(decl)
    if isinstance(decl, (TheoryDecl, ViewDecl)):
        e = module_element(decl, "")
    elif isinstance(decl, (ConstantDecl, StructureDecl)):
        e = symbol_element(decl)
    elif isinstance(decl, (ConAss, StrAss)):
        e = _assignment_element(decl)
    else:
        raise TypeError(f"cannot serialize {decl!r}")
    ET.indent(e)
    return ET.tostring(e, encoding="unicode") + "\n"


def write_file(doc: Document, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write('<?xml version="1.0" encoding="UTF-8"?>\n')
        fh.write(write_document(doc))


# --- reading ---------------------------------------------------------------------

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


class _Reader:
    def __init__(self, context: Optional[TheoryGraph]):
        self.context = list(context.modules) if context is not None else []
        self.done: list = []
        self.partial = None
        self.diagnostics: list[Diagnostic] = []

    def warn(self, e: ET.Element, msg: str, at: str = "") -> None:
        self.diagnostics.append(Diagnostic("xml", at or e.tag, msg, "warning"))

    # identifiers ------------------------------------------------------------

    def ref(self, base: Identifier, g: str, m: str, s: str) -> Identifier:
        try:
            module, mrel = parse_path(m)
            symbol, srel = parse_path(s)
            rel = Identifier(g, module, symbol, mrel, srel)
            if _SCHEME.match(g) and not rel.is_relative:
                return rel
            return resolve(base, rel)
        except (MalformedUri, NoModuleContext) as exc:
            raise UnresolvableReference(f"cannot resolve {g}?{m}?{s} against {base}: {exc}") from exc

    def uri_attr(self, base: Identifier, value: str) -> Identifier:
        try:
            rel = parse(value)
            return rel if rel.is_absolute else resolve(base, rel)
        except (MalformedUri, NoModuleContext) as exc:
            raise UnresolvableReference(f"cannot resolve {value!r} against {base}: {exc}") from exc

    def rebase(self, e: ET.Element, base: Identifier) -> Identifier:
        b = e.get("base")
        return base if b is None else self.uri_attr(base, b)

    def domain_of(self, m: Morphism) -> Identifier:
        mods = self.context + self.done + ([self.partial] if self.partial is not None else [])
        try:
            return morphism_type(Elaborator(TheoryGraph(mods)), m)[0]
        except (IllFormed, *ElaborationErrors) as exc:
            raise UnresolvableReference(f"cannot determine the domain of {m}: {exc}") from exc

    # terms and morphisms ------------------------------------------------------

    @staticmethod
    def _is_mmt(e: ET.Element) -> Optional[str]:
        if e.tag == _m("csymbol") and e.get("base") == MMT_BASE and (e.get("cd") or e.get("module")) == MMT_CD:
            return e.get("name") or (e.text or "").strip()
        return None

    def term(self, e: ET.Element, base: Identifier) -> Term:
        base = base if e.tag == _m("csymbol") else self.rebase(e, base)
        tag = e.tag
        if tag == _m("csymbol"):
            special = self._is_mmt(e)
            if special == "filtered":
                return FILTERED
            if special is not None:
                raise XmlSyntax(f"MMT symbol {special} is not a term")
            cd = e.get("cd") if e.get("cd") is not None else e.get("module", "")
            return Const(self.ref(base, e.get("base", ""), cd, (e.text or "").strip()))
        if tag == _m("ci"):
            return Var((e.text or e.get("name") or "").strip())
        kids = list(e)
        if tag == _m("apply"):
            if not kids:
                raise XmlSyntax("empty apply")
            if self._is_mmt(kids[0]) == "morphism-application":
                if len(kids) != 3:
                    raise XmlSyntax("morphism application needs a term and a morphism")
                m = self.morphism(kids[2], base)
                inner = base if _fully_absolute(kids[1]) else self.domain_of(m)
                return MorphApp(self.term(kids[1], inner), m)
            if len(kids) < 2:
                raise XmlSyntax("application without arguments")
            return App(self.term(kids[0], base), tuple(self.term(k, base) for k in kids[1:]))
        if tag == _m("bind"):
            if len(kids) < 2:
                raise XmlSyntax("bind needs a binder and a scope")
            binder = self.term(kids[0], base)
            ctx = []
            for bv in kids[1:-1]:
                if bv.tag != _m("bvar"):
                    self.warn(bv, f"unexpected element {bv.tag} in bind")
                    continue
                ctx.append(self.bvar(bv, base))
            return Bind(binder, tuple(ctx), self.term(kids[-1], base))
        raise XmlSyntax(f"unknown term element {tag}")

    def bvar(self, bv: ET.Element, base: Identifier) -> VarDecl:
        kids = list(bv)
        if len(kids) != 1:
            raise XmlSyntax("bvar needs exactly one child")
        k = kids[0]
        if k.tag == _m("ci"):
            return VarDecl((k.text or k.get("name") or "").strip())
        if k.tag != _m("semantics"):
            raise XmlSyntax(f"unexpected {k.tag} in bvar")
        parts = list(k)
        if not parts or parts[0].tag != _m("ci"):
            raise XmlSyntax("semantics must start with a variable")
        name = (parts[0].get("name") or parts[0].text or "").strip()
        tp = df = None
        for ann in parts[1:]:
            key = ann.get("name")
            if ann.tag != _m("annotation-xml") or key not in ("type", "value") or len(ann) != 1:
                self.warn(ann, "unknown annotation ignored")
                continue
            val = self.term(ann[0], base)
            if key == "type":
                tp = val
            else:
                df = val
        return VarDecl(name, tp, df)

    def morphism(self, e: ET.Element, base: Identifier) -> Morphism:
        if e.tag == _m("csymbol"):
            cd = e.get("cd") if e.get("cd") is not None else e.get("module", "")
            return Link(self.ref(base, e.get("base", ""), cd, ""))
        base = self.rebase(e, base)
        kids = list(e)
        if e.tag != _m("apply") or not kids:
            raise XmlSyntax(f"unknown morphism element {e.tag}")
        head = self._is_mmt(kids[0])
        if head == "identity":
            if len(kids) != 2:
                raise XmlSyntax("identity needs exactly one theory")
            t = self.morphism(kids[1], base)
            return Ident(t.link)
        if head == "composition":
            if len(kids) < 2:
                raise XmlSyntax("empty composition")
            # each component is read relative to the domain of its successor
            out = [self.morphism(kids[-1], base)]
            for k in reversed(kids[1:-1]):
                inner = base if _fully_absolute(k) else self.domain_of(comp(*out))
                out.insert(0, self.morphism(k, inner))
            return comp(*out)
        raise XmlSyntax("unknown morphism constructor")

    # declarations ---------------------------------------------------------------

    def assignments(self, e: ET.Element, base: Identifier) -> tuple:
        out = []
        for k in e:
            if k.tag == _o("conass"):
                if len(k) != 1:
                    raise XmlSyntax("conass needs exactly one term")
                out.append(ConAss(_local(k.get("name")), self.term(k[0], self.rebase(k, base))))
            elif k.tag == _o("strass"):
                if len(k) != 1:
                    raise XmlSyntax("strass needs exactly one morphism")
                out.append(StrAss(_local(k.get("name")), self.morphism(k[0], self.rebase(k, base))))
        return tuple(out)

    def link_parts(self, e: ET.Element, base: Identifier, codomain: Identifier):
        meta = definition = None
        for k in e:
            if k.tag == _o("include"):
                meta = self.morphism(_only_child(k), self.rebase(k, base))
            elif k.tag == _o("definition"):
                definition = self.morphism(_only_child(k), self.rebase(k, base))
            elif k.tag not in (_o("conass"), _o("strass")):
                self.warn(k, f"unknown element {k.tag} ignored")
        return meta, self.assignments(e, codomain), definition

    def theory(self, e: ET.Element, doc_base: Identifier) -> TheoryDecl:
        base = self.rebase(e, doc_base)
        tid = Identifier(base.doc, _local(e.get("name")))
        meta = None if e.get("meta") is None else self.uri_attr(base, e.get("meta"))
        self.partial = TheoryDecl(tid, meta, ())
        for k in e:
            if k.tag == _o("constant"):
                cb = self.rebase(k, tid)
                tp = df = None
                for part in k:
                    if part.tag == _o("type"):
                        tp = self.term(_only_child(part), self.rebase(part, cb))
                    elif part.tag == _o("definition"):
                        df = self.term(_only_child(part), self.rebase(part, cb))
                    else:
                        self.warn(part, f"unknown element {part.tag} ignored")
                decl = ConstantDecl(_local(k.get("name")), tp, df)
            elif k.tag == _o("structure"):
                sb = self.rebase(k, tid)
                dom = self.uri_attr(sb, _required(k, "from"))
                meta_m, asg, definition = self.link_parts(k, sb, sb)
                decl = StructureDecl(_local(k.get("name")), dom, meta_m, asg, definition)
            else:
                self.warn(k, f"unknown element {k.tag} ignored", str(tid))
                continue
            self.partial = TheoryDecl(tid, meta, self.partial.body + (decl,))
        th, self.partial = self.partial, None
        return th

    def view(self, e: ET.Element, doc_base: Identifier) -> ViewDecl:
        base = self.rebase(e, doc_base)
        vid = Identifier(base.doc, _local(e.get("name")))
        dom = self.uri_attr(base, _required(e, "from"))
        cod = self.uri_attr(base, _required(e, "to"))
        meta, asg, definition = self.link_parts(e, base, cod)
        return ViewDecl(vid, dom, cod, meta, asg, definition)

    def document(self, root: ET.Element) -> Document:
        if root.tag != _o("omdoc"):
            raise XmlSyntax(f"expected an omdoc root element, found {root.tag}")
        uri = root.get("base")
        if not uri or not _SCHEME.match(uri):
            raise XmlSyntax("the omdoc element needs an absolute base URI")
        doc_base = Identifier(uri)
        for k in root:
            if k.tag == _o("theory"):
                self.done.append(self.theory(k, doc_base))
            elif k.tag == _o("view"):
                self.done.append(self.view(k, doc_base))
            else:
                self.warn(k, f"unknown element {k.tag} ignored", uri)
        return Document(uri, self.done)


def _fully_absolute(e: ET.Element) -> bool:
    """Whether every reference below ``e`` carries its own absolute document."""
    for x in e.iter():
        if x.get("base") is not None and not _SCHEME.match(x.get("base")):
            return False
        if x.tag == _m("csymbol") and x.get("base") is None:
            return False
    return True


def _only_child(e: ET.Element) -> ET.Element:
    kids = list(e)
    if len(kids) != 1:
        raise XmlSyntax(f"{e.tag} needs exactly one child")
    return kids[0]


def _required(e: ET.Element, attr: str) -> str:
    v = e.get(attr)
    if v is None:
        raise XmlSyntax(f"{e.tag} lacks attribute {attr}")
    return v


def _local(name: Optional[str]):
    if not name:
        raise XmlSyntax("missing name")
    try:
        path, rel = parse_path(name)
    except MalformedUri as exc:
        raise XmlSyntax(str(exc)) from exc
    if rel:
        raise XmlSyntax(f"declaration name {name!r} must not be relative")
    return path


def read_document(text: str, context: Optional[TheoryGraph] = None) -> tuple[Document, list[Diagnostic]]:
    """Parse a document; ``context`` supplies modules it refers to (for relative references)."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise XmlSyntax(str(exc)) from exc
    r = _Reader(context)
    doc = r.document(root)
    return doc, r.diagnostics


def read_file(path, context: Optional[TheoryGraph] = None) -> tuple[Document, list[Diagnostic]]:
    with open(path, encoding="utf-8") as fh:
        return read_document(fh.read(), context)

