"""A kernel for the MMT module system: theory graphs of theories, views and structures."""

from .ast import (
    FILTERED,
    App,
    Bind,
    Comp,
    ConAss,
    Const,
    ConstantDecl,
    Document,
    Ident,
    Link,
    MorphApp,
    StrAss,
    StructureDecl,
    TheoryDecl,
    TheoryGraph,
    Var,
    VarDecl,
    ViewDecl,
    comp,
)
from .check import Checker, Diagnostic, Level, check_graph, morphisms_equal, validate
from .elaborate import Elaborator, assignment, constant, link_info, theory_body
from .errors import MmtError
from .flatten import flatten_graph, flatten_structure, semantically_equivalent, structurally_equivalent
from .foundations import LFFoundation, OpenMathFoundation, StructuralFoundation, make_foundation
from .ids import Identifier, parse, resolve
from .library import Catalog, Library
from .normalize import apply_morphism, normalize
from .xmlio import read_document, write_document

__all__ = [
    "FILTERED", "App", "Bind", "Comp", "ConAss", "Const", "ConstantDecl", "Document", "Ident", "Link",
    "MorphApp", "StrAss", "StructureDecl", "TheoryDecl", "TheoryGraph", "Var", "VarDecl", "ViewDecl", "comp",
    "Checker", "Diagnostic", "Level", "check_graph", "morphisms_equal", "validate",
    "Elaborator", "assignment", "constant", "link_info", "theory_body",
    "MmtError",
    "flatten_graph", "flatten_structure", "semantically_equivalent", "structurally_equivalent",
    "LFFoundation", "OpenMathFoundation", "StructuralFoundation", "make_foundation",
    "Identifier", "parse", "resolve",
    "Catalog", "Library",
    "apply_morphism", "normalize",
    "read_document", "write_document",
]
