"""Command-line front end: ``mmt check|flatten|get|deps|catalog``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

from .ast import Document, owner
from .check import Diagnostic, Level
from .errors import DocumentRejected, MalformedUri, MmtError, NotFound, XmlSyntax
from .flatten import flatten_graph, flatten_structure
from .foundations import make_foundation
from .ids import as_id
from .library import Catalog, Library
from .xmlio import declaration_xml, write_document

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    catalog: Optional[str] = None
    load: list[str] = field(default_factory=list)
    json: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", help="catalog file (default: $MMT_CATALOG)")
    common.add_argument("--load", action="append", default=[], metavar="FILE", help="document to load first")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = _Parser(prog="mmt", description="Check, flatten and query MMT theory graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="validate documents")
    c.add_argument("files", nargs="+")
    c.add_argument("--level", choices=[lv.value for lv in Level], default="structural")
    c.add_argument("--foundation", choices=["structural", "openmath", "lf"], default="structural")

    f = sub.add_parser("flatten", parents=[common], help="flatten a document")
    f.add_argument("file")
    f.add_argument("--out", help="output file (default: stdout)")
    f.add_argument("--structure", metavar="URI", help="eliminate only this structure")
    f.add_argument("--no-normalize", action="store_true", help="keep induced declarations unnormalized")

    g = sub.add_parser("get", parents=[common], help="atomic query")
    g.add_argument("uri")

    d = sub.add_parser("deps", parents=[common], help="dependency closure of a module")
    d.add_argument("uri")
    d.add_argument("--self-contained", action="store_true", help="emit a document with the whole closure")

    k = sub.add_parser("catalog", parents=[common], help="show catalog rules or locate URIs")
    k.add_argument("--file", help="catalog file")
    k.add_argument("uris", nargs="*")
    return p


def _catalog(path: Optional[str]) -> Catalog:
    return Catalog.load(path) if path else Catalog.from_env()


def _report(diags: list[Diagnostic], as_json: bool) -> None:
    if as_json:
        json.dump([d.as_dict() for d in diags], sys.stdout, indent=2, ensure_ascii=False)
        sys.stdout.write("\n")
    for d in diags:
        print(d.render(), file=sys.stderr)


def _library(cfg: RunConfig, level: Level = Level.STRUCTURAL, foundation=None) -> tuple[Library, list[Diagnostic]]:
    lib = Library(_catalog(cfg.catalog))
    if foundation is not None:
        lib.foundation = foundation
    diags: list[Diagnostic] = []
    for path in cfg.load:
        diags += lib.load(path, level)
    return lib, diags


def _ensure_loaded(lib: Library, doc_uri: str) -> None:
    if lib.document(doc_uri) is not None:
        return
    loc = lib.catalog.locate(doc_uri)
    if loc is not None and "://" not in loc:
        lib.load(loc)


def cmd_check(args, cfg: RunConfig) -> int:
    level = Level(args.level)
    foundation = make_foundation(args.foundation)
    diags: list[Diagnostic] = []
    try:
        lib, diags = _library(cfg, level, foundation)
        for path in args.files:
            diags += lib.load(path, level)
    except DocumentRejected as exc:
        diags += exc.diagnostics or [Diagnostic("rejected", "", str(exc))]
    except XmlSyntax as exc:
        diags.append(Diagnostic("xml", "", str(exc)))
    except MmtError as exc:
        diags.append(Diagnostic(type(exc).__name__, "", str(exc)))
    _report(diags, cfg.json)
    return EXIT_DIAGNOSTICS if any(d.level == "error" for d in diags) else EXIT_OK


def cmd_flatten(args, cfg: RunConfig) -> int:
    from .xmlio import read_file

    lib, _ = _library(cfg)
    doc, _ = read_file(args.file, lib.graph)
    lib.add_document(doc)
    graph = lib.graph
    if args.structure:
        target = as_id(args.structure)
        theory = owner(target, {m.id for m in graph.modules})
        if theory is None or theory == target:
            raise NotFound(f"{target} does not name a structure")
        result = flatten_structure(graph, theory, target.module[len(theory.module):])
    else:
        result = flatten_graph(graph, normalized=not args.no_normalize)
    context = {m.id for m in graph.modules} - {m.id for m in doc.modules}
    out = Document(doc.uri, [m for m in result.modules if m.id not in context])
    text = write_document(out)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_get(args, cfg: RunConfig) -> int:
    lib, _ = _library(cfg)
    ident = as_id(args.uri)
    _ensure_loaded(lib, ident.doc)
    result = lib.atomic_query(ident)
    sys.stdout.write(declaration_xml(result))
    return EXIT_OK


def cmd_deps(args, cfg: RunConfig) -> int:
    lib, _ = _library(cfg)
    ident = as_id(args.uri)
    _ensure_loaded(lib, ident.doc)
    if args.self_contained:
        sys.stdout.write(write_document(lib.self_contained(ident)))
        return EXIT_OK
    closure = [str(m) for m in lib.deps_closure(ident)]
    if cfg.json:
        print(json.dumps(closure, indent=2, ensure_ascii=False))
    else:
        print("\n".join(closure))
    return EXIT_OK


def cmd_catalog(args, cfg: RunConfig) -> int:
    cat = _catalog(args.file or cfg.catalog)
    if args.uris:
        rows = {u: cat.locate(u) for u in args.uris}
        if cfg.json:
            print(json.dumps(rows, indent=2, ensure_ascii=False))
        else:
            for u, loc in rows.items():
                print(f"{u}\t{loc if loc is not None else '-'}")
        return EXIT_OK if all(v is not None for v in rows.values()) else EXIT_DIAGNOSTICS
    if cfg.json:
        print(json.dumps([[r.prefix, r.location] for r in cat.rules], indent=2, ensure_ascii=False))
    else:
        for r in cat.rules:
            print(f"PREFIX {r.prefix} {r.location}")
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "flatten": cmd_flatten,
    "get": cmd_get,
    "deps": cmd_deps,
    "catalog": cmd_catalog,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    cfg = RunConfig(catalog=args.catalog, load=list(args.load), json=args.json)
    try:
        return COMMANDS[args.command](args, cfg)
    except OSError as exc:
        print(f"mmt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, MalformedUri) as exc:
        print(f"mmt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DocumentRejected as exc:
        _report(exc.diagnostics or [Diagnostic("rejected", "", str(exc))], False)
        return EXIT_DIAGNOSTICS
    except MmtError as exc:
        print(f"mmt: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS


if __name__ == "__main__":
    sys.exit(main())
