"""MMT identifiers: triples of document URI, module path and symbol path.

The concrete syntax is ``g?m?s``.  Names inside the two paths are
percent-encoded for the reserved characters ``?/#[]@%``; the parsed
representation always holds decoded names, so equality is structural.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from urllib.parse import unquote_to_bytes

from .errors import MalformedUri, NoModuleContext

LocalPath = tuple[str, ...]

RESERVED = set("?/#[]@%")
# characters that may never appear raw in a URI component
_ILLEGAL = set(' "<>\\^`{|}')
_PCT = re.compile(r"%(?![0-9A-Fa-f]{2})")
_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


def _needs_escape(ch: str) -> bool:
    return ch in RESERVED or ch in _ILLEGAL or ord(ch) <= 0x20 or ord(ch) == 0x7F


def encode_name(name: str) -> str:
    out = []
    for ch in name:
        if _needs_escape(ch):
            out.extend(f"%{b:02X}" for b in ch.encode("utf-8"))
        else:
            out.append(ch)
    return "".join(out)


def decode_name(text: str) -> str:
    if not text:
        raise MalformedUri("empty name")
    if _PCT.search(text):
        raise MalformedUri(f"bad percent escape in {text!r}")
    for ch in text:
        if ch != "%" and _needs_escape(ch):
            raise MalformedUri(f"illegal character {ch!r} in name {text!r}")
    try:
        return unquote_to_bytes(text).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedUri(f"escape sequence in {text!r} is not UTF-8") from exc


def encode_path(path: LocalPath) -> str:
    return "/".join(encode_name(n) for n in path)


def parse_path(text: str) -> tuple[LocalPath, bool]:
    """Parse a local path, returning (names, is_relative)."""
    if not text:
        return (), False
    relative = text.startswith("/")
    body = text[1:] if relative else text
    if not body:
        raise MalformedUri(f"empty relative path {text!r}")
    return tuple(decode_name(seg) for seg in body.split("/")), relative


@dataclass(frozen=True)
class Identifier:
    """``doc?module?symbol``; empty strings/tuples play the role of the empty component."""

    doc: str = ""
    module: LocalPath = ()
    symbol: LocalPath = ()
    module_relative: bool = False
    symbol_relative: bool = False

    def __post_init__(self):
        object.__setattr__(self, "module", tuple(self.module))
        object.__setattr__(self, "symbol", tuple(self.symbol))

    def __str__(self) -> str:
        return encode(self)

    def __repr__(self) -> str:
        return f"Identifier({encode(self)!r})"

    @property
    def is_relative(self) -> bool:
        return self.module_relative or self.symbol_relative

    @property
    def is_absolute(self) -> bool:
        return bool(_SCHEME.match(self.doc)) and not self.is_relative

    @property
    def is_module(self) -> bool:
        return bool(self.module) and not self.symbol

    @property
    def is_symbol(self) -> bool:
        return bool(self.module) and bool(self.symbol)

    def module_id(self) -> "Identifier":
        return Identifier(self.doc, self.module)

    def doc_id(self) -> "Identifier":
        return Identifier(self.doc)

    def sym(self, name: str) -> "Identifier":
        """Symbol in this module; ``/`` in ``name`` separates path segments."""
        return Identifier(self.doc, self.module, tuple(name.split("/")))

    def at(self, path: LocalPath) -> "Identifier":
        return Identifier(self.doc, self.module, tuple(path))

    def child(self, *names: str) -> "Identifier":
        return Identifier(self.doc, self.module + tuple(names))


def parse(text: str) -> Identifier:
    if "#" in text:
        raise MalformedUri(f"fragment not allowed in {text!r}")
    parts = text.split("?")
    if len(parts) > 3:
        raise MalformedUri(f"too many '?' in {text!r}")
    doc = parts[0]
    for ch in doc:
        if ch in _ILLEGAL or ord(ch) <= 0x20 or ord(ch) == 0x7F:
            raise MalformedUri(f"illegal character {ch!r} in {text!r}")
    if _PCT.search(doc):
        raise MalformedUri(f"bad percent escape in {text!r}")
    module, mrel = parse_path(parts[1]) if len(parts) > 1 else ((), False)
    symbol, srel = parse_path(parts[2]) if len(parts) > 2 else ((), False)
    return Identifier(doc, module, symbol, mrel, srel)


def encode(ident: Identifier) -> str:
    out = ident.doc
    mod = ("/" if ident.module_relative else "") + encode_path(ident.module)
    sym = ("/" if ident.symbol_relative else "") + encode_path(ident.symbol)
    if mod or sym:
        out += "?" + mod
    if sym:
        out += "?" + sym
    return out


def as_id(x: "Identifier | str") -> Identifier:
    return x if isinstance(x, Identifier) else parse(x)


# --- RFC 3986 reference resolution (section 5.2) ---------------------------

_URI_RE = re.compile(r"^(([^:/?#]+):)?(//([^/?#]*))?([^?#]*)(\?([^#]*))?(#(.*))?")


def _split(uri: str):
    m = _URI_RE.match(uri)
    return m.group(2), m.group(4), m.group(5), m.group(7), m.group(9)


def remove_dot_segments(path: str) -> str:
    inp, out = path, []
    while inp:
        if inp.startswith("../"):
            inp = inp[3:]
        elif inp.startswith("./"):
            inp = inp[2:]
        elif inp.startswith("/./"):
            inp = inp[2:]
        elif inp == "/.":
            inp = "/"
        elif inp.startswith("/../"):
            inp = inp[3:]
            if out:
                out.pop()
        elif inp == "/..":
            inp = "/"
            if out:
                out.pop()
        elif inp in (".", ".."):
            inp = ""
        else:
            start = 1 if inp.startswith("/") else 0
            end = inp.find("/", start)
            end = len(inp) if end < 0 else end
            out.append(inp[:end])
            inp = inp[end:]
    return "".join(out)


def resolve_uri(base: str, ref: str) -> str:
    """Resolve URI reference ``ref`` against ``base``."""
    bs, ba, bp, bq, _ = _split(base)
    rs, ra, rp, rq, rf = _split(ref)
    if rs is not None:
        ts, ta, tp, tq = rs, ra, remove_dot_segments(rp), rq
    else:
        if ra is not None:
            ta, tp, tq = ra, remove_dot_segments(rp), rq
        else:
            if rp == "":
                tp = bp
                tq = rq if rq is not None else bq
            else:
                if rp.startswith("/"):
                    tp = remove_dot_segments(rp)
                else:
                    if ba is not None and bp == "":
                        merged = "/" + rp
                    else:
                        cut = bp.rfind("/")
                        merged = bp[: cut + 1] + rp
                    tp = remove_dot_segments(merged)
                tq = rq
            ta = ba
        ts = bs
    out = ""
    if ts is not None:
        out += ts + ":"
    if ta is not None:
        out += "//" + ta
    out += tp
    if tq is not None:
        out += "?" + tq
    if rf is not None:
        out += "#" + rf
    return out


def resolve(base: Identifier, rel: Identifier) -> Identifier:
    """Resolve a relative identifier against an absolute base."""
    if not base.is_absolute:
        raise MalformedUri(f"base {base} is not absolute")
    if rel.doc:
        if rel.is_relative:
            raise MalformedUri(f"relative path after a document in {rel}")
        out = Identifier(resolve_uri(base.doc, rel.doc), rel.module, rel.symbol)
    elif rel.module:
        if rel.symbol_relative:
            raise MalformedUri(f"relative symbol after a module in {rel}")
        module = base.module + rel.module if rel.module_relative else rel.module
        out = Identifier(base.doc, module, rel.symbol)
    elif rel.symbol:
        if rel.module_relative:
            raise MalformedUri(f"malformed reference {rel}")
        symbol = base.symbol + rel.symbol if rel.symbol_relative else rel.symbol
        out = Identifier(base.doc, base.module, symbol)
    else:
        return base
    if out.symbol and not out.module:
        raise NoModuleContext(f"{rel} resolves to a symbol without module against {base}")
    return out
