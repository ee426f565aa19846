"""Concrete syntax for models (``.ccm``), views (``.ccv``) and witnesses (``.ccw``).

Grammar::

    model     ::= "model" Name "{" compDecl* "}"
    view      ::= "view" Name "{" compDecl* connDecl* "}"
    compDecl  ::= "component" Name ( "{" portDecl* compDecl* connDecl* "}" | ";" )
    portDecl  ::= "port" ("in" | "out") TypeTok NameTok ";"
    connDecl  ::= "connect" endpoint "->" endpoint ";"
    endpoint  ::= Name ( "." Name )?

In views ``TypeTok`` and ``NameTok`` may be ``*`` (unknown) and endpoints
may omit the port. Comments run from ``//`` to the end of the line.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .model import (
    AbstractConnector,
    CncModel,
    CncView,
    Connector,
    Direction,
    Port,
    ViewPort,
    Violation,
    validate_model,
    validate_view,
)
from .verify import VerificationResult
from .witness import Witness, witness_as_view


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 0

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseDiagnostic:
    span: SourceSpan
    message: str
    severity: Severity = Severity.ERROR

    def __str__(self) -> str:
        return f"{self.span}: {self.severity.value}: {self.message}"


class ParseError(Exception):
    """Raised with every diagnostic collected for a rejected document."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


KEYWORDS = {"model", "view", "component", "port", "in", "out", "connect"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<sym>[{};.*])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "kw", "sym", "eof"
    value: str
    line: int
    column: int


def tokenize(text: str, file: str = "<input>") -> tuple[list[Token], list[ParseDiagnostic]]:
    tokens: list[Token] = []
    errors: list[ParseDiagnostic] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            errors.append(ParseDiagnostic(SourceSpan(file, line, col, 1),
                                          f"unexpected character {text[pos]!r}"))
            pos += 1
            continue
        kind, value = m.lastgroup, m.group()
        if kind == "ident":
            tokens.append(Token("kw" if value in KEYWORDS else "ident", value, line, col))
        elif kind in ("arrow", "sym"):
            tokens.append(Token("sym", value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    # EOF sits on the last character so that its span stays inside the text
    if text:
        last = len(text) - 1
        eof_line = text.count("\n", 0, last) + 1
        eof_col = last - (text.rfind("\n", 0, last) + 1) + 1
    else:
        eof_line, eof_col = 1, 1
    tokens.append(Token("eof", "", eof_line, eof_col))
    return tokens, errors


class _Syntax(Exception):
    pass


class _Parser:
    def __init__(self, text: str, file: str, is_view: bool):
        self.file = file
        self.is_view = is_view
        self.tokens, self.errors = tokenize(text, file)
        self.i = 0
        self.components: list[str] = []
        self.parent: dict[str, str] = {}
        self.ports: dict[str, list] = {}
        self.connectors: list = []
        self.spans: dict[tuple, SourceSpan] = {}

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def span(self, tok: Token) -> SourceSpan:
        return SourceSpan(self.file, tok.line, tok.column, len(tok.value))

    def fail(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        self.errors.append(ParseDiagnostic(self.span(tok), message))
        raise _Syntax()

    def describe(self, tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.value)

    def expect(self, value: str) -> Token:
        tok = self.tok
        if tok.value != value or tok.kind == "ident":
            self.fail(f"expected '{value}' but found {self.describe(tok)}")
        self.i += 1
        return tok

    def accept(self, value: str) -> bool:
        if self.tok.value == value and self.tok.kind != "ident":
            self.i += 1
            return True
        return False

    def name(self, what: str) -> Token:
        tok = self.tok
        if tok.kind != "ident":
            self.fail(f"expected {what} but found {self.describe(tok)}")
        self.i += 1
        return tok

    def name_or_star(self, what: str) -> Token:
        if self.is_view and self.tok.value == "*" and self.tok.kind == "sym":
            tok = self.tok
            self.i += 1
            return tok
        return self.name(what)

    # grammar

    def document(self):
        kw = "view" if self.is_view else "model"
        self.expect(kw)
        doc_name = self.name(f"{kw} name")
        self.spans[("document", doc_name.value)] = self.span(doc_name)
        self.expect("{")
        while self.tok.value == "component" and self.tok.kind == "kw":
            self.component(None)
        if self.is_view:
            while self.tok.value == "connect" and self.tok.kind == "kw":
                self.connect()
        self.expect("}")
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.describe(self.tok)} after end of {kw}")
        return doc_name.value

    def component(self, parent: Optional[str]):
        self.expect("component")
        tok = self.name("component name")
        c = tok.value
        if ("component", c) in self.spans:
            self.errors.append(ParseDiagnostic(self.span(tok),
                                               f"duplicate component name {c}"))
        else:
            self.spans[("component", c)] = self.span(tok)
            self.components.append(c)
            if parent is not None:
                self.parent[c] = parent
        if self.accept(";"):
            return
        self.expect("{")
        while self.tok.value == "port" and self.tok.kind == "kw":
            self.port(c)
        while self.tok.value == "component" and self.tok.kind == "kw":
            self.component(c)
        while self.tok.value == "connect" and self.tok.kind == "kw":
            self.connect()
        self.expect("}")

    def port(self, owner: str):
        start = self.expect("port")
        d = self.tok
        if d.value not in ("in", "out") or d.kind != "kw":
            self.fail(f"expected 'in' or 'out' but found {self.describe(d)}")
        self.i += 1
        type_tok = self.name_or_star("port type")
        name_tok = self.name_or_star("port name")
        self.expect(";")
        ptype = None if type_tok.value == "*" else type_tok.value
        pname = None if name_tok.value == "*" else name_tok.value
        direction = Direction(d.value)
        cls = ViewPort if self.is_view else Port
        self.ports.setdefault(owner, []).append(cls(pname, direction, ptype, owner))
        self.spans.setdefault(("port", owner, pname), self.span(name_tok if pname else start))

    def endpoint(self) -> tuple[str, Optional[str]]:
        c = self.name("component name").value
        if self.accept("."):
            return c, self.name("port name").value
        if not self.is_view:
            self.fail("connector endpoints in models need a port (Component.port)")
        return c, None

    def connect(self):
        start = self.expect("connect")
        src = self.endpoint()
        self.expect("->")
        tgt = self.endpoint()
        self.expect(";")
        cls = AbstractConnector if self.is_view else Connector
        con = cls(src[0], src[1], tgt[0], tgt[1])
        self.connectors.append(con)
        self.spans.setdefault(("connector", con), self.span(start))


def _violation_diagnostics(p: _Parser, doc_name: str,
                           violations: list[Violation]) -> list[ParseDiagnostic]:
    fallback = p.spans.get(("document", doc_name), SourceSpan(p.file, 1, 1, 0))
    out = []
    for v in violations:
        span = p.spans.get(v.element)
        if span is None and v.element[:1] == ("port",):
            span = p.spans.get(("component", v.element[1]))
        out.append(ParseDiagnostic(span or fallback, f"{v.rule}: {v.message}"))
    return out


def _run(text: str, file: str, is_view: bool):
    p = _Parser(text, file, is_view)
    doc_name = None
    try:
        doc_name = p.document()
    except _Syntax:
        pass
    if p.errors or doc_name is None:
        raise ParseError(p.errors)
    return p, doc_name


def parse_model(text: str, file: str = "<model>") -> CncModel:
    """Parse and validate a model document; raises :class:`ParseError`."""
    p, name = _run(text, file, False)
    m = CncModel(name, p.components, p.parent, p.ports, p.connectors)
    violations = validate_model(m)
    if violations:
        raise ParseError(_violation_diagnostics(p, name, violations))
    return m


def parse_view(text: str, file: str = "<view>") -> CncView:
    """Parse and validate a view document; raises :class:`ParseError`."""
    p, name = _run(text, file, True)
    v = CncView(name, p.components, p.parent, p.ports, p.connectors)
    violations = validate_view(v)
    if violations:
        raise ParseError(_violation_diagnostics(p, name, violations))
    return v


# -- printing -------------------------------------------------------------------


def _owner_of(m: CncModel, con: Connector) -> Optional[str]:
    """Component whose body declares ``con``."""
    if m.parent.get(con.tgt_cmp) == con.src_cmp:
        return con.src_cmp
    return m.parent.get(con.src_cmp)


def _print_tree(doc, c: str, depth: int, lines: list[str], conns_by_owner: dict) -> None:
    pad = "  " * depth
    ports = doc.port_list(c)
    kids = doc.children[c]
    conns = conns_by_owner.get(c, [])
    if not (ports or kids or conns):
        lines.append(f"{pad}component {c};")
        return
    lines.append(f"{pad}component {c} {{")
    for p in ports:
        lines.append(f"{pad}  port {p.direction} {p.type or '*'} {p.name or '*'};")
    for k in kids:
        _print_tree(doc, k, depth + 1, lines, conns_by_owner)
    for con in conns:
        lines.append(f"{pad}  connect {con};")
    lines.append(f"{pad}}}")


def print_model(m: CncModel) -> str:
    by_owner: dict[str, list[Connector]] = {}
    for con in m.connectors:
        by_owner.setdefault(_owner_of(m, con), []).append(con)
    lines = [f"model {m.name} {{"]
    for r in m.roots:
        _print_tree(m, r, 1, lines, by_owner)
    lines.append("}")
    return "\n".join(lines) + "\n"


def print_view(v: CncView) -> str:
    lines = [f"view {v.name} {{"]
    for r in v.roots:
        _print_tree(v, r, 1, lines, {})
    for ac in v.abs_cons:
        lines.append(f"  connect {ac};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def print_witness(w: Witness) -> str:
    header = [f"// witness kind: {w.kind.value}"]
    header += [f"// {a.text}" for a in w.annotations]
    return "\n".join(header) + "\n" + print_view(witness_as_view(w))


def export_json(result: VerificationResult) -> str:
    doc = {
        "model": result.model_name,
        "view": result.view_name,
        "satisfied": result.satisfied,
        "witnesses": [
            {"kind": w.kind.value, "text": w.text, "fragment": print_witness(w)}
            for w in result.witnesses
        ],
    }
    return json.dumps(doc, indent=2)
