"""Parser and serializer for the textual knowledge-base language (``.kb``).

Grammar (normative, also documented in the README):

    kb        := item*
    item      := clause | proprule | tableblock
    clause    := atom [ "<-" atom ("," atom)* ] "."
    proprule  := "prop" propref ("&" propref)* "->" propname ("?" string)* "."
    propref   := propname [ "?" string ]
    atom      := ident [ "(" term ("," term)* ")" ]
    term      := variable | number | string | list
               | ident [ "(" term ("," term)* ")" ]
    list      := "[" [ term ("," term)* [ "|" term ] ] "]"

Variables start with an uppercase letter or underscore; a bare ``_`` is a
fresh anonymous variable at each occurrence.  Numbers are decimal with an
optional fraction, optional exponent, and optional leading minus.  Strings
are double-quoted with
backslash escapes.  ``#`` comments run to end of line.  Proposition names in
``prop`` rules may be any identifier, upper- or lowercase.  Question strings
written after the consequent attach to the antecedents positionally; the
inline ``propname ? "text"`` form binds explicitly and is what the serializer
emits.  Numeric ``table <name>:`` CSV blocks (terminated by a blank line) are
routed to the returned fact store.

There is no negation: rules are positive Horn clauses only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .store import FactStore, StoreError, is_table_intro, parse_table_block
from .terms import (
    Atom,
    Const,
    HornClause,
    KnowledgeBase,
    NIL,
    Num,
    PropRule,
    Struct,
    Term,
    TermError,
    Text,
    Var,
    atom_text,
)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int
    start_offset: int = 0
    end_offset: int = 0

    def slice(self, text: str) -> str:
        return text[self.start_offset:self.end_offset]

    def __str__(self):
        return "%s:%d:%d" % (self.file, self.start_line, self.start_col)


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: SourceSpan

    def __str__(self):
        return "%s: %s: %s" % (self.span, self.severity, self.message)


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__("%s: %s" % (span, message))
        self.message = message
        self.span = span


class KBSyntaxError(ValueError):
    """Raised by the raise-on-error loading helpers."""

    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<badstring>"(?:[^"\\\n]|\\.)*)
  | (?P<arrow><-)
  | (?P<imp>->)
  | (?P<qmark>\?-)
  | (?P<punct>[()\[\],.|&?:])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int
    offset: int

    def span(self, filename: str) -> SourceSpan:
        end = self.offset + max(1, len(self.text))
        newlines = self.text.count("\n")
        end_col = self.col + len(self.text) if newlines == 0 else len(self.text) - self.text.rfind("\n")
        return SourceSpan(
            filename, self.line, self.col, self.line + newlines, max(end_col, self.col + 1),
            self.offset, end,
        )


def tokenize(text: str, filename: str) -> tuple[list[Token], list[ParseDiagnostic]]:
    tokens: list[Token] = []
    diagnostics: list[ParseDiagnostic] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            tok = Token("error", text[pos], line, pos - line_start + 1, pos)
            diagnostics.append(
                ParseDiagnostic("error", "unexpected character %r" % text[pos], tok.span(filename))
            )
            pos += 1
            continue
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        if kind == "ws":
            for i, ch in enumerate(value):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        elif kind == "comment":
            pass
        elif kind == "badstring":
            tok = Token("error", value, line, col, pos)
            diagnostics.append(
                ParseDiagnostic("error", "unterminated string", tok.span(filename))
            )
        else:
            if kind == "punct":
                kind = value
            elif kind == "arrow":
                kind = "<-"
            elif kind == "imp":
                kind = "->"
            elif kind == "qmark":
                kind = "?-"
            tokens.append(Token(kind, value, line, col, pos))
        pos = m.end() if m.end() > pos else pos + 1
    tokens.append(Token("eof", "", line, max(1, n - line_start + 1), max(0, n - 1 if n else 0)))
    return tokens, diagnostics


def _unescape(raw: str) -> str:
    body = raw[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class _Parser:
    def __init__(self, tokens: list[Token], filename: str):
        self.tokens = tokens
        self.filename = filename
        self.pos = 0
        self.diagnostics: list[ParseDiagnostic] = []
        self.anon_counter = 0

    # token plumbing

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if self.pos < len(self.tokens) - 1:
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                "expected %s, found %r" % (what, tok.text or "end of input"),
                tok.span(self.filename),
            )
        return self.advance()

    def error_here(self, message: str) -> ParseError:
        return ParseError(message, self.peek().span(self.filename))

    # grammar

    def parse_items(self, kb: KnowledgeBase):
        arity_sites: dict[str, tuple[int, SourceSpan]] = {}
        while self.peek().kind != "eof":
            start = self.pos
            try:
                self.parse_item(kb, arity_sites)
            except ParseError as exc:
                self.diagnostics.append(ParseDiagnostic("error", exc.message, exc.span))
                self.skip_to_dot(start)

    def skip_to_dot(self, start: int):
        if self.pos == start:
            self.advance()
        while self.peek().kind not in (".", "eof"):
            self.advance()
        if self.peek().kind == ".":
            self.advance()

    def parse_item(self, kb: KnowledgeBase, arity_sites):
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "prop" and self.peek(1).kind in ("ident", "var"):
            kb.prop_rules.append(self.parse_proprule())
            return
        clause = self.parse_clause(arity_sites)
        kb.clauses.append(clause)

    def parse_clause(self, arity_sites) -> HornClause:
        head = self.parse_atom(arity_sites)
        body = []
        if self.peek().kind == "<-":
            self.advance()
            body.append(self.parse_atom(arity_sites))
            while self.peek().kind == ",":
                self.advance()
                body.append(self.parse_atom(arity_sites))
        self.expect(".", "'.' at end of clause")
        return HornClause(head, tuple(body))

    def parse_proprule(self) -> PropRule:
        start = self.peek()
        self.advance()  # "prop"
        antecedents = []
        questions = []

        def propref():
            tok = self.peek()
            if tok.kind not in ("ident", "var"):
                raise self.error_here("expected proposition name")
            self.advance()
            if self.peek().kind == "?" and self.peek(1).kind == "string":
                self.advance()
                questions.append((tok.text, _unescape(self.advance().text)))
            return tok.text

        antecedents.append(propref())
        while self.peek().kind == "&":
            self.advance()
            antecedents.append(propref())
        self.expect("->", "'->' before consequent")
        cons_tok = self.peek()
        if cons_tok.kind not in ("ident", "var"):
            raise self.error_here("expected consequent proposition name")
        self.advance()
        # Trailing question strings attach to antecedents positionally.
        trailing = 0
        while self.peek().kind == "?" and self.peek(1).kind == "string":
            self.advance()
            text = _unescape(self.advance().text)
            if trailing >= len(antecedents):
                raise self.error_here("more question strings than antecedents")
            questions.append((antecedents[trailing], text))
            trailing += 1
        self.expect(".", "'.' at end of prop rule")
        try:
            return PropRule(tuple(antecedents), cons_tok.text, tuple(questions))
        except TermError as exc:
            raise ParseError(str(exc), start.span(self.filename)) from exc

    def parse_atom(self, arity_sites=None) -> Atom:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error_here("expected predicate name")
        self.advance()
        args: list[Term] = []
        if self.peek().kind == "(":
            open_tok = self.advance()
            args.append(self.parse_term())
            while self.peek().kind == ",":
                self.advance()
                args.append(self.parse_term())
            self.close_paren(open_tok)
        atom = Atom(tok.text, tuple(args))
        if arity_sites is not None:
            span = tok.span(self.filename)
            known = arity_sites.get(tok.text)
            if known is not None and known[0] != len(args):
                self.diagnostics.append(
                    ParseDiagnostic(
                        "warning",
                        "predicate %s used with arity %d here but arity %d at %s"
                        % (tok.text, len(args), known[0], known[1]),
                        span,
                    )
                )
            elif known is None:
                arity_sites[tok.text] = (len(args), span)
        return atom

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "var":
            self.advance()
            if tok.text == "_":
                self.anon_counter += 1
                return Var("_G%d" % self.anon_counter)
            return Var(tok.text)
        if tok.kind == "number":
            self.advance()
            if "." in tok.text or "e" in tok.text or "E" in tok.text:
                return Num(float(tok.text))
            return Num(int(tok.text))
        if tok.kind == "string":
            self.advance()
            return Text(_unescape(tok.text))
        if tok.kind == "[":
            return self.parse_list()
        if tok.kind == "ident":
            self.advance()
            if self.peek().kind == "(":
                open_tok = self.advance()
                args = [self.parse_term()]
                while self.peek().kind == ",":
                    self.advance()
                    args.append(self.parse_term())
                self.close_paren(open_tok)
                return Struct(tok.text, tuple(args))
            return Const(tok.text)
        raise self.error_here("expected a term")

    def close_paren(self, open_tok: Token):
        if self.peek().kind != ")":
            raise ParseError(
                "unclosed '(': expected ')' before %r"
                % (self.peek().text or "end of input"),
                open_tok.span(self.filename),
            )
        self.advance()

    def parse_list(self) -> Term:
        self.expect("[", "'['")
        if self.peek().kind == "]":
            self.advance()
            return NIL
        items = [self.parse_term()]
        while self.peek().kind == ",":
            self.advance()
            items.append(self.parse_term())
        tail: Term = NIL
        if self.peek().kind == "|":
            self.advance()
            tail = self.parse_term()
        self.expect("]", "']' to close list")
        out = tail
        for item in reversed(items):
            out = Struct("cons", (item, out))
        return out


def parse_kb(text: str, filename: str = "<kb>"):
    """Parse knowledge-base text.

    Returns ``(KnowledgeBase, FactStore, diagnostics)``.  Clause order equals
    textual order.  Errors are reported as diagnostics; parsing recovers at
    the next '.' and continues.  ``table`` CSV blocks populate the store.
    """
    store = FactStore()
    lines = text.splitlines()
    kept = list(lines)
    diagnostics: list[ParseDiagnostic] = []
    i = 0
    while i < len(lines):
        stripped = lines[i].strip()
        if is_table_intro(stripped):
            start = i
            try:
                table, i = parse_table_block(lines, i, filename)
                store.add_table(table)
            except StoreError as exc:
                diagnostics.append(
                    ParseDiagnostic(
                        "error",
                        str(exc),
                        SourceSpan(filename, start + 1, 1, start + 1, max(2, len(lines[start]) + 1),
                                   _line_offset(lines, start), _line_offset(lines, start) + max(1, len(lines[start]))),
                    )
                )
                i += 1
                while i < len(lines) and lines[i].strip():
                    i += 1
            for j in range(start, min(i, len(lines))):
                kept[j] = " " * len(lines[j])  # keep offsets and columns aligned
            continue
        i += 1

    masked = "\n".join(kept)
    tokens, lex_diags = tokenize(masked, filename)
    diagnostics.extend(lex_diags)
    kb = KnowledgeBase()
    parser = _Parser(tokens, filename)
    parser.parse_items(kb)
    diagnostics.extend(parser.diagnostics)
    return kb, store, diagnostics


def _line_offset(lines, index) -> int:
    return sum(len(l) + 1 for l in lines[:index])


def parse_query(text: str, filename: str = "<query>") -> Atom:
    """Parse a single goal atom, optionally written ``?- goal.``"""
    tokens, lex_diags = tokenize(text, filename)
    if lex_diags:
        first = lex_diags[0]
        raise ParseError(first.message, first.span)
    parser = _Parser(tokens, filename)
    if parser.peek().kind == "?-":
        parser.advance()
    atom = parser.parse_atom()
    if parser.peek().kind == ".":
        parser.advance()
    if parser.peek().kind != "eof":
        raise parser.error_here("single goal expected")
    return atom


def parse_fact_line(line: str, filename: str = "<facts>", line_no: int = 1) -> Atom:
    """Parse one ground-atom line of the fact-store format."""
    tokens, lex_diags = tokenize(line, filename)
    if lex_diags:
        first = lex_diags[0]
        raise ParseError("%s (line %d)" % (first.message, line_no), first.span)
    parser = _Parser(tokens, filename)
    try:
        atom = parser.parse_atom()
        parser.expect(".", "'.' at end of fact")
        if parser.peek().kind != "eof":
            raise parser.error_here("one fact per line")
    except ParseError as exc:
        span = SourceSpan(filename, line_no, exc.span.start_col, line_no, exc.span.end_col,
                          exc.span.start_offset, exc.span.end_offset)
        raise ParseError(exc.message, span) from exc
    return atom


def serialize_kb(kb: KnowledgeBase) -> str:
    """Deterministic text for a knowledge base; round-trips through parse_kb."""
    lines = ["# knowledge base%s" % (" " + kb.name if kb.name else "")]
    for clause in kb.clauses:
        if clause.is_fact:
            lines.append("%s." % atom_text(clause.head))
        else:
            lines.append(
                "%s <- %s." % (atom_text(clause.head), ", ".join(atom_text(a) for a in clause.body))
            )
    for rule in kb.prop_rules:
        parts = []
        for name in rule.antecedents:
            q = rule.question_for(name)
            if q is not None:
                parts.append('%s ? "%s"' % (name, q.replace("\\", "\\\\").replace('"', '\\"')))
            else:
                parts.append(name)
        lines.append("prop %s -> %s." % (" & ".join(parts), rule.consequent))
    return "\n".join(lines) + "\n"


def load_kb(path) -> tuple[KnowledgeBase, FactStore]:
    """Parse a .kb file, raising KBSyntaxError on any error diagnostic."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    kb, store, diagnostics = parse_kb(text, filename=str(path))
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        raise KBSyntaxError(errors)
    return kb, store
