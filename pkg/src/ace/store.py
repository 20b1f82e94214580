"""Fact store: named relations of ground atoms plus named numeric tables.

Relations are bags, not sets: asserting the same ground atom twice stores two
copies, and retraction counts stay meaningful.  Numeric tables live beside the
relations so analytic builtins and logical builtins share one handle.

Text format (one file per store): ground atoms ``name(arg1, arg2).`` one per
line, ``#`` comments, and numeric tables as CSV blocks opened by
``table <name>:`` with a header row and terminated by a blank line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import Atom, is_ground, variables_of, atom_text
from .unify import unify


class StoreError(ValueError):
    """Rejected fact-store operation."""


@dataclass
class NumericTable:
    name: str
    columns: list
    rows: list = field(default_factory=list)  # list of lists of floats

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise StoreError(
                    "table %r: row has %d values, header has %d columns"
                    % (self.name, len(row), len(self.columns))
                )

    def column(self, name: str) -> list:
        try:
            i = self.columns.index(name)
        except ValueError:
            raise StoreError("table %r has no column %r" % (self.name, name)) from None
        return [row[i] for row in self.rows]

    def as_dicts(self) -> list:
        return [dict(zip(self.columns, row)) for row in self.rows]


@dataclass
class FactStore:
    relations: dict = field(default_factory=dict)  # name -> list[Atom]
    tables: dict = field(default_factory=dict)  # name -> NumericTable

    def assert_fact(self, fact: Atom) -> None:
        if not is_ground(fact):
            offending = variables_of(fact)[0]
            raise StoreError("unbound variable %s in fact %s" % (offending.name, atom_text(fact)))
        self.relations.setdefault(fact.pred, []).append(fact)

    def retract_fact(self, pattern: Atom) -> int:
        bag = self.relations.get(pattern.pred, [])
        kept = [a for a in bag if unify(pattern, a) is None]
        removed = len(bag) - len(kept)
        if kept:
            self.relations[pattern.pred] = kept
        elif pattern.pred in self.relations:
            del self.relations[pattern.pred]
        return removed

    def match_facts(self, pattern: Atom) -> list:
        """Every stored atom unifying with the pattern, in insertion order,

        paired with the unifying substitution."""
        out = []
        for atom in self.relations.get(pattern.pred, []):
            s = unify(pattern, atom)
            if s is not None:
                out.append((atom, s))
        return out

    def facts(self, name: str) -> list:
        return list(self.relations.get(name, []))

    def add_table(self, table: NumericTable) -> None:
        self.tables[table.name] = table

    def table(self, name: str) -> NumericTable:
        if name not in self.tables:
            raise StoreError("no table named %r" % name)
        return self.tables[name]

    def merge(self, other: "FactStore") -> None:
        for name, bag in other.relations.items():
            self.relations.setdefault(name, []).extend(bag)
        self.tables.update(other.tables)

    def copy(self) -> "FactStore":
        out = FactStore()
        out.merge(self)
        return out


def save_store(store: FactStore, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_store(store))


def serialize_store(store: FactStore) -> str:
    lines = []
    for bag in store.relations.values():
        for atom in bag:
            lines.append(atom_text(atom) + ".")
    for table in store.tables.values():
        if lines:
            lines.append("")
        lines.append("table %s:" % table.name)
        lines.append(",".join(table.columns))
        for row in table.rows:
            lines.append(",".join(_num_text(v) for v in row))
        lines.append("")
    return "\n".join(lines) + ("\n" if lines else "")


def _num_text(v) -> str:
    if isinstance(v, float) and v.is_integer():
        return "%d" % int(v)
    return repr(v)


def load_store(path) -> FactStore:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise StoreError("cannot read %s: %s" % (path, exc)) from exc
    return parse_store(text, filename=str(path))


def is_table_intro(line: str) -> bool:
    return line.startswith("table ") and line.rstrip().endswith(":")


def parse_table_block(lines, i: int, filename: str):
    """Parse a ``table <name>:`` block starting at line index ``i``.

    Returns (NumericTable, index of the first line after the block)."""
    intro = _strip_comment(lines[i]).strip()
    name = intro[len("table "):-1].strip()
    if not name:
        raise StoreError("%s:%d: table block needs a name" % (filename, i + 1))
    i += 1
    if i >= len(lines) or not _strip_comment(lines[i]).strip():
        raise StoreError("%s:%d: table %r is missing its header row" % (filename, i + 1, name))
    columns = [c.strip() for c in _strip_comment(lines[i]).strip().split(",")]
    rows = []
    i += 1
    while i < len(lines):
        row_line = _strip_comment(lines[i]).strip()
        if not row_line:
            break
        values = []
        for cell in row_line.split(","):
            cell = cell.strip()
            try:
                values.append(float(cell))
            except ValueError:
                raise StoreError(
                    "%s:%d: table %r: %r is not a number" % (filename, i + 1, name, cell)
                ) from None
        if len(values) != len(columns):
            raise StoreError(
                "%s:%d: table %r: expected %d values, got %d"
                % (filename, i + 1, name, len(columns), len(values))
            )
        rows.append(values)
        i += 1
    return NumericTable(name, columns, rows), i


def parse_store(text: str, filename: str = "<store>") -> FactStore:
    """Parse the fact-store text format; raises StoreError citing the line."""
    from .kblang import parse_fact_line, ParseError  # deferred: kblang imports this module

    store = FactStore()
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = _strip_comment(lines[i]).strip()
        if not line:
            i += 1
            continue
        if is_table_intro(line):
            table, i = parse_table_block(lines, i, filename)
            store.add_table(table)
            continue
        try:
            atom = parse_fact_line(line, filename=filename, line_no=i + 1)
        except ParseError as exc:
            raise StoreError(str(exc)) from exc
        try:
            store.assert_fact(atom)
        except StoreError as exc:
            raise StoreError("%s:%d: %s" % (filename, i + 1, exc)) from exc
        i += 1
    return store


def _strip_comment(line: str) -> str:
    """Drop a # comment, honoring quoted strings."""
    out = []
    in_string = False
    prev = ""
    for ch in line:
        if ch == '"' and prev != "\\":
            in_string = not in_string
        if ch == "#" and not in_string:
            break
        out.append(ch)
        prev = ch
    return "".join(out)
