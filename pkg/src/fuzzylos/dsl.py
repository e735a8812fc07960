"""Textual configuration language for a complete Sugeno inference system.

A ``.fis`` document is line oriented (UTF-8, LF or CRLF), with ``#`` starting
a comment.  Keywords are lower case, the rule connectives IF / IS / AND /
THEN are upper case, and identifiers are case sensitive::

    set and_operator min
    variable input TrafficFlow [veh/h] domain 0 6000
      mf Very_Low trap 0 0 1200 1600
      ...
    variable output LoS domain 0 6
    rule IF TrafficFlow IS Very_Low AND Speed IS High THEN LoS = 1

Numbers are plain decimals (optional sign and fraction, no exponents).
Output variables declare a domain but no membership functions: zeroth-order
consequents are bare constants.  ``parse`` reports the first syntax error
with its 1-based line and column; building a ``SugenoFis`` from the parsed
document then collects every name-resolution and invariant violation at once.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from decimal import Decimal

from .engine import FisConfigError, FuzzyVariable, Rule, SugenoFis, TrapezoidMF


class ParseError(ValueError):
    """A positioned error in a ``.fis`` source text."""

    def __init__(self, line: int, column: int, message: str, token: str = ""):
        self.line = line
        self.column = column
        self.message = message
        self.token = token
        super().__init__(f"line {line}, column {column}: {message}")


class FisValidationError(ValueError):
    """All validation failures found while turning a document into a system."""

    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__("; ".join(str(e) for e in errors))


@dataclass
class MfDecl:
    line: int
    column: int
    term: str
    points: tuple[float, float, float, float]


@dataclass
class VarDecl:
    line: int
    column: int
    kind: str  # "input" | "output"
    name: str
    unit: str
    lo: float
    hi: float
    mfs: list[MfDecl] = field(default_factory=list)


@dataclass
class ClauseStmt:
    line: int
    column: int
    variable: str
    term: str


@dataclass
class RuleStmt:
    line: int
    column: int
    clauses: list[ClauseStmt]
    output: str
    consequent: float


@dataclass
class FisDocument:
    """Parsed form of a ``.fis`` source: declarations in source order."""

    variables: list[VarDecl] = field(default_factory=list)
    rules: list[RuleStmt] = field(default_factory=list)
    and_operator: str = "min"


_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_/]*|-?\d+(?:\.\d+)?|[\[\]=]|\S")
_NUM_RE = re.compile(r"-?\d+(?:\.\d+)?$")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_/]*$")


class _Line:
    """Token cursor over one source line."""

    def __init__(self, lineno: int, text: str):
        self.lineno = lineno
        body = text.split("#", 1)[0]
        self.tokens = [(m.group(), m.start() + 1) for m in _TOKEN_RE.finditer(body)]
        self.pos = 0

    def peek(self) -> tuple[str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expect: str) -> tuple[str, int]:
        got = self.peek()
        if got is None:
            last_col = self.tokens[-1][1] + len(self.tokens[-1][0]) if self.tokens else 1
            raise ParseError(self.lineno, last_col, f"expected {expect}, got end of line")
        self.pos += 1
        return got

    def keyword(self, word: str) -> None:
        tok, col = self.next(f"'{word}'")
        if tok != word:
            raise ParseError(self.lineno, col, f"expected '{word}', got {tok!r}", tok)

    def ident(self, what: str) -> tuple[str, int]:
        tok, col = self.next(what)
        if not _IDENT_RE.match(tok):
            raise ParseError(self.lineno, col, f"expected {what}, got {tok!r}", tok)
        return tok, col

    def number(self, what: str = "a number") -> tuple[float, int]:
        tok, col = self.next(what)
        if not _NUM_RE.match(tok):
            raise ParseError(self.lineno, col, f"expected {what}, got {tok!r}", tok)
        value = float(tok)
        if not math.isfinite(value):
            raise ParseError(self.lineno, col, f"number {tok[:24]}... is too large", tok)
        return value, col

    def end(self) -> None:
        got = self.peek()
        if got is not None:
            raise ParseError(self.lineno, got[1], f"unexpected trailing {got[0]!r}", got[0])


def parse(source: str) -> FisDocument:
    """Parse ``.fis`` source text into a document, or raise ParseError.

    Only the grammar is checked here; cross-reference validation happens in
    ``build_fis``.  An empty document (no variable declarations) is an error.
    """
    doc = FisDocument()
    current_var: VarDecl | None = None
    saw_directive = False
    for number, raw in enumerate(source.splitlines(), start=1):
        line = _Line(number, raw)
        head = line.peek()
        if head is None:
            continue
        word, col = head
        if word == "variable":
            line.next("'variable'")
            kind, kcol = line.next("'input' or 'output'")
            if kind not in ("input", "output"):
                raise ParseError(number, kcol, f"expected 'input' or 'output', got {kind!r}", kind)
            name, ncol = line.ident("a variable name")
            unit = ""
            if line.peek() and line.peek()[0] == "[":
                line.next("'['")
                unit, _ = line.ident("a unit")
                tok, ccol = line.next("']'")
                if tok != "]":
                    raise ParseError(number, ccol, f"expected ']', got {tok!r}", tok)
            line.keyword("domain")
            lo, _ = line.number("the domain lower bound")
            hi, _ = line.number("the domain upper bound")
            line.end()
            current_var = VarDecl(number, ncol, kind, name, unit, lo, hi)
            doc.variables.append(current_var)
        elif word == "mf":
            line.next("'mf'")
            if current_var is None:
                raise ParseError(number, col, "mf declaration before any variable", word)
            term, tcol = line.ident("a term name")
            line.keyword("trap")
            points = tuple(line.number("a breakpoint")[0] for _ in range(4))
            line.end()
            current_var.mfs.append(MfDecl(number, tcol, term, points))
        elif word == "rule":
            line.next("'rule'")
            line.keyword("IF")
            clauses = []
            while True:
                var, vcol = line.ident("a variable name")
                line.keyword("IS")
                term, _ = line.ident("a term name")
                clauses.append(ClauseStmt(number, vcol, var, term))
                conj, ccol = line.next("'AND' or 'THEN'")
                if conj == "THEN":
                    break
                if conj != "AND":
                    raise ParseError(number, ccol, f"expected 'AND' or 'THEN', got {conj!r}", conj)
            output, _ = line.ident("the output variable name")
            tok, ecol = line.next("'='")
            if tok != "=":
                raise ParseError(number, ecol, f"expected '=', got {tok!r}", tok)
            value, _ = line.number("the consequent value")
            line.end()
            doc.rules.append(RuleStmt(number, col, clauses, output, value))
        elif word == "set":
            line.next("'set'")
            line.keyword("and_operator")
            op, ocol = line.next("'min' or 'product'")
            if op not in ("min", "product"):
                raise ParseError(number, ocol, f"expected 'min' or 'product', got {op!r}", op)
            line.end()
            if saw_directive:
                raise ParseError(number, col, "duplicate and_operator directive", word)
            saw_directive = True
            doc.and_operator = op
        else:
            raise ParseError(
                number, col, f"expected 'variable', 'mf', 'rule' or 'set', got {word!r}", word
            )
    if not doc.variables:
        raise ParseError(1, 1, "no variables declared")
    return doc


def build_fis(doc: FisDocument) -> SugenoFis:
    """Resolve and validate a document, returning the inference system.

    Unlike ``parse`` this collects *all* violations and raises them together
    as FisValidationError.
    """
    errors: list[ParseError] = []

    inputs: list[VarDecl] = [v for v in doc.variables if v.kind == "input"]
    outputs: list[VarDecl] = [v for v in doc.variables if v.kind == "output"]
    seen_names: set[str] = set()
    for decl in doc.variables:
        if decl.name in seen_names:
            errors.append(
                ParseError(decl.line, decl.column, f"duplicate variable {decl.name!r}", decl.name)
            )
        seen_names.add(decl.name)
    if not outputs:
        errors.append(ParseError(1, 1, "no output variable declared"))
    elif len(outputs) > 1:
        extra = outputs[1]
        errors.append(
            ParseError(extra.line, extra.column, "more than one output variable", extra.name)
        )
    if not inputs:
        errors.append(ParseError(1, 1, "no input variable declared"))
    for decl in outputs:
        if decl.mfs:
            mf = decl.mfs[0]
            errors.append(
                ParseError(mf.line, mf.column, "output variables take no membership functions", mf.term)
            )

    variables: dict[str, FuzzyVariable] = {}
    for decl in inputs:
        terms = []
        term_names = set()
        ok = True
        for mf in decl.mfs:
            if mf.term in term_names:
                errors.append(
                    ParseError(mf.line, mf.column, f"duplicate term {mf.term!r} in {decl.name!r}", mf.term)
                )
                ok = False
                continue
            term_names.add(mf.term)
            terms.append((mf.term, mf))
        if not ok:
            continue
        try:
            variables[decl.name] = FuzzyVariable(
                name=decl.name,
                unit=decl.unit,
                domain=(decl.lo, decl.hi),
                terms=tuple((name, TrapezoidMF(*mf.points)) for name, mf in terms),
            )
        except FisConfigError as exc:
            bad = terms[0][1] if terms else decl
            errors.append(ParseError(bad.line, bad.column, str(exc)))

    output = outputs[0] if outputs else None
    rules: list[Rule] = []
    seen_antecedents: dict[frozenset, RuleStmt] = {}
    for stmt in doc.rules:
        ok = True
        clause_vars: set[str] = set()
        for clause in stmt.clauses:
            if clause.variable in clause_vars:
                errors.append(
                    ParseError(clause.line, clause.column,
                               f"duplicate clause for variable {clause.variable!r}", clause.variable)
                )
                ok = False
                continue
            clause_vars.add(clause.variable)
            var = variables.get(clause.variable)
            if var is None:
                errors.append(
                    ParseError(clause.line, clause.column,
                               f"unknown input variable {clause.variable!r}", clause.variable)
                )
                ok = False
            else:
                try:
                    var.term(clause.term)
                except FisConfigError:
                    errors.append(
                        ParseError(clause.line, clause.column,
                                   f"variable {clause.variable!r} has no term {clause.term!r}",
                                   clause.term)
                    )
                    ok = False
        if output is not None:
            if stmt.output != output.name:
                errors.append(
                    ParseError(stmt.line, stmt.column,
                               f"rule assigns {stmt.output!r}, the output variable is {output.name!r}",
                               stmt.output)
                )
                ok = False
            elif not output.lo <= stmt.consequent <= output.hi:
                errors.append(
                    ParseError(stmt.line, stmt.column,
                               f"consequent {_format_number(stmt.consequent)} outside output domain "
                               f"[{_format_number(output.lo)}, {_format_number(output.hi)}]")
                )
                ok = False
        key = frozenset((c.variable, c.term) for c in stmt.clauses)
        if key in seen_antecedents:
            first = seen_antecedents[key]
            errors.append(
                ParseError(stmt.line, stmt.column,
                           f"rule repeats the antecedent of line {first.line}")
            )
            ok = False
        else:
            seen_antecedents[key] = stmt
        if ok:
            rules.append(
                Rule(
                    antecedent=tuple((c.variable, c.term) for c in stmt.clauses),
                    consequent=stmt.consequent,
                )
            )

    if errors:
        raise FisValidationError(errors)

    assert output is not None
    return SugenoFis(
        inputs=tuple(variables[decl.name] for decl in inputs),
        output_name=output.name,
        output_domain=(output.lo, output.hi),
        rules=tuple(rules),
        and_operator=doc.and_operator,
    )


def parse_fis(source: str) -> SugenoFis:
    """Parse and validate in one step."""
    return build_fis(parse(source))


def load_fis(path) -> SugenoFis:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_fis(handle.read())


def _format_number(value: float) -> str:
    """Canonical number form: integers without a fraction, full precision
    positional decimals otherwise (repr round-trips, Decimal drops the
    exponent notation the grammar does not allow)."""
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return format(Decimal(repr(value)), "f")


def serialize(fis: SugenoFis) -> str:
    """Render a system as canonical ``.fis`` text.

    parse(serialize(fis)) reconstructs a structurally identical system: rule
    order is preserved verbatim and numbers are printed with full round-trip
    precision.
    """
    lines: list[str] = [f"set and_operator {fis.and_operator}", ""]
    for var in fis.inputs:
        unit = f" [{var.unit}]" if var.unit else ""
        lo, hi = var.domain
        lines.append(
            f"variable input {var.name}{unit} domain {_format_number(lo)} {_format_number(hi)}"
        )
        for term_name, mf in var.terms:
            points = " ".join(_format_number(p) for p in (mf.a, mf.b, mf.c, mf.d))
            lines.append(f"  mf {term_name} trap {points}")
        lines.append("")
    lo, hi = fis.output_domain
    lines.append(f"variable output {fis.output_name} domain {_format_number(lo)} {_format_number(hi)}")
    lines.append("")
    for rule in fis.rules:
        clauses = " AND ".join(f"{var} IS {term}" for var, term in rule.antecedent)
        lines.append(f"rule IF {clauses} THEN {fis.output_name} = {_format_number(rule.consequent)}")
    return "\n".join(lines).rstrip("\n") + "\n"
