"""Record types for the bundled corpus and the sectioned text format they are stored in.

A record file is a sequence of ``[section]`` headers followed by ``key = value``
entries.  ``#`` starts a comment, and an indented line continues the previous
value.  Keys of the form ``name.attr`` attach attributes (``status``,
``reading``, ``lie``, ``bracket``, ``note``) to an earlier entry.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from ..complexify import realify
from ..expr import (
    COMPLEX_BASE, DEFAULT_DOMAIN, REAL_BASE, ZERO, Expr, ExprError, ParseError,
    SampleDomain, add, is_zero, neg, parse,
)
from ..symmetry import ComplexPointSymmetry, RealVectorField
from ..variational import ScalarRCODE, System2

STATUSES = ("verified", "reconstructed", "unverified")
PARAMETERS = ("A", "b")

_SECTIONS = {
    "record", "define", "constants", "domain", "lagrangian", "rcode", "system",
    "implicit", "real_lagrangians", "symmetries", "operators", "extra_operators",
    "integrals", "algebra", "trajectory",
}
_ALT_SECTIONS = {"lagrangian", "real_lagrangians", "symmetries", "integrals"}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*$")


class CatalogParseError(ExprError):
    """Syntax error in a record file, with 1-based line and column."""

    def __init__(self, message: str, path: str, line: int, column: int):
        super().__init__(f"{path}:{line}:{column}: {message}")
        self.path = path
        self.line = line
        self.column = column


class CatalogValidationError(ExprError):
    """A record parsed but one of its fields is inconsistent."""

    def __init__(self, record: str, fieldname: str, message: str):
        super().__init__(f"record {record!r}, field {fieldname!r}: {message}")
        self.record = record
        self.field = fieldname


# ---------------------------------------------------------------------------
# record types
# ---------------------------------------------------------------------------

@dataclass
class Claim:
    """A printed object plus an optional corrected reading and a flag."""

    printed: Expr
    reading: Optional[Expr] = None
    status: str = "verified"
    note: str = ""

    @property
    def effective(self) -> Expr:
        return self.reading if self.reading is not None else self.printed

    @property
    def flagged(self) -> bool:
        return self.status != "verified"


@dataclass
class SymmetryEntry:
    name: str
    symmetry: ComplexPointSymmetry
    gauge: Expr = ZERO
    status: str = "verified"
    note: str = ""


@dataclass
class OperatorEntry:
    """A printed real operator and the split part it should equal up to a scalar."""

    name: str
    field: RealVectorField
    source: Optional[Tuple[str, str]] = None  # (symmetry name, "re" | "im")
    lie: Optional[str] = None  # expected Lie-condition outcome: "holds" | "fails"
    bracket: Optional[Tuple[str, str]] = None  # this field is [X_a, X_b]
    status: str = "verified"
    note: str = ""


@dataclass
class IntegralEntry:
    name: str
    source: str
    claim: Claim


@dataclass
class AlgebraEntry:
    printed: Tuple[Fraction, ...]
    reading: Optional[Tuple[Fraction, ...]] = None
    status: str = "verified"

    @property
    def effective(self) -> Tuple[Fraction, ...]:
        return self.reading if self.reading is not None else self.printed


@dataclass
class AlgebraSpec:
    basis: List[str]
    entries: Dict[Tuple[int, int], AlgebraEntry] = field(default_factory=dict)


@dataclass
class TrajectorySpec:
    init: Tuple[float, ...]
    T: float
    step: float


@dataclass
class LagrangianBlock:
    """One complex Lagrangian with its printed real pair, symmetries and integrals."""

    lagrangian: Expr
    real_lagrangians: Optional[Tuple[Claim, Claim]] = None
    symmetries: List[SymmetryEntry] = field(default_factory=list)
    integrals: List[IntegralEntry] = field(default_factory=list)

    def symmetry(self, name: str) -> SymmetryEntry:
        for s in self.symmetries:
            if s.name == name:
                return s
        raise KeyError(name)


@dataclass
class CatalogRecord:
    name: str
    level: str
    status: str
    summary: str
    main: LagrangianBlock
    rcode: ScalarRCODE
    system: System2
    implicit: List[Tuple[str, Claim]] = field(default_factory=list)
    operators: List[OperatorEntry] = field(default_factory=list)
    extra_operators: List[OperatorEntry] = field(default_factory=list)
    algebra: Optional[AlgebraSpec] = None
    alternative: Optional[LagrangianBlock] = None
    domain: SampleDomain = DEFAULT_DOMAIN
    trajectory: Optional[TrajectorySpec] = None
    constants: Dict[str, Fraction] = field(default_factory=dict)

    @property
    def complex_lagrangian(self) -> Expr:
        return self.main.lagrangian

    @property
    def symmetries(self) -> List[SymmetryEntry]:
        return self.main.symmetries

    @property
    def integrals(self) -> List[IntegralEntry]:
        return self.main.integrals

    @property
    def flags(self) -> Dict[str, str]:
        """Every claim not marked verified, keyed by a readable claim name."""
        out = {}
        if self.status != "verified":
            out["record"] = self.status
        blocks = [("", self.main)] + ([("alt.", self.alternative)] if self.alternative else [])
        for prefix, block in blocks:
            if block.real_lagrangians:
                for k, c in zip(("L1", "L2"), block.real_lagrangians):
                    if c.flagged:
                        out[f"{prefix}{k}"] = c.status
            for s in block.symmetries:
                if s.status != "verified":
                    out[f"{prefix}{s.name}"] = s.status
            for it in block.integrals:
                if it.claim.flagged:
                    out[f"{prefix}{it.name}"] = it.claim.status
        for k, c in self.implicit:
            if c.flagged:
                out[k] = c.status
        for op in self.operators + self.extra_operators:
            if op.status != "verified":
                out[op.name] = op.status
        if self.algebra:
            for (i, j), e in self.algebra.entries.items():
                if e.status != "verified":
                    out[f"[{self.algebra.basis[i]},{self.algebra.basis[j]}]"] = e.status
        return out

    def find_symmetry(self, name: str) -> Tuple[LagrangianBlock, SymmetryEntry]:
        """The block (main or alternative) holding a symmetry, and the entry."""
        for block in [self.main] + ([self.alternative] if self.alternative else []):
            for s in block.symmetries:
                if s.name == name:
                    return block, s
        raise KeyError(name)

    def operator(self, name: str) -> OperatorEntry:
        for op in self.operators + self.extra_operators:
            if op.name == name:
                return op
        raise KeyError(name)


# ---------------------------------------------------------------------------
# raw parsing
# ---------------------------------------------------------------------------

@dataclass
class _Entry:
    key: str
    value: str
    line: int
    column: int  # column of the first character of the value
    # (offset into value, line, column) for each physical line of the value
    segments: List[Tuple[int, int, int]] = field(default_factory=list)

    def locate(self, offset: int) -> Tuple[int, int]:
        line, col, start = self.line, self.column, 0
        for seg_start, seg_line, seg_col in self.segments:
            if seg_start <= offset:
                start, line, col = seg_start, seg_line, seg_col
        return line, col + max(offset - start, 0)


def _split_sections(text: str, path: str) -> List[Tuple[str, int, List[_Entry]]]:
    sections: List[Tuple[str, int, List[_Entry]]] = []
    current: Optional[List[_Entry]] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line[0] in " \t":
            if current is None or not current:
                raise CatalogParseError("continuation line without an entry", path, lineno, 1)
            entry = current[-1]
            entry.value += " "
            entry.segments.append((len(entry.value), lineno, len(line) - len(line.lstrip()) + 1))
            entry.value += line.strip()
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise CatalogParseError("unterminated section header", path, lineno, len(line) + 1)
            name = line[1:-1].strip()
            base = name[4:] if name.startswith("alt.") else name
            allowed = _ALT_SECTIONS if name.startswith("alt.") else _SECTIONS
            if base not in allowed:
                raise CatalogParseError(f"unknown section [{name}]", path, lineno, 2)
            current = []
            sections.append((name, lineno, current))
            continue
        if current is None:
            raise CatalogParseError("entry before the first section header", path, lineno, 1)
        if "=" not in line:
            raise CatalogParseError("expected 'key = value'", path, lineno, 1)
        key, value = line.split("=", 1)
        col = len(key) + 2 + (len(value) - len(value.lstrip()))
        entry = _Entry(key.strip(), value.strip(), lineno, col)
        entry.segments.append((0, lineno, col))
        current.append(entry)
    return sections


class _RecordBuilder:
    def __init__(self, path: str):
        self.path = path
        self.macros: Dict[str, Expr] = {}
        self.name = "?"

    # -- helpers -----------------------------------------------------------

    def fail(self, msg: str, entry: _Entry, offset: int = 0):
        if offset < 0:  # points into the key
            raise CatalogParseError(msg, self.path, entry.line, max(entry.column + offset, 1))
        line, col = entry.locate(offset)
        raise CatalogParseError(msg, self.path, line, col)

    def expr(self, entry: _Entry, text: Optional[str] = None, offset: int = 0) -> Expr:
        src = entry.value if text is None else text
        try:
            return parse(src, self.macros)
        except ParseError as exc:
            self.fail(str(exc).split(" at line")[0], entry, offset + exc.column - 1)
        except ExprError as exc:
            self.fail(str(exc), entry, offset)

    def fields(self, entry: _Entry, text: str, offset: int, n: Tuple[int, ...]) -> List[Expr]:
        parts = text.split("|")
        if len(parts) not in n:
            want = " or ".join(str(k) for k in n)
            self.fail(f"expected {want} '|'-separated expressions, got {len(parts)}", entry, offset)
        out = []
        pos = offset
        for p in parts:
            lead = len(p) - len(p.lstrip())
            out.append(self.expr(entry, p.strip(), pos + lead))
            pos += len(p) + 1
        return out

    def invalid(self, fieldname: str, msg: str):
        raise CatalogValidationError(self.name, fieldname, msg)

    # -- sections ----------------------------------------------------------

    def build(self, sections) -> CatalogRecord:
        by_name: Dict[str, List[_Entry]] = {}
        for name, lineno, entries in sections:
            if name in by_name:
                raise CatalogParseError(f"duplicate section [{name}]", self.path, lineno, 2)
            by_name[name] = entries

        head = {e.key: e for e in by_name.get("record", [])}
        if "name" not in head:
            raise CatalogParseError("missing [record] name", self.path, 1, 1)
        self.name = head["name"].value
        level = head["level"].value if "level" in head else "real"
        status = head["status"].value if "status" in head else "verified"
        if level not in ("real", "complex"):
            self.fail("level must be 'real' or 'complex'", head["level"])
        if status not in STATUSES:
            self.fail(f"status must be one of {STATUSES}", head["status"])
        summary = head["summary"].value if "summary" in head else ""

        for e in by_name.get("define", []):
            if not _IDENT.match(e.key) or e.key in REAL_BASE + COMPLEX_BASE:
                self.fail(f"cannot define {e.key!r}", e, -len(e.key) - 2)
            self.macros[e.key] = self.expr(e)

        constants = {}
        for e in by_name.get("constants", []):
            if e.key not in PARAMETERS:
                self.fail(f"unknown constant {e.key!r}", e)
            try:
                constants[e.key] = Fraction(e.value)
            except (ValueError, ZeroDivisionError):
                self.fail("constant must be a rational number", e)

        domain = self.domain(by_name.get("domain", []))
        main = self.block(by_name, "")
        if main is None:
            self.invalid("lagrangian", "missing [lagrangian] section")
        alternative = self.block(by_name, "alt.")

        rc = {e.key: e for e in by_name.get("rcode", [])}
        if "ddu" not in rc:
            self.invalid("rcode", "missing 'ddu = ...'")
        try:
            rcode = ScalarRCODE(self.expr(rc["ddu"]))
        except CatalogParseError:
            raise
        except ExprError as exc:
            self.invalid("rcode", str(exc))

        sy = {e.key: e for e in by_name.get("system", [])}
        if set(sy) != {"ddf", "ddg"}:
            self.invalid("system", "needs exactly 'ddf = ...' and 'ddg = ...'")
        try:
            system = System2(self.expr(sy["ddf"]), self.expr(sy["ddg"]))
        except CatalogParseError:
            raise
        except ExprError as exc:
            self.invalid("system", str(exc))

        implicit = [(k, c) for k, c in self.claims(by_name.get("implicit", [])).items()]
        operators = self.operators(by_name.get("operators", []), with_source=True)
        extra = self.operators(by_name.get("extra_operators", []), with_source=False)
        algebra = self.algebra(by_name.get("algebra", []))
        trajectory = self.trajectory(by_name.get("trajectory", []))

        rec = CatalogRecord(self.name, level, status, summary, main, rcode, system, implicit,
                            operators, extra, algebra, alternative, domain, trajectory, constants)
        validate_record(rec)
        return rec

    def domain(self, entries: List[_Entry]) -> SampleDomain:
        intervals = {}
        for e in entries:
            parts = e.value.split()
            try:
                lo, hi = (float(p) for p in parts)
            except ValueError:
                self.fail("domain entries are 'lo hi'", e)
            if e.key not in DEFAULT_DOMAIN.intervals:
                self.fail(f"no sampling interval for {e.key!r}", e, -len(e.key) - 2)
            if not lo < hi:
                self.fail("empty interval", e)
            intervals[e.key] = (lo, hi)
        return SampleDomain(intervals)

    def split_attrs(self, entries: List[_Entry]):
        base: Dict[str, _Entry] = {}
        attrs: Dict[str, Dict[str, _Entry]] = {}
        for e in entries:
            if "." in e.key and not e.key.startswith("["):
                name, attr = e.key.rsplit(".", 1)
                if name not in base:
                    self.fail(f"attribute for unknown entry {name!r}", e, -len(e.key) - 2)
                attrs.setdefault(name, {})[attr] = e
            else:
                if e.key in base:
                    self.fail(f"duplicate entry {e.key!r}", e, -len(e.key) - 2)
                base[e.key] = e
                attrs.setdefault(e.key, {})
        return base, attrs

    def status(self, attrs: Dict[str, _Entry]) -> str:
        if "status" not in attrs:
            return "reconstructed" if "reading" in attrs else "verified"
        s = attrs["status"].value
        if s not in STATUSES:
            self.fail(f"status must be one of {STATUSES}", attrs["status"])
        return s

    def note(self, attrs: Dict[str, _Entry]) -> str:
        return attrs["note"].value if "note" in attrs else ""

    def check_attrs(self, attrs: Dict[str, _Entry], allowed: Tuple[str, ...]):
        for k, e in attrs.items():
            if k not in allowed:
                self.fail(f"unknown attribute {k!r}", e, -len(e.key) - 2)

    def claim(self, entry: _Entry, attrs: Dict[str, _Entry], text: Optional[str] = None,
              offset: int = 0) -> Claim:
        self.check_attrs(attrs, ("status", "reading", "note"))
        printed = self.expr(entry, text, offset)
        reading = self.expr(attrs["reading"]) if "reading" in attrs else None
        return Claim(printed, reading, self.status(attrs), self.note(attrs))

    def claims(self, entries: List[_Entry]) -> Dict[str, Claim]:
        base, attrs = self.split_attrs(entries)
        return {k: self.claim(e, attrs[k]) for k, e in base.items()}

    def block(self, by_name, prefix: str) -> Optional[LagrangianBlock]:
        lag = {e.key: e for e in by_name.get(prefix + "lagrangian", [])}
        if not lag:
            if any(k.startswith(prefix) for k in by_name if prefix):
                self.invalid(prefix + "lagrangian", "missing 'L = ...'")
            return None
        if set(lag) != {"L"}:
            self.invalid(prefix + "lagrangian", "needs exactly 'L = ...'")
        L = self.expr(lag["L"])

        pair = None
        rl = self.claims(by_name.get(prefix + "real_lagrangians", []))
        if rl:
            if set(rl) != {"L1", "L2"}:
                self.invalid(prefix + "real_lagrangians", "needs exactly L1 and L2")
            pair = (rl["L1"], rl["L2"])

        syms = []
        base, attrs = self.split_attrs(by_name.get(prefix + "symmetries", []))
        for k, e in base.items():
            self.check_attrs(attrs[k], ("status", "note"))
            xi, eta, *rest = self.fields(e, e.value, 0, (2, 3))
            try:
                Z = ComplexPointSymmetry(xi, eta)
            except CatalogParseError:
                raise
            except ExprError as exc:
                self.invalid(prefix + "symmetries", f"{k}: {exc}")
            syms.append(SymmetryEntry(k, Z, rest[0] if rest else ZERO,
                                      self.status(attrs[k]), self.note(attrs[k])))

        ints = []
        base, attrs = self.split_attrs(by_name.get(prefix + "integrals", []))
        for k, e in base.items():
            src, sep, text = e.value.partition(":")
            if not sep:
                self.fail("integral entries are 'SYMMETRY : expression'", e)
            offset = len(src) + 1 + (len(text) - len(text.lstrip()))
            ints.append(IntegralEntry(k, src.strip(), self.claim(e, attrs[k], text.strip(), offset)))
        return LagrangianBlock(L, pair, syms, ints)

    def operators(self, entries: List[_Entry], with_source: bool) -> List[OperatorEntry]:
        base, attrs = self.split_attrs(entries)
        out = []
        for k, e in base.items():
            self.check_attrs(attrs[k], ("status", "note", "lie", "bracket"))
            source = None
            text, offset = e.value, 0
            if with_source:
                src, sep, text = e.value.partition(":")
                m = re.fullmatch(r"\s*(\w+)\.(re|im)\s*", src)
                if not sep or not m:
                    self.fail("operator entries are 'Zk.re : xi | eta_f | eta_g'", e)
                source = (m.group(1), m.group(2))
                offset = len(src) + 1
            comps = self.fields(e, text, offset, (3,))
            try:
                X = RealVectorField(*comps)
            except CatalogParseError:
                raise
            except ExprError as exc:
                self.invalid("operators", f"{k}: {exc}")
            lie = attrs[k]["lie"].value if "lie" in attrs[k] else None
            if lie not in (None, "holds", "fails"):
                self.fail("lie must be 'holds' or 'fails'", attrs[k]["lie"])
            bracket = None
            if "bracket" in attrs[k]:
                names = [s.strip() for s in attrs[k]["bracket"].value.split(",")]
                if len(names) != 2:
                    self.fail("bracket is 'Xa, Xb'", attrs[k]["bracket"])
                bracket = (names[0], names[1])
            out.append(OperatorEntry(k, X, source, lie, bracket, self.status(attrs[k]), self.note(attrs[k])))
        return out

    def combination(self, entry: _Entry, text: str, basis: List[str]) -> Tuple[Fraction, ...]:
        coeffs = [Fraction(0)] * len(basis)
        s = text.replace(" ", "")
        if s == "0":
            return tuple(coeffs)
        term = re.compile(r"([+-]?)(\d+(?:/\d+)?)?\*?([A-Za-z_]\w*)")
        pos = 0
        while pos < len(s):
            m = term.match(s, pos)
            if not m or (pos > 0 and not m.group(1)):
                self.fail(f"cannot read linear combination {text!r}", entry)
            sign = -1 if m.group(1) == "-" else 1
            c = Fraction(m.group(2)) if m.group(2) else Fraction(1)
            if m.group(3) not in basis:
                self.fail(f"{m.group(3)!r} is not in the algebra basis", entry)
            coeffs[basis.index(m.group(3))] += sign * c
            pos = m.end()
        return tuple(coeffs)

    def algebra(self, entries: List[_Entry]) -> Optional[AlgebraSpec]:
        if not entries:
            return None
        base, attrs = self.split_attrs(entries)
        if "basis" not in base:
            self.invalid("algebra", "missing 'basis = ...'")
        basis = base.pop("basis").value.split()
        spec = AlgebraSpec(basis)
        for k, e in base.items():
            self.check_attrs(attrs[k], ("status", "reading", "note"))
            names = [s.strip() for s in k.split(",")]
            if len(names) != 2 or any(n not in basis for n in names):
                self.fail(f"bracket key {k!r} must be 'Xa,Xb' over the basis", e, -len(k) - 2)
            i, j = basis.index(names[0]), basis.index(names[1])
            if i >= j:
                self.fail("bracket keys must list the lower-index operator first", e, -len(k) - 2)
            printed = self.combination(e, e.value, basis)
            reading = self.combination(attrs[k]["reading"], attrs[k]["reading"].value, basis) \
                if "reading" in attrs[k] else None
            spec.entries[(i, j)] = AlgebraEntry(printed, reading, self.status(attrs[k]))
        return spec

    def trajectory(self, entries: List[_Entry]) -> Optional[TrajectorySpec]:
        if not entries:
            return None
        t = {e.key: e for e in entries}
        if set(t) != {"init", "T", "step"}:
            self.invalid("trajectory", "needs exactly init, T and step")
        try:
            init = tuple(float(v) for v in t["init"].value.split())
            T = float(t["T"].value)
            step = float(t["step"].value)
        except ValueError:
            self.invalid("trajectory", "init, T and step must be numbers")
        if len(init) not in (4, 5):
            self.invalid("trajectory", "init is 'f g df dg' or 'x0 f g df dg'")
        if T <= 0 or step <= 0:
            self.invalid("trajectory", "T and step must be positive")
        return TrajectorySpec(init, T, step)


# ---------------------------------------------------------------------------
# structural validation
# ---------------------------------------------------------------------------

_COMPLEX_ONLY = {"u", "du", "ddu"}
_REAL_ONLY = {"f", "g", "df", "dg", "ddf", "ddg"}


def validate_record(rec: CatalogRecord) -> None:
    """Contexts, arities and cross references; no numerical checks."""

    def bad(fieldname, msg):
        raise CatalogValidationError(rec.name, fieldname, msg)

    blocks = [("", rec.main)] + ([("alt.", rec.alternative)] if rec.alternative else [])
    for prefix, block in blocks:
        if block.lagrangian.free & (_REAL_ONLY | {"ddu"}):
            bad(prefix + "lagrangian", "complex Lagrangian must depend on x, u, u' only")
        if block.real_lagrangians:
            for c in block.real_lagrangians:
                for e in (c.printed, c.effective):
                    if e.free & (_COMPLEX_ONLY | {"ddf", "ddg"}):
                        bad(prefix + "real_lagrangians", "real Lagrangians depend on x, f, g, f', g'")
        names = [s.name for s in block.symmetries]
        if len(set(names)) != len(names):
            bad(prefix + "symmetries", "duplicate symmetry names")
        for s in block.symmetries:
            if s.gauge.free - {"x", "u"}:
                bad(prefix + "symmetries", f"gauge of {s.name} must depend on x, u only")
        for it in block.integrals:
            if it.source not in names:
                bad(prefix + "integrals", f"{it.name} refers to unknown symmetry {it.source!r}")
            for e in (it.claim.printed, it.claim.effective):
                if rec.level == "real" and e.free & (_COMPLEX_ONLY | {"ddf", "ddg"}):
                    bad(prefix + "integrals", f"{it.name} must depend on x, f, g, f', g' only")
                if rec.level == "complex" and e.free & (_REAL_ONLY | {"ddu"}):
                    bad(prefix + "integrals", f"{it.name} must depend on x, u, u' only")

    if rec.rcode.w.free & _REAL_ONLY:
        bad("rcode", "r-CODE lives on the complex side")
    for w in (rec.system.w1, rec.system.w2):
        if w.free & _COMPLEX_ONLY:
            bad("system", "system lives on the real side")
    for k, c in rec.implicit:
        if c.printed.free & _COMPLEX_ONLY:
            bad("implicit", f"{k} lives on the real side")

    sym_names = {s.name for _, b in blocks for s in b.symmetries}
    op_names = set()
    for op in rec.operators + rec.extra_operators:
        if op.name in op_names:
            bad("operators", f"duplicate operator {op.name!r}")
        op_names.add(op.name)
        if op.source and op.source[0] not in sym_names:
            bad("operators", f"{op.name} refers to unknown symmetry {op.source[0]!r}")
    for op in rec.extra_operators:
        if op.bracket and not set(op.bracket) <= op_names:
            bad("extra_operators", f"{op.name} bracket names unknown operators")
    if rec.algebra:
        missing = set(rec.algebra.basis) - op_names
        if missing:
            bad("algebra", f"unknown operators {sorted(missing)}")

    used = set()
    for e in _all_exprs(rec):
        used |= e.named
    used &= set(PARAMETERS)
    if rec.trajectory and not used <= set(rec.constants):
        bad("constants", f"trajectory needs values for {sorted(used - set(rec.constants))}")
    missing = [v for v in used if v not in rec.domain.intervals]
    if missing:
        bad("domain", f"no sampling interval for {missing}")


def _all_exprs(rec: CatalogRecord):
    yield rec.rcode.w
    yield rec.system.w1
    yield rec.system.w2
    for block in [rec.main] + ([rec.alternative] if rec.alternative else []):
        yield block.lagrangian
        for s in block.symmetries:
            yield s.gauge


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

DATA_DIR = Path(__file__).with_name("data")


def check_consistency(rec: CatalogRecord) -> None:
    """The realified Euler-Lagrange equation of the complex Lagrangian is the stored system."""
    from ..variational import DegenerateLagrangianError, el_scalar

    try:
        w = realify(el_scalar(rec.complex_lagrangian, rec.domain).w)
    except (DegenerateLagrangianError, ExprError) as exc:
        raise CatalogValidationError(rec.name, "lagrangian", str(exc)) from None
    for part, got, want in (("ddf", w.re, rec.system.w1), ("ddg", w.im, rec.system.w2)):
        res = is_zero(add(got, neg(want)), rec.domain, mode="real")
        if not res:
            raise CatalogValidationError(
                rec.name, "system",
                f"{part} does not follow from the Lagrangian (worst residual {res.worst:.3g})")


def parse_record(text: str, path: str = "<string>", check: bool = True) -> Optional[CatalogRecord]:
    """Parse one record; an empty (or comment-only) text gives None.

    With ``check`` the stored system is compared with the Lagrangian's
    Euler-Lagrange equation.
    """
    sections = _split_sections(text, path)
    if not sections:
        return None
    rec = _RecordBuilder(path).build(sections)
    if check:
        check_consistency(rec)
    return rec


def load_catalog(path: Union[str, Path, None] = None, check: bool = True) -> List[CatalogRecord]:
    """Load a record file, or every ``*.rec`` file of a directory (sorted by record order).

    With no argument the bundled corpus is loaded.
    """
    path = Path(path) if path is not None else DATA_DIR
    if path.is_dir():
        files = sorted(path.glob("*.rec"))
    elif path.exists():
        files = [path]
    else:
        raise FileNotFoundError(str(path))
    records = []
    for f in files:
        rec = parse_record(f.read_text(encoding="utf-8"), str(f), check)
        if rec is not None:
            records.append(rec)
    names = [r.name for r in records]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise CatalogValidationError(sorted(dup)[0], "name", "duplicate record name")
    return records
