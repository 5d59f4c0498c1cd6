"""Re-verify every claim of a catalog record and collect per-claim verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..complexify import check_cauchy_riemann, realify
from ..expr import ExprError, add, is_zero, neg, substitute, total_derivative
from ..expr.zerotest import DomainTooTightError
from ..integrals import (
    IntegralPair, TruncatedTrajectoryError, drift, integrate_trajectory,
    match_integral, noether_integral, verify_coupled_relations,
)
from ..liealg import (
    DependentBasisError, check_jacobi, expand_in_span, format_combination,
    lie_bracket, structure_constants,
)
from ..symmetry import check_lie_symmetry, check_noether_like, split_symmetry
from ..variational import check_lagrangian_pair, el_scalar
from .records import CatalogRecord, Claim, LagrangianBlock

DRIFT_TOL = 1e-6
FREE_DRIFT_TOL = 1e-10


@dataclass
class ClaimResult:
    record: str
    claim: str
    verdict: bool
    witness: Optional[str] = None
    drift: Optional[float] = None
    flag: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"record": self.record, "claim": self.claim,
               "verdict": "pass" if self.verdict else "fail"}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.drift is not None:
            out["drift"] = self.drift
        if self.flag is not None:
            out["flag"] = self.flag
        return out

    def line(self) -> str:
        text = f"{self.record:15s} {'pass' if self.verdict else 'FAIL'}  {self.claim}"
        if self.drift is not None:
            text += f"  (drift {self.drift:.2e})"
        if self.flag:
            text += f"  [{self.flag}]"
        if self.witness and not self.verdict:
            text += f"  -- {self.witness}"
        return text


@dataclass
class RecordReport:
    record: str
    status: str
    results: List[ClaimResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """All unflagged claims pass."""
        return all(r.verdict for r in self.results if r.flag is None)

    def failures(self) -> List[ClaimResult]:
        return [r for r in self.results if not r.verdict and r.flag is None]

    def get(self, claim: str) -> ClaimResult:
        for r in self.results:
            if r.claim == claim:
                return r
        raise KeyError(claim)


def witness_text(res) -> Optional[str]:
    if res:
        return None
    pts = ", ".join(f"{k}={v:.4g}" for k, v in (res.witness or {}).items())
    return f"residual {res.worst:.3g} at {pts}" if pts else f"residual {res.worst:.3g}"


def _all_zero(exprs, dom, mode="real"):
    """First failing ZeroResult, or the last passing one."""
    res = None
    for e in exprs:
        res = is_zero(e, dom, mode=mode)
        if not res:
            return res
    return res


def operator_count(rec: CatalogRecord) -> int:
    """Non-null real operators split from the main symmetries (complex count for complex records)."""
    if rec.level == "complex":
        return len(rec.symmetries)
    n = 0
    for s in rec.symmetries:
        pair = split_symmetry(s.symmetry)
        n += sum(not X.is_null() for X in (pair.X1, pair.X2))
    return n


def computed_pair(block: LagrangianBlock, name: str) -> IntegralPair:
    s = block.symmetry(name)
    return noether_integral(s.symmetry, block.lagrangian, s.gauge)


class _Verifier:
    def __init__(self, rec: CatalogRecord):
        self.rec = rec
        self.dom = rec.domain
        self.report = RecordReport(rec.name, rec.status)

    def add(self, claim, verdict, witness=None, drift=None, flag=None):
        self.report.results.append(
            ClaimResult(self.rec.name, claim, bool(verdict), witness, drift, flag))

    def guarded(self, claim, fn, flag=None):
        """Run a check; expression and sampling errors become failures."""
        try:
            fn()
        except (ExprError, ArithmeticError, DomainTooTightError, DependentBasisError) as exc:
            self.add(claim, False, f"{type(exc).__name__}: {exc}", flag=flag)

    def claim_forms(self, claim: Claim):
        """(suffix, expression, flag) for the printed form and, if present, its reading."""
        if claim.reading is None:
            yield "", claim.printed, (claim.status if claim.flagged else None)
        else:
            yield " (printed)", claim.printed, claim.status
            yield "", claim.reading, None

    # -- Lagrangians and equations ------------------------------------------------

    def lagrangian_block(self, prefix: str, block: LagrangianBlock):
        rec, dom = self.rec, self.dom
        p = realify(block.lagrangian)

        def cr():
            res = check_cauchy_riemann(p, dom)
            self.add(f"{prefix}Cauchy-Riemann for the realified Lagrangian", res)
        self.guarded(f"{prefix}Cauchy-Riemann for the realified Lagrangian", cr)

        def el():
            w = el_scalar(block.lagrangian, dom).w
            res = is_zero(add(w, neg(rec.rcode.w)), dom, mode="complex")
            self.add(f"{prefix}Euler-Lagrange equation is the r-CODE", res, witness_text(res))
        self.guarded(f"{prefix}Euler-Lagrange equation is the r-CODE", el)

        if block.real_lagrangians and rec.level == "real":
            c1, c2 = block.real_lagrangians
            forms1, forms2 = list(self.claim_forms(c1)), list(self.claim_forms(c2))
            for (suf, L1, fl1), (_, L2, fl2) in zip(forms1, forms2):
                flag = fl1 or fl2
                name = f"{prefix}real Lagrangian pair{suf}"

                def pair(L1=L1, L2=L2, name=name, flag=flag):
                    res = _all_zero([add(L1, neg(p.re)), add(L2, neg(p.im))], dom)
                    ok = bool(res) and check_lagrangian_pair(L1, L2, rec.system, dom)
                    self.add(name, ok, witness_text(res), flag=flag)
                self.guarded(name, pair, flag)

    def equations(self):
        rec, dom = self.rec, self.dom

        def split():
            w = realify(el_scalar(rec.complex_lagrangian, dom).w)
            res = _all_zero([add(w.re, neg(rec.system.w1)), add(w.im, neg(rec.system.w2))], dom)
            self.add("realified Euler-Lagrange equation is the system", res, witness_text(res))
        self.guarded("realified Euler-Lagrange equation is the system", split)

        def rcode():
            w = realify(rec.rcode.w)
            res = _all_zero([add(w.re, neg(rec.system.w1)), add(w.im, neg(rec.system.w2))], dom)
            self.add("realified r-CODE is the system", res, witness_text(res))
        self.guarded("realified r-CODE is the system", rcode)

        for key, claim in rec.implicit:
            for suf, e, flag in self.claim_forms(claim):
                name = f"implicit equation {key}{suf}"

                def imp(e=e, name=name, flag=flag):
                    res = is_zero(substitute(e, rec.system.rhs), dom, mode="real")
                    self.add(name, res, witness_text(res), flag=flag)
                self.guarded(name, imp, flag)

    # -- symmetries and operators -----------------------------------------------

    def symmetries(self, prefix: str, block: LagrangianBlock):
        for s in block.symmetries:
            flag = s.status if s.status != "verified" else None
            name = f"{prefix}Noether-like condition {s.name}"

            def nl(s=s, name=name, flag=flag):
                pair = split_symmetry(s.symmetry)
                ok = check_noether_like(pair, block.lagrangian, s.gauge, self.dom)
                self.add(name, ok, None if ok else "residual does not vanish", flag=flag)
            self.guarded(name, nl, flag)

    def operators(self):
        rec, dom = self.rec, self.dom
        for op in rec.operators:
            flag = op.status if op.status != "verified" else None
            if op.source:
                sym, part = op.source
                name = f"operator {op.name} is {sym}.{part} up to a scalar"

                def src(op=op, sym=sym, part=part, name=name, flag=flag):
                    _, s = rec.find_symmetry(sym)
                    pair = split_symmetry(s.symmetry)
                    X = pair.X1 if part == "re" else pair.X2
                    ok = (not X.is_null()) and expand_in_span(op.field, [X], dom) is not None
                    self.add(name, ok, None if ok else f"split part is {X}", flag=flag)
                self.guarded(name, src, flag)
            if op.lie:
                expect = op.lie == "holds"
                name = f"Lie condition {op.name}: {op.lie}" + ("" if expect else " (expected)")

                def lie(op=op, expect=expect, name=name, flag=flag):
                    holds = check_lie_symmetry(op.field, rec.system, dom)
                    self.add(name, holds == expect,
                             None if holds == expect else f"Lie condition {'holds' if holds else 'fails'}",
                             flag=flag)
                self.guarded(name, lie, flag)

        count = operator_count(rec)
        listed = sum(1 for op in rec.operators if op.source and any(
            s.name == op.source[0] for s in rec.symmetries))
        expect = len(rec.symmetries) if rec.level == "complex" else listed
        self.add(f"operator count {count}", count == expect,
                 None if count == expect else f"{listed} operators listed")

    def closure(self):
        rec, dom = self.rec, self.dom
        if not rec.extra_operators:
            return
        base = [op for op in rec.operators if op.source]
        names = [op.name for op in base]
        fields = [op.field for op in base]
        for extra in rec.extra_operators:
            if not extra.bracket:
                continue
            a, b = extra.bracket
            name = f"[{a},{b}] is {extra.name} and leaves the operator span"

            def chk(extra=extra, a=a, b=b, name=name):
                B = lie_bracket(rec.operator(a).field, rec.operator(b).field)
                same = expand_in_span(B, [extra.field], dom) is not None
                table = structure_constants(names, fields, dom)
                i, j = sorted((names.index(a), names.index(b)))
                outside = not table.closed and (i, j) in table.residuals
                ok = same and outside
                self.add(name, ok, None if ok else f"bracket is {B}")
            self.guarded(name, chk)

    def algebra(self):
        rec, dom = self.rec, self.dom
        spec = rec.algebra
        if spec is None:
            return
        fields = [rec.operator(n).field for n in spec.basis]
        try:
            table = structure_constants(spec.basis, fields, dom)
        except (DependentBasisError, ExprError, ArithmeticError) as exc:
            self.add("algebra table", False, str(exc))
            return
        self.add("algebra closes", table.closed,
                 None if table.closed else "; ".join(table.format_row(i, j) for i, j in table.residuals))
        n = len(spec.basis)
        missing = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in spec.entries]
        self.add("algebra table lists every bracket", not missing,
                 None if not missing else f"{len(missing)} brackets missing")
        for (i, j), entry in sorted(spec.entries.items()):
            got = table.coefficient(i, j)
            label = f"[{spec.basis[i]},{spec.basis[j]}]"
            forms = [("", entry.printed, entry.status if entry.status != "verified" else None)]
            if entry.reading is not None:
                forms = [(" (printed)", entry.printed, entry.status), ("", entry.reading, None)]
            for suf, coeffs, flag in forms:
                ok = got is not None and tuple(got) == tuple(coeffs)
                wit = None if ok else (
                    "not in span" if got is None else f"computed {format_combination(got, spec.basis)}")
                self.add(f"bracket {label} = {format_combination(coeffs, spec.basis)}{suf}", ok, wit, flag=flag)
        if table.closed:
            self.add("Jacobi identity", check_jacobi(table))

    # -- integrals ----------------------------------------------------------------

    def integral_claims(self):
        """(block prefix, block, entry, suffix, expression, flag) for every integral form."""
        blocks = [("", self.rec.main)]
        if self.rec.alternative:
            blocks.append(("alt.", self.rec.alternative))
        for prefix, block in blocks:
            for it in block.integrals:
                for suf, e, flag in self.claim_forms(it.claim):
                    yield prefix, block, it, suf, e, flag

    def integrals(self):
        rec, dom = self.rec, self.dom
        for prefix, block, it, suf, e, flag in self.integral_claims():
            name = f"{prefix}integral {it.name}{suf}"

            def chk(block=block, it=it, e=e, name=name, flag=flag):
                if rec.level == "complex":
                    d = total_derivative(e, rec.rcode.rhs)
                    res = is_zero(d, dom, mode="complex")
                    p = realify(e)
                    target, pair = p.re, computed_pair(block, it.source)
                else:
                    res = _all_zero([total_derivative(e, rec.system.rhs)], dom)
                    target, pair = e, computed_pair(block, it.source)
                if not res:
                    self.add(f"{name} on shell", False, witness_text(res), flag=flag)
                    return
                m = match_integral(target, pair, dom)
                wit = None if m.matched else f"not a combination of the {it.source} integrals"
                if m.matched:
                    wit = f"{m.alpha} I1 + {m.beta} I2 of {it.source}" if rec.level == "real" else None
                self.add(f"{name} on shell", True, wit if m.matched else None, flag=flag)
                self.add(f"{name} from {it.source}", m.matched, None if m.matched else wit, flag=flag)
            self.guarded(f"{name} on shell", chk, flag)

    def coupled(self):
        rec, dom = self.rec, self.dom
        if rec.level != "real":
            return
        for s in rec.symmetries:
            name = f"coupled relations for {s.name}"

            def chk(s=s, name=name):
                I = noether_integral(s.symmetry, rec.complex_lagrangian, s.gauge)
                self.add(name, verify_coupled_relations(I, split_symmetry(s.symmetry), dom))
            self.guarded(name, chk)

    def trajectory(self):
        rec = self.rec
        spec = rec.trajectory
        if spec is None:
            return
        tol = FREE_DRIFT_TOL if rec.name == "free_particle" else DRIFT_TOL
        try:
            traj = integrate_trajectory(rec.system, spec.init, spec.T, spec.step, rec.constants)
        except TruncatedTrajectoryError as exc:
            self.add("trajectory", False, str(exc))
            return
        for prefix, block, it, suf, e, flag in self.integral_claims():
            if flag is not None:
                continue
            parts = tuple(realify(e)) if rec.level == "complex" else (e,)
            try:
                d = max(drift(IntegralPair(*(parts * 2)[:2]), traj, rec.constants))
            except (ArithmeticError, ExprError) as exc:
                self.add(f"{prefix}integral {it.name} drift", False, str(exc))
                continue
            self.add(f"{prefix}integral {it.name} drift", d <= tol, None if d <= tol else f"tolerance {tol:g}",
                     drift=d)

    def run(self) -> RecordReport:
        self.equations()
        self.lagrangian_block("", self.rec.main)
        if self.rec.alternative:
            self.lagrangian_block("alt.", self.rec.alternative)
        self.symmetries("", self.rec.main)
        if self.rec.alternative:
            self.symmetries("alt.", self.rec.alternative)
        self.operators()
        self.closure()
        self.algebra()
        self.integrals()
        self.coupled()
        self.trajectory()
        return self.report


def verify_record(rec: CatalogRecord) -> RecordReport:
    """Per-claim verdicts for one record; failures are entries, never exceptions."""
    return _Verifier(rec).run()


def verify_catalog(records: List[CatalogRecord]) -> List[RecordReport]:
    return [verify_record(r) for r in records]


def summarize(reports: List[RecordReport]) -> Dict[str, int]:
    flat = [r for rep in reports for r in rep.results]
    return {
        "claims": len(flat),
        "passed": sum(r.verdict for r in flat),
        "failed": sum(not r.verdict and r.flag is None for r in flat),
        "flagged": sum(r.flag is not None for r in flat),
    }
