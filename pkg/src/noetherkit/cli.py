"""Command-line front end: ``noetherkit <verb> ...``.

Exit codes: 0 success, 1 a verification failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .catalog.verify import witness_text
from .complexify import check_cauchy_riemann, realify
from .expr import (
    ExprError, ParseError, SampleDomain, evaluate, is_zero, parse, to_str,
    zero_test_settings,
)
from .expr.zerotest import DomainTooTightError, default_seed
from .integrals import (
    IntegralPair, TruncatedTrajectoryError, drift, integrate_trajectory, noether_integral,
    verify_on_shell,
)
from .liealg import DependentBasisError, check_jacobi, lie_bracket, structure_constants
from .symmetry import (
    ComplexPointSymmetry, NotTotalDerivative, RealVectorField, check_noether_like,
    classical_noether_residual, find_gauge, find_real_gauge,
    noether_like_residuals, split_symmetry,
)
from .variational import DegenerateLagrangianError, System2, el_residuals, el_scalar

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _expr(text: str, what: str = "expression"):
    try:
        return parse(text)
    except ParseError as exc:
        caret = " " * (exc.column - 1) + "^"
        raise UsageError(f"cannot parse {what}: {exc}\n  {text}\n  {caret}") from None


def _interval_map(text: Optional[str]) -> Dict[str, Tuple[float, float]]:
    """'x=0.3:1.3,f=0.6:1.4' -> {'x': (0.3, 1.3), 'f': (0.6, 1.4)}."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        name, sep, rng = item.partition("=")
        lo, sep2, hi = rng.partition(":")
        try:
            if not (sep and sep2):
                raise ValueError
            out[name.strip()] = (float(lo), float(hi))
        except ValueError:
            raise UsageError(f"bad --domain entry {item!r}; expected name=lo:hi") from None
    return out


def _assignments(text: Optional[str]) -> Dict[str, str]:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"bad assignment {item!r}; expected name=value")
        out[name.strip()] = value.strip()
    return out


def _field(text: str) -> RealVectorField:
    parts = text.split("|")
    if len(parts) != 3:
        raise UsageError(f"vector field {text!r} must be 'xi | eta_f | eta_g'")
    try:
        return RealVectorField(*(_expr(p.strip(), "field coefficient") for p in parts))
    except ExprError as exc:
        raise UsageError(str(exc)) from None


def _symmetry(args) -> ComplexPointSymmetry:
    try:
        return ComplexPointSymmetry(_expr(args.xi, "xi"), _expr(args.eta, "eta"))
    except ExprError as exc:
        raise UsageError(str(exc)) from None


def _gauge(args, Z, L, dom):
    """None, a parsed gauge, or a searched one for --gauge auto."""
    if args.gauge is None:
        return None
    if args.gauge == "auto":
        return find_gauge(Z, L, dom=dom)
    return _expr(args.gauge, "gauge")


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------

class _Out:
    """Collects text lines or a JSON document, printed once at the end."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.lines: List[str] = []
        self.doc = None

    def emit(self):
        if self.as_json:
            print(json.dumps(self.doc, indent=2, sort_keys=False))
        else:
            for line in self.lines:
                print(line)


def cmd_split(args, dom, out):
    e = _expr(args.expression)
    p = realify(e)
    out.lines = [to_str(p.re), to_str(p.im)]
    out.doc = {"re": to_str(p.re), "im": to_str(p.im)}
    if args.check:
        ok = bool(check_cauchy_riemann(p, dom))
        out.lines.append(f"Cauchy-Riemann: {'pass' if ok else 'fail'}")
        out.doc["cauchy_riemann"] = ok
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_OK


def _system_arg(args, dom) -> System2:
    if args.system:
        return System2(*(_expr(t, "system right-hand side") for t in args.system))
    if args.record:
        return _record(args.record).system
    raise UsageError("a system is needed: give --system W1 W2 or --record NAME")


def cmd_el(args, dom, out):
    if args.pair:
        if len(args.lagrangian) != 2:
            raise UsageError("el --pair needs two real Lagrangians L1 L2")
        L1, L2 = (_expr(t, "Lagrangian") for t in args.lagrangian)
        res = el_residuals(L1, L2, _system_arg(args, dom))
        labels = ("L1 f-equation", "L1 g-equation", "L2 f-equation", "L2 g-equation")
        verdicts = [bool(is_zero(r, dom, mode="real")) for r in res]
        out.lines = [f"{k}: {'pass' if v else 'fail'}" for k, v in zip(labels, verdicts)]
        out.doc = {"residuals": [{"equation": k, "verdict": "pass" if v else "fail"}
                                 for k, v in zip(labels, verdicts)]}
        return EXIT_OK if all(verdicts) else EXIT_FAIL
    if len(args.lagrangian) != 1:
        raise UsageError("el takes one complex Lagrangian (or --pair L1 L2)")
    w = el_scalar(_expr(args.lagrangian[0], "Lagrangian"), dom).w
    out.lines = [f"ddu = {to_str(w)}"]
    out.doc = {"ddu": to_str(w)}
    if args.split:
        p = realify(w)
        out.lines += [f"ddf = {to_str(p.re)}", f"ddg = {to_str(p.im)}"]
        out.doc.update(ddf=to_str(p.re), ddg=to_str(p.im))
    return EXIT_OK


def cmd_noether_check(args, dom, out):
    L = _expr(args.lagrangian, "Lagrangian")
    if args.op:
        if args.xi or args.eta:
            raise UsageError("give either --op or --xi/--eta, not both")
        X = _field(args.op)
        if args.gauge == "auto":
            A = find_real_gauge(X, L, dom=dom)
        else:
            A = _expr(args.gauge or "0", "gauge")
        res = is_zero(classical_noether_residual(X, L, A), dom)
        ok, wit = bool(res), witness_text(res)
        out.lines = [f"X = {X}", f"gauge = {to_str(A)}",
                     f"Noether condition: {'pass' if ok else 'fail'}"]
        out.doc = {"X": str(X), "verdict": "pass" if ok else "fail"}
        if wit:
            out.lines.append(f"witness: {wit}")
            out.doc["witness"] = wit
        return EXIT_OK if ok else EXIT_FAIL
    if not (args.xi and args.eta):
        raise UsageError("noether-check needs --xi and --eta (complex) or --op (real)")
    Z = _symmetry(args)
    A = _gauge(args, Z, L, dom)
    pair = split_symmetry(Z)
    ok = check_noether_like(pair, L, A, dom)
    gauge = to_str(A) if A is not None else "0"
    out.lines = [f"X1 = {pair.X1}", f"X2 = {pair.X2}", f"gauge = {gauge}",
                 f"Noether-like condition: {'pass' if ok else 'fail'}"]
    out.doc = {"X1": str(pair.X1), "X2": str(pair.X2), "gauge": gauge, "verdict": "pass" if ok else "fail"}
    if not ok:
        for part, r in zip(("real", "imaginary"), noether_like_residuals(pair, L, A)):
            wit = witness_text(is_zero(r, dom))
            if wit:
                out.lines.append(f"witness ({part} part): {wit}")
                out.doc.setdefault("witness", wit)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_integrals(args, dom, out):
    L = _expr(args.lagrangian, "Lagrangian")
    Z = _symmetry(args)
    A = _gauge(args, Z, L, dom)
    I = noether_integral(Z, L, A)
    sys_ = System2.from_rcode(el_scalar(L, dom))
    ok = verify_on_shell(I, sys_, dom)
    out.lines = [f"I1 = {to_str(I.I1)}", f"I2 = {to_str(I.I2)}",
                 f"on shell: {'pass' if ok else 'fail'}"]
    out.doc = {"I1": to_str(I.I1), "I2": to_str(I.I2), "verdict": "pass" if ok else "fail"}
    return EXIT_OK if ok else EXIT_FAIL


def _ops_file(path: str) -> Tuple[List[str], List[str]]:
    """Operators from a file, one per line as 'name = xi | eta_f | eta_g' or bare."""
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    names, fields = [], []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, _, rest = line.rpartition("=") if "=" in line else ("", "", line)
        names.append(name.strip() or f"X{len(names) + 1}")
        fields.append(rest)
    return names, fields


def cmd_bracket(args, dom, out):
    names = None
    texts = list(args.fields)
    if args.ops:
        if texts:
            raise UsageError("give fields either inline or with --ops, not both")
        names, texts = _ops_file(args.ops)
    fields = [_field(t) for t in texts]
    if not (args.table or args.ops):
        if len(fields) != 2:
            raise UsageError("bracket needs exactly two fields (or --table)")
        B = lie_bracket(*fields)
        comps = [to_str(c) for c in B.components]
        out.lines = [" | ".join(comps)]
        out.doc = {"bracket": comps}
        return EXIT_OK
    names = names or [f"X{k + 1}" for k in range(len(fields))]
    table = structure_constants(names, fields, dom)
    out.lines = table.rows()
    out.lines.append(f"closed: {'yes' if table.closed else 'no'}")
    jacobi = check_jacobi(table) if table.closed else None
    if jacobi is not None:
        out.lines.append(f"Jacobi: {'pass' if jacobi else 'fail'}")
    out.doc = {"rows": table.rows(), "closed": table.closed, "jacobi": jacobi}
    return EXIT_OK if jacobi is not False else EXIT_FAIL


def _drift_rows(rec, traj, tol):
    from .catalog.verify import DRIFT_TOL, FREE_DRIFT_TOL
    tol = tol if tol is not None else (FREE_DRIFT_TOL if rec.name == "free_particle" else DRIFT_TOL)
    blocks = [("", rec.main)] + ([("alt.", rec.alternative)] if rec.alternative else [])
    rows = []
    for prefix, block in blocks:
        for it in block.integrals:
            e = it.claim.effective
            pair = IntegralPair(*realify(e)) if rec.level == "complex" else IntegralPair(e, e)
            d = max(drift(pair, traj, rec.constants))
            rows.append((prefix + it.name, d, d <= tol))
    return rows


def cmd_trajectory(args, dom, out):
    constants = {k: float(Fraction(v)) for k, v in _assignments(args.const).items()}
    rec = None
    if args.record:
        rec = _record(args.record)
        sys_ = rec.system
        spec = rec.trajectory
        init = args.init or list(spec.init)
        T = args.T if args.T is not None else spec.T
        step = args.step if args.step is not None else spec.step
        constants = {**{k: float(v) for k, v in rec.constants.items()}, **constants}
    elif args.lagrangian:
        sys_ = System2.from_rcode(el_scalar(_expr(args.lagrangian, "Lagrangian"), dom))
        init, T, step = args.init, args.T, args.step
    else:
        raise UsageError("trajectory needs --record or --lagrangian")
    if init is None or T is None or step is None:
        raise UsageError("trajectory needs --init, --T and --step")
    traj = integrate_trajectory(sys_, init, T, step, constants)
    if rec is not None and not args.states:
        rows = _drift_rows(rec, traj, args.drift_tol)
        out.lines = ["integral\tdrift\tverdict"] + [
            f"{name}\t{d:.3e}\t{'pass' if ok else 'fail'}" for name, d, ok in rows]
        out.doc = [{"integral": name, "drift": d, "verdict": "pass" if ok else "fail"}
                   for name, d, ok in rows]
        return EXIT_OK if all(ok for _, _, ok in rows) else EXIT_FAIL
    every = max(1, args.every)
    rows = [(float(x), *map(float, st)) for x, st in zip(traj.times[::every], traj.states[::every])]
    out.lines = ["x\tf\tg\tdf\tdg"] + ["\t".join(f"{v:.12g}" for v in row) for row in rows]
    out.doc = {"columns": ["x", "f", "g", "df", "dg"], "rows": rows}
    return EXIT_OK


def _record(name):
    from .catalog import load_catalog
    for r in load_catalog():
        if r.name == name:
            return r
    raise UsageError(f"no catalog record named {name!r}")


def cmd_verify_catalog(args, dom, out):
    from .catalog import load_catalog, summarize, verify_record
    records = load_catalog(args.path)
    if args.record:
        records = [r for r in records if r.name == args.record]
        if not records:
            raise UsageError(f"no catalog record named {args.record!r}")
    reports = [verify_record(r) for r in records]
    ok = all(rep.ok for rep in reports)
    summary = summarize(reports)
    out.doc = [r.to_dict() for rep in reports for r in rep.results]
    for rep in reports:
        for r in rep.results:
            out.lines.append(r.line())
    out.lines.append(
        f"{summary['claims']} claims: {summary['passed']} passed, {summary['failed']} failed, "
        f"{summary['flagged']} flagged")
    out.lines.append("verify-catalog: " + ("pass" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_FAIL


def _point_value(text: str):
    try:
        return complex(text.replace(" ", "")) if "j" in text else float(Fraction(text))
    except ValueError:
        raise UsageError(f"bad value {text!r}") from None


def cmd_eval(args, dom, out):
    e = _expr(args.expression)
    out.doc = {"expression": to_str(e)}
    out.lines = [to_str(e)]
    if args.at is not None:
        point = {k: _point_value(v) for k, v in _assignments(args.at).items()}
        missing = (e.free | (e.named - {"pi", "i"})) - set(point)
        if missing:
            raise UsageError(f"no value for {', '.join(sorted(missing))}")
        mode = "complex" if any(isinstance(v, complex) for v in point.values()) or "i" in e.named else "real"
        v = evaluate(e, point, mode)
        v = complex(v) if mode == "complex" else float(v)
        text = repr(v) if isinstance(v, float) else f"{v.real!r}{v.imag:+.17g}j"
        out.lines.append(text)
        out.doc["value"] = [v.real, v.imag] if isinstance(v, complex) else v
    if args.zero:
        res = is_zero(e, dom)
        out.lines.append(f"zero: {'yes' if res else 'no'} (worst {res.worst:.3g})")
        out.doc["zero"] = bool(res)
        return EXIT_OK if res else EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=lambda s: int(s, 0), help="sampling seed (default: NOETHERKIT_SEED or 0x40E7)")
    common.add_argument("--tol", type=float, help="relative tolerance of the zero test")
    common.add_argument("--trials", type=int, help="sample points per zero test")
    common.add_argument("--domain", help="sampling boxes, e.g. x=0.3:1.3,f=0.6:1.4")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = _Parser(prog="noetherkit", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("split", parents=[common], help="real and imaginary parts of an expression")
    s.add_argument("expression")
    s.add_argument("--check", action="store_true", help="also run the Cauchy-Riemann check")
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("el", parents=[common], help="Euler-Lagrange equations")
    s.add_argument("lagrangian", nargs="+", help="complex L(x, u, u'), or L1 L2 with --pair")
    s.add_argument("--split", action="store_true", help="also print the realified system")
    s.add_argument("--pair", action="store_true", help="check real Lagrangians L1 L2 against a system")
    s.add_argument("--system", nargs=2, metavar=("W1", "W2"), help="f'' = W1, g'' = W2")
    s.add_argument("--record", help="take the system from a catalog record")
    s.set_defaults(func=cmd_el)

    s = sub.add_parser("noether-check", parents=[common], help="Noether-like or classical Noether condition")
    s.add_argument("lagrangian", help="complex L(x, u, u'), or real L(x, f, g, f', g') with --op")
    s.add_argument("--xi", help="coefficient of d/dx, over x and u")
    s.add_argument("--eta", help="coefficient of d/du, over x and u")
    s.add_argument("--op", help="real field 'xi | eta_f | eta_g' for the classical condition")
    s.add_argument("--gauge", help="gauge function, or 'auto' to search one")
    s.set_defaults(func=cmd_noether_check)

    s = sub.add_parser("integrals", parents=[common], help="first integrals of a symmetry")
    s.add_argument("lagrangian")
    s.add_argument("--xi", required=True, help="coefficient of d/dx, over x and u")
    s.add_argument("--eta", required=True, help="coefficient of d/du, over x and u")
    s.add_argument("--gauge", help="complex gauge A(x, u), or 'auto' to search one")
    s.set_defaults(func=cmd_integrals)

    s = sub.add_parser("bracket", parents=[common], help="Lie bracket or structure constants")
    s.add_argument("fields", nargs="*", help="real fields written 'xi | eta_f | eta_g'")
    s.add_argument("--table", action="store_true", help="structure constants over all fields")
    s.add_argument("--ops", metavar="FILE", help="structure constants of the operators in FILE")
    s.set_defaults(func=cmd_bracket)

    s = sub.add_parser("trajectory", parents=[common], help="RK4 drift table or states as TSV")
    s.add_argument("--record", help="catalog record supplying system and window")
    s.add_argument("--lagrangian", help="complex Lagrangian supplying the system")
    s.add_argument("--init", type=float, nargs="+", help="f g df dg, or x0 f g df dg")
    s.add_argument("--T", type=float)
    s.add_argument("--step", type=float)
    s.add_argument("--const", help="constants, e.g. A=1/2,b=1/3")
    s.add_argument("--every", type=int, default=1, help="print every n-th step")
    s.add_argument("--states", action="store_true", help="print the states instead of the drift table")
    s.add_argument("--drift-tol", type=float, help="drift tolerance for the verdict column")
    s.set_defaults(func=cmd_trajectory)

    s = sub.add_parser("verify-catalog", parents=[common], help="re-verify the bundled corpus")
    s.add_argument("--record", help="only this record")
    s.add_argument("--path", help="record file or directory (default: bundled corpus)")
    s.set_defaults(func=cmd_verify_catalog)

    s = sub.add_parser("eval", parents=[common], help="canonical form, value, or zero test")
    s.add_argument("expression")
    s.add_argument("--at", help="point, e.g. x=1/2,u=1+2j")
    s.add_argument("--zero", action="store_true", help="test whether the expression vanishes")
    s.set_defaults(func=cmd_eval)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        seed = args.seed if args.seed is not None else default_seed()
        dom = SampleDomain(_interval_map(args.domain), seed=seed)
        out = _Out(args.json)
        with zero_test_settings(args.trials, args.tol):
            code = args.func(args, dom, out)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ExprError) as exc:
        if isinstance(exc, (DegenerateLagrangianError, NotTotalDerivative,
                            DependentBasisError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TruncatedTrajectoryError, DomainTooTightError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out.emit()
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
