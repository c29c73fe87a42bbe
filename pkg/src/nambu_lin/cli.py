"""Command line entry point: ``nambu-lin <command> ...``.

Exit codes: 0 success / verdict true, 2 verdict false (witness in the
report), 1 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
import time
from itertools import combinations
from pathlib import Path

import numpy as np

from . import holonomy as hol
from .exterior import MultiVector
from .frontend import ParseError, parse, parse_univariate, serialize
from .linalg import Signature
from .linearize import (
    LinearizeError,
    MoserSpec,
    derive_rt,
    linear_model,
    linearize_report,
    moser_residual,
    normal_form_quadratic,
)
from .nambu import (
    NambuCandidate,
    NambuError,
    classify_3d_algebra,
    dual_form,
    fundamental_identity_residual,
    is_nambu,
    is_unimodular,
    isotropy_constants,
    jacobi_residual,
    linear_part,
    nondeg_signature,
)
from .poly import Poly
from .report import build_report, dump_report, sha256_text, write_csv

EXIT_OK, EXIT_INPUT, EXIT_FALSE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _read_structure(args) -> tuple[str, MultiVector]:
    if args.input and args.expr:
        raise UsageError("give either --input or --expr, not both")
    if args.input:
        text = Path(args.input).read_text(encoding="utf-8")
    elif args.expr:
        text = args.expr
    else:
        raise UsageError("an input structure is required (--input FILE or --expr TEXT)")
    P = parse(text.strip(), "multivector", dim=args.dim)
    return text, P


def _volume(args) -> Poly:
    h = parse(args.volume, "poly", dim=args.dim)
    if h.constant_term() == 0:
        raise UsageError("volume density must not vanish at the origin")
    return h


def _signature(text: str, n: int) -> Signature:
    try:
        pos, neg = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"signature must look like 'pos,neg', got {text!r}") from None
    if pos + neg != n:
        raise UsageError(f"signature {pos},{neg} does not add up to dimension {n}")
    return Signature(pos, neg)


def _emit(args, report: dict, summary: str) -> None:
    if not getattr(args, "timings", False):
        # durations vary run to run; keep only the timestamp unless asked
        report["timings"] = {"timestamp": report["timings"]["timestamp"]}
    print(summary)
    if getattr(args, "report", None):
        dump_report(report, args.report)


def _inputs(args, text: str | None = None) -> dict:
    out = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "report", "csv", "timings")}
    if text is not None:
        out["input_sha256"] = sha256_text(text)
    return out


def cmd_check(args) -> int:
    text, P = _read_structure(args)
    c = NambuCandidate(P)
    h = _volume(args)
    stages = []
    if c.q == 2 and c.coorder >= 2:
        res = jacobi_residual(c)
        ok = res.is_zero()
        stages.append({"name": "jacobi", "verdict": ok, "witness": None if ok else res})
    else:
        v = is_nambu(c, h)
        ok = v.ok
        wit = None if ok else {"xi": [i + 1 for i in v.witness[0]], "condition": v.witness[1], "form": v.witness[2]}
        stages.append({"name": "duality", "verdict": ok, "witness": wit})
    bad = None
    tuples = list(combinations(range(c.n), c.q - 1))
    for tup in tuples:
        fs = [Poly.var(c.P.nvars, i) for i in tup]
        r = fundamental_identity_residual(c, fs)
        if r:
            bad = {"hamiltonians": [f"x{i + 1}" for i in tup], "residual": r}
            break
    stages.append({"name": "fundamental_identity", "verdict": bad is None, "witness": bad,
                   "stats": {"tuples": len(tuples)}})
    verdict = ok and bad is None
    report = build_report("check", _inputs(args, text), stages, "nambu" if verdict else "not nambu")
    _emit(args, report, f"nambu: {str(verdict).lower()}")
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_dual(args) -> int:
    text, P = _read_structure(args)
    w = dual_form(NambuCandidate(P), _volume(args))
    report = build_report("dual", _inputs(args, text), [{"name": "dual", "verdict": True, "stats": {"form": w}}],
                          "ok", form=w)
    _emit(args, report, serialize(w))
    return EXIT_OK


def cmd_unimodular(args) -> int:
    text, P = _read_structure(args)
    v = is_unimodular(NambuCandidate(P), _volume(args))
    report = build_report("unimodular", _inputs(args, text),
                          [{"name": "unimodular", "verdict": v.ok, "witness": v.witness}],
                          "unimodular" if v else "not unimodular")
    _emit(args, report, f"unimodular: {str(v.ok).lower()}" + ("" if v else f"\nd(iota_P mu) = {serialize(v.witness)}"))
    return EXIT_OK if v else EXIT_FALSE


def cmd_classify(args) -> int:
    text, P = _read_structure(args)
    c = NambuCandidate(P)
    lin = linear_part(c)
    stages = [{"name": "linear_part", "verdict": True, "stats": {"linear_part": lin}}]
    kind = "other"
    summary = [f"linear part: {serialize(lin)}"]
    if c.coorder == 1:
        try:
            data = nondeg_signature(lin)
            kind = "type1-nondegenerate"
            stages.append({"name": "signature", "verdict": True,
                           "stats": {"signature": data.signature, "potential": data.F}})
            summary.append(f"signature: {data.signature}")
        except NambuError as exc:
            stages.append({"name": "signature", "verdict": False, "witness": str(exc)})
    if c.n == 3 and c.q == 2:
        cs = isotropy_constants(lin)
        try:
            label, ksig = classify_3d_algebra(cs)
        except NambuError as exc:
            label, ksig = "not a Lie algebra", None
            stages.append({"name": "isotropy", "verdict": False, "witness": str(exc)})
        else:
            stages.append({"name": "isotropy", "verdict": True,
                           "stats": {"algebra": label, "killing_signature": ksig, "constants": cs.c}})
        summary.append(f"isotropy algebra: {label}" + (f" (Killing signature {ksig})" if ksig else ""))
    summary.insert(1, f"type: {kind}")
    report = build_report("classify", _inputs(args, text), stages, kind)
    _emit(args, report, "\n".join(summary))
    return EXIT_OK


def _normal_form_candidate(n: int, sig: Signature, k: Poly) -> MultiVector:
    spec = MoserSpec(n, sig, k)
    f = normal_form_quadratic(n, sig)
    return linear_model(spec).scale(k.compose([f]))


def cmd_linearize(args) -> int:
    k = parse_univariate(args.k) if args.k else None
    if args.input or args.expr:
        text, P = _read_structure(args)
        h = _volume(args)
    else:
        if args.signature is None or k is None:
            raise UsageError("without --input, both --signature and --k are required")
        sig = _signature(args.signature, args.dim)
        P = _normal_form_candidate(args.dim, sig, k)
        text, h = serialize(P), Poly.const(args.dim, 1)
    c = NambuCandidate(P)
    rep = linearize_report(c, h, k, samples=args.samples, tol=args.tol, radius=args.radius)
    stages = [{"name": s.name, "verdict": s.verdict, "witness": s.witness, "stats": s.stats} for s in rep.stages]
    report = build_report("linearize", _inputs(args, text), stages, rep.verdict,
                          max_residual=rep.max_residual, timings=rep.timings)
    line = f"verdict: {rep.verdict}"
    if rep.max_residual is not None:
        line += f"\nmax pullback residual: {rep.max_residual:.3e}"
    _emit(args, report, line)
    return EXIT_OK if rep.ok else EXIT_FALSE


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_holonomy(args) -> int:
    x0 = _floats(args.start)
    spec = hol.CounterexampleSpec(n=len(x0), orientation=-1 if args.flip else 1)
    t0 = time.perf_counter()
    tr = hol.integrate_trajectory(spec, x0, args.time, args.tol)
    m = hol.spiral_metrics(tr)
    lin = hol.linear_model_orbit(x0, args.time, args.tol, spec.orientation)
    lin_drift = float(np.max(np.abs(lin.f_values - lin.f_values[0])))
    elapsed = time.perf_counter() - t0
    if args.csv:
        write_csv(tr, args.csv)
    spiral = tr.f_values[0] > 0
    stats = {"theta_rate": m.theta_rate, "f_monotone": m.f_monotone, "f_strictly_decreasing": m.f_strictly_decreasing,
             "f_ode_residual": m.f_ode_residual, "theta_excursion": m.theta_excursion, "f_drop": m.f_drop,
             "f_start": tr.f_values[0], "f_end": tr.f_values[-1], "steps": len(tr)}
    witness = spiral and m.f_strictly_decreasing and tr.f_values[-1] > 0 and m.theta_excursion > 4 * np.pi
    stages = [
        {"name": "trajectory", "verdict": m.f_monotone, "stats": stats},
        {"name": "linear_model", "verdict": lin_drift <= 1e-9, "stats": {"f_drift": lin_drift}},
        {"name": "holonomy_witness", "verdict": bool(witness)},
    ]
    report = build_report("holonomy", _inputs(args), stages, "spiral" if witness else "no spiral",
                          timings={"integrate": elapsed})
    _emit(args, report, f"theta rate {m.theta_rate:.9f}, f {tr.f_values[0]:.6g} -> {tr.f_values[-1]:.6g}, "
                        f"holonomy witness: {str(bool(witness)).lower()}")
    return EXIT_OK if m.f_monotone else EXIT_FALSE


def cmd_verify_rt(args) -> int:
    k = parse_univariate(args.k)
    sig = _signature(args.signature, args.dim) if args.signature else Signature(args.dim, 0)
    spec = MoserSpec(args.dim, sig, k)
    coeff = derive_rt(spec)
    res = moser_residual(spec, coeff.r)
    printed = moser_residual(spec, coeff.printed_r)
    names = ["f", "t"]
    stages = [
        {"name": "derived", "verdict": res.is_zero(),
         "stats": {"num": serialize(coeff.r.num, names), "den": serialize(coeff.r.den, names)}},
        {"name": "printed_denominator", "verdict": printed.is_zero(),
         "stats": {"num": serialize(coeff.printed_r.num, names), "den": serialize(coeff.printed_r.den, names)},
         "witness": None if printed.is_zero() else printed},
    ]
    report = build_report("verify-rt", _inputs(args), stages, "solved" if res.is_zero() else "unsolved")
    _emit(args, report, f"r_t(f) = ({serialize(coeff.r.num, names)}) / ({serialize(coeff.r.den, names)})\n"
                        f"residual zero: {str(res.is_zero()).lower()}; "
                        f"printed denominator residual zero: {str(printed.is_zero()).lower()}")
    return EXIT_OK if res.is_zero() else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nambu-lin", description="Coorder-1 Nambu structures: checks, linearization, holonomy.")
    p.add_argument("--timings", action="store_true", help="include stage durations in JSON reports")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def structure(sp, volume=True):
        sp.add_argument("--dim", type=int, required=True)
        sp.add_argument("--input", help="file holding one multivector expression")
        sp.add_argument("--expr", help="multivector expression given inline")
        if volume:
            sp.add_argument("--volume", default="1", help="density h of the volume h*dx1^...^dxn")
        sp.add_argument("--report", help="write a JSON report to this path")

    for name, fn, helptext in [
        ("check", cmd_check, "duality test plus fundamental identity sweep"),
        ("dual", cmd_dual, "print iota_P mu"),
        ("unimodular", cmd_unimodular, "test d(iota_P mu) = 0"),
    ]:
        sp = sub.add_parser(name, help=helptext)
        structure(sp)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("classify", help="linear part, type, signature, isotropy algebra")
    structure(sp, volume=False)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("linearize", help="full linearization pipeline")
    structure(sp)
    sp.add_argument("--k", help="normal-form factor k(f), e.g. '1+f'")
    sp.add_argument("--signature", help="pos,neg (normal-form mode, no --input)")
    sp.add_argument("--samples", type=int, default=27)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--radius", type=float, default=0.2)
    sp.set_defaults(func=cmd_linearize)

    sp = sub.add_parser("holonomy", help="spiral trajectory of the counterexample")
    sp.add_argument("--start", required=True, help="comma-separated start point")
    sp.add_argument("--time", type=float, default=50.0)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--flip", action="store_true", help="use the opposite orientation of the field")
    sp.add_argument("--csv", help="write the trajectory as CSV")
    sp.add_argument("--report", help="write a JSON report to this path")
    sp.set_defaults(func=cmd_holonomy)

    sp = sub.add_parser("verify-rt", help="symbolic Moser residual for r_t(f)")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--k", required=True)
    sp.add_argument("--signature")
    sp.add_argument("--report", help="write a JSON report to this path")
    sp.set_defaults(func=cmd_verify_rt)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError, NambuError, LinearizeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
