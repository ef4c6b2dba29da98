"""Command-line front end: ``lsc <verb> ...``.

Exit status: 0 certified, 1 refuted, 2 unknown, 64 usage error, 65 engine
or input error.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from lsc import __version__, certify, constructions, words
from lsc.document import make_document, parse_document, witness_integers
from lsc.dsl import format_set, parse_schedule, parse_set, parse_word
from lsc.errors import InputError, LscError
from lsc.schedules import Geometric
from lsc.setcalc import window

EXIT_USAGE = 64
EXIT_ERROR = 65

LATTICE_EDGES = [
    ("PS* = dPS*", "T"),
    ("PS* = dPS*", "dcPS*"),
    ("T", "dT"),
    ("dT", "dcT"),
    ("IP*", "C*"),
    ("dcPS*", "C*"),
    ("dcPS*", "dcS"),
    ("C*", "dcT"),
    ("T", "C"),
    ("C*", "C"),
    ("dcS", "C"),
    ("dcS", "dS"),
    ("dcT", "dcPS"),
    ("C", "dcPS"),
    ("C", "IP"),
    ("C*", "S"),
    ("dS", "S"),
    ("S", "PS = dPS"),
    ("dcPS", "PS = dPS"),
]

LATTICE_NAMES = {
    "T": "thick",
    "S": "syndetic",
    "PS = dPS": "piecewise syndetic (= dynamically piecewise syndetic)",
    "PS* = dPS*": "dual of piecewise syndetic",
    "IP": "IP sets",
    "IP*": "dual of IP",
    "C": "central",
    "C*": "dual of central",
    "dS": "dynamically syndetic",
    "dcS": "dynamically central syndetic",
    "dT": "dynamically thick",
    "dcT": "dynamically central thick (pointwise recurrence)",
    "dcPS": "dynamically central piecewise syndetic",
    "dcPS*": "dual of dynamically central piecewise syndetic",
}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _count(text: str) -> int:
    t = text.strip().replace("_", "")
    m = re.fullmatch(r"(\d+)\^(\d+)", t)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    m = re.fullmatch(r"(\d+)e(\d+)", t, re.IGNORECASE)
    if m:
        return int(m.group(1)) * 10 ** int(m.group(2))
    if not re.fullmatch(r"\d+", t):
        raise argparse.ArgumentTypeError(f"not a nonnegative integer: {text!r}")
    return int(t)


def positive(text: str) -> int:
    v = _count(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def nonneg(text: str) -> int:
    return _count(text)


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


def read_source(text: str) -> str:
    if text.startswith("@"):
        try:
            return Path(text[1:]).read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"cannot read {text[1:]}: {e.strerror}") from None
    return text


def load_set(text: str):
    return parse_set(read_source(text))


def parse_poly(text: str) -> certify.Poly:
    """Parse a polynomial in ``y`` such as ``y^2 + y`` or ``y*(y-1)/2``."""
    import sympy

    y = sympy.Symbol("y")
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"y": y})
        poly = sympy.Poly(expr, y)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError, SyntaxError) as e:
        raise InputError(f"cannot read polynomial {text!r}: {e}") from None
    coeffs = []
    for c in reversed(poly.all_coeffs()):
        c = sympy.Rational(c)
        coeffs.append(Fraction(int(c.p), int(c.q)))
    return certify.Poly(tuple(coeffs))


_SKIP_WITH_VALUE = {"--out", "--format", "--workers"}
_SKIP_KEYS = {"handler", "out", "format", "workers", "verb", "what"}


def normalize_argv(argv: list[str]) -> list[str]:
    """Drop output-only options and inline ``@file`` arguments."""
    out = []
    skip = False
    for tok in argv:
        if skip:
            skip = False
            continue
        key = tok.split("=", 1)[0]
        if key in _SKIP_WITH_VALUE:
            skip = "=" not in tok
            continue
        if tok.startswith("@"):
            tok = read_source(tok).strip()
        out.append(tok)
    return out


def _flags(args, inputs):
    flags = []
    for k, v in sorted(vars(args).items()):
        if k in _SKIP_KEYS or k in inputs or v is None:
            continue
        if isinstance(v, list):
            v = ",".join(str(x) for x in v)
        flags.append((k, v))
    return flags


def emit(args, argv, inputs: dict, kind: str, verdict: str, payload, witness=None) -> None:
    doc = make_document(
        command=f"{args.verb} {getattr(args, 'what', '')}".strip(),
        argv=normalize_argv(argv),
        inputs=[(k, format_set(v) if not isinstance(v, str) else v) for k, v in inputs.items()],
        flags=_flags(args, inputs),
        verdict=verdict,
        kind=kind,
        payload_obj=payload,
        witness=witness,
    )
    text = doc.to_json() if args.format == "json" else doc.render()
    write(args, text)


def write(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def emit_verdict(args, argv, inputs, verdict: certify.Verdict, source=None, target=None) -> int:
    if verdict.certified and target is not None:
        if not certify.revalidate(target, verdict.certificate, source=source):
            raise LscError("certificate failed replay against membership")
    payload = {"certificate": verdict.certificate, "note": verdict.note}
    emit(args, argv, inputs, type(verdict.certificate).__name__, verdict.status.value, payload,
         witness_integers(verdict.certificate))
    return verdict.status.exit_code


# ---------------------------------------------------------------- handlers


def cmd_eval(args, argv):
    A = load_set(args.set)
    w = window(A, args.window)
    emit(args, argv, {"set": A}, "Window", "certified", {"members": w.members().tolist(), "window": args.window})
    return 0


def cmd_certify(args, argv):
    what = args.what
    if what in ("dt", "pr"):
        A, S = load_set(args.A), load_set(args.S)
        inputs = {"A": A, "S": S}
        if what == "dt":
            v = certify.dt_check(A, S, args.fbound, args.level, args.bound, max_size=args.max_size, workers=args.workers)
        else:
            v = certify.pr_check(A, S, args.fbound, args.window, args.threshold, max_size=args.max_size, workers=args.workers)
        return emit_verdict(args, argv, inputs, v, source=A, target=S)
    A = load_set(args.set)
    inputs = {"set": A}
    if what == "syndetic":
        v = certify.syndetic_gap(A, args.window)
    elif what == "thick":
        v = certify.thick_to_level(A, args.level, args.bound)
    elif what == "ps":
        v = certify.piecewise_syndetic(A, args.shift_bound, args.level, args.bound)
    elif what == "ip":
        v = certify.ip_witness(A, args.depth, args.bound)
    elif what == "ds":
        v = certify.ds_certificate(A, args.F, args.window)
        return emit_verdict(args, argv, inputs, v)
    elif what == "dcs":
        v = certify.dcs_certificate(A, args.F, args.window)
        return emit_verdict(args, argv, inputs, v)
    elif what == "shift":
        v = certify.shift_correlation(A, args.n_bound, args.level, args.bound, args.shift_bound)
    elif what == "brauer":
        v = certify.brauer_search(A, [parse_poly(p) for p in args.poly], args.bound)
    elif what == "prefix":
        v = certify.compactness_prefix(args.N, A, args.m_bound)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(what)
    return emit_verdict(args, argv, inputs, v, target=A)


def cmd_build(args, argv):
    what = args.what
    if what == "prop41":
        base = args.base or args.k + 2
        H = [Geometric(base, c, args.len) for c in range(1, args.k + 1)]
        A = constructions.residue_thick_union(args.k, H)
        lines = []
        if args.ell:
            F = constructions.prop41_F_witness(args.k, H, args.ell)
            lines.append("# F = " + ",".join(map(str, F)))
        lines.append(format_set(A))
        write(args, "\n".join(lines) + "\n")
        return 0
    if what == "prop42":
        if not (len(args.primes) == len(args.c)):
            raise InputError("--primes and --c need the same length")
        n = args.branches or len(args.primes)
        lay = constructions.non_ip_layout(len(args.primes), start=args.start, sep=args.sep)
        non_ip = all(c % p for c, p in zip(args.c, args.primes))
        params = constructions.PrimeResidueParams(
            tuple(args.primes),
            tuple(args.c),
            tuple(constructions.Separated(lay, 1, j) for j in range(1, len(args.primes) + 1)),
            non_ip=non_ip,
        )
        A = constructions.prime_residue_union(params, n)
        write(args, format_set(A) + "\n")
        return 0
    if what == "crt":
        n = constructions.crt_cover_witness(args.primes, args.a)
        ok = all((n + i) % p == a % p for i, (p, a) in enumerate(zip(args.primes, args.a), start=1))
        payload = {"n": n, "primes": args.primes, "residues": args.a, "interval": [n + 1, n + len(args.primes)]}
        emit(args, argv, {}, "CrtWitness", "certified" if ok else "refuted", payload, [n])
        return 0 if ok else 1
    if what == "sepfamily":
        fam = constructions.separated_thick_family(args.rows, args.cols, args.sep, start=args.start)
        bounds = fam.separation_bounds(args.window)
        ok = all(obs >= need for obs, need in bounds.values())
        payload = {
            "cells": {f"{i},{j}": f"thick({_sched(fam.cell(i, j))})" for i, j in fam.cells},
            "bounds": {str(d): [obs, need] for d, (obs, need) in bounds.items()},
        }
        if args.primes:
            rows = constructions.assemble_rows(fam, args.primes)
            wins = [window(B, args.window).bits for B in rows]
            clash = any((wins[a] & wins[b]).any() for a in range(len(wins)) for b in range(a + 1, len(wins)))
            payload["rows"] = [format_set(B) for B in rows]
            payload["rows_disjoint"] = not clash
            ok = ok and not clash
        wit = [obs for obs, _ in bounds.values() if obs != float("inf")]
        emit(args, argv, {}, "SeparationTable", "certified" if ok else "refuted", payload, wit)
        return 0 if ok else 1
    raise UsageError(what)  # pragma: no cover


def _sched(s):
    from lsc.dsl import format_schedule

    return format_schedule(s)


def _split_payload(res: constructions.SplitResult):
    return {
        "A1": format_set(res.A1),
        "A2": format_set(res.A2),
        "window": res.window,
        "disjoint": res.disjoint,
        "exhaustive": res.exhaustive,
        "certificates": [{"status": c.status.value, "certificate": c.certificate} for c in res.certificates],
    }


def cmd_split(args, argv):
    if args.what == "thick":
        sched = parse_schedule(read_source(args.schedule))
        res = constructions.split_thick(sched, args.level, args.horizon, args.window)
        inputs = {"schedule": _sched(sched)}
    else:
        A = load_set(args.set)
        carve = constructions.interval_extractor if args.extractor == "interval" else constructions.fs_extractor
        res = constructions.split_by_filtration(A, args.rounds, carve, args.bound)
        inputs = {"set": A}
    good = res.ok and all(c.certified for c in res.certificates)
    status = "certified" if good else ("refuted" if not res.ok else "unknown")
    wit = [x for c in res.certificates for x in witness_integers(c.certificate)]
    emit(args, argv, inputs, "SplitResult", status, _split_payload(res), wit)
    return {"certified": 0, "refuted": 1, "unknown": 2}[status]


def cmd_decompose(args, argv):
    A, S = load_set(args.A), load_set(args.S)
    d = constructions.structure_decompose(A, S, args.window, args.ell_max)
    payload = {
        "B": format_set(d.B),
        "G": _sched(d.G),
        "ell": d.ell,
        "intervals": d.intervals,
        "certificate": d.certificate.certificate,
    }
    emit(args, argv, {"A": A, "S": S}, "Decomposition", d.certificate.status.value, payload,
         witness_integers(d.certificate.certificate))
    return d.certificate.status.exit_code


def cmd_word(args, argv):
    what = args.what
    if what == "expand":
        write(args, words.expand(parse_word(args.word), args.length) + "\n")
        return 0
    w = parse_word(args.word)
    if what == "returns":
        expr, win = words.return_set(w, args.pattern, args.window, args.base)
        members = win.members().tolist()
        payload = {"members": members, "gap": certify.max_gap(win.members()) if members else None}
        emit(args, argv, {"set": expr}, "ReturnSet", "certified" if members else "refuted", payload, members)
        return 0 if members else 1
    if what == "profile":
        prof = words.uniform_recurrence_profile(w, args.n_max, args.length)
        ok = not prof.flagged
        emit(args, argv, {"word": args.word}, "RecurrenceProfile", "certified" if ok else "refuted", prof,
             list(prof.own))
        return 0 if ok else 1
    if what == "cover":
        rep = words.cylinder_cover_check(w, args.patterns.split(","), args.n, args.length)
        emit(args, argv, {"word": args.word}, "CoverReport", "certified" if rep.covered else "refuted", rep, [])
        return 0 if rep.covered else 1
    raise UsageError(what)  # pragma: no cover


def cmd_joint(args, argv):
    targets = [int_list(t) for t in args.targets.split(";")]
    if not (len(args.moduli) == len(args.starts) == len(targets)):
        raise InputError("--moduli, --starts and --targets need the same length")
    systems = [words.CyclicSystem(m, s, t) for m, s, t in zip(args.moduli, args.starts, targets)]
    jr = words.joint_return(systems, args.window)
    payload = {"gap": jr.gap, "empty": jr.empty, "coprime_law": jr.coprime_law, "members": jr.window.members().tolist()}
    emit(args, argv, {"set": jr.expr}, "JointReturn", "refuted" if jr.empty else "certified", payload,
         [jr.gap] if jr.gap else [])
    return 1 if jr.empty else 0


def cmd_report(args, argv):
    if args.what == "lattice":
        width = max(len(a) for a, _ in LATTICE_EDGES)
        lines = ["family".ljust(width) + "  is properly contained in", "-" * (width + 28)]
        lines += [f"{a.ljust(width)}  {b}" for a, b in LATTICE_EDGES]
        lines += ["", "legend:"]
        lines += [f"  {k.ljust(width)}  {v}" for k, v in LATTICE_NAMES.items()]
        write(args, "\n".join(lines) + "\n")
        return 0
    text = read_source("@" + args.document)
    doc = parse_document(text)
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(doc.argv))
    again = buf.getvalue()
    fresh = parse_document(again) if again.startswith("lsc-certificate") else None
    same = fresh is not None and fresh.render() == doc.render()
    write(args, json.dumps({"reproduced": same, "verdict": doc.verdict, "exit": code}, sort_keys=True) + "\n")
    return 0 if same else 1


# ---------------------------------------------------------------- parser


def _common(p, *, window=None, level=None, bound=None):
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="write the document here instead of standard output")
    if window:
        p.add_argument("--window", type=positive, default=window)
    if level:
        p.add_argument("--level", type=positive, default=level)
    if bound:
        p.add_argument("--bound", type=positive, default=bound)


def build_parser() -> Parser:
    parser = Parser(prog="lsc", description="Certificates for large subsets of the positive integers.")
    parser.add_argument("--version", action="version", version=f"lsc {__version__}")
    verbs = parser.add_subparsers(dest="verb", required=True, parser_class=Parser)

    p = verbs.add_parser("eval", help="materialize a set on a window")
    p.add_argument("--set", required=True)
    _common(p, window=100)
    p.set_defaults(handler=cmd_eval)

    cert = verbs.add_parser("certify", help="run a decider")
    kinds = cert.add_subparsers(dest="what", required=True, parser_class=Parser)
    specs = {
        "syndetic": dict(window=1000),
        "thick": dict(level=4, bound=10**6),
        "ps": dict(level=4, bound=10**6),
        "ip": dict(bound=10**4),
        "ds": dict(window=10**4),
        "dcs": dict(window=10**4),
        "dt": dict(level=4, bound=10**5),
        "pr": dict(window=10**4),
        "shift": dict(level=3, bound=10**5),
        "brauer": dict(bound=100),
        "prefix": dict(),
    }
    for name, opts in specs.items():
        p = kinds.add_parser(name)
        if name in ("dt", "pr"):
            p.add_argument("--A", required=True, help="set F is drawn from")
            p.add_argument("--S", required=True, help="test set")
            p.add_argument("--fbound", type=positive, default=100)
            p.add_argument("--max-size", type=positive, default=3)
            p.add_argument("--workers", type=positive, default=1)
            if name == "pr":
                p.add_argument("--threshold", type=positive)
        else:
            p.add_argument("--set", required=True)
        _common(p, **opts)
        if name in ("ps", "shift"):
            p.add_argument("--shift-bound", type=nonneg, default=16)
        if name == "ip":
            p.add_argument("--depth", type=positive, default=2)
        if name in ("ds", "dcs"):
            p.add_argument("--F", type=int_list, required=True)
        if name == "shift":
            p.add_argument("--n-bound", type=positive, default=16)
        if name == "brauer":
            p.add_argument("--poly", action="append", required=True)
        if name == "prefix":
            p.add_argument("--N", type=positive, required=True)
            p.add_argument("--m-bound", type=positive, default=10**6)
        p.set_defaults(handler=cmd_certify)

    build = verbs.add_parser("build", help="print a construction")
    kinds = build.add_subparsers(dest="what", required=True, parser_class=Parser)
    p = kinds.add_parser("prop41", help="residue classes mod k intersected with geometric thick sets")
    p.add_argument("--k", type=positive, required=True)
    p.add_argument("--base", type=positive)
    p.add_argument("--len", default="lin", choices=("lin", "sq", "exp2"))
    p.add_argument("--ell", type=positive, help="also print the finite witness F for gap bound ell")
    _common(p)
    p = kinds.add_parser("prop42", help="prime residue classes on separated thick sets")
    p.add_argument("--primes", type=int_list, required=True)
    p.add_argument("--c", type=int_list, required=True)
    p.add_argument("--branches", type=positive)
    p.add_argument("--start", type=positive, default=16)
    p.add_argument("--sep", default="lin10")
    _common(p)
    p = kinds.add_parser("crt", help="CRT start of consecutive hits")
    p.add_argument("--primes", type=int_list, required=True)
    p.add_argument("--a", type=int_list, required=True)
    _common(p)
    p = kinds.add_parser("sepfamily", help="well separated doubly indexed thick family")
    p.add_argument("--rows", type=positive, default=2)
    p.add_argument("--cols", type=positive, default=3)
    p.add_argument("--sep", default="lin10")
    p.add_argument("--start", type=positive, default=1)
    p.add_argument("--primes", type=int_list)
    _common(p, window=10**5)
    for sub in kinds.choices.values():
        sub.set_defaults(handler=cmd_build)

    split = verbs.add_parser("split", help="split a large set into two")
    kinds = split.add_subparsers(dest="what", required=True, parser_class=Parser)
    p = kinds.add_parser("thick")
    p.add_argument("--schedule", required=True)
    p.add_argument("--horizon", type=positive, default=10**9)
    _common(p, window=10**5, level=4)
    p = kinds.add_parser("filtration")
    p.add_argument("--set", required=True)
    p.add_argument("--rounds", type=positive, default=5)
    p.add_argument("--extractor", choices=("interval", "fs"), default="interval")
    _common(p, bound=10**5)
    for sub in kinds.choices.values():
        sub.set_defaults(handler=cmd_split)

    p = verbs.add_parser("decompose", help="structured part of A along S plus a thick set")
    p.add_argument("--A", required=True)
    p.add_argument("--S", required=True)
    p.add_argument("--ell-max", type=positive, default=32)
    _common(p, window=10**4)
    p.set_defaults(handler=cmd_decompose)

    wordp = verbs.add_parser("word", help="words, return sets and cyclic systems")
    kinds = wordp.add_subparsers(dest="what", required=True, parser_class=Parser)
    p = kinds.add_parser("expand")
    p.add_argument("--word", required=True)
    p.add_argument("--length", type=positive, default=64)
    _common(p)
    p = kinds.add_parser("returns")
    p.add_argument("--word", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--base", type=int, choices=(0, 1), default=0)
    _common(p, window=1000)
    p = kinds.add_parser("profile")
    p.add_argument("--word", required=True)
    p.add_argument("--n-max", type=positive, default=8)
    p.add_argument("--length", type=positive, default=10**4)
    _common(p)
    p = kinds.add_parser("cover")
    p.add_argument("--word", required=True)
    p.add_argument("--patterns", required=True, help="comma-separated patterns")
    p.add_argument("--n", type=positive, required=True)
    p.add_argument("--length", type=positive, default=10**4)
    _common(p)
    for sub in kinds.choices.values():
        sub.set_defaults(handler=cmd_word)
    p = kinds.add_parser("joint")
    p.add_argument("--moduli", type=int_list, required=True)
    p.add_argument("--starts", type=int_list, required=True)
    p.add_argument("--targets", required=True, help="';'-separated target lists, e.g. '1;2'")
    _common(p, window=1000)
    p.set_defaults(handler=cmd_joint)

    rep = verbs.add_parser("report", help="static tables and document replay")
    kinds = rep.add_subparsers(dest="what", required=True, parser_class=Parser)
    p = kinds.add_parser("lattice")
    _common(p)
    p = kinds.add_parser("verify")
    p.add_argument("document")
    _common(p)
    for sub in kinds.choices.values():
        sub.set_defaults(handler=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    if not hasattr(args, "workers"):
        args.workers = 1
    try:
        return args.handler(args, argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (LscError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

