"""Command line front end: `fixfree <subcommand> ...`.

Every command prints a block of key=value report lines followed by its
payload (a code, profile, sequence or edge list).  Exit codes: 0 found /
success, 1 proven nonexistent (or a failed check), 2 unknown, 3 input error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from fractions import Fraction

from . import _kernels, constructors, debruijn, pisystems, verifier
from .errors import FixFreeError, Impossible, Unsupported
from .words import LevelSet, Profile, fits, free_bits, is_free, kraft_sum, shadow_bits

EXIT_FOUND, EXIT_NONEXISTENT, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3
VERDICT_EXIT = {"Found": EXIT_FOUND, "Nonexistent": EXIT_NONEXISTENT, "Unknown": EXIT_UNKNOWN}


class InputError(Exception):
    pass


def fmt(value) -> str:
    """Rationals as reduced a/b, booleans lowercase."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, bool):
        return str(value).lower()
    return str(value)


def emit(out, report: dict, payload: str = "") -> None:
    for key, value in report.items():
        out.write(f"{key}={fmt(value)}\n")
    if payload:
        out.write(payload if payload.endswith("\n") else payload + "\n")


# ---------------------------------------------------------------- input helpers


def _read_text(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def read_profile(tokens: list[str], path: str | None) -> Profile:
    if len(tokens) == 1 and "=" not in tokens[0]:
        tokens, path = [], tokens[0]
    text = " ".join(tokens) if tokens else _read_text(path)
    lines = [ln for ln in text.splitlines() if "alpha=" in ln]
    if not lines:
        raise InputError("no profile given (expected `q=<int> alpha=<c1>,<c2>,...`)")
    return Profile.parse(lines[0])


def read_code(text: str) -> LevelSet:
    """The code payload: from the first bare `q=<int>` line to the end."""
    lines = text.splitlines()
    for i, ln in enumerate(lines):
        if re.fullmatch(r"\s*q=\d+\s*", ln):
            return LevelSet.parse("\n".join(lines[i:]))
    raise InputError("no code listing found (expected a `q=<int>` header line)")


def payload_for(code: LevelSet | None, fmt_name: str) -> str:
    if code is None:
        return ""
    return f"{code.profile()}\n" if fmt_name == "profile" else code.to_text()


def write_output(path: str | None, text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------- commands


def cmd_construct(args, out) -> int:
    p = read_profile(args.profile, args.input)
    report = constructors.construct(p, budget=args.budget, search=not args.no_search)
    code = report.code
    emit(
        out,
        {
            "verdict": report.verdict,
            "rule": report.tag,
            "profile": p,
            "kraft": p.kraft(),
            "words": len(code) if code is not None else 0,
            "seed": args.seed,
        },
        payload_for(code, args.format),
    )
    if code is not None:
        write_output(args.output, code.to_text())
    return VERDICT_EXIT[report.verdict]


def cmd_verify(args, out) -> int:
    if args.check_witness:
        code = read_code(_read_text(args.check_witness))
        p = read_profile(args.profile, args.input) if args.profile or args.input else code.profile()
        free, fitting = is_free(code, "fix"), fits(code, p)
        emit(
            out,
            {"check": "witness", "fix_free": free, "fits": fitting, "profile": p, "kraft": kraft_sum(code)},
        )
        return EXIT_FOUND if free and fitting else EXIT_NONEXISTENT
    p = read_profile(args.profile, args.input)
    result = verifier.search(p, budget=args.budget, jobs=args.jobs)
    emit(
        out,
        {
            "verdict": result.verdict,
            "profile": p,
            "kraft": p.kraft(),
            "nodes": result.nodes,
            "budget": result.budget,
            "seconds": f"{result.seconds:.3f}",
            "backend": _kernels.backend_name(),
        },
        payload_for(result.witness, args.format),
    )
    if result.witness is not None:
        write_output(args.output, result.witness.to_text())
    return VERDICT_EXIT[result.verdict]


def cmd_counterexample(args, out) -> int:
    try:
        eps = Fraction(args.eps)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad --eps {args.eps!r}") from None
    p, cert = verifier.counterexample(args.q, eps)
    emit(
        out,
        {
            "q": args.q,
            "eps": eps,
            "m": cert.m,
            "alpha_m": cert.alpha_m,
            "n": cert.n,
            "alpha_n": cert.alpha_n,
            "kraft": p.kraft(),
            "certificate": cert.to_text(),
            "holds": cert.holds,
        },
        f"{p}\n",
    )
    return EXIT_FOUND


def cmd_sune(args, out) -> int:
    seq = verifier.LengthsSeq.parse(" ".join(args.lengths))
    su = verifier.su(seq, args.reading)
    ne = verifier.ne(seq, args.reading)
    emit(
        out,
        {
            "reading": args.reading,
            "lengths": ",".join(map(str, seq.lengths)),
            "kraft": seq.profile().kraft(),
            "su": su,
            "ne": ne,
            "su_positive": su > 0,
            "ne_zero": ne == 0,
            "madcor": verifier.madcor_check(seq),
        },
    )
    return EXIT_FOUND


def cmd_debruijn(args, out) -> int:
    if args.action == "lempel":
        seq = debruijn.lempel_cycle(args.q, args.n, args.L)
        kind = debruijn.cycle_check(seq, args.n)
        emit(out, {"q": args.q, "n": args.n, "length": len(seq), "check": kind.value}, f"{seq}\n")
        return EXIT_FOUND
    if args.action == "golomb":
        first, second = debruijn.golomb_split(args.n, args.L)
        emit(out, {"n": args.n, "lengths": f"{len(first)},{len(second)}"}, f"{first}\n{second}\n")
        return EXIT_FOUND
    if args.action == "subgraph":
        graph = debruijn.k_regular_subgraph(args.q, args.n, args.k, args.L, budget=args.budget or debruijn.DEFAULT_SUBGRAPH_BUDGET)
        if isinstance(graph, (Impossible, Unsupported)):
            emit(out, {"result": type(graph).__name__, "reason": graph.reason})
            return EXIT_NONEXISTENT if isinstance(graph, Impossible) else EXIT_UNKNOWN
        emit(out, {"result": "EdgeSet", "edges": len(graph), "vertices": len(graph.vertices())}, graph.to_text())
        return EXIT_FOUND
    seq = debruijn.CyclicSeq.parse(args.sequence, args.q)
    kind = debruijn.cycle_check(seq, args.n)
    emit(out, {"q": args.q, "n": args.n, "length": len(seq), "check": kind.value})
    return EXIT_FOUND if kind == debruijn.CycleKind.CYCLE else EXIT_NONEXISTENT


def cmd_pi(args, out) -> int:
    if args.chain is not None:
        system = pisystems.chain_pi(args.q, args.n, args.k, args.chain)
    elif args.double_chain is not None:
        system = pisystems.double_chain_pi(args.q, args.n, args.k, args.double_chain)
    elif args.L is not None:
        system = pisystems.two_level_pi(args.q, args.n, args.k, args.L)
    else:
        system = pisystems.one_level_pi(args.q, args.n, args.k)
    if isinstance(system, (Impossible, Unsupported)):
        emit(out, {"result": type(system).__name__, "reason": system.reason})
        return EXIT_NONEXISTENT if isinstance(system, Impossible) else EXIT_UNKNOWN
    code = system.code
    emit(
        out,
        {
            "valid": pisystems.is_pi_system(system),
            "q": system.q,
            "n": system.n,
            "k": system.k,
            "counts": ",".join(map(str, code.counts())),
            "kraft": kraft_sum(code),
            "gamma": pisystems.gamma(system.q, system.k),
        },
        system.to_text(),
    )
    return EXIT_FOUND


def cmd_kraft(args, out) -> int:
    p = read_profile(args.profile, args.input)
    out.write(f"{fmt(p.kraft())}\n")
    return EXIT_FOUND


def cmd_shadow(args, out) -> int:
    if args.words:
        code = LevelSet.from_words(args.q, args.words)
    else:
        code = read_code(_read_text(args.code))
    if args.mode == "free":
        bits = free_bits(code, args.n)
    else:
        bits = shadow_bits(code, args.n, args.mode)
    found = LevelSet(code.q, {args.n: bits})
    emit(out, {"mode": args.mode, "n": args.n, "count": len(found)}, "\n".join(found.strings()) + "\n" if len(found) else "")
    return EXIT_FOUND


# ---------------------------------------------------------------- parser


def _int_env(name: str, default: int | None) -> int | None:
    raw = os.environ.get(name)
    return int(raw) if raw else default


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=_int_env("FIXFREE_BUDGET", None), help="search node budget")
    common.add_argument("--seed", type=int, default=0, help="recorded for reproducibility; all algorithms are deterministic")
    common.add_argument("--jobs", type=int, default=1, help="parallelism hint for search")
    common.add_argument("--format", choices=("code", "profile"), default="code")

    parser = argparse.ArgumentParser(prog="fixfree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def profile_command(name, helptext):
        cmd = sub.add_parser(name, parents=[common], help=helptext)
        cmd.add_argument("profile", nargs="*", help="`q=<int> alpha=<c1>,...`, a profile file, or - for stdin")
        cmd.add_argument("-i", "--input", help="profile file")
        cmd.add_argument("-o", "--output", help="write the code listing here")
        return cmd

    construct = profile_command("construct", "build a fix-free code for a profile")
    construct.add_argument("--no-search", action="store_true", help="skip the exhaustive fallback")
    construct.set_defaults(func=cmd_construct)

    verify = profile_command("verify", "decide existence by exhaustive search")
    verify.add_argument("--check-witness", metavar="FILE", help="check a code listing instead of searching")
    verify.set_defaults(func=cmd_verify)

    kraft = profile_command("kraft", "exact Kraft sum of a profile")
    kraft.set_defaults(func=cmd_kraft)

    counter = sub.add_parser("counterexample", parents=[common], help="profile above 3/4 with no fix-free code")
    counter.add_argument("--q", type=int, default=2)
    counter.add_argument("--eps", required=True, help="rational, e.g. 3/10")
    counter.set_defaults(func=cmd_counterexample)

    sune = sub.add_parser("sune", parents=[common], help="su / ne values of a binary lengths sequence")
    sune.add_argument("lengths", nargs="+", help="nondecreasing lengths, space or comma separated")
    sune.add_argument("--reading", choices=verifier.READINGS, default=verifier.CORRECTED)
    sune.set_defaults(func=cmd_sune)

    db = sub.add_parser("debruijn", parents=[common], help="de Bruijn cycles and regular subgraphs")
    db.add_argument("action", choices=("lempel", "golomb", "subgraph", "check"))
    db.add_argument("--q", type=int, default=2)
    db.add_argument("--n", type=int, required=True)
    db.add_argument("--k", type=int, default=1)
    db.add_argument("--L", type=int)
    db.add_argument("--sequence", help="digit string for `check`")
    db.set_defaults(func=cmd_debruijn)

    pi = sub.add_parser("pi", parents=[common], help="pi-systems")
    pi.add_argument("--q", type=int, required=True)
    pi.add_argument("--n", type=int, required=True)
    pi.add_argument("--k", type=int, default=1)
    pi.add_argument("--L", type=int, help="two-level system with L subgraph vertices")
    pi.add_argument("--chain", type=int, metavar="D", help="chain system with |X| = D")
    pi.add_argument("--double-chain", type=int, metavar="D", help="double chain system with |X| = D")
    pi.set_defaults(func=cmd_pi)

    sh = sub.add_parser("shadow", parents=[common], help="shadow or free words of a code at one level")
    sh.add_argument("words", nargs="*", help="codewords (or read --code)")
    sh.add_argument("--q", type=int, default=2)
    sh.add_argument("--n", type=int, required=True)
    sh.add_argument("--mode", choices=("prefix", "suffix", "bifix", "free"), default="bifix")
    sh.add_argument("--code", help="code listing file")
    sh.set_defaults(func=cmd_shadow)
    return parser


def _validate(args) -> None:
    if args.command == "debruijn":
        if args.action in ("lempel", "golomb", "subgraph") and args.L is None:
            raise InputError(f"debruijn {args.action} needs --L")
        if args.action == "check" and not args.sequence:
            raise InputError("debruijn check needs --sequence")
    if getattr(args, "budget", None) is not None and args.budget < 1:
        raise InputError("--budget must be positive")


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    try:
        _validate(args)
        return args.func(args, out)
    except (InputError, FixFreeError) as exc:
        sys.stderr.write(f"fixfree: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
