"""Command-line front end.

Exit statuses:

====  =========================================================
0     success: solutions listed, certificate found or verified,
      finiteness list proved complete, enumeration finished
2     input error: unreadable or malformed file, bad arguments
3     resource limit exceeded
4     no verdict within budget
5     certificate verification failed
====  =========================================================
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import __version__
from .certifiers import (
    certificate_to_json,
    check_finitely_many_orbits,
    check_finitely_many_solutions,
    check_ihom_infinite,
    check_orbits_infinite,
    verify_certificate,
)
from .certifiers.finite import DEFAULT_BALL_K
from .eqsys import parse_system
from .errors import CertificateError, GroupEqError, ParseError, ResourceLimitError
from .group_core import GroupContext, format_word, parse_group, parse_word
from .immutable import IMMUTABLE_BALL_K, check_immutable, enumerate_immutable
from .search import SearchBudget, enumerate_solutions

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RESOURCE = 3
EXIT_UNKNOWN = 4
EXIT_VERIFY = 5


class InputError(Exception):
    """Bad command-line input (missing or unreadable files, malformed JSON)."""


@dataclass
class Outcome:
    verdict: str
    status: int
    data: dict
    counts: dict
    text: list[str]


# -- input -----------------------------------------------------------------------------


def _read(path: str | None, what: str) -> str:
    if path is None:
        raise InputError(f"--{what} is required")
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror}") from None


def _with_file(exc: ParseError, path: str) -> ParseError:
    return ParseError(f"{path}: {exc}")


def load_group(args) -> GroupContext:
    text = _read(args.group, "group")
    try:
        return parse_group(text)
    except ParseError as exc:
        raise _with_file(exc, args.group) from None


def load_system(args, ctx: GroupContext):
    text = _read(args.system, "system")
    try:
        return parse_system(text, ctx)
    except ParseError as exc:
        raise _with_file(exc, args.system) from None


def budget_from(args) -> SearchBudget:
    return SearchBudget(
        variable_radius=args.radius,
        step_cap=args.steps,
        conjugator_radius=args.conj_radius,
        rounds=args.rounds,
        seconds=args.budget_seconds,
    )


# -- commands ----------------------------------------------------------------------------


def _ball_k(args, default: int) -> int:
    return default if args.ball_k is None else args.ball_k


def cmd_solve(args) -> Outcome:
    ctx = load_group(args)
    sys_ = load_system(args, ctx)
    stream = enumerate_solutions(sys_, ctx, budget_from(args))
    sols = stream.collect()
    marker = stream.marker
    data = {
        "solutions": [s.to_json() for s in sols],
        "exhaustion": {"radius": marker.radius, "truncated": marker.truncated,
                       "checked": marker.checked, "total": marker.total},
    }
    text = [str(s) for s in sols]
    text.append(f"{len(sols)} solution(s) within radius {marker.radius}"
                + (" (truncated)" if marker.truncated else " (ball exhausted)"))
    return Outcome("listed", EXIT_OK, data, {"candidates_checked": marker.checked}, text)


def _cmd_infinite(args, mode: str) -> Outcome:
    ctx = load_group(args)
    sys_ = load_system(args, ctx)
    budget = budget_from(args)
    check = check_ihom_infinite if mode == "solutions" else check_orbits_infinite
    cert = check(sys_, ctx, budget)
    if cert is None:
        return Outcome("unknown", EXIT_UNKNOWN, {"certificate": None}, {},
                       ["no certificate within budget"])
    doc = certificate_to_json(cert)
    if args.output:
        Path(args.output).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    text = [
        f"certified infinitely many {mode}",
        f"quotient: {cert.quotient.target}",
        f"branch: {cert.branch}" + (f" ({cert.splitting.describe()})" if cert.splitting else ""),
        f"witness: {cert.witness}",
        f"family ({cert.derivation.describe()}):",
    ]
    text.extend(f"  n={n}: {m}" for n, m in zip(cert.exponents, cert.members))
    counts = {"candidate_index": cert.candidate_index, "round": cert.round}
    return Outcome("certified", EXIT_OK, {"certificate": doc}, counts, text)


def cmd_infinite_solutions(args) -> Outcome:
    return _cmd_infinite(args, "solutions")


def cmd_infinite_orbits(args) -> Outcome:
    return _cmd_infinite(args, "orbits")


def _cmd_finite(args, mode: str) -> Outcome:
    ctx = load_group(args)
    sys_ = load_system(args, ctx)
    budget = budget_from(args)
    if mode == "solutions":
        report = check_finitely_many_solutions(sys_, ctx, budget=budget)
    else:
        report = check_finitely_many_orbits(sys_, ctx, budget=budget, ball_k=_ball_k(args, DEFAULT_BALL_K))
    status = EXIT_OK if report.complete else EXIT_UNKNOWN
    text = [str(a) for a in report.items]
    text.append(f"verdict: {report.verdict_label()} ({report.reason})")
    return Outcome(report.verdict_label(), status, report.to_json(), {"oracle_calls": report.oracle_calls}, text)


def cmd_finite_solutions(args) -> Outcome:
    return _cmd_finite(args, "solutions")


def cmd_finite_orbits(args) -> Outcome:
    return _cmd_finite(args, "orbits")


def cmd_immutable(args) -> Outcome:
    ctx = load_group(args)
    budget = budget_from(args)
    if args.action == "check":
        alphabet = set(ctx.generators)
        gens = []
        for i, text in enumerate(args.words, start=1):
            try:
                gens.append(parse_word(text, alphabet))
            except ParseError as exc:
                raise ParseError(f"generator {i}: {exc}") from None
        cert = check_immutable(gens, ctx, budget, ball_k=_ball_k(args, IMMUTABLE_BALL_K))
        if cert is None:
            return Outcome("unknown", EXIT_UNKNOWN, {"certificate": None}, {}, ["no certificate within budget"])
        text = [f"immutable: certified at D={cert.D} with {len(cert.orbit_representatives)} orbit(s)"]
        return Outcome("certified", EXIT_OK, {"certificate": cert.to_json()}, {"D": cert.D}, text)
    emitted = []
    for gens, cert in enumerate_immutable(ctx, budget, ball_k=_ball_k(args, IMMUTABLE_BALL_K)):
        emitted.append({"generators": [format_word(g) for g in gens], "certificate": cert.to_json()})
    text = ["{" + ", ".join(e["generators"]) + "}" for e in emitted]
    nontrivial = sum(1 for e in emitted if e["generators"])
    text.append(f"{len(emitted)} subset(s) emitted, {nontrivial} non-trivial")
    return Outcome("enumerated", EXIT_OK, {"emitted": emitted}, {"emitted": len(emitted)}, text)


def cmd_verify_certificate(args) -> Outcome:
    raw = _read(args.certificate, "certificate")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.certificate}: not JSON ({exc.msg} at line {exc.lineno})") from None
    try:
        cert = verify_certificate(doc)
    except CertificateError as exc:
        return Outcome("rejected", EXIT_VERIFY, {"clause": exc.clause, "detail": exc.detail}, {},
                       [f"rejected: {exc}"])
    text = [f"verified: {len(cert.members)} family members, mode {cert.mode}"]
    return Outcome("verified", EXIT_OK, {"mode": cert.mode, "members": len(cert.members)}, {}, text)


COMMANDS: dict[str, Callable] = {
    "solve": cmd_solve,
    "infinite-solutions": cmd_infinite_solutions,
    "infinite-orbits": cmd_infinite_orbits,
    "finite-solutions": cmd_finite_solutions,
    "finite-orbits": cmd_finite_orbits,
    "immutable": cmd_immutable,
    "verify-certificate": cmd_verify_certificate,
}


# -- argument parsing ---------------------------------------------------------------------


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _seconds(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", help="group presentation file")
    common.add_argument("--system", help="equation system file")
    common.add_argument("--radius", type=_non_negative, default=3, help="search radius for variable values")
    common.add_argument("--steps", type=_non_negative, default=2_000_000, help="candidate cap per search")
    common.add_argument("--conj-radius", type=_non_negative, default=4, help="conjugator search radius")
    common.add_argument("--rounds", type=_non_negative, default=4, help="dovetailing rounds")
    common.add_argument("--ball-k", type=_non_negative, default=None,
                        help=f"ball-forcing radius (default {DEFAULT_BALL_K}; {IMMUTABLE_BALL_K} for immutable)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=_non_negative, default=0, help="recorded for reproducibility")
    common.add_argument("--budget-seconds", type=_seconds, default=None, help="wall-clock budget")
    common.add_argument("--timings", action="store_true", help="include wall-clock time in the report")

    parser = _Parser(prog="groupeq", description="Equations over free and hyperbolic groups.")
    parser.add_argument("--version", action="version", version=f"groupeq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("solve", parents=[common], help="list solutions within a radius")
    for name, what in (("infinite-solutions", "solutions"), ("infinite-orbits", "conjugacy classes")):
        p = sub.add_parser(name, parents=[common], help=f"certify infinitely many {what}")
        p.add_argument("--output", "-o", help="write the certificate to this file")
    sub.add_parser("finite-solutions", parents=[common], help="list solutions until proved complete")
    sub.add_parser("finite-orbits", parents=[common], help="list orbit representatives until proved complete")
    p = sub.add_parser("immutable", parents=[common], help="check or enumerate immutable subgroups")
    p.add_argument("action", choices=("check", "enum"))
    p.add_argument("words", nargs="*", help="subgroup generators (check only)")
    p = sub.add_parser("verify-certificate", parents=[common], help="re-verify a certificate without search")
    p.add_argument("certificate", help="certificate JSON file")
    return parser


CONFIG_KEYS = ("group", "system", "radius", "steps", "conj_radius", "rounds", "ball_k", "format", "seed",
               "budget_seconds")


def _config(args) -> dict:
    cfg = {k: getattr(args, k) for k in CONFIG_KEYS}
    for k in ("action", "words", "certificate", "output"):
        if hasattr(args, k):
            cfg[k] = getattr(args, k)
    return cfg


def render(report: dict, fmt: str, text: list[str]) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    lines = [f"{report['command']}: {report['verdict']}"]
    lines.extend(text)
    if "wall_seconds" in report["timings"]:
        lines.append(f"time: {report['timings']['wall_seconds']:.3f}s")
    return "\n".join(lines) + "\n"


def run(argv: list[str] | None = None) -> tuple[int, str, str]:
    """Run a command; return ``(status, stdout, stderr)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", ""
    start = time.perf_counter()
    try:
        outcome = COMMANDS[args.command](args)
    except (InputError, ParseError, GroupEqError) as exc:
        status = EXIT_RESOURCE if isinstance(exc, ResourceLimitError) else EXIT_INPUT
        kind = "resource" if status == EXIT_RESOURCE else "input"
        report = {"command": args.command, "config": _config(args), "verdict": f"error:{kind}",
                  "data": {"error": str(exc)}, "timings": {}}
        if args.format == "json":
            return status, render(report, "json", []), ""
        return status, "", f"groupeq: {kind} error: {exc}\n"
    timings = dict(outcome.counts)
    if args.timings:
        timings["wall_seconds"] = round(time.perf_counter() - start, 6)
    report = {"command": args.command, "config": _config(args), "verdict": outcome.verdict,
              "data": outcome.data, "timings": timings}
    return outcome.status, render(report, args.format, outcome.text), ""


def main(argv: list[str] | None = None) -> int:
    status, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
