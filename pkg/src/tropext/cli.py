"""Command-line front end.

Exit codes: 0 success, 1 an operation or validation failed (the solution
file carries an error record), 2 the input could not be read or lacks a
section the command needs.
"""

import argparse
import sys
from typing import List, Optional, Tuple

from . import __version__
from .curve_model import validate_curve_type, validate_extension
from .degree_one_pushout import check_pushout, pushout_extension
from .errors import TropextError
from .extension_ops import check_open_universality, classify, pullback_extension
from .serialize import (ParseError, Problem, dumps, map_json, parse_problem, polyhedron_json, rat, report_json,
                        solution, structure_json)
from .universal_extension import build_Pu, embedding_report, structure_report

COMMANDS = ("validate", "universal", "classify", "pullback", "pushout", "facecheck", "selftest")


class MissingSection(TropextError):
    code = "MISSING_SECTION"


def _failure(code: str, message: str, witness=None) -> dict:
    return {"error": code, "message": message, "witness": witness}


def _first_failure(rep) -> dict:
    f = rep.failures()[0]
    body = report_json(rep)["failures"][0]
    return _failure("VALIDATION_FAILED", f"{f.check} failed for {f.subject}", body)


def cmd_validate(prob: Problem, args) -> Tuple[int, dict]:
    rep = validate_curve_type(prob.curve)
    out = {"curve_report": report_json(rep), "extension_report": None}
    ok = rep.ok
    if ok and prob.extension is not None:
        ext = validate_extension(prob.curve, prob.extension)
        out["extension_report"] = report_json(ext)
        if not ext.ok:
            return 1, {**out, **_first_failure(ext)}
    if not ok:
        return 1, {**out, **_first_failure(rep)}
    return 0, out


def cmd_universal(prob: Problem, args) -> Tuple[int, dict]:
    u = build_Pu(prob.curve)
    emb = embedding_report(u)
    rep = structure_report(u)
    c = u.curve
    out = {
        "coordinates": u.scaffold.labels(),
        "q": polyhedron_json(u.scaffold.poly),
        "q1": polyhedron_json(u.q1),
        "pu": polyhedron_json(u.pu),
        "basepoint": [rat(x) for x in u.basepoint],
        "rho": {e.id: map_json(u.rho[e.id]) for e in c.edges},
        "positions": {v.id: map_json(u.positions[v.id]) for v in c.vertices},
        "interpolants": {f"{e.id}:{k}": map_json(u.interpolants[(e.id, k)]) for e in c.edges for k in (0, 1)},
        "embedding": {"injective": emb.injective, "rank": emb.rank, "dimension": emb.dimension,
                      "cutting_equations": [[[int(x) for x in a], rat(b)] for a, b in emb.cutting_equations]},
        "report": report_json(rep),
    }
    if not rep.ok:
        return 1, {**out, **_first_failure(rep)}
    return 0, out


def _pullback_of_universal(prob: Problem, u):
    pb = prob.pullback
    return pullback_extension(u.structure, pb.map, pb.base, pb.basepoint)


def cmd_classify(prob: Problem, args) -> Tuple[int, dict]:
    if prob.extension is None and prob.pullback is None:
        raise MissingSection("classify needs an 'extension' or a 'pullback' section",
                             witness={"needs": ["extension", "pullback"]})
    u = build_Pu(prob.curve)
    s = prob.extension if prob.extension is not None else _pullback_of_universal(prob, u)
    cm = classify(u, s)
    return (0 if cm.ok else 1), {"map": map_json(cm.map),
                                 "certificate": [{"object": name, "passed": ok} for name, ok in cm.certificate]}


def cmd_pullback(prob: Problem, args) -> Tuple[int, dict]:
    if prob.pullback is None:
        raise MissingSection("pullback needs a 'pullback' section", witness={"needs": ["pullback"]})
    source = prob.extension if prob.extension is not None else build_Pu(prob.curve).structure
    pb = prob.pullback
    s = pullback_extension(source, pb.map, pb.base, pb.basepoint)
    rep = validate_extension(prob.curve, s)
    out = {"structure": structure_json(s), "report": report_json(rep)}
    if not rep.ok:
        return 1, {**out, **_first_failure(rep)}
    return 0, out


def cmd_pushout(prob: Problem, args) -> Tuple[int, dict]:
    if prob.degree_one is None:
        raise MissingSection("pushout needs a 'degree_one' section", witness={"needs": ["degree_one"]})
    p0 = prob.extension if prob.extension is not None else build_Pu(prob.curve).structure
    r = pushout_extension(p0, prob.degree_one)
    rep = check_pushout(p0, prob.degree_one, r)
    out = {"structure": structure_json(r.structure),
           "eta": {f"{kind}:{oid}": map_json(m) for (kind, oid), m in r.eta.items()},
           "report": report_json(rep)}
    if not rep.ok:
        return 1, {**out, **_first_failure(rep)}
    return 0, out


def smoothing_set(prob: Problem, args) -> List[str]:
    if args.smooth_edges is not None:
        return [e for e in (x.strip() for x in args.smooth_edges.split(",")) if e]
    return list(prob.smooth_edges or [])


def cmd_facecheck(prob: Problem, args) -> Tuple[int, dict]:
    smoothed = smoothing_set(prob, args)
    u = build_Pu(prob.curve)
    rep = check_open_universality(u, prob.curve, smoothed, prob.extra_monodromy or None)
    out = {"smoothed_edges": sorted(smoothed), "ok": rep.ok, "isomorphism": rep.isomorphism,
           "embedding": map_json(rep.embedding), "face": polyhedron_json(rep.face),
           "contracted_pu": polyhedron_json(rep.contracted_pu),
           "witness_point": [rat(x) for x in rep.witness_point], "detail": rep.detail}
    if not rep.ok:
        return 1, {**out, **_failure("NOT_UNIVERSAL", rep.detail, {"smoothed_edges": sorted(smoothed)})}
    return 0, out


HANDLERS = {"validate": cmd_validate, "universal": cmd_universal, "classify": cmd_classify,
            "pullback": cmd_pullback, "pushout": cmd_pushout, "facecheck": cmd_facecheck}


def run(command: str, text: str, args) -> Tuple[int, str]:
    """Run one command on the text of a problem file; returns the exit
    code and the solution file contents."""
    try:
        prob = parse_problem(text)
    except ParseError as exc:
        return 2, dumps(solution(command, "", "parse_error", exc.record()))
    try:
        code, body = HANDLERS[command](prob, args)
    except MissingSection as exc:
        return 2, dumps(solution(command, prob.digest, "missing_section", exc.record()))
    except TropextError as exc:
        return 1, dumps(solution(command, prob.digest, "failed", exc.record()))
    return code, dumps(solution(command, prob.digest, "ok" if code == 0 else "failed", body))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropext", description="Universal extensions of tropical curve structures.")
    p.add_argument("--input", help="problem file (JSON)")
    p.add_argument("--output", help="solution file; stdout when omitted")
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--smooth-edges", help="comma-separated edge ids for facecheck")
    p.add_argument("--seed", type=int, default=0, help="seed for selftest")
    p.add_argument("--rounds", type=int, default=20, help="instances per selftest suite")
    p.add_argument("--version", action="version", version=f"tropext {__version__}")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        from .selftest import format_table, run_selftest
        rows = run_selftest(args.seed, args.rounds)
        print(format_table(rows))
        return 0 if all(r.failed == 0 for r in rows) else 1
    if not args.input:
        print("tropext: --input is required for this command", file=sys.stderr)
        return 2
    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"tropext: cannot read {args.input}: {exc.strerror}", file=sys.stderr)
        return 2
    code, out = run(args.command, text, args)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    if code:
        print(f"tropext: {args.command} exited with status {code}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
