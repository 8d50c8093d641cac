"""Seeded property suites behind ``tropext --command selftest``."""

import random
import time
from dataclasses import dataclass
from typing import Callable, List, Tuple

from .affine_kernel import AffineMap, Polyhedron, image, is_iso_onto_face, preimage
from .curve_model import CurveType, Edge, Flag, fiber_at
from .degree_one_pushout import DegreeOneMap, check_pushout, pushout_extension, validate_degree_one
from .errors import TropextError
from .extension_ops import check_open_universality, classify, pullback_extension
from .random_instances import (monodromy_curve, random_forest, random_map, random_map_into, random_polyhedron,
                               refine, smooth_target_curve)
from .universal_extension import build_Pu


@dataclass
class SuiteResult:
    name: str
    passed: int
    failed: int
    seconds: float
    first_failure: str = ""


def smooth_target_law(c: CurveType) -> Tuple[bool, str]:
    """Edge lengths identify P_u with the closed orthant."""
    u = build_Pu(c)
    n = len(c.edges)
    lengths = AffineMap.stack([u.rho[e.id] for e in c.edges], source_dim=u.pu.dim)
    cert = is_iso_onto_face(lengths, u.pu, Polyhedron.orthant(n))
    ok = cert is not None and cert.face == Polyhedron.orthant(n)
    return ok, "" if ok else "lengths are not an isomorphism onto the orthant"


def distinguished_point(c: CurveType) -> Tuple[bool, str]:
    u = build_Pu(c)
    if not u.pu.contains(u.basepoint):
        return False, "basepoint outside P_u"
    ok = fiber_at(u.structure, u.basepoint) == c
    return ok, "" if ok else "fiber at the basepoint differs from the curve"


def classification_round_trip(c: CurveType, rng: random.Random) -> Tuple[bool, str]:
    u = build_Pu(c)
    base, m, bp = random_map_into(rng, u.pu, u.basepoint)
    s = pullback_extension(u.structure, m, base, bp)
    cm = classify(u, s)
    ok = cm.ok and cm.map == m
    return ok, "" if ok else f"classified as {cm.map!r}, expected {m!r}"


def open_universality(c: CurveType, rng: random.Random) -> Tuple[bool, str]:
    u = build_Pu(c)
    smoothed = random_forest(rng, c)
    rep = check_open_universality(u, c, smoothed)
    return rep.ok, "" if rep.ok else f"smoothing {smoothed}: {rep.detail}"


def pushout_sum_rule(c: CurveType, rng: random.Random) -> Tuple[bool, str]:
    src, assign, chains, leg_chains = refine(rng, c, pieces=rng.choice([2, 3]))
    d = DegreeOneMap(src, c, assign, chains, leg_chains)
    valid = validate_degree_one(d)
    if not valid.ok:
        f = valid.failures()[0]
        return False, f"generated map invalid: {f.check} for {f.subject}"
    p0 = build_Pu(src).structure
    rep = check_pushout(p0, d, pushout_extension(p0, d))
    if rep.ok:
        return True, ""
    f = rep.failures()[0]
    return False, f"{f.check} failed for {f.subject}"


def twist_germs(c: CurveType) -> CurveType:
    """Precompose every flag germ with its vertex's first monodromy generator."""
    edges = []
    for e in c.edges:
        flags = []
        for f in e.flags:
            gens = c.vertex(f.vertex).monodromy
            flags.append(Flag(f.vertex, f.germ.compose(gens[0])) if gens else f)
        edges.append(Edge(e.id, e.length, e.stratum, e.trajectory, tuple(flags)))
    return CurveType(c.vertices, tuple(edges), c.legs)


def monodromy_independence(c: CurveType) -> Tuple[bool, str]:
    ok = build_Pu(c).pu == build_Pu(twist_germs(c)).pu
    return ok, "" if ok else "twisting germs by monodromy changed P_u"


def kernel_consistency(rng: random.Random) -> Tuple[bool, str]:
    p = random_polyhedron(rng, max_dim=4, max_constraints=7)
    a = random_map(rng, p.dim, rng.randint(1, 4))
    img = image(p, a)
    if img != image(p, a, method="fm"):
        return False, "fast image path disagrees with elimination"
    if not p.issubset(preimage(img, a)):
        return False, "polyhedron escapes the preimage of its image"
    if not image(preimage(img, a), a).issubset(img):
        return False, "image of the preimage leaves the polyhedron"
    return True, ""


def _run(name: str, rounds: int, check: Callable[[int], Tuple[bool, str]]) -> SuiteResult:
    start = time.perf_counter()
    passed = failed = 0
    first = ""
    for i in range(rounds):
        try:
            ok, why = check(i)
        except TropextError as exc:
            ok, why = False, f"{exc.code}: {exc}"
        if ok:
            passed += 1
        else:
            failed += 1
            first = first or f"round {i}: {why}"
    return SuiteResult(name, passed, failed, time.perf_counter() - start, first)


def run_selftest(seed: int = 0, rounds: int = 20) -> List[SuiteResult]:
    def rng_for(tag: str, i: int) -> random.Random:
        return random.Random(f"{seed}:{tag}:{i}")

    def smooth(tag, i, max_edges=8):
        rng = rng_for(tag, i)
        return smooth_target_curve(rng, max_edges), rng

    return [
        _run("smooth_target_law", rounds, lambda i: smooth_target_law(smooth("law", i)[0])),
        _run("distinguished_point", rounds, lambda i: distinguished_point(
            smooth_target_curve(rng_for("pt", i), 6) if i % 2 else monodromy_curve(rng_for("pt", i)))),
        _run("classification_round_trip", rounds, lambda i: classification_round_trip(*smooth("cls", i, 5))),
        _run("open_universality", rounds, lambda i: open_universality(*smooth("open", i, 6))),
        _run("pushout_sum_rule", rounds, lambda i: pushout_sum_rule(*smooth("push", i, 4))),
        _run("monodromy_independence", rounds, lambda i: monodromy_independence(
            monodromy_curve(rng_for("mono", i), 4))),
        _run("kernel_consistency", rounds, lambda i: kernel_consistency(rng_for("kernel", i))),
    ]


def format_table(rows: List[SuiteResult]) -> str:
    width = max(len(r.name) for r in rows)
    lines = [f"{'suite':<{width}}  passed  failed  seconds", "-" * (width + 26)]
    for r in rows:
        lines.append(f"{r.name:<{width}}  {r.passed:>6}  {r.failed:>6}  {r.seconds:>7.2f}")
    for r in rows:
        if r.first_failure:
            lines.append(f"{r.name}: {r.first_failure}")
    total_failed = sum(r.failed for r in rows)
    lines.append("all suites passed" if total_failed == 0 else f"{total_failed} failures")
    return "\n".join(lines)
