"""JSON problem and solution files.

Rationals are always ``"p/q"`` (or plain integer) strings.  Output
dictionaries are built in a fixed key order and dumped without sorting,
so identical inputs give byte-identical files.
"""

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .affine_kernel import AffineMap, Polyhedron, format_rational, parse_rational
from .affine_kernel.linalg import primitive, rref
from .curve_model import (CurveType, Edge, ExtendedStructure, Flag, Leg, TargetStratum, ValidationReport,
                          Vertex)
from .degree_one_pushout import DegreeOneMap
from .errors import TropextError

FORMAT_VERSION = "tropext/1"


class ParseError(TropextError):
    code = "PARSE_ERROR"


# reading

def _rat(x, where: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise ParseError(f"{where}: expected a rational string, got {x!r}", witness={"at": where})
    if isinstance(x, int):
        return Fraction(x)
    try:
        return parse_rational(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: {exc}", witness={"at": where, "value": x}) from None


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"{where}: expected an integer, got {x!r}", witness={"at": where})
    return x


def _get(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing field {key!r}", witness={"at": where, "field": key})
    return obj[key]


def _point(xs, where: str) -> Tuple[Fraction, ...]:
    if not isinstance(xs, list):
        raise ParseError(f"{where}: expected a list", witness={"at": where})
    return tuple(_rat(x, f"{where}[{i}]") for i, x in enumerate(xs))


def parse_map(obj, where: str = "map") -> AffineMap:
    src = _int(_get(obj, "source_dim", where), f"{where}.source_dim")
    tgt = _int(_get(obj, "target_dim", where), f"{where}.target_dim")
    rows = _get(obj, "linear", where)
    if not isinstance(rows, list) or len(rows) != tgt or any(not isinstance(r, list) or len(r) != src for r in rows):
        raise ParseError(f"{where}: linear part must be {tgt}x{src}", witness={"at": where})
    lin = [[_int(x, f"{where}.linear") for x in r] for r in rows]
    trans = _point(obj.get("translate", ["0"] * tgt), f"{where}.translate")
    if len(trans) != tgt:
        raise ParseError(f"{where}: translate has length {len(trans)}, expected {tgt}", witness={"at": where})
    return AffineMap(src, tgt, lin, trans)


def _constraints(rows, dim: int, where: str):
    out = []
    for i, row in enumerate(rows or []):
        if not isinstance(row, list) or len(row) != 2 or not isinstance(row[0], list) or len(row[0]) != dim:
            raise ParseError(f"{where}[{i}]: expected [normal of length {dim}, offset]", witness={"at": where})
        out.append(([_rat(x, f"{where}[{i}]") for x in row[0]], _rat(row[1], f"{where}[{i}]")))
    return out


def parse_polyhedron(obj, where: str = "polyhedron") -> Polyhedron:
    dim = _int(_get(obj, "dim", where), f"{where}.dim")
    return Polyhedron(dim, _constraints(obj.get("inequalities"), dim, f"{where}.inequalities"),
                      _constraints(obj.get("equalities"), dim, f"{where}.equalities"))


def parse_strata(obj) -> Dict[str, TargetStratum]:
    if not isinstance(obj, dict):
        raise ParseError("strata must be an object", witness={"at": "strata"})
    return {sid: TargetStratum(sid, parse_polyhedron(p, f"strata.{sid}")) for sid, p in obj.items()}


def _stratum(strata, sid, where):
    if sid not in strata:
        raise ParseError(f"{where}: unknown stratum {sid!r}", witness={"at": where, "stratum": sid})
    return strata[sid]


def parse_curve(obj, strata: Dict[str, TargetStratum], where: str = "curve") -> CurveType:
    vertices, edges, legs = [], [], []
    for i, v in enumerate(_get(obj, "vertices", where)):
        w = f"{where}.vertices[{i}]"
        vertices.append(Vertex(str(_get(v, "id", w)), _stratum(strata, _get(v, "stratum", w), w),
                               _point(_get(v, "position", w), f"{w}.position"),
                               tuple(parse_map(m, f"{w}.monodromy") for m in v.get("monodromy", []))))
    for i, e in enumerate(obj.get("edges", [])):
        w = f"{where}.edges[{i}]"
        flags = _get(e, "flags", w)
        if not isinstance(flags, list) or len(flags) != 2:
            raise ParseError(f"{w}: an edge has exactly two flags", witness={"at": w})
        edges.append(Edge(str(_get(e, "id", w)), _rat(_get(e, "length", w), f"{w}.length"),
                          _stratum(strata, _get(e, "stratum", w), w),
                          parse_map(_get(e, "trajectory", w), f"{w}.trajectory"),
                          tuple(Flag(str(_get(f, "vertex", f"{w}.flags")), parse_map(_get(f, "germ", w), f"{w}.germ"))
                                for f in flags)))
    for i, y in enumerate(obj.get("legs", [])):
        w = f"{where}.legs[{i}]"
        legs.append(Leg(str(_get(y, "id", w)), str(_get(y, "vertex", w)), _stratum(strata, _get(y, "stratum", w), w),
                        parse_map(_get(y, "trajectory", w), f"{w}.trajectory"),
                        parse_map(_get(y, "germ", w), f"{w}.germ")))
    return CurveType(tuple(vertices), tuple(edges), tuple(legs))


def parse_structure(obj, curve: CurveType, where: str = "extension") -> ExtendedStructure:
    def maps(key):
        return {k: parse_map(m, f"{where}.{key}.{k}") for k, m in _get(obj, key, where).items()}

    def polys(key):
        return {k: parse_polyhedron(p, f"{where}.{key}.{k}") for k, p in _get(obj, key, where).items()}

    flag_maps = {}
    for eid, pair in _get(obj, "flag_maps", where).items():
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{where}.flag_maps.{eid}: expected two maps", witness={"at": where})
        for k in (0, 1):
            flag_maps[(eid, k)] = parse_map(pair[k], f"{where}.flag_maps.{eid}[{k}]")
    return ExtendedStructure(curve, parse_polyhedron(_get(obj, "base", where), f"{where}.base"),
                             _point(_get(obj, "basepoint", where), f"{where}.basepoint"),
                             polys("vertex_polys"), maps("iso_to_base"), maps("rho"), polys("node_polys"),
                             polys("leg_polys"), flag_maps, maps("leg_maps"), maps("nat_vertex"),
                             maps("nat_edge"), maps("nat_leg"))


@dataclass
class PullbackSection:
    map: AffineMap
    base: Polyhedron
    basepoint: Tuple[Fraction, ...]


@dataclass
class Problem:
    strata: Dict[str, TargetStratum]
    curve: CurveType
    extension: Optional[ExtendedStructure] = None
    pullback: Optional[PullbackSection] = None
    degree_one: Optional[DegreeOneMap] = None
    smooth_edges: Optional[List[str]] = None
    extra_monodromy: Dict[str, Tuple[AffineMap, ...]] = field(default_factory=dict)
    digest: str = ""


def parse_problem(text: str) -> Problem:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", witness={"line": exc.lineno, "column": exc.colno}) from None
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    version = obj.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported version {version!r}", witness={"expected": FORMAT_VERSION})
    try:
        strata = parse_strata(_get(obj, "strata", "problem"))
        curve = parse_curve(_get(obj, "curve", "problem"), strata)
        prob = Problem(strata, curve, digest=hashlib.sha256(text.encode()).hexdigest())
        if "extension" in obj:
            prob.extension = parse_structure(obj["extension"], curve)
        if "pullback" in obj:
            pb = obj["pullback"]
            prob.pullback = PullbackSection(parse_map(_get(pb, "map", "pullback"), "pullback.map"),
                                         parse_polyhedron(_get(pb, "base", "pullback"), "pullback.base"),
                                         _point(_get(pb, "basepoint", "pullback"), "pullback.basepoint"))
        if "degree_one" in obj:
            d = obj["degree_one"]
            prob.degree_one = DegreeOneMap(curve, parse_curve(_get(d, "target", "degree_one"), strata,
                                                              "degree_one.target"),
                                           {k: tuple(v) for k, v in _get(d, "vertex_assignment", "degree_one").items()},
                                           {k: tuple(v) for k, v in d.get("edge_chains", {}).items()},
                                           {k: tuple(v) for k, v in d.get("leg_chains", {}).items()})
        params = obj.get("params", {})
        if "smooth_edges" in params:
            prob.smooth_edges = [str(e) for e in params["smooth_edges"]]
        prob.extra_monodromy = {vid: tuple(parse_map(m, f"params.extra_monodromy.{vid}") for m in ms)
                                for vid, ms in params.get("extra_monodromy", {}).items()}
    except TropextError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), witness=exc.witness) from None
    except (AttributeError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed problem: {exc}") from None
    return prob


# writing

def rat(x) -> str:
    return format_rational(Fraction(x))


def map_json(m: AffineMap) -> dict:
    return {"source_dim": m.source_dim, "target_dim": m.target_dim,
            "linear": [[int(x) for x in row] for row in m.linear],
            "translate": [rat(x) for x in m.translate]}


def _rows_json(rows) -> list:
    return [[[int(x) for x in a], rat(b)] for a, b in rows]


def _line_basis(lines, dim: int) -> List[Tuple[int, ...]]:
    if not lines:
        return []
    reduced, _ = rref([list(l) for l in lines], dim)
    return sorted(primitive(r)[0] for r in reduced if any(r))


def polyhedron_json(p: Polyhedron, generators: bool = True) -> dict:
    c = p.canonical()
    out = {"dim": c.dim, "inequalities": _rows_json(c.inequalities), "equalities": _rows_json(c.equalities)}
    if generators:
        v = c.vrep()
        out["vertices"] = [[rat(x) for x in pt] for pt in sorted(v.vertices)]
        out["rays"] = [[int(x) for x in r] for r in sorted(v.rays)]
        out["lines"] = [list(l) for l in _line_basis(v.lines, c.dim)]
    return out


def _plain(x):
    """Witness payloads: rationals become strings, tuples become lists."""
    if isinstance(x, Fraction):
        return rat(x)
    if isinstance(x, AffineMap):
        return map_json(x)
    if isinstance(x, Polyhedron):
        return polyhedron_json(x, generators=False)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in x]
        return sorted(items, key=json.dumps) if isinstance(x, (set, frozenset)) else items
    return x


def report_json(rep: ValidationReport) -> dict:
    fails = rep.failures()
    return {"ok": rep.ok, "checks": len(rep.results), "failed": len(fails),
            "failures": [{"check": f.check, "subject": f.subject, "witness": _plain(f.witness)} for f in fails]}


def curve_json(c: CurveType) -> dict:
    return {
        "vertices": [{"id": v.id, "stratum": v.stratum.id, "position": [rat(x) for x in v.position],
                      "monodromy": [map_json(m) for m in v.monodromy]} for v in c.vertices],
        "edges": [{"id": e.id, "length": rat(e.length), "stratum": e.stratum.id,
                   "trajectory": map_json(e.trajectory),
                   "flags": [{"vertex": f.vertex, "germ": map_json(f.germ)} for f in e.flags]} for e in c.edges],
        "legs": [{"id": y.id, "vertex": y.vertex, "stratum": y.stratum.id, "trajectory": map_json(y.trajectory),
                  "germ": map_json(y.germ)} for y in c.legs],
    }


def strata_json(c: CurveType, *more: CurveType) -> dict:
    seen: Dict[str, TargetStratum] = {}
    for curve in (c,) + more:
        for obj in curve.vertices + curve.edges + curve.legs:
            seen.setdefault(obj.stratum.id, obj.stratum)
    return {sid: polyhedron_json(s.polytope, generators=False) for sid, s in seen.items()}


def structure_json(s: ExtendedStructure) -> dict:
    c = s.curve
    return {
        "base": polyhedron_json(s.base),
        "basepoint": [rat(x) for x in s.basepoint],
        "vertex_polys": {v.id: polyhedron_json(s.vertex_polys[v.id], False) for v in c.vertices},
        "iso_to_base": {v.id: map_json(s.iso_to_base[v.id]) for v in c.vertices},
        "rho": {e.id: map_json(s.rho[e.id]) for e in c.edges},
        "node_polys": {e.id: polyhedron_json(s.node_polys[e.id], False) for e in c.edges},
        "leg_polys": {y.id: polyhedron_json(s.leg_polys[y.id], False) for y in c.legs},
        "flag_maps": {e.id: [map_json(s.flag_maps[(e.id, 0)]), map_json(s.flag_maps[(e.id, 1)])] for e in c.edges},
        "leg_maps": {y.id: map_json(s.leg_maps[y.id]) for y in c.legs},
        "nat_vertex": {v.id: map_json(s.nat_vertex[v.id]) for v in c.vertices},
        "nat_edge": {e.id: map_json(s.nat_edge[e.id]) for e in c.edges},
        "nat_leg": {y.id: map_json(s.nat_leg[y.id]) for y in c.legs},
    }


def problem_json(c: CurveType, **sections) -> dict:
    """A problem file for ``c``; extra sections are copied in as given."""
    out = {"version": FORMAT_VERSION, "strata": strata_json(c, *[
        sec["_target_curve"] for sec in sections.values() if isinstance(sec, dict) and "_target_curve" in sec]),
        "curve": curve_json(c)}
    for key, val in sections.items():
        if isinstance(val, dict):
            val = {k: v for k, v in val.items() if k != "_target_curve"}
        out[key] = val
    return out


def degree_one_json(d: DegreeOneMap) -> dict:
    return {"_target_curve": d.target, "target": curve_json(d.target),
            "vertex_assignment": {k: list(v) for k, v in d.vertex_assignment.items()},
            "edge_chains": {k: list(v) for k, v in d.edge_chains.items()},
            "leg_chains": {k: list(v) for k, v in d.leg_chains.items()}}


def solution(command: str, digest: str, status: str, body: dict) -> dict:
    return {"version": FORMAT_VERSION, "command": command, "input_sha256": digest, "status": status, **body}


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=True) + "\n"
