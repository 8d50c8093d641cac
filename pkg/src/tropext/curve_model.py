"""Curve types, extended tropical structures and their validators."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .affine_kernel import (AffineMap, Polyhedron, format_rational, is_iso_onto_face, maps_agree_on,
                            maps_into)
from .affine_kernel.polyhedron import product
from .errors import ExtensionError

Point = Tuple[Fraction, ...]


def fmt_point(p) -> List[str]:
    return [format_rational(x) for x in p]


@dataclass(frozen=True)
class TargetStratum:
    id: str
    polytope: Polyhedron

    @property
    def dim(self) -> int:
        return self.polytope.dim


@dataclass(frozen=True)
class Vertex:
    id: str
    stratum: TargetStratum
    position: Point
    monodromy: Tuple[AffineMap, ...] = ()


@dataclass(frozen=True)
class Flag:
    vertex: str
    germ: AffineMap


@dataclass(frozen=True)
class Edge:
    """Internal edge.  Flag 0 sits at parameter 0 of ``[0, length]``,
    flag 1 at parameter ``length``."""

    id: str
    length: Fraction
    stratum: TargetStratum
    trajectory: AffineMap
    flags: Tuple[Flag, Flag]

    @property
    def is_loop(self) -> bool:
        return self.flags[0].vertex == self.flags[1].vertex


@dataclass(frozen=True)
class Leg:
    id: str
    vertex: str
    stratum: TargetStratum
    trajectory: AffineMap
    germ: AffineMap


@dataclass(frozen=True)
class CurveType:
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Edge, ...] = ()
    legs: Tuple[Leg, ...] = ()

    def vertex(self, vid: str) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise KeyError(eid)

    def leg(self, yid: str) -> Leg:
        for y in self.legs:
            if y.id == yid:
                return y
        raise KeyError(yid)

    def vertex_index(self, vid: str) -> int:
        return [v.id for v in self.vertices].index(vid)

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        adj = {v.id: set() for v in self.vertices}
        for e in self.edges:
            a, b = e.flags[0].vertex, e.flags[1].vertex
            if a in adj and b in adj:
                adj[a].add(b)
                adj[b].add(a)
        seen = {self.vertices[0].id}
        stack = [self.vertices[0].id]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(adj)


# reports

@dataclass(frozen=True)
class CheckResult:
    check: str
    subject: str
    passed: bool
    witness: object = None


@dataclass
class ValidationReport:
    results: List[CheckResult] = field(default_factory=list)

    def add(self, check: str, subject: str, passed: bool, witness=None) -> bool:
        self.results.append(CheckResult(check, subject, bool(passed), None if passed else witness))
        return bool(passed)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    def extend(self, other: "ValidationReport"):
        self.results.extend(other.results)


def _segment(length) -> Polyhedron:
    return Polyhedron.interval(0, length)


def _ray() -> Polyhedron:
    return Polyhedron.orthant(1)


def _is_endomorphism(g: AffineMap, poly: Polyhedron) -> bool:
    return g.source_dim == g.target_dim == poly.dim and maps_into(g, poly, poly)


def validate_curve_type(c: CurveType) -> ValidationReport:
    rep = ValidationReport()
    if not rep.add("has_vertex", "curve", len(c.vertices) > 0, "a curve needs at least one vertex"):
        return rep
    ids = [x.id for x in c.vertices] + [x.id for x in c.edges] + [x.id for x in c.legs]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    rep.add("unique_ids", "curve", not dup, dup)
    vids = {v.id for v in c.vertices}
    dangling = [f"{e.id}.flag{k}" for e in c.edges for k, f in enumerate(e.flags) if f.vertex not in vids]
    dangling += [y.id for y in c.legs if y.vertex not in vids]
    if not rep.add("references_resolve", "curve", not dangling, dangling):
        return rep
    rep.add("connected", "curve", c.is_connected(), "dual graph has several components")

    for v in c.vertices:
        poly = v.stratum.polytope
        if not rep.add("stratum_nonempty", v.id, not poly.is_empty(), v.stratum.id):
            continue
        if not rep.add("position_dimension", v.id, len(v.position) == poly.dim,
                       {"expected": poly.dim, "got": len(v.position)}):
            continue
        rep.add("position_in_stratum", v.id, poly.contains(v.position), fmt_point(v.position))
        for i, g in enumerate(v.monodromy):
            subj = f"{v.id}.monodromy{i}"
            if rep.add("monodromy_endomorphism", subj, _is_endomorphism(g, poly),
                       "generator does not map the stratum polytope into itself"):
                rep.add("monodromy_fixes_position", subj, g(v.position) == tuple(v.position),
                        {"position": fmt_point(v.position), "image": fmt_point(g(v.position))})

    for e in c.edges:
        poly = e.stratum.polytope
        if not rep.add("length_positive", e.id, e.length > 0, format_rational(e.length)):
            continue
        if not rep.add("stratum_nonempty", e.id, not poly.is_empty(), e.stratum.id):
            continue
        traj = e.trajectory
        if not rep.add("trajectory_dimension", e.id, traj.source_dim == 1 and traj.target_dim == poly.dim,
                       {"source": traj.source_dim, "target": traj.target_dim}):
            continue
        rep.add("trajectory_in_stratum", e.id, maps_into(traj, _segment(e.length), poly),
                "trajectory leaves the node stratum")
        for k, f in enumerate(e.flags):
            subj = f"{e.id}.flag{k}"
            v = c.vertex(f.vertex)
            if not rep.add("germ_dimension", subj,
                           f.germ.source_dim == v.stratum.dim and f.germ.target_dim == poly.dim,
                           {"source": f.germ.source_dim, "target": f.germ.target_dim}):
                continue
            cert = is_iso_onto_face(f.germ, v.stratum.polytope, poly)
            rep.add("germ_iso_onto_face", subj, cert is not None,
                    "germ is not an integral isomorphism onto a face")
            end = traj((e.length if k else 0,))
            at = f.germ(v.position)
            rep.add("endpoint_matches", subj, at == end,
                    {"germ_of_position": fmt_point(at), "trajectory_end": fmt_point(end)})

    for y in c.legs:
        poly = y.stratum.polytope
        if not rep.add("stratum_nonempty", y.id, not poly.is_empty(), y.stratum.id):
            continue
        traj = y.trajectory
        if not rep.add("trajectory_dimension", y.id, traj.source_dim == 1 and traj.target_dim == poly.dim,
                       {"source": traj.source_dim, "target": traj.target_dim}):
            continue
        rep.add("trajectory_in_stratum", y.id, maps_into(traj, _ray(), poly),
                "trajectory leaves the leg stratum")
        v = c.vertex(y.vertex)
        if not rep.add("germ_dimension", y.id,
                       y.germ.source_dim == v.stratum.dim and y.germ.target_dim == poly.dim,
                       {"source": y.germ.source_dim, "target": y.germ.target_dim}):
            continue
        rep.add("germ_iso_onto_face", y.id, is_iso_onto_face(y.germ, v.stratum.polytope, poly) is not None,
                "germ is not an integral isomorphism onto a face")
        at, start = y.germ(v.position), traj((0,))
        rep.add("endpoint_matches", y.id, at == start,
                {"germ_of_position": fmt_point(at), "trajectory_start": fmt_point(start)})
    return rep


# extended structures

def node_polyhedron(base: Polyhedron, rho: AffineMap) -> Polyhedron:
    """``{(q, a, b) : q in base, a, b >= 0, a + b = rho(q)}``."""
    n = base.dim
    ineqs = [(tuple(a) + (0, 0), b) for a, b in base.inequalities]
    ineqs += [((0,) * n + (1, 0), 0), ((0,) * n + (0, 1), 0)]
    eqs = [(tuple(a) + (0, 0), b) for a, b in base.equalities]
    eqs.append((tuple(-x for x in rho.linear[0]) + (1, 1), rho.translate[0]))
    return Polyhedron(n + 2, ineqs, eqs).canonical()


def leg_polyhedron(base: Polyhedron) -> Polyhedron:
    return product(base, Polyhedron.orthant(1)).canonical()


def fiber_segment(q: Sequence, length) -> AffineMap:
    """``t -> (q, t, length - t)``: the node fiber over ``q``."""
    n = len(q)
    return AffineMap(1, n + 2, [[0]] * n + [[1], [-1]], list(q) + [0, length])


def fiber_ray(q: Sequence) -> AffineMap:
    """``s -> (q, s)``: the leg fiber over ``q``."""
    n = len(q)
    return AffineMap(1, n + 1, [[0]] * n + [[1]], list(q) + [0])


def node_to_base(n: int) -> AffineMap:
    return AffineMap.coordinates(n + 2, range(n))


@dataclass
class ExtendedStructure:
    """An extension of the tropical structure of ``curve`` over ``base``.

    Node polyhedra use coordinates ``(q, a, b)`` with ``a + b = rho(q)``;
    flag 0 of an edge lands in the face ``a = 0`` and flag 1 in ``b = 0``.
    Leg polyhedra use ``(q, s)`` and vertices land in ``s = 0``.
    """

    curve: CurveType
    base: Polyhedron
    basepoint: Point
    vertex_polys: Dict[str, Polyhedron]
    iso_to_base: Dict[str, AffineMap]
    rho: Dict[str, AffineMap]
    node_polys: Dict[str, Polyhedron]
    leg_polys: Dict[str, Polyhedron]
    flag_maps: Dict[Tuple[str, int], AffineMap]
    leg_maps: Dict[str, AffineMap]
    nat_vertex: Dict[str, AffineMap]
    nat_edge: Dict[str, AffineMap]
    nat_leg: Dict[str, AffineMap]

    def base_inverse(self, vid: str) -> AffineMap:
        """Inverse of ``iso_to_base[vid]`` as a map ``base -> vertex polyhedron``."""
        iso = self.iso_to_base[vid]
        if iso.is_identity and self.vertex_polys[vid].dim == self.base.dim:
            return iso
        cert = is_iso_onto_face(iso, self.vertex_polys[vid], self.base)
        if cert is None:
            raise ExtensionError(f"vertex {vid} is not isomorphic to the base", code="NOT_ISOMORPHIC",
                                 witness={"vertex": vid})
        return cert.inverse_on_face

    def objects(self) -> List[Tuple[str, str]]:
        return ([("vertex", v.id) for v in self.curve.vertices]
                + [("edge", e.id) for e in self.curve.edges]
                + [("leg", y.id) for y in self.curve.legs])


def trivial_extension(c: CurveType) -> ExtendedStructure:
    """The tropical structure of the curve itself, over a point."""
    base = Polyhedron.full(0).canonical()
    vp, iso, rho, nodes, legs, fm, lm, nv, ne, nl = {}, {}, {}, {}, {}, {}, {}, {}, {}, {}
    for v in c.vertices:
        vp[v.id] = base
        iso[v.id] = AffineMap.identity(0)
        nv[v.id] = AffineMap.constant(0, v.position)
    for e in c.edges:
        rho[e.id] = AffineMap.constant(0, [e.length])
        nodes[e.id] = node_polyhedron(base, rho[e.id])
        fm[(e.id, 0)] = AffineMap.constant(0, [0, e.length])
        fm[(e.id, 1)] = AffineMap.constant(0, [e.length, 0])
        tr = e.trajectory
        ne[e.id] = AffineMap(2, tr.target_dim, [[r[0], 0] for r in tr.linear], tr.translate)
    for y in c.legs:
        legs[y.id] = leg_polyhedron(base)
        lm[y.id] = AffineMap.constant(0, [0])
        nl[y.id] = y.trajectory
    return ExtendedStructure(c, base, (), vp, iso, rho, nodes, legs, fm, lm, nv, ne, nl)


def validate_extension(c: CurveType, s: ExtendedStructure) -> ValidationReport:
    rep = ValidationReport()
    n = s.base.dim
    bp = tuple(s.basepoint)
    rep.add("basepoint_in_base", "base", len(bp) == n and s.base.contains(bp), fmt_point(bp))
    missing = [f"{kind}:{oid}" for kind, oid in _objects(c) if not _has(s, kind, oid)]
    if not rep.add("objects_present", "structure", not missing, missing):
        return rep
    inverses = {}

    for v in c.vertices:
        vp, iso = s.vertex_polys[v.id], s.iso_to_base[v.id]
        cert = is_iso_onto_face(iso, vp, s.base) if iso.source_dim == vp.dim else None
        onto = cert is not None and cert.face == s.base
        if rep.add("vertex_iso_to_base", v.id, onto, "vertex polyhedron is not isomorphic to the base"):
            inverses[v.id] = cert.inverse_on_face
        nat = s.nat_vertex[v.id]
        if rep.add("nat_dimension", v.id, nat.source_dim == vp.dim and nat.target_dim == v.stratum.dim,
                   {"source": nat.source_dim, "target": nat.target_dim}):
            rep.add("nat_image_in_stratum", v.id, maps_into(nat, vp, v.stratum.polytope),
                    "vertex map leaves its stratum")
            for i, g in enumerate(v.monodromy):
                rep.add("nat_monodromy_invariant", f"{v.id}.monodromy{i}",
                        maps_agree_on(g.compose(nat), nat, vp), "monodromy moves the vertex map")
            if v.id in inverses:
                pos = nat(inverses[v.id](bp))
                rep.add("restricts_to_position", v.id, pos == tuple(v.position),
                        {"expected": fmt_point(v.position), "got": fmt_point(pos)})

    for e in c.edges:
        rho = s.rho[e.id]
        if not rep.add("rho_dimension", e.id, rho.source_dim == n and rho.target_dim == 1,
                       {"source": rho.source_dim, "target": rho.target_dim}):
            continue
        rep.add("rho_nonnegative", e.id, maps_into(rho, s.base, _ray()), "edge length map takes negative values")
        node = s.node_polys[e.id]
        rep.add("node_is_pullback", e.id, node.dim == n + 2 and node == node_polyhedron(s.base, rho),
                "node polyhedron is not the pullback of (a, b) -> a + b along rho")
        rep.add("restricts_to_length", e.id, rho(bp) == (e.length,),
                {"expected": format_rational(e.length), "got": fmt_point(rho(bp))})
        for k, f in enumerate(e.flags):
            subj = f"{e.id}.flag{k}"
            sigma, vp = s.flag_maps[(e.id, k)], s.vertex_polys[f.vertex]
            if not rep.add("structure_map_dimension", subj,
                           sigma.source_dim == vp.dim and sigma.target_dim == node.dim,
                           {"source": sigma.source_dim, "target": sigma.target_dim}):
                continue
            rep.add("structure_map_iso_onto_face", subj, is_iso_onto_face(sigma, vp, node) is not None,
                    "structure map is not an isomorphism onto a face")
            rep.add("structure_map_over_base", subj,
                    maps_agree_on(node_to_base(n).compose(sigma), s.iso_to_base[f.vertex], vp),
                    "structure map does not commute with the projections to the base")
            side = AffineMap.coordinates(n + 2, [n] if k == 0 else [n + 1])
            rep.add("structure_map_orientation", subj,
                    maps_agree_on(side.compose(sigma), AffineMap.constant(vp.dim, [0]), vp),
                    "flag does not land on its side of the node")
            nat_e, nat_v = s.nat_edge[e.id], s.nat_vertex[f.vertex]
            rep.add("naturality", subj,
                    maps_agree_on(nat_e.compose(sigma), f.germ.compose(nat_v), vp),
                    "node map and germ transport disagree on the flag")
        nat_e = s.nat_edge[e.id]
        if rep.add("nat_dimension", e.id, nat_e.source_dim == n + 2 and nat_e.target_dim == e.stratum.dim,
                   {"source": nat_e.source_dim, "target": nat_e.target_dim}):
            rep.add("nat_image_in_stratum", e.id, maps_into(nat_e, node, e.stratum.polytope),
                    "node map leaves its stratum")
            rep.add("restricts_to_trajectory", e.id,
                    maps_agree_on(nat_e.compose(fiber_segment(bp, e.length)), e.trajectory, _segment(e.length)),
                    "node map over the basepoint is not the trajectory")

    for y in c.legs:
        lp = s.leg_polys[y.id]
        rep.add("leg_is_product", y.id, lp == leg_polyhedron(s.base), "leg polyhedron is not base x [0, inf)")
        sigma, vp = s.leg_maps[y.id], s.vertex_polys[y.vertex]
        if rep.add("structure_map_dimension", y.id, sigma.source_dim == vp.dim and sigma.target_dim == n + 1,
                   {"source": sigma.source_dim, "target": sigma.target_dim}):
            rep.add("structure_map_iso_onto_face", y.id, is_iso_onto_face(sigma, vp, lp) is not None,
                    "structure map is not an isomorphism onto a face")
            rep.add("structure_map_over_base", y.id,
                    maps_agree_on(AffineMap.coordinates(n + 1, range(n)).compose(sigma), s.iso_to_base[y.vertex], vp),
                    "structure map does not commute with the projections to the base")
            rep.add("structure_map_orientation", y.id,
                    maps_agree_on(AffineMap.coordinates(n + 1, [n]).compose(sigma), AffineMap.constant(vp.dim, [0]), vp),
                    "vertex does not land on the end of the leg")
            nat_y = s.nat_leg[y.id]
            if rep.add("nat_dimension", y.id, nat_y.source_dim == n + 1 and nat_y.target_dim == y.stratum.dim,
                       {"source": nat_y.source_dim, "target": nat_y.target_dim}):
                rep.add("naturality", y.id,
                        maps_agree_on(nat_y.compose(sigma), y.germ.compose(s.nat_vertex[y.vertex]), vp),
                        "leg map and germ transport disagree")
                rep.add("nat_image_in_stratum", y.id, maps_into(nat_y, lp, y.stratum.polytope),
                        "leg map leaves its stratum")
                rep.add("restricts_to_trajectory", y.id,
                        maps_agree_on(nat_y.compose(fiber_ray(bp)), y.trajectory, _ray()),
                        "leg map over the basepoint is not the trajectory")
    return rep


def _objects(c: CurveType):
    return ([("vertex", v.id) for v in c.vertices] + [("edge", e.id) for e in c.edges]
            + [("leg", y.id) for y in c.legs])


def _has(s: ExtendedStructure, kind: str, oid: str) -> bool:
    if kind == "vertex":
        return all(oid in d for d in (s.vertex_polys, s.iso_to_base, s.nat_vertex))
    if kind == "edge":
        return (all(oid in d for d in (s.rho, s.node_polys, s.nat_edge))
                and (oid, 0) in s.flag_maps and (oid, 1) in s.flag_maps)
    return all(oid in d for d in (s.leg_polys, s.leg_maps, s.nat_leg))


def fiber_at(s: ExtendedStructure, q: Sequence) -> CurveType:
    """The curve type classified by the point ``q`` of the base."""
    q = tuple(Fraction(x) for x in q)
    if not s.base.contains(q):
        raise ExtensionError("point is not in the base", code="NOT_IN_BASE", witness=fmt_point(q))
    c = s.curve
    lengths = {e.id: s.rho[e.id](q)[0] for e in c.edges}
    zero = [eid for eid, l in lengths.items() if l == 0]
    if zero:
        raise ExtensionError("edges of length zero at this point", code="ZERO_LENGTH_EDGE", witness=zero)
    vertices = tuple(
        Vertex(v.id, v.stratum, s.nat_vertex[v.id](s.base_inverse(v.id)(q)), v.monodromy)
        for v in c.vertices)
    edges = tuple(
        Edge(e.id, lengths[e.id], e.stratum,
             s.nat_edge[e.id].compose(fiber_segment(q, lengths[e.id])), e.flags)
        for e in c.edges)
    legs = tuple(
        Leg(y.id, y.vertex, y.stratum, s.nat_leg[y.id].compose(fiber_ray(q)), y.germ)
        for y in c.legs)
    return CurveType(vertices, edges, legs)


def compare_structures(a: ExtendedStructure, b: ExtendedStructure) -> List[str]:
    """Objects on which two structures over the same base differ.

    Vertex data are compared after transporting to the base through the
    inverse of each vertex's isomorphism, so structures with different
    vertex coordinates but the same diagram compare equal.
    """
    diffs = []
    if a.base != b.base:
        return ["base"]
    if tuple(a.basepoint) != tuple(b.basepoint):
        diffs.append("basepoint")
    base = a.base
    inv_a, inv_b = {}, {}
    for v in a.curve.vertices:
        try:
            inv_a[v.id], inv_b[v.id] = a.base_inverse(v.id), b.base_inverse(v.id)
        except (ExtensionError, KeyError):
            diffs.append(f"vertex:{v.id}")
            continue
        if not maps_agree_on(a.nat_vertex[v.id].compose(inv_a[v.id]),
                             b.nat_vertex[v.id].compose(inv_b[v.id]), base):
            diffs.append(f"vertex:{v.id}")
    for e in a.curve.edges:
        if not maps_agree_on(a.rho[e.id], b.rho[e.id], base) or a.node_polys[e.id] != b.node_polys[e.id]:
            diffs.append(f"edge:{e.id}")
            continue
        if not maps_agree_on(a.nat_edge[e.id], b.nat_edge[e.id], a.node_polys[e.id]):
            diffs.append(f"edge:{e.id}")
            continue
        for k, f in enumerate(e.flags):
            if f.vertex not in inv_a:
                continue
            if not maps_agree_on(a.flag_maps[(e.id, k)].compose(inv_a[f.vertex]),
                                 b.flag_maps[(e.id, k)].compose(inv_b[f.vertex]), base):
                diffs.append(f"flag:{e.id}.{k}")
    for y in a.curve.legs:
        if (a.leg_polys[y.id] != b.leg_polys[y.id]
                or not maps_agree_on(a.nat_leg[y.id], b.nat_leg[y.id], a.leg_polys[y.id])):
            diffs.append(f"leg:{y.id}")
            continue
        if y.vertex in inv_a and not maps_agree_on(a.leg_maps[y.id].compose(inv_a[y.vertex]),
                                                   b.leg_maps[y.id].compose(inv_b[y.vertex]), base):
            diffs.append(f"leg_map:{y.id}")
    return diffs
