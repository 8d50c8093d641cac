"""Pullbacks of extended structures, classifying maps into P_u, and
restriction of P_u to the faces where some edges have length zero."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .affine_kernel import AffineMap, Polyhedron, image, is_iso_onto_face, maps_into, preimage
from .curve_model import (CurveType, Edge, ExtendedStructure, Flag, Leg, TargetStratum, Vertex,
                          compare_structures, fiber_ray, fiber_segment, fmt_point, leg_polyhedron,
                          node_polyhedron)
from .errors import ExtensionError
from .universal_extension import UniversalExtension, build_Pu


# pullback

def pullback_extension(s: ExtendedStructure, m: AffineMap, new_base: Polyhedron,
                       new_basepoint: Sequence) -> ExtendedStructure:
    """The unique extension over ``new_base`` whose maps to ``s`` lie over ``m``.

    Vertex polyhedra of the result are ``new_base`` itself (identity
    isomorphism); node and leg polyhedra use the standard layouts.
    """
    n, k = s.base.dim, new_base.dim
    if m.source_dim != k or m.target_dim != n:
        raise ExtensionError(f"map is {m.source_dim}->{m.target_dim}, expected {k}->{n}",
                             code="DIMENSION_MISMATCH")
    bp = tuple(Fraction(x) for x in new_basepoint)
    if len(bp) != k or not new_base.contains(bp):
        raise ExtensionError("new basepoint is not in the new base", code="BASEPOINT_MISMATCH",
                             witness=fmt_point(bp))
    if m(bp) != tuple(s.basepoint):
        raise ExtensionError("map does not send basepoint to basepoint", code="BASEPOINT_MISMATCH",
                             witness={"image": fmt_point(m(bp)), "expected": fmt_point(s.basepoint)})
    if not maps_into(m, new_base, s.base):
        raise ExtensionError("map leaves the base", code="NOT_INTO_BASE")

    c = s.curve
    base = new_base.canonical()
    ident = AffineMap.identity(k)
    eta_v = {v.id: s.base_inverse(v.id).compose(m) for v in c.vertices}
    vertex_polys = {v.id: base for v in c.vertices}
    iso = {v.id: ident for v in c.vertices}
    nat_vertex = {v.id: s.nat_vertex[v.id].compose(eta_v[v.id]) for v in c.vertices}

    rho, node_polys, flag_maps, nat_edge = {}, {}, {}, {}
    for e in c.edges:
        rho[e.id] = s.rho[e.id].compose(m)
        node_polys[e.id] = node_polyhedron(base, rho[e.id])
        lift = AffineMap.block_diagonal([m, AffineMap.identity(2)])
        nat_edge[e.id] = s.nat_edge[e.id].compose(lift)
        for i, f in enumerate(e.flags):
            sides = s.flag_maps[(e.id, i)].rows([n, n + 1]).compose(eta_v[f.vertex])
            flag_maps[(e.id, i)] = AffineMap.stack([ident, sides])

    leg_polys, leg_maps, nat_leg = {}, {}, {}
    for y in c.legs:
        leg_polys[y.id] = leg_polyhedron(base)
        lift = AffineMap.block_diagonal([m, AffineMap.identity(1)])
        nat_leg[y.id] = s.nat_leg[y.id].compose(lift)
        side = s.leg_maps[y.id].rows([n]).compose(eta_v[y.vertex])
        leg_maps[y.id] = AffineMap.stack([ident, side])

    return ExtendedStructure(c, base, bp, vertex_polys, iso, rho, node_polys, leg_polys,
                             flag_maps, leg_maps, nat_vertex, nat_edge, nat_leg)


# classification

@dataclass(frozen=True)
class ClassifyingMap:
    map: AffineMap
    certificate: Tuple[Tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.certificate)


def classifying_components(u: UniversalExtension, s: ExtendedStructure) -> AffineMap:
    """Vertex positions and edge lengths of ``s``, stacked in Q's coordinate order."""
    c = u.curve
    parts = [s.nat_vertex[v.id].compose(s.base_inverse(v.id)) for v in c.vertices]
    parts += [s.rho[e.id] for e in c.edges]
    return AffineMap.stack(parts, source_dim=s.base.dim)


def classify(u: UniversalExtension, s: ExtendedStructure) -> ClassifyingMap:
    try:
        m = classifying_components(u, s)
    except ExtensionError as err:
        raise ExtensionError(f"not an extension: {err}", code="NOT_AN_EXTENSION", witness=err.witness) from err
    if not maps_into(m, s.base, u.pu):
        raise ExtensionError("the classifying map leaves P_u", code="NOT_AN_EXTENSION",
                             witness={"reason": "image_outside_pu"})
    if m(s.basepoint) != tuple(u.basepoint):
        raise ExtensionError("basepoint is not sent to the curve's own point", code="NOT_AN_EXTENSION",
                             witness={"image": fmt_point(m(s.basepoint)), "expected": fmt_point(u.basepoint)})
    pulled = pullback_extension(u.structure, m, s.base, s.basepoint)
    diffs = compare_structures(pulled, s)
    if diffs:
        raise ExtensionError("the pullback along the classifying map differs from the structure",
                             code="NOT_AN_EXTENSION", witness={"differing_objects": diffs})
    cert = tuple((f"{kind}:{oid}", True) for kind, oid in s.objects())
    return ClassifyingMap(m, cert)


# face restriction

@dataclass
class FaceRestriction:
    smoothed_edges: FrozenSet[str]
    face: Polyhedron
    contracted_curve: CurveType
    witness_point: Tuple[Fraction, ...]
    components: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    transports: Dict[str, AffineMap] = field(default_factory=dict)
    representative: Dict[str, str] = field(default_factory=dict)


def _components(c: CurveType, smoothed: Iterable[str]):
    """Union-find over the smoothed edges; returns (parent map, cycle edges)."""
    parent = {v.id: v.id for v in c.vertices}
    order = {v.id: i for i, v in enumerate(c.vertices)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    cycles = []
    for e in c.edges:
        if e.id not in smoothed:
            continue
        a, b = find(e.flags[0].vertex), find(e.flags[1].vertex)
        if a == b:
            cycles.append(e.id)
            continue
        lo, hi = sorted((a, b), key=order.get)
        parent[hi] = lo
    return {v.id: find(v.id) for v in c.vertices}, cycles


def _germ_inverse(germ: AffineMap, src: Polyhedron, dst: Polyhedron) -> Tuple[AffineMap, Polyhedron]:
    cert = is_iso_onto_face(germ, src, dst)
    if cert is None:
        raise ExtensionError("germ is not an isomorphism onto a face", code="INVALID_CURVE")
    return cert.inverse_on_face, cert.face


def face_restrict(u: UniversalExtension, c: CurveType, smoothed: Iterable[str],
                  extra_monodromy: Optional[Dict[str, Sequence[AffineMap]]] = None) -> FaceRestriction:
    """Restrict P_u to the face where the edges in ``smoothed`` have length
    zero and describe the curve type found in its relative interior.

    ``extra_monodromy`` maps a merged component's representative vertex
    (its first vertex in curve order) to additional monodromy generators;
    it is required when smoothing closes a cycle.
    """
    smoothed = frozenset(smoothed)
    unknown = sorted(smoothed - {e.id for e in c.edges})
    if unknown:
        raise ExtensionError("unknown edges", code="UNKNOWN_EDGE", witness=unknown)
    extra = dict(extra_monodromy or {})
    rep_of, cycles = _components(c, smoothed)
    if cycles and not all(rep_of[c.edge(eid).flags[0].vertex] in extra for eid in cycles):
        raise ExtensionError("smoothing these edges closes a cycle", code="NEW_CYCLE",
                             witness=sorted(cycles))

    q = u.scaffold
    face = u.pu.add_constraints(
        equalities=[(tuple(int(j == q.edge_coords[eid]) for j in range(q.dim)), 0) for eid in sorted(smoothed)]
    ).canonical()
    if face.is_empty():
        raise ExtensionError("the face is empty", code="EMPTY_FACE", witness=sorted(smoothed))
    w = face.relative_interior_point()
    dead = [e.id for e in c.edges if e.id not in smoothed and w[q.edge_coords[e.id]] == 0]
    if dead:
        raise ExtensionError("every point of the face kills further edges", code="NO_INTERIOR_WITNESS",
                             witness=dead)

    members: Dict[str, List[str]] = {}
    for v in c.vertices:
        members.setdefault(rep_of[v.id], []).append(v.id)

    # transports from each representative's stratum to its members' strata
    to_member: Dict[str, AffineMap] = {}
    from_member: Dict[str, AffineMap] = {}
    domains: Dict[str, Polyhedron] = {}
    tree = [e for e in c.edges if e.id in smoothed and e.id not in cycles]
    for r, ms in members.items():
        rv = c.vertex(r)
        to_member[r] = AffineMap.identity(rv.stratum.dim)
        from_member[r] = AffineMap.identity(rv.stratum.dim)
        dom = rv.stratum.polytope
        frontier = [r]
        seen = {r}
        while frontier:
            cur = frontier.pop(0)
            for e in tree:
                ends = [f.vertex for f in e.flags]
                if cur not in ends:
                    continue
                k = ends.index(cur)
                nxt = ends[1 - k]
                if nxt in seen:
                    continue
                here, there = e.flags[k], e.flags[1 - k]
                inv_there, face_there = _germ_inverse(there.germ, c.vertex(nxt).stratum.polytope,
                                                      e.stratum.polytope)
                inv_here, _ = _germ_inverse(here.germ, c.vertex(cur).stratum.polytope, e.stratum.polytope)
                into_edge = here.germ.compose(to_member[cur])
                dom = dom.intersect(preimage(face_there, into_edge))
                to_member[nxt] = inv_there.compose(into_edge)
                from_member[nxt] = from_member[cur].compose(inv_here).compose(there.germ)
                seen.add(nxt)
                frontier.append(nxt)
        domains[r] = dom.canonical()

    merged_id = {r: "+".join(ms) for r, ms in members.items()}
    vertices = []
    for v in c.vertices:
        if rep_of[v.id] != v.id:
            continue
        ms = members[v.id]
        lo, hi = q.vertex_blocks[v.id]
        pos = tuple(w[lo:hi])
        if len(ms) == 1:
            vertices.append(Vertex(v.id, v.stratum, pos, v.monodromy))
            continue
        dom = domains[v.id]
        stratum = v.stratum if dom == v.stratum.polytope else TargetStratum(f"{v.stratum.id}@{merged_id[v.id]}", dom)
        gens = []
        for j in ms:
            for g in c.vertex(j).monodromy:
                conj = from_member[j].compose(g).compose(to_member[j])
                if not maps_into(conj, dom, dom):
                    raise ExtensionError("transported monodromy does not preserve the merged stratum",
                                         code="MONODROMY_ESCAPE", witness={"vertex": j})
                gens.append(conj)
        gens += list(extra.get(v.id, ()))
        vertices.append(Vertex(merged_id[v.id], stratum, pos, tuple(gens)))

    s = u.structure
    edges = []
    for e in c.edges:
        if e.id in smoothed:
            continue
        length = w[q.edge_coords[e.id]]
        flags = tuple(Flag(merged_id[rep_of[f.vertex]], f.germ.compose(to_member[f.vertex])) for f in e.flags)
        traj = s.nat_edge[e.id].compose(fiber_segment(w, length))
        edges.append(Edge(e.id, length, e.stratum, traj, flags))
    legs = []
    for y in c.legs:
        traj = s.nat_leg[y.id].compose(fiber_ray(w))
        legs.append(Leg(y.id, merged_id[rep_of[y.vertex]], y.stratum, traj, y.germ.compose(to_member[y.vertex])))

    contracted = CurveType(tuple(vertices), tuple(edges), tuple(legs))
    return FaceRestriction(smoothed, face, contracted, w,
                           {merged_id[r]: tuple(ms) for r, ms in members.items()},
                           to_member, rep_of)


@dataclass
class UniversalityReport:
    ok: bool
    isomorphism: str
    embedding: AffineMap
    face: Polyhedron
    contracted_pu: Polyhedron
    witness_point: Tuple[Fraction, ...]
    detail: str = ""


def face_embedding(u: UniversalExtension, fr: FaceRestriction, contracted: UniversalExtension) -> AffineMap:
    """The map Q' -> Q: transports on vertex blocks, identity on kept edge
    lengths, zero on smoothed ones."""
    q, q2 = u.scaffold, contracted.scaffold
    rows: List[List[int]] = [None] * q.dim
    trans: List[Fraction] = [Fraction(0)] * q.dim
    merged_id = {r: "+".join(ms) for r, ms in _members(fr).items()}
    for v in u.curve.vertices:
        r = fr.representative[v.id]
        lo2, hi2 = q2.vertex_blocks[merged_id[r]]
        t = fr.transports[v.id]
        lo, _ = q.vertex_blocks[v.id]
        for i, (row, c0) in enumerate(zip(t.linear, t.translate)):
            full = [0] * q2.dim
            full[lo2:hi2] = row
            rows[lo + i] = full
            trans[lo + i] = c0
    for e in u.curve.edges:
        i = q.edge_coords[e.id]
        if e.id in fr.smoothed_edges:
            rows[i] = [0] * q2.dim
        else:
            rows[i] = [int(j == q2.edge_coords[e.id]) for j in range(q2.dim)]
    return AffineMap(q2.dim, q.dim, rows, trans)


def _members(fr: FaceRestriction) -> Dict[str, List[str]]:
    out: Dict[str, List[str]] = {}
    for vid, r in fr.representative.items():
        out.setdefault(r, []).append(vid)
    return out


def check_open_universality(u: UniversalExtension, c: CurveType, smoothed: Iterable[str],
                            extra_monodromy=None) -> UniversalityReport:
    fr = face_restrict(u, c, smoothed, extra_monodromy)
    contracted = build_Pu(fr.contracted_curve, assemble=False)
    emb = face_embedding(u, fr, contracted)
    img = image(contracted.pu, emb)
    if img != fr.face:
        return UniversalityReport(False, "none", emb, fr.face, contracted.pu, fr.witness_point,
                                  "image of the contracted P_u differs from the face")
    cert = is_iso_onto_face(emb, contracted.pu, fr.face)
    if cert is None or cert.face != fr.face:
        return UniversalityReport(False, "none", emb, fr.face, contracted.pu, fr.witness_point,
                                  "embedding is not an integral isomorphism onto the face")
    kind = "identity" if emb.is_identity else "affine"
    return UniversalityReport(True, kind, emb, fr.face, contracted.pu, fr.witness_point)
