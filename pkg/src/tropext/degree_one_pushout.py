"""Pushing an extended structure forward along a degree-one map of curve
types that subdivides edges and contracts subtrees."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .affine_kernel import AffineMap, Polyhedron, affine_interpolate, maps_agree_on
from .curve_model import (CurveType, ExtendedStructure, ValidationReport, fiber_ray, fiber_segment,
                          fmt_point, leg_polyhedron, node_polyhedron, validate_extension)
from .errors import InterpolationError, PushoutError

Image = Tuple  # ("vertex", x) | ("edge", e, i) | ("leg", y, i)


@dataclass
class DegreeOneMap:
    """``vertex_assignment`` sends each source vertex to ``(kind, target id)``
    with kind ``vertex``, ``edge`` or ``leg``.  ``edge_chains[e]`` lists the
    source edges covering ``e`` from its flag-0 end; ``leg_chains[y]`` lists
    source edges from the leg's vertex outwards, then the source leg.
    Source edges and legs in no chain are contracted."""

    source: CurveType
    target: CurveType
    vertex_assignment: Dict[str, Tuple[str, str]]
    edge_chains: Dict[str, Tuple[str, ...]]
    leg_chains: Dict[str, Tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        self.vertex_assignment = {k: tuple(v) for k, v in self.vertex_assignment.items()}
        self.edge_chains = {k: tuple(v) for k, v in self.edge_chains.items()}
        self.leg_chains = {k: tuple(v) for k, v in self.leg_chains.items()}


@dataclass(frozen=True)
class ChainStep:
    edge: str
    reversed: bool
    start: str
    end: str


def _walk(src: CurveType, chain: Sequence[str], start: Optional[str]) -> Optional[List[ChainStep]]:
    """Orient the chain as a walk; ``start`` fixes the first vertex when given."""
    if not chain:
        return []
    edges = [src.edge(eid) for eid in chain]
    if start is None:
        first = [f.vertex for f in edges[0].flags]
        if len(edges) >= 2:
            nxt = {f.vertex for f in edges[1].flags}
            free = [v for v in first if v not in nxt]
            start = free[0] if free else first[0]
        else:
            start = first[0]
    steps = []
    cur = start
    for e in edges:
        a, b = e.flags[0].vertex, e.flags[1].vertex
        if a == cur:
            steps.append(ChainStep(e.id, False, a, b))
            cur = b
        elif b == cur:
            steps.append(ChainStep(e.id, True, b, a))
            cur = a
        else:
            return None
    return steps


@dataclass
class Layout:
    """Where every source object lands, with chain offsets."""

    vertex_image: Dict[str, Image]
    edge_image: Dict[str, Image]
    edge_reversed: Dict[str, bool]
    leg_image: Dict[str, Image]
    walks: Dict[Tuple[str, str], List[ChainStep]]


def _target_flag_vertex(tgt: CurveType, eid: str, k: int) -> str:
    return tgt.edge(eid).flags[k].vertex


def _layout(d: DegreeOneMap, rep: ValidationReport) -> Optional[Layout]:
    src, tgt = d.source, d.target
    vimg: Dict[str, Image] = {}
    for v in src.vertices:
        kind, tid = d.vertex_assignment.get(v.id, (None, None))
        ok = (kind == "vertex" and tid in {x.id for x in tgt.vertices}
              or kind == "edge" and tid in {e.id for e in tgt.edges}
              or kind == "leg" and tid in {y.id for y in tgt.legs})
        if not rep.add("vertex_assigned", v.id, ok, {"assignment": [kind, tid]}):
            return None
        if kind == "vertex":
            vimg[v.id] = ("vertex", tid)

    used_edges: Dict[str, str] = {}
    used_legs: Dict[str, str] = {}
    eimg: Dict[str, Image] = {}
    erev: Dict[str, bool] = {}
    limg: Dict[str, Image] = {}
    walks: Dict[Tuple[str, str], List[ChainStep]] = {}
    src_edges = {e.id for e in src.edges}
    src_legs = {y.id for y in src.legs}

    for e in tgt.edges:
        chain = tuple(d.edge_chains.get(e.id, ()))
        bad = [c for c in chain if c not in src_edges] + [c for c in chain if c in used_edges or chain.count(c) > 1]
        if not rep.add("chain_edges_valid", e.id, chain and not bad, {"chain": list(chain), "bad": sorted(set(bad))}):
            return None
        for c in chain:
            used_edges[c] = e.id
        x0 = _target_flag_vertex(tgt, e.id, 0)
        x1 = _target_flag_vertex(tgt, e.id, 1)
        walk = None
        if chain[0] in src_edges:
            for f in src.edge(chain[0]).flags:
                if d.vertex_assignment.get(f.vertex) == ("vertex", x0):
                    w = _walk(src, chain, f.vertex)
                    if w is not None and (walk is None or d.vertex_assignment.get(w[-1].end) == ("vertex", x1)):
                        walk = w
        if walk is None:
            walk = _walk(src, chain, None)
        if not rep.add("chain_is_path", e.id, walk is not None, list(chain)):
            return None
        verts = [walk[0].start] + [s.end for s in walk]
        inner = verts[1:-1]
        simple = len(set(inner)) == len(inner) and not (set(inner) & {verts[0], verts[-1]})
        rep.add("chain_vertex_disjoint", e.id, simple, verts)
        ends_ok = (d.vertex_assignment.get(verts[0]) == ("vertex", x0)
                   and d.vertex_assignment.get(verts[-1]) == ("vertex", x1))
        rep.add("chain_order", e.id, ends_ok,
                {"walk_start": verts[0], "walk_end": verts[-1], "flag0": x0, "flag1": x1})
        for i, v in enumerate(inner, start=1):
            if rep.add("chain_interior_on_edge", v, d.vertex_assignment.get(v) == ("edge", e.id),
                       {"expected": ["edge", e.id], "got": list(d.vertex_assignment.get(v, ()))}):
                vimg[v] = ("edge", e.id, i)
        for i, s in enumerate(walk):
            eimg[s.edge] = ("edge", e.id, i)
            erev[s.edge] = s.reversed
        walks[("edge", e.id)] = walk

    for y in tgt.legs:
        chain = tuple(d.leg_chains.get(y.id, ()))
        if not rep.add("leg_chain_valid", y.id, chain and chain[-1] in src_legs and chain[-1] not in used_legs,
                       list(chain)):
            return None
        body, leg = chain[:-1], chain[-1]
        bad = [c for c in body if c not in src_edges or c in used_edges or body.count(c) > 1]
        if not rep.add("chain_edges_valid", y.id, not bad, {"chain": list(chain), "bad": sorted(set(bad))}):
            return None
        for c in body:
            used_edges[c] = y.id
        used_legs[leg] = y.id
        start = [v.id for v in src.vertices if d.vertex_assignment.get(v.id) == ("vertex", y.vertex)]
        walk = None
        for s in start:
            walk = _walk(src, body, s)
            if walk is not None:
                break
        if not body:
            walk = []
        if not rep.add("chain_is_path", y.id, walk is not None, list(chain)):
            return None
        last = walk[-1].end if walk else src.leg(leg).vertex
        first = walk[0].start if walk else last
        rep.add("chain_order", y.id, d.vertex_assignment.get(first) == ("vertex", y.vertex),
                {"walk_start": first, "leg_vertex": y.vertex})
        rep.add("leg_at_chain_end", y.id, src.leg(leg).vertex == last,
                {"leg_vertex": src.leg(leg).vertex, "chain_end": last})
        verts = [first] + [s.end for s in walk]
        rep.add("chain_vertex_disjoint", y.id, len(set(verts)) == len(verts), verts)
        for i, v in enumerate(verts[1:], start=1):
            if rep.add("chain_interior_on_leg", v, d.vertex_assignment.get(v) == ("leg", y.id),
                       {"expected": ["leg", y.id], "got": list(d.vertex_assignment.get(v, ()))}):
                vimg[v] = ("leg", y.id, i)
        for i, s in enumerate(walk):
            eimg[s.edge] = ("leg", y.id, i)
            erev[s.edge] = s.reversed
        limg[leg] = ("leg", y.id, len(walk))
        walks[("leg", y.id)] = walk

    # contracted edges spread chain positions to the vertices hanging off the chains
    contracted = [e for e in src.edges if e.id not in used_edges]
    changed = True
    while changed:
        changed = False
        for e in contracted:
            a, b = e.flags[0].vertex, e.flags[1].vertex
            for p, r in ((a, b), (b, a)):
                if p in vimg and r not in vimg and d.vertex_assignment.get(r) == vimg[p][:2]:
                    vimg[r] = vimg[p]
                    changed = True
    for v in src.vertices:
        rep.add("preimage_connected", v.id, v.id in vimg,
                {"assignment": list(d.vertex_assignment.get(v.id, ()))})
    for x in tgt.vertices:
        rep.add("vertex_covered", x.id, any(img == ("vertex", x.id) for img in vimg.values()), x.id)
    if not rep.ok:
        return None
    for e in contracted:
        a, b = e.flags[0].vertex, e.flags[1].vertex
        if rep.add("contracted_edge_within_preimage", e.id, vimg[a] == vimg[b],
                   {"ends": [list(vimg[a]), list(vimg[b])]}):
            eimg[e.id] = vimg[a]
            erev[e.id] = False
    for y in src.legs:
        if y.id not in limg:
            limg[y.id] = vimg[y.vertex]
    # each preimage must be connected through contracted edges and chains
    for x in tgt.vertices:
        members = [v for v, img in vimg.items() if img == ("vertex", x.id)]
        rep.add("preimage_connected", x.id, _connected(members, [e for e in contracted]), members)
    if not rep.ok:
        return None
    return Layout(vimg, eimg, erev, limg, walks)


def _connected(members, edges) -> bool:
    if not members:
        return False
    ms = set(members)
    adj = {m: set() for m in ms}
    for e in edges:
        a, b = e.flags[0].vertex, e.flags[1].vertex
        if a in ms and b in ms:
            adj[a].add(b)
            adj[b].add(a)
    seen, stack = {members[0]}, [members[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == ms


def _chain_lengths(d: DegreeOneMap, walk: List[ChainStep]) -> List[Fraction]:
    return [d.source.edge(s.edge).length for s in walk]


def _shift(offset, sign=1) -> AffineMap:
    """``t -> offset + sign * t`` on R^1."""
    return AffineMap(1, 1, [[sign]], [offset])


def validate_degree_one(d: DegreeOneMap) -> ValidationReport:
    rep = ValidationReport()
    lay = _layout(d, rep)
    if lay is None:
        return rep
    src, tgt = d.source, d.target

    for v in src.vertices:
        img = lay.vertex_image[v.id]
        if img[0] == "vertex":
            x = tgt.vertex(img[1])
            rep.add("stratum_matches", v.id, v.stratum.polytope == x.stratum.polytope, img[1])
            rep.add("position_matches", v.id, tuple(v.position) == tuple(x.position),
                    {"source": fmt_point(v.position), "target": fmt_point(x.position)})
        else:
            obj = tgt.edge(img[1]) if img[0] == "edge" else tgt.leg(img[1])
            if rep.add("stratum_matches", v.id, v.stratum.polytope == obj.stratum.polytope, img[1]):
                lengths = _chain_lengths(d, lay.walks[(img[0], img[1])])
                at = obj.trajectory((sum(lengths[:img[2]], Fraction(0)),))
                rep.add("position_matches", v.id, tuple(v.position) == at,
                        {"source": fmt_point(v.position), "target": fmt_point(at)})

    for e in tgt.edges:
        walk = lay.walks[("edge", e.id)]
        lengths = _chain_lengths(d, walk)
        rep.add("length_sum", e.id, sum(lengths) == e.length,
                {"sum": str(sum(lengths)), "length": str(e.length)})
        _check_concatenation(d, rep, e.id, e.trajectory, walk, lengths)
        for k, s in ((0, walk[0]), (1, walk[-1])):
            se = src.edge(s.edge)
            sk = (1 if s.reversed else 0) if k == 0 else (0 if s.reversed else 1)
            sf, tf = se.flags[sk], e.flags[k]
            if src.vertex(sf.vertex).stratum.polytope == tgt.vertex(tf.vertex).stratum.polytope \
                    and se.stratum.polytope == e.stratum.polytope:
                rep.add("end_germ_matches", f"{e.id}.flag{k}", sf.germ == tf.germ, s.edge)
    for y in tgt.legs:
        walk = lay.walks[("leg", y.id)]
        lengths = _chain_lengths(d, walk)
        _check_concatenation(d, rep, y.id, y.trajectory, walk, lengths)
        leg = src.leg(d.leg_chains[y.id][-1])
        total = sum(lengths, Fraction(0))
        rep.add("stratum_matches", leg.id, leg.stratum.polytope == y.stratum.polytope, y.id)
        if leg.trajectory.target_dim == y.trajectory.target_dim:
            rep.add("trajectory_concatenates", leg.id,
                    maps_agree_on(y.trajectory.compose(_shift(total)), leg.trajectory, Polyhedron.orthant(1)),
                    "leg trajectory does not continue the chain")

    for e in src.edges:
        img = lay.edge_image[e.id]
        if e.id in {s.edge for w in lay.walks.values() for s in w}:
            continue
        target_point = _image_point(d, lay, img)
        obj_stratum = _image_stratum(d, img)
        ok = (e.stratum.polytope == obj_stratum.polytope
              and all(r[0] == 0 for r in e.trajectory.linear)
              and e.trajectory.translate == target_point)
        rep.add("contracted_edge_constant", e.id, ok,
                {"image": list(img), "point": fmt_point(target_point)})
    for y in src.legs:
        img = lay.leg_image[y.id]
        if any(y.id == ch[-1] for ch in d.leg_chains.values()):
            continue
        target_point = _image_point(d, lay, img)
        ok = (y.stratum.polytope == _image_stratum(d, img).polytope
              and all(r[0] == 0 for r in y.trajectory.linear)
              and y.trajectory.translate == target_point)
        rep.add("contracted_leg_constant", y.id, ok, {"image": list(img)})
    return rep


def _image_stratum(d: DegreeOneMap, img: Image):
    t = d.target
    if img[0] == "vertex":
        return t.vertex(img[1]).stratum
    return (t.edge(img[1]) if img[0] == "edge" else t.leg(img[1])).stratum


def _image_point(d: DegreeOneMap, lay: Layout, img: Image):
    t = d.target
    if img[0] == "vertex":
        return tuple(t.vertex(img[1]).position)
    obj = t.edge(img[1]) if img[0] == "edge" else t.leg(img[1])
    lengths = _chain_lengths(d, lay.walks[(img[0], img[1])])
    return obj.trajectory((sum(lengths[:img[2]], Fraction(0)),))


def _check_concatenation(d, rep, tid, traj, walk, lengths):
    offset = Fraction(0)
    for s, l in zip(walk, lengths):
        se = d.source.edge(s.edge)
        if se.trajectory.target_dim != traj.target_dim:
            rep.add("trajectory_concatenates", s.edge, False, "strata of different dimension")
            continue
        param = _shift(offset + l, -1) if s.reversed else _shift(offset)
        rep.add("trajectory_concatenates", s.edge,
                maps_agree_on(traj.compose(param), se.trajectory, Polyhedron.interval(0, l)),
                {"target": tid, "offset": str(offset), "reversed": s.reversed})
        offset += l


# pushout

@dataclass
class PushoutResult:
    structure: ExtendedStructure
    eta: Dict[Tuple[str, str], AffineMap]
    layout: Layout = field(repr=False)


@dataclass(frozen=True)
class PushoutSquare:
    """Commuting data for a map out of one target object: a candidate
    ``h`` completes the square iff ``h o eta == value`` on ``domain``
    for every leg."""

    object: Tuple[str, str]
    source_poly: Polyhedron
    legs: Tuple[Tuple[AffineMap, Polyhedron, AffineMap], ...]


def _partial_sums(rhos: List[AffineMap], n: int):
    """``S[i] = rho_0 + ... + rho_{i-1}`` as maps on the base."""
    out = [AffineMap.constant(n, [0])]
    for r in rhos:
        out.append(out[-1] + r)
    return out


def pushout_extension(p0: ExtendedStructure, d: DegreeOneMap) -> PushoutResult:
    rep = validate_degree_one(d)
    if not rep.ok:
        bad = rep.failures()[0]
        raise PushoutError(f"invalid degree-one map: {bad.check} failed for {bad.subject}",
                           code="INVALID_DEGREE_ONE_MAP",
                           witness={"check": bad.check, "subject": bad.subject, "detail": bad.witness})
    lay = _layout(d, ValidationReport())
    src, tgt = d.source, d.target
    base = p0.base.canonical()
    n = base.dim
    bp = tuple(p0.basepoint)
    ident = AffineMap.identity(n)
    proj_base2 = AffineMap.coordinates(n + 2, range(n))
    proj_base1 = AffineMap.coordinates(n + 1, range(n))

    sums: Dict[Tuple[str, str], List[AffineMap]] = {}
    for key, walk in lay.walks.items():
        sums[key] = _partial_sums([p0.rho[s.edge] for s in walk], n)

    rho = {e.id: sums[("edge", e.id)][-1] for e in tgt.edges}

    def onto(img, pre: AffineMap, near=None, far=None) -> AffineMap:
        """Map into the polyhedron of ``img`` lying over ``pre``.

        Along a chain, a piece at index ``i`` sits between the partial
        sums ``S[i]`` and ``S[i+1]``; ``near``/``far`` are its own
        coordinates measured from the two ends."""
        if img[0] == "vertex":
            return pre
        S = sums[(img[0], img[1])]
        i = img[2]
        before = S[i].compose(pre)
        if near is not None:
            before = before + near
        if img[0] == "leg":
            return AffineMap.stack([pre, before])
        after = (S[-1] - S[i + 1 if far is not None else i]).compose(pre)
        if far is not None:
            after = after + far
        return AffineMap.stack([pre, before, after])

    eta: Dict[Tuple[str, str], AffineMap] = {}
    for v in src.vertices:
        eta[("vertex", v.id)] = onto(lay.vertex_image[v.id], p0.iso_to_base[v.id])
    for e in src.edges:
        img = lay.edge_image[e.id]
        if img[0] == "vertex" or e.id not in {s.edge for w in lay.walks.values() for s in w}:
            eta[("edge", e.id)] = onto(img, proj_base2)
            continue
        a = AffineMap.coordinates(n + 2, [n])
        b = AffineMap.coordinates(n + 2, [n + 1])
        if lay.edge_reversed[e.id]:
            a, b = b, a
        eta[("edge", e.id)] = onto(img, proj_base2, a, b if img[0] == "edge" else None)
    for y in src.legs:
        img = lay.leg_image[y.id]
        if img[0] == "leg" and any(y.id == ch[-1] for ch in d.leg_chains.values()):
            eta[("leg", y.id)] = onto(img, proj_base1, AffineMap.coordinates(n + 1, [n]))
        else:
            eta[("leg", y.id)] = onto(img, proj_base1)

    vertex_polys = {x.id: base for x in tgt.vertices}
    iso = {x.id: ident for x in tgt.vertices}
    node_polys = {e.id: node_polyhedron(base, rho[e.id]) for e in tgt.edges}
    leg_polys = {y.id: leg_polyhedron(base) for y in tgt.legs}
    flag_maps, leg_maps = {}, {}
    for e in tgt.edges:
        flag_maps[(e.id, 0)] = AffineMap.stack([ident, AffineMap.constant(n, [0]), rho[e.id]])
        flag_maps[(e.id, 1)] = AffineMap.stack([ident, rho[e.id], AffineMap.constant(n, [0])])
    for y in tgt.legs:
        leg_maps[y.id] = AffineMap.stack([ident, AffineMap.constant(n, [0])])

    def target_poly(kind, tid):
        return {"vertex": vertex_polys, "edge": node_polys, "leg": leg_polys}[kind][tid]

    constraints: Dict[Tuple[str, str], list] = {obj: [] for obj in
                                                [("vertex", x.id) for x in tgt.vertices]
                                                + [("edge", e.id) for e in tgt.edges]
                                                + [("leg", y.id) for y in tgt.legs]}
    for v in src.vertices:
        img = lay.vertex_image[v.id]
        constraints[(img[0], img[1])].append((eta[("vertex", v.id)], p0.vertex_polys[v.id], p0.nat_vertex[v.id]))
    for e in src.edges:
        img = lay.edge_image[e.id]
        constraints[(img[0], img[1])].append((eta[("edge", e.id)], p0.node_polys[e.id], p0.nat_edge[e.id]))
    for y in src.legs:
        img = lay.leg_image[y.id]
        constraints[(img[0], img[1])].append((eta[("leg", y.id)], p0.leg_polys[y.id], p0.nat_leg[y.id]))
    for e in tgt.edges:
        constraints[("edge", e.id)].append((fiber_segment(bp, e.length), Polyhedron.interval(0, e.length), e.trajectory))
    for y in tgt.legs:
        constraints[("leg", y.id)].append((fiber_ray(bp), Polyhedron.orthant(1), y.trajectory))

    nat = {}
    for obj, cons in constraints.items():
        try:
            nat[obj] = affine_interpolate(cons, target_poly(*obj))
        except InterpolationError as err:
            raise PushoutError(f"no consistent map out of {obj[0]} {obj[1]}: {err}", code="INCONSISTENT_CHAIN",
                               witness={"object": list(obj), "reason": err.code}) from err

    structure = ExtendedStructure(
        tgt, base, bp, vertex_polys, iso, rho, node_polys, leg_polys, flag_maps, leg_maps,
        {x.id: nat[("vertex", x.id)] for x in tgt.vertices},
        {e.id: nat[("edge", e.id)] for e in tgt.edges},
        {y.id: nat[("leg", y.id)] for y in tgt.legs})
    # every constraint must hold on its whole domain, not only where it was sampled
    for obj, cons in constraints.items():
        for emb, dom, val in cons:
            if not maps_agree_on(nat[obj].compose(emb), val, dom):
                raise PushoutError(f"pushout map out of {obj[0]} {obj[1]} is inconsistent",
                                   code="INCONSISTENT_CHAIN", witness={"object": list(obj)})
    return PushoutResult(structure, eta, lay)


def eta_squares(p0: ExtendedStructure, d: DegreeOneMap, r: PushoutResult):
    """Naturality squares ``eta o sigma == tau o eta`` for every source
    structure map ``sigma``; yields ``(name, lhs, rhs, domain)``."""
    lay = r.layout
    s1 = r.structure
    src = d.source

    def target_flag(edge_img, vertex_img, sflag_end):
        # which target structure map connects the two images
        if edge_img[:2] == vertex_img[:2]:
            return None
        kind, tid = edge_img[0], edge_img[1]
        if kind == "edge":
            return s1.flag_maps[(tid, sflag_end)]
        return s1.leg_maps[tid]

    for e in src.edges:
        walk = lay.walks.get((lay.edge_image[e.id][0], lay.edge_image[e.id][1]), [])
        for k, f in enumerate(e.flags):
            lhs = r.eta[("edge", e.id)].compose(p0.flag_maps[(e.id, k)])
            vimg, eimg = lay.vertex_image[f.vertex], lay.edge_image[e.id]
            # the flag sits at the chain's start (target flag 0) or end (target flag 1)
            at_start = bool(walk) and walk[0].edge == e.id and (k == (1 if walk[0].reversed else 0))
            tau = target_flag(eimg, vimg, 0 if at_start else 1)
            tau = AffineMap.identity(lhs.target_dim) if tau is None else tau
            rhs = tau.compose(r.eta[("vertex", f.vertex)])
            yield f"{e.id}.flag{k}", lhs, rhs, p0.vertex_polys[f.vertex]
    for y in src.legs:
        lhs = r.eta[("leg", y.id)].compose(p0.leg_maps[y.id])
        vimg, limg = lay.vertex_image[y.vertex], lay.leg_image[y.id]
        tau = target_flag(limg, vimg, 0)
        tau = AffineMap.identity(lhs.target_dim) if tau is None else tau
        yield y.id, lhs, tau.compose(r.eta[("vertex", y.vertex)]), p0.vertex_polys[y.vertex]


def check_eta_naturality(p0: ExtendedStructure, d: DegreeOneMap, r: PushoutResult) -> ValidationReport:
    rep = ValidationReport()
    for name, lhs, rhs, dom in eta_squares(p0, d, r):
        rep.add("eta_square_commutes", name, lhs.target_dim == rhs.target_dim and maps_agree_on(lhs, rhs, dom),
                "square does not commute")
    return rep


def pushout_square(p0: ExtendedStructure, d: DegreeOneMap, r: PushoutResult, kind: str, tid: str) -> PushoutSquare:
    """The square characterizing the target's map out of one object."""
    lay = r.layout
    legs = []
    for v in d.source.vertices:
        if lay.vertex_image[v.id][:2] == (kind, tid):
            legs.append((r.eta[("vertex", v.id)], p0.vertex_polys[v.id], p0.nat_vertex[v.id]))
    for e in d.source.edges:
        if lay.edge_image[e.id][:2] == (kind, tid):
            legs.append((r.eta[("edge", e.id)], p0.node_polys[e.id], p0.nat_edge[e.id]))
    for y in d.source.legs:
        if lay.leg_image[y.id][:2] == (kind, tid):
            legs.append((r.eta[("leg", y.id)], p0.leg_polys[y.id], p0.nat_leg[y.id]))
    s1 = r.structure
    poly = {"vertex": s1.vertex_polys, "edge": s1.node_polys, "leg": s1.leg_polys}[kind][tid]
    return PushoutSquare((kind, tid), poly, tuple(legs))


@dataclass
class UniquenessReport:
    passing: List[int]
    outcome: str  # "unique", "no candidate" or "ambiguous"

    @property
    def ok(self) -> bool:
        return self.outcome == "unique"


def verify_pushout_uniqueness(r: PushoutResult, candidates: Sequence[AffineMap],
                              square: PushoutSquare) -> UniquenessReport:
    passing = []
    for i, h in enumerate(candidates):
        if h.source_dim != square.source_poly.dim:
            continue
        if all(h.target_dim == val.target_dim and maps_agree_on(h.compose(emb), val, dom)
               for emb, dom, val in square.legs):
            passing.append(i)
    if not passing:
        return UniquenessReport(passing, "no candidate")
    return UniquenessReport(passing, "unique" if len(passing) == 1 else "ambiguous")


def check_pushout(p0: ExtendedStructure, d: DegreeOneMap, r: PushoutResult) -> ValidationReport:
    """Sum rule, naturality of eta, and validity of the pushed structure."""
    rep = ValidationReport()
    s1 = r.structure
    for e in d.target.edges:
        walk = r.layout.walks[("edge", e.id)]
        total = AffineMap.constant(p0.base.dim, [0])
        for s in walk:
            total = total + p0.rho[s.edge]
        rep.add("length_is_sum", e.id, s1.rho[e.id] == total,
                {"rho": [str(x) for x in s1.rho[e.id].linear[0]], "sum": [str(x) for x in total.linear[0]]})
    rep.extend(check_eta_naturality(p0, d, r))
    rep.extend(validate_extension(d.target, s1))
    return rep
