"""Construction of the universal extension P_u of a curve's tropical structure.

Coordinates of Q (and hence of P_u) are the vertex blocks in vertex
order, each block being the ambient coordinates of that vertex's stratum,
followed by one length coordinate per edge in edge order.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .affine_kernel import (AffineMap, Polyhedron, affine_interpolate, equalizer, fixed_locus,
                            is_iso_onto_face, maps_agree_on, maps_into, product)
from .affine_kernel.linalg import rank
from .curve_model import (CurveType, ExtendedStructure, ValidationReport, fiber_ray, fmt_point,
                          leg_polyhedron, node_polyhedron, validate_curve_type)
from .errors import ConstructionError, InterpolationError


@dataclass(frozen=True)
class ScaffoldQ:
    poly: Polyhedron
    vertex_blocks: Dict[str, Tuple[int, int]]
    edge_coords: Dict[str, int]
    basepoint: Tuple[Fraction, ...]

    @property
    def dim(self) -> int:
        return self.poly.dim

    def labels(self) -> List[str]:
        out = [""] * self.dim
        for vid, (lo, hi) in self.vertex_blocks.items():
            for i in range(lo, hi):
                out[i] = f"{vid}[{i - lo}]"
        for eid, i in self.edge_coords.items():
            out[i] = eid
        return out

    def vertex_projection(self, vid: str) -> AffineMap:
        lo, hi = self.vertex_blocks[vid]
        return AffineMap.coordinates(self.dim, range(lo, hi))

    def edge_projection(self, eid: str) -> AffineMap:
        return AffineMap.coordinates(self.dim, [self.edge_coords[eid]])


@dataclass(frozen=True)
class NodeScaffold:
    """Q(e) in coordinates ``(a, b, q without its e-coordinate)``."""

    poly: Polyhedron
    inclusions: Tuple[AffineMap, AffineMap]
    fiber_embed: AffineMap
    to_scaffold: AffineMap  # node polyhedron coordinates (q, a, b) -> Q(e)


@dataclass
class UniversalExtension:
    curve: CurveType
    scaffold: ScaffoldQ
    q1: Polyhedron
    pu: Polyhedron
    rho: Dict[str, AffineMap]
    positions: Dict[str, AffineMap]
    interpolants: Dict[Tuple[str, int], AffineMap]
    node_scaffolds: Dict[str, NodeScaffold]
    structure: Optional[ExtendedStructure] = field(repr=False)

    @property
    def basepoint(self):
        return self.scaffold.basepoint


def _require_valid(c: CurveType):
    rep = validate_curve_type(c)
    if not rep.ok:
        bad = rep.failures()[0]
        raise ConstructionError(f"invalid curve type: {bad.check} failed for {bad.subject}",
                                code="INVALID_CURVE",
                                witness={"check": bad.check, "subject": bad.subject, "detail": bad.witness})


def build_Q(c: CurveType) -> ScaffoldQ:
    blocks, factors, base = {}, [], []
    pos = 0
    for v in c.vertices:
        d = v.stratum.dim
        blocks[v.id] = (pos, pos + d)
        factors.append(v.stratum.polytope)
        base += list(v.position)
        pos += d
    edges = {}
    for e in c.edges:
        edges[e.id] = pos
        factors.append(Polyhedron.orthant(1))
        base.append(Fraction(e.length))
        pos += 1
    return ScaffoldQ(product(*factors).canonical() if factors else Polyhedron.full(0).canonical(),
                     blocks, edges, tuple(Fraction(x) for x in base))


def build_Q1(c: CurveType, q: ScaffoldQ) -> Polyhedron:
    factors = [fixed_locus(v.stratum.polytope, list(v.monodromy)) for v in c.vertices]
    factors += [Polyhedron.orthant(1) for _ in c.edges]
    return product(*factors).canonical() if factors else Polyhedron.full(0).canonical()


def _drop_coordinate(q: ScaffoldQ, eid: str):
    i = q.edge_coords[eid]
    return [j for j in range(q.dim) if j != i]


def build_node_scaffold(c: CurveType, q: ScaffoldQ, eid: str) -> NodeScaffold:
    e = c.edge(eid)
    n = q.dim
    i = q.edge_coords[eid]
    rest = _drop_coordinate(q, eid)
    rest_poly = _coordinate_factor(q, rest)
    poly = product(Polyhedron.orthant(2), rest_poly).canonical()

    def unit(j):
        return [int(k == j) for k in range(n)]

    rest_rows = [unit(j) for j in rest]
    zero = [0] * n
    incl0 = AffineMap(n, n + 1, [zero, unit(i)] + rest_rows)
    incl1 = AffineMap(n, n + 1, [unit(i), zero] + rest_rows)
    qf_rest = [q.basepoint[j] for j in rest]
    eta0 = AffineMap(1, n + 1, [[1], [-1]] + [[0]] * (n - 1), [0, e.length] + qf_rest)
    # node polyhedron over a base of dimension n: (p, a, b) -> (a, b, p without p_i)
    to_scaffold = AffineMap(n + 2, n + 1,
                            [[int(k == n) for k in range(n + 2)], [int(k == n + 1) for k in range(n + 2)]]
                            + [[int(k == j) for k in range(n + 2)] for j in rest])
    return NodeScaffold(poly, (incl0, incl1), eta0, to_scaffold)


def _coordinate_factor(q: ScaffoldQ, coords) -> Polyhedron:
    """Q with the coordinates outside ``coords`` forgotten (Q is a product)."""
    coords = list(coords)
    pos = {j: k for k, j in enumerate(coords)}

    def keep(rows):
        out = []
        for a, b in rows:
            if any(a[j] for j in range(q.dim) if j not in pos):
                continue
            out.append((tuple(a[j] for j in coords), b))
        return out

    can = q.poly.canonical()
    return Polyhedron(len(coords), keep(can.inequalities), keep(can.equalities))


def build_interpolant(c: CurveType, q: ScaffoldQ, eid: str, flag: int,
                      scaffold: NodeScaffold = None) -> AffineMap:
    """The affine map on Q(e) extending the flag's transported vertex data
    and the edge trajectory."""
    e = c.edge(eid)
    ns = scaffold or build_node_scaffold(c, q, eid)
    f = e.flags[flag]
    vertex_data = f.germ.compose(q.vertex_projection(f.vertex))
    constraints = [
        (ns.inclusions[flag], q.poly, vertex_data),
        (ns.fiber_embed, Polyhedron.interval(0, e.length), e.trajectory),
    ]
    return affine_interpolate(constraints, ns.poly)


def edge_cut(c: CurveType, q: ScaffoldQ, eid: str, interpolants, scaffold: NodeScaffold,
             poly: Polyhedron) -> Polyhedron:
    """Impose that the interpolant of each flag, pushed in along the other
    flag's inclusion, equals the other flag's transported vertex data."""
    e = c.edge(eid)
    for k in (0, 1):
        other = 1 - k
        f = e.flags[other]
        lhs = interpolants[(eid, k)].compose(scaffold.inclusions[other])
        rhs = f.germ.compose(q.vertex_projection(f.vertex))
        poly = equalizer(poly, lhs, rhs)
    return poly


def build_Pu(c: CurveType, validate: bool = True, assemble: bool = True) -> UniversalExtension:
    """P_u and, unless ``assemble`` is false, the universal structure over it
    (left as ``None`` when only the polyhedron is wanted)."""
    if validate:
        _require_valid(c)
    q = build_Q(c)
    q1 = build_Q1(c, q)
    scaffolds, interpolants = {}, {}
    pu = q1
    for e in c.edges:
        ns = build_node_scaffold(c, q, e.id)
        scaffolds[e.id] = ns
        for k in (0, 1):
            try:
                interpolants[(e.id, k)] = build_interpolant(c, q, e.id, k, ns)
            except InterpolationError as err:
                raise ConstructionError(f"interpolant for {e.id}.flag{k}: {err}", code=err.code,
                                        witness={"edge": e.id, "flag": k, "detail": err.witness}) from err
        pu = edge_cut(c, q, e.id, interpolants, ns, pu)
    pu = pu.canonical()
    if pu.is_empty():
        raise ConstructionError("the consistency equations have no solution", code="EMPTY_PU")
    if not pu.contains(q.basepoint):
        raise ConstructionError("the curve's own data violate the consistency equations",
                                code="BASEPOINT_NOT_IN_PU", witness=fmt_point(q.basepoint))
    rho = {e.id: q.edge_projection(e.id) for e in c.edges}
    positions = {v.id: q.vertex_projection(v.id) for v in c.vertices}
    structure = _assemble(c, q, pu, rho, positions, interpolants, scaffolds) if assemble else None
    return UniversalExtension(c, q, q1, pu, rho, positions, interpolants, scaffolds, structure)


def _assemble(c, q, pu, rho, positions, interpolants, scaffolds) -> ExtendedStructure:
    n = q.dim
    ident = AffineMap.identity(n)
    vertex_polys = {v.id: pu for v in c.vertices}
    iso = {v.id: ident for v in c.vertices}
    node_polys, flag_maps, nat_edge = {}, {}, {}
    for e in c.edges:
        i = q.edge_coords[e.id]
        node = node_polyhedron(pu, rho[e.id])
        node_polys[e.id] = node
        rows = [[int(k == j) for k in range(n)] for j in range(n)]
        length = [int(k == i) for k in range(n)]
        flag_maps[(e.id, 0)] = AffineMap(n, n + 2, rows + [[0] * n, length])
        flag_maps[(e.id, 1)] = AffineMap(n, n + 2, rows + [length, [0] * n])
        nat = interpolants[(e.id, 0)].compose(scaffolds[e.id].to_scaffold)
        if not maps_into(nat, node, e.stratum.polytope):
            raise ConstructionError(f"node map of {e.id} leaves its stratum", code="IMAGE_ESCAPE",
                                    witness={"edge": e.id})
        nat_edge[e.id] = nat
    leg_polys, leg_maps, nat_leg = {}, {}, {}
    for y in c.legs:
        lp = leg_polyhedron(pu)
        leg_polys[y.id] = lp
        sigma = AffineMap(n, n + 1, [[int(k == j) for k in range(n)] for j in range(n)] + [[0] * n])
        leg_maps[y.id] = sigma
        try:
            nat = affine_interpolate([
                (sigma, pu, y.germ.compose(positions[y.vertex])),
                (fiber_ray(q.basepoint), Polyhedron.orthant(1), y.trajectory),
            ], lp)
        except InterpolationError as err:
            raise ConstructionError(f"leg map of {y.id}: {err}", code=err.code,
                                    witness={"leg": y.id, "detail": err.witness}) from err
        if not maps_into(nat, lp, y.stratum.polytope):
            raise ConstructionError(f"leg map of {y.id} leaves its stratum", code="IMAGE_ESCAPE",
                                    witness={"leg": y.id})
        nat_leg[y.id] = nat
    return ExtendedStructure(c, pu, q.basepoint, vertex_polys, iso, dict(rho), node_polys, leg_polys,
                             flag_maps, leg_maps, dict(positions), nat_edge, nat_leg)


@dataclass
class EmbeddingReport:
    injective: bool
    rank: int
    dimension: int
    cutting_equations: List[Tuple[Tuple[int, ...], Fraction]]

    @property
    def ok(self) -> bool:
        return self.injective


def embedding_report(u: UniversalExtension) -> EmbeddingReport:
    """Check that edge lengths and vertex positions jointly determine a
    point of P_u, and list the equations cutting P_u out of Q."""
    c = u.curve
    joint = AffineMap.stack([u.rho[e.id] for e in c.edges] + [u.positions[v.id] for v in c.vertices],
                            source_dim=u.pu.dim)
    _, dirs = u.pu.affine_hull()
    imgs = [joint.apply_linear(d) for d in dirs]
    rk = rank(imgs) if imgs else 0
    q_can = u.scaffold.poly.canonical()
    cuts = []
    for eq in u.pu.canonical().equalities:
        if q_can.add_constraints(equalities=[eq]) != q_can:
            cuts.append(eq)
    return EmbeddingReport(rk == len(dirs), rk, len(dirs), cuts)


def structure_report(u: UniversalExtension) -> ValidationReport:
    """Self-checks of the construction beyond ``validate_extension``."""
    from .curve_model import validate_extension
    rep = validate_extension(u.curve, u.structure)
    rep.add("basepoint_in_pu", "pu", u.pu.contains(u.basepoint), fmt_point(u.basepoint))
    rep.add("pu_in_q1", "pu", u.pu.issubset(u.q1), "P_u is not contained in Q1")
    rep.add("q1_in_q", "q1", u.q1.issubset(u.scaffold.poly), "Q1 is not contained in Q")
    for e in u.curve.edges:
        ns = u.node_scaffolds[e.id]
        for k in (0, 1):
            cert = is_iso_onto_face(ns.inclusions[k], u.scaffold.poly, ns.poly)
            rep.add("inclusion_iso_onto_face", f"{e.id}.flag{k}", cert is not None,
                    "scaffold inclusion is not an isomorphism onto a face")
        node = u.structure.node_polys[e.id]
        rep.add("interpolants_agree", e.id,
                maps_agree_on(u.interpolants[(e.id, 0)].compose(ns.to_scaffold),
                              u.interpolants[(e.id, 1)].compose(ns.to_scaffold), node),
                "the two interpolants differ over P_u")
    return rep
