"""Seeded generators of random inputs for the property suites."""

import random
from fractions import Fraction
from typing import List

from .affine_kernel import AffineMap, Polyhedron
from .curve_model import CurveType, Edge, Flag, Leg, TargetStratum, Vertex


def random_rational(rng: random.Random, lo=-4, hi=4, max_den=3) -> Fraction:
    return Fraction(rng.randint(lo * max_den, hi * max_den), rng.randint(1, max_den))


def random_polyhedron(rng: random.Random, max_dim=5, max_constraints=10, coeff=2) -> Polyhedron:
    """Random H-polyhedron; about one in four has an equality."""
    dim = rng.randint(1, max_dim)
    k = rng.randint(0, max_constraints)
    rows = []
    for _ in range(k):
        a = [rng.randint(-coeff, coeff) for _ in range(dim)]
        if not any(a):
            a[rng.randrange(dim)] = 1
        rows.append((a, random_rational(rng)))
    eqs = []
    if rows and rng.random() < 0.25:
        eqs.append(rows.pop())
    return Polyhedron(dim, rows, eqs)


def random_map(rng: random.Random, source_dim: int, target_dim: int, coeff=2) -> AffineMap:
    return AffineMap(source_dim, target_dim,
                     [[rng.randint(-coeff, coeff) for _ in range(source_dim)] for _ in range(target_dim)],
                     [random_rational(rng) for _ in range(target_dim)])


def random_connected_multigraph(rng: random.Random, max_edges=8, max_vertices=5):
    """Vertex count and a list of (u, v) pairs forming a connected multigraph."""
    n = rng.randint(1, max_vertices)
    edges = [(rng.randrange(i), i) for i in range(1, n)]  # random spanning tree
    while len(edges) < max_edges and rng.random() < 0.7:
        edges.append((rng.randrange(n), rng.randrange(n)))
    edges = edges[:max_edges]
    rng.shuffle(edges)
    return n, [(u, v) if rng.random() < 0.5 else (v, u) for u, v in edges]


def random_length(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 12), rng.randint(1, 4))


def smooth_target_curve(rng: random.Random, max_edges=8) -> CurveType:
    """Curve whose vertex, edge and leg strata are all points."""
    point = TargetStratum("pt", Polyhedron.full(0))
    n, pairs = random_connected_multigraph(rng, max_edges)
    if n == 1 and not pairs and rng.random() < 0.5:
        pairs = [(0, 0)]
    germ = AffineMap(0, 0)
    vertices = tuple(Vertex(f"v{i}", point, ()) for i in range(n))
    edges = tuple(Edge(f"e{j}", random_length(rng), point, AffineMap(1, 0), (Flag(f"v{u}", germ), Flag(f"v{v}", germ)))
                  for j, (u, v) in enumerate(pairs))
    legs = tuple(Leg(f"y{j}", f"v{rng.randrange(n)}", point, AffineMap(1, 0), germ)
                 for j in range(rng.randint(0, 2)))
    return CurveType(vertices, edges, legs)


def _orbits(perm: List[int]) -> List[int]:
    """Smallest index of each coordinate's orbit under ``perm``."""
    label = list(range(len(perm)))
    changed = True
    while changed:
        changed = False
        for i, j in enumerate(perm):
            lo = min(label[i], label[j])
            if label[i] != lo or label[j] != lo:
                label[i] = label[j] = lo
                changed = True
    return label


def monodromy_curve(rng: random.Random, max_edges=5) -> CurveType:
    """Curve over orthant strata ``[0, inf)^k`` with permutation monodromy.

    Germs are identities.  Positions are integral and constant on the
    orbits of their vertex's permutation, so the monodromy fixes them.
    Each edge has length ``1/m`` and slope ``m`` times the displacement,
    so all interpolants are integral.  The first vertex always carries a
    nontrivial generator.
    """
    k = rng.randint(2, 3)
    orth = TargetStratum(f"orthant{k}", Polyhedron.orthant(k))
    n, pairs = random_connected_multigraph(rng, max_edges, max_vertices=4)
    vertices = []
    for i in range(n):
        perm = list(range(k))
        while i == 0 and perm == list(range(k)):
            rng.shuffle(perm)
        if i and rng.random() < 0.5:
            rng.shuffle(perm)
        label = _orbits(perm)
        vals = {o: rng.randint(0, 4) for o in set(label)}
        pos = tuple(Fraction(vals[label[c]]) for c in range(k))
        mono = () if perm == list(range(k)) else (
            AffineMap(k, k, [[int(perm[r] == c) for c in range(k)] for r in range(k)]),)
        vertices.append(Vertex(f"v{i}", orth, pos, mono))
    ident = AffineMap.identity(k)
    edges = []
    for j, (u, v) in enumerate(pairs):
        m = rng.randint(1, 3)
        start, end = vertices[u].position, vertices[v].position
        slope = [int((b - a) * m) for a, b in zip(start, end)]
        traj = AffineMap(1, k, [[s] for s in slope], start)
        edges.append(Edge(f"e{j}", Fraction(1, m), orth, traj, (Flag(f"v{u}", ident), Flag(f"v{v}", ident))))
    return CurveType(tuple(vertices), tuple(edges), ())


def random_forest(rng: random.Random, c: CurveType) -> List[str]:
    """A random set of non-loop edges containing no cycle."""
    parent = {v.id: v.id for v in c.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for e in c.edges:
        a, b = find(e.flags[0].vertex), find(e.flags[1].vertex)
        if a != b and rng.random() < 0.5:
            parent[a] = b
            chosen.append(e.id)
    return chosen


def random_map_into(rng: random.Random, target: Polyhedron, point, source_dim=None, coeff=2):
    """A base ``[0, inf)^k`` and a map into ``target`` sending 0 to ``point``.

    Columns are nonnegative integer combinations of the target's
    recession directions, so the image stays inside ``target``.
    """
    gens = target.vrep()
    dirs = list(gens.rays) + list(gens.lines) + [tuple(-x for x in l) for l in gens.lines]
    k = rng.randint(0, 3) if source_dim is None else source_dim
    cols = []
    for _ in range(k):
        col = [0] * target.dim
        for d in dirs:
            w = rng.randint(0, coeff)
            col = [a + w * b for a, b in zip(col, d)]
        cols.append(col)
    linear = [[cols[j][i] for j in range(k)] for i in range(target.dim)]
    return Polyhedron.orthant(k), AffineMap(k, target.dim, linear, point), (Fraction(0),) * k


def _split(rng: random.Random, length: Fraction, pieces: int) -> List[Fraction]:
    cuts = sorted({Fraction(rng.randint(1, 4 * pieces - 1), 4 * pieces) for _ in range(pieces - 1)})
    while len(cuts) < pieces - 1:
        cuts = sorted(set(cuts) | {Fraction(rng.randint(1, 8 * pieces - 1), 8 * pieces)})
    bounds = [Fraction(0)] + cuts + [Fraction(1)]
    return [length * (b - a) for a, b in zip(bounds, bounds[1:])]


def _reparam(traj: AffineMap, offset, sign=1) -> AffineMap:
    """``t -> traj(offset + sign * t)``."""
    return traj.compose(AffineMap(1, 1, [[sign]], [offset]))


def refine(rng: random.Random, c: CurveType, pieces=None, contract=True):
    """A refinement of ``c`` and its degree-one map onto ``c``.

    Each edge is split into ``pieces`` (random 1-3 when None) and some
    pieces are reversed; with ``contract``, a few vertices grow a
    contracted edge to a new vertex, which may take over a leg.
    Returns ``(source, vertex_assignment, edge_chains, leg_chains)``.
    """
    vertices = list(c.vertices)
    edges, legs = [], []
    assign = {v.id: ("vertex", v.id) for v in c.vertices}
    chains = {}
    for e in c.edges:
        k = rng.randint(1, 3) if pieces is None else pieces
        lengths = _split(rng, e.length, k)
        ends = [e.flags[0].vertex] + [f"{e.id}.m{i}" for i in range(1, k)] + [e.flags[1].vertex]
        offset = Fraction(0)
        offsets = []
        for i, l in enumerate(lengths):
            offsets.append(offset)
            offset += l
            if 0 < i:
                vid = ends[i]
                vertices.append(Vertex(vid, e.stratum, e.trajectory((offsets[i],))))
                assign[vid] = ("edge", e.id)
        ident = AffineMap.identity(e.stratum.dim)
        chain = []
        for i, l in enumerate(lengths):
            g0 = e.flags[0].germ if i == 0 else ident
            g1 = e.flags[1].germ if i == k - 1 else ident
            pid = f"{e.id}.p{i}"
            if rng.random() < 0.3:
                edges.append(Edge(pid, l, e.stratum, _reparam(e.trajectory, offsets[i] + l, -1),
                                  (Flag(ends[i + 1], g1), Flag(ends[i], g0))))
            else:
                edges.append(Edge(pid, l, e.stratum, _reparam(e.trajectory, offsets[i]),
                                  (Flag(ends[i], g0), Flag(ends[i + 1], g1))))
            chain.append(pid)
        chains[e.id] = tuple(chain)
    leg_chains = {y.id: (y.id,) for y in c.legs}
    legs = list(c.legs)
    if contract:
        for v in list(c.vertices):
            if rng.random() < 0.4:
                wid = f"{v.id}.c"
                vertices.append(Vertex(wid, v.stratum, v.position))
                assign[wid] = ("vertex", v.id)
                ident = AffineMap.identity(v.stratum.dim)
                edges.append(Edge(f"{v.id}.k", random_length(rng), v.stratum,
                                  AffineMap.constant(1, v.position), (Flag(v.id, ident), Flag(wid, ident))))
                for i, y in enumerate(legs):
                    if y.vertex == v.id and rng.random() < 0.5:
                        legs[i] = Leg(y.id, wid, y.stratum, y.trajectory, y.germ)
    src = CurveType(tuple(vertices), tuple(edges), tuple(legs))
    return src, assign, chains, leg_chains
