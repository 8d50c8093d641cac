"""Brute-force reference computations used to cross-check the package.

Nothing here imports from ``tropext.affine_kernel``.  Vertices and rays
are found by enumerating tight subsets of constraints; images are checked
by pushing generators forward and lifting candidate generators back.
Exponential, but fine for ambient dimension <= 5 and <= 10 constraints.
"""

from fractions import Fraction
from itertools import combinations


def _rref(rows, ncols):
    m = [[Fraction(x) for x in r] for r in rows]
    piv = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        piv.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], piv


def rank(rows, ncols):
    return len(_rref(rows, ncols)[1]) if rows else 0


def kernel(rows, ncols):
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    m, piv = _rref(rows, ncols)
    out = []
    for f in (c for c in range(ncols) if c not in piv):
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -m[i][f]
        out.append(v)
    return out


def _dot(u, v):
    return sum(Fraction(a) * Fraction(b) for a, b in zip(u, v))


class Generators:
    def __init__(self, dim, vertices, rays, lines):
        self.dim = dim
        self.vertices = [tuple(Fraction(x) for x in v) for v in vertices]
        self.rays = [tuple(Fraction(x) for x in r) for r in rays]
        self.lines = [tuple(Fraction(x) for x in l) for l in lines]

    @property
    def empty(self):
        return not self.vertices


def enumerate_generators(dim, inequalities, equalities=()):
    """Vertices, extreme rays and a lineality basis of ``{A x >= b, E x = e}``."""
    A = [list(a) for a, _ in inequalities]
    b = [Fraction(x) for _, x in inequalities]
    E = [list(a) for a, _ in equalities]
    e = [Fraction(x) for _, x in equalities]
    lines = kernel(A + E, dim)
    # make the polyhedron pointed by restricting to the orthogonal complement of its lines
    E2 = E + [list(l) for l in lines]
    e2 = e + [Fraction(0)] * len(lines)
    base_rank = rank(E2, dim)
    need = dim - base_rank

    def feasible(x):
        return (all(_dot(a, x) >= bb for a, bb in zip(A, b))
                and all(_dot(a, x) == ee for a, ee in zip(E2, e2)))

    vertices = set()
    for sub in combinations(range(len(A)), need):
        rows = E2 + [A[i] for i in sub]
        rhs = e2 + [b[i] for i in sub]
        if rank(rows, dim) < dim:
            continue
        x = _solve_consistent(rows, rhs, dim)
        if x is not None and feasible(x):
            vertices.add(tuple(x))
    rays = set()
    if vertices:
        for sub in combinations(range(len(A)), max(need - 1, 0)):
            rows = E2 + [A[i] for i in sub]
            ker = kernel(rows, dim)
            if len(ker) != 1:
                continue
            d = ker[0]
            for s in (1, -1):
                dd = [s * x for x in d]
                if all(_dot(a, dd) >= 0 for a in A):
                    rays.add(_primitive(dd))
    return Generators(dim, sorted(vertices), sorted(rays), [tuple(l) for l in lines])


def _solve_consistent(rows, rhs, ncols):
    aug = [list(r) + [bb] for r, bb in zip(rows, rhs)]
    m, piv = _rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(piv):
        x[p] = m[i][ncols]
    return x


def _primitive(v):
    from math import gcd
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)


def map_generators(gens: Generators, linear, translate):
    def lin(v):
        return tuple(_dot(row, v) for row in linear)

    verts = [tuple(x + t for x, t in zip(lin(v), translate)) for v in gens.vertices]
    rays = [lin(r) for r in gens.rays]
    rays += [lin(l) for l in gens.lines] + [tuple(-x for x in lin(l)) for l in gens.lines]
    return Generators(len(translate), verts, [r for r in rays if any(r)], [])


def satisfies(ineqs, eqs, gens: Generators) -> bool:
    """All generators of ``gens`` lie in ``{ineqs, eqs}``."""
    for v in gens.vertices:
        if any(_dot(a, v) < b for a, b in ineqs) or any(_dot(a, v) != b for a, b in eqs):
            return False
    for r in gens.rays:
        if any(_dot(a, r) < 0 for a, _ in ineqs) or any(_dot(a, r) != 0 for a, _ in eqs):
            return False
    for l in gens.lines:
        if any(_dot(a, l) != 0 for a, _ in list(ineqs) + list(eqs)):
            return False
    return True


def same_set(ineqs1, eqs1, ineqs2, eqs2, dim) -> bool:
    """Do two H-descriptions describe the same point set?"""
    g1 = enumerate_generators(dim, ineqs1, eqs1)
    g2 = enumerate_generators(dim, ineqs2, eqs2)
    if g1.empty or g2.empty:
        return g1.empty == g2.empty
    return satisfies(ineqs1, eqs1, g2) and satisfies(ineqs2, eqs2, g1)


def is_image(ineqs, eqs, dim, linear, translate, img_ineqs, img_eqs) -> bool:
    """Is ``{img_ineqs, img_eqs}`` the image of ``{ineqs, eqs}`` under the map?

    One inclusion maps the source generators forward; the other lifts
    every generator of the candidate back to a point or recession
    direction of the source.
    """
    m = len(translate)
    src = enumerate_generators(dim, ineqs, eqs)
    tgt = enumerate_generators(m, img_ineqs, img_eqs)
    if src.empty or tgt.empty:
        return src.empty == tgt.empty
    if not satisfies(img_ineqs, img_eqs, map_generators(src, linear, translate)):
        return False
    for x in tgt.vertices:
        fiber = list(eqs) + [(row, xi - ti) for row, xi, ti in zip(linear, x, translate)]
        if enumerate_generators(dim, ineqs, fiber).empty:
            return False
    cone_ineqs = [(a, 0) for a, _ in ineqs]
    cone_eqs = [(a, 0) for a, _ in eqs]
    dirs = list(tgt.rays) + list(tgt.lines) + [tuple(-x for x in l) for l in tgt.lines]
    for r in dirs:
        fiber = cone_eqs + [(row, ri) for row, ri in zip(linear, r)]
        if enumerate_generators(dim, cone_ineqs, fiber).empty:
            return False
    return True


def pull_back(rows, linear, translate):
    """Rows ``<a, y> ? b`` rewritten for ``y = linear x + translate``."""
    src = len(linear[0]) if linear else 0
    out = []
    for a, b in rows:
        new = [sum(Fraction(a[i]) * linear[i][j] for i in range(len(a))) for j in range(src)]
        out.append((new, Fraction(b) - _dot(a, translate)))
    return out


def agreement_rows(lin1, t1, lin2, t2):
    """Equations ``lin1 x + t1 = lin2 x + t2``."""
    return [([x - y for x, y in zip(r1, r2)], Fraction(b2) - Fraction(b1))
            for r1, r2, b1, b2 in zip(lin1, lin2, t1, t2)]
