"""Polyhedral operations: images, preimages, fiber products, face tests and
affine interpolation."""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from ..errors import DimensionError, InterpolationError
from .linalg import column_hnf, int_matvec, nullspace, rank, rref, solve
from .maps import AffineMap
from .polyhedron import Polyhedron


@dataclass(frozen=True)
class FaceCertificate:
    """Proof that a map is an integral isomorphism onto a face.

    ``tight_inequalities`` indexes into ``dst.canonical().inequalities``.
    """

    face: Polyhedron
    tight_inequalities: Tuple[int, ...]
    inverse_on_face: AffineMap


# substitution and projection

def _pull_back_rows(rows, linear, translate):
    """Rewrite ``<n, y> (>=|=) b`` under ``y = linear x + translate``."""
    out = []
    src = len(linear[0]) if linear else 0
    sparse = [[(j, x) for j, x in enumerate(row) if x] for row in linear]
    for normal, offset in rows:
        new = [0] * src
        shift = 0
        for i, c in enumerate(normal):
            if c:
                for j, x in sparse[i]:
                    new[j] += c * x
                shift += c * translate[i]
        out.append((new, offset - shift))
    return out


def _substitute(p: Polyhedron, linear, translate, source_dim: int) -> Polyhedron:
    if not linear:
        # map into R^0: everything or nothing
        return Polyhedron.empty(source_dim) if p.is_empty() else Polyhedron.full(source_dim)
    return Polyhedron(source_dim,
                      _pull_back_rows(p.inequalities, linear, translate),
                      _pull_back_rows(p.equalities, linear, translate))


def preimage(p: Polyhedron, a: AffineMap) -> Polyhedron:
    """``{x : a(x) in p}``."""
    if a.target_dim != p.dim:
        raise DimensionError(f"map target {a.target_dim} != polyhedron dimension {p.dim}")
    return _substitute(p, a.linear, a.translate, a.source_dim)


def _eliminate_with(row, a, b, j):
    """Use ``<a, x> = b`` to remove variable ``j`` from ``row``."""
    r, off = row
    g = r[j]
    if not g:
        return row
    f = g / a[j]
    return [x - f * y for x, y in zip(r, a)], off - f * b


def project(p: Polyhedron, keep: Sequence[int]) -> Polyhedron:
    """Coordinate projection onto ``keep`` by Fourier-Motzkin elimination.

    Equalities are used for substitution first; the system is
    re-canonicalized after every elimination step to keep it small.
    """
    keep = list(keep)
    eliminate = [j for j in range(p.dim) if j not in keep]
    cur = p
    while True:
        c = cur.canonical()
        if c.is_empty():
            return Polyhedron.empty(len(keep))
        ineqs = [(list(map(Fraction, a)), b) for a, b in c.inequalities]
        eqs = [(list(map(Fraction, a)), b) for a, b in c.equalities]

        remaining = []
        while eqs:
            a, b = eqs.pop(0)
            j = next((j for j in eliminate if a[j] != 0), None)
            if j is None:
                remaining.append((a, b))
                continue
            ineqs = [_eliminate_with(r, a, b, j) for r in ineqs]
            remaining = [_eliminate_with(r, a, b, j) for r in remaining]
            eqs = [_eliminate_with(r, a, b, j) for r in eqs]
        eqs = remaining

        live = [j for j in eliminate if any(a[j] for a, _ in ineqs)]
        if not live:
            break

        def cost(j):
            pos = sum(1 for a, _ in ineqs if a[j] > 0)
            neg = sum(1 for a, _ in ineqs if a[j] < 0)
            return pos * neg - pos - neg, j

        j = min(live, key=cost)
        pos = [r for r in ineqs if r[0][j] > 0]
        neg = [r for r in ineqs if r[0][j] < 0]
        new = [r for r in ineqs if r[0][j] == 0]
        for ap, bp in pos:
            for an, bn in neg:
                u, v = -an[j], ap[j]
                new.append(([u * x + v * y for x, y in zip(ap, an)], u * bp + v * bn))
        cur = Polyhedron(p.dim, new, eqs)

    def drop(rows):
        return [([a[k] for k in keep], b) for a, b in rows]

    return Polyhedron(len(keep), drop(ineqs), drop(eqs))


def _injective_image(p: Polyhedron, a: AffineMap) -> Optional[Polyhedron]:
    """Image when ``a`` is injective on aff(p); ``None`` otherwise."""
    x0, dirs = p.affine_hull()
    k = len(dirs)
    m = a.target_dim
    cols = [a.apply_linear(d) for d in dirs]  # images of the direction basis
    if k and rank(cols) < k:
        return None
    y0 = a(x0)
    # rows of the (m x k) matrix whose columns are ``cols``
    mat = [[cols[c][r] for c in range(k)] for r in range(m)]
    _, pivots = rref([list(col) for col in cols], m) if k else ([], [])
    # ``pivots`` are k independent output rows; invert that square block
    block = [mat[r] for r in pivots]
    inv_cols = solve(block, [[int(i == j) for i in range(k)] for j in range(k)])[1] if k else []
    # lambda = B^{-1} (y - y0)[pivots];  x = x0 + D lambda
    lin = [[Fraction(0)] * m for _ in range(p.dim)]
    for i in range(p.dim):
        for jj, r in enumerate(pivots):
            # coefficient of y_r in x_i = sum_c D[c][i] * Binv[c][jj]
            lin[i][r] = sum((dirs[c][i] * inv_cols[jj][c] for c in range(k)), Fraction(0))
    trans = [x0[i] - sum((lin[i][r] * y0[r] for r in range(m)), Fraction(0)) for i in range(p.dim)]
    pulled = _substitute(p, lin, trans, m) if p.dim else Polyhedron.full(m)
    hull_normals = nullspace(cols, m) if k else [tuple(Fraction(int(i == j)) for i in range(m)) for j in range(m)]
    hull = [(nrm, sum((x * y for x, y in zip(nrm, y0)), Fraction(0))) for nrm in hull_normals]
    return pulled.add_constraints(equalities=hull)


def image(p: Polyhedron, a: AffineMap, method: str = "auto") -> Polyhedron:
    """Exact image ``a(p)``.

    ``method="fm"`` always eliminates the source variables from the graph
    of ``a``; ``"auto"`` first tries the cheaper left-inverse route that
    applies when ``a`` is injective on the affine hull of ``p``.
    """
    if a.source_dim != p.dim:
        raise DimensionError(f"map source {a.source_dim} != polyhedron dimension {p.dim}")
    if method not in ("auto", "fm"):
        raise ValueError(f"unknown method {method!r}")
    if p.is_empty():
        return Polyhedron.empty(a.target_dim).canonical()
    if method == "auto":
        res = _injective_image(p, a)
        if res is not None:
            return res.canonical()
    n, m = p.dim, a.target_dim
    pad = (0,) * m
    ineqs = [(tuple(nrm) + pad, b) for nrm, b in p.inequalities]
    eqs = [(tuple(nrm) + pad, b) for nrm, b in p.equalities]
    for i in range(m):
        row = tuple(-x for x in a.linear[i]) + tuple(int(k == i) for k in range(m))
        eqs.append((row, a.translate[i]))
    graph = Polyhedron(n + m, ineqs, eqs)
    return project(graph, range(n, n + m)).canonical()


def fiber_product(p1: Polyhedron, a1: AffineMap, p2: Polyhedron, a2: AffineMap):
    """``{(x, y) in p1 x p2 : a1(x) = a2(y)}`` with its two projections."""
    if a1.source_dim != p1.dim or a2.source_dim != p2.dim:
        raise DimensionError("maps are not defined on the given polyhedra")
    if a1.target_dim != a2.target_dim:
        raise DimensionError("maps have different targets")
    n1, n2 = p1.dim, p2.dim
    ineqs = [(tuple(a) + (0,) * n2, b) for a, b in p1.inequalities]
    ineqs += [((0,) * n1 + tuple(a), b) for a, b in p2.inequalities]
    eqs = [(tuple(a) + (0,) * n2, b) for a, b in p1.equalities]
    eqs += [((0,) * n1 + tuple(a), b) for a, b in p2.equalities]
    for r1, r2, c1, c2 in zip(a1.linear, a2.linear, a1.translate, a2.translate):
        eqs.append((tuple(r1) + tuple(-x for x in r2), c2 - c1))
    fp = Polyhedron(n1 + n2, ineqs, eqs).canonical()
    proj1 = AffineMap.coordinates(n1 + n2, range(n1))
    proj2 = AffineMap.coordinates(n1 + n2, range(n1, n1 + n2))
    return fp, proj1, proj2


def equalizer(p: Polyhedron, a1: AffineMap, a2: AffineMap) -> Polyhedron:
    """``p`` cut down to ``{x : a1(x) = a2(x)}``."""
    if a1.source_dim != p.dim or a2.source_dim != p.dim:
        raise DimensionError("maps are not defined on the polyhedron's ambient space")
    if a1.target_dim != a2.target_dim:
        raise DimensionError("maps have different targets")
    eqs = [([x - y for x, y in zip(r1, r2)], c2 - c1)
           for r1, r2, c1, c2 in zip(a1.linear, a2.linear, a1.translate, a2.translate)]
    return p.add_constraints(equalities=eqs).canonical()


def fixed_locus(p: Polyhedron, endos: Sequence[AffineMap]) -> Polyhedron:
    ident = AffineMap.identity(p.dim)
    out = p
    for e in endos:
        if e.source_dim != p.dim or e.target_dim != p.dim:
            raise DimensionError("endomorphism does not act on the polyhedron's ambient space")
        out = equalizer(out, e, ident)
    return out.canonical()


def maps_into(a: AffineMap, p: Polyhedron, q: Polyhedron) -> bool:
    """True iff ``a`` sends every point of ``p`` into ``q``.

    Pushes the generators of ``p`` forward instead of computing the image,
    which avoids elimination entirely.
    """
    if a.source_dim != p.dim or a.target_dim != q.dim:
        return False
    gens = p.vrep()
    if not gens.vertices:
        return True
    return (all(q.contains(a(v)) for v in gens.vertices)
            and all(q.contains_direction(a.apply_linear(r)) for r in gens.rays)
            and all(q.contains_direction(a.apply_linear(l), line=True) for l in gens.lines))


def maps_agree_on(a1: AffineMap, a2: AffineMap, p: Polyhedron) -> bool:
    """True iff ``a1`` and ``a2`` coincide on every point of ``p``."""
    if (a1.source_dim, a1.target_dim) != (a2.source_dim, a2.target_dim) or a1.source_dim != p.dim:
        return False
    if p.is_empty():
        return True
    x0, dirs = p.affine_hull()
    if a1(x0) != a2(x0):
        return False
    return all(a1.apply_linear(d) == a2.apply_linear(d) for d in dirs)


def lattice_complement(p: Polyhedron) -> List[Tuple[int, ...]]:
    """Integer vectors completing the direction lattice of aff(p) to Z^n."""
    normals = [a for a, _ in p.canonical().equalities]
    if not normals:
        return []
    rk, u = column_hnf(normals, p.dim)
    return list(u[:rk])


def affine_interpolate(constraints: Sequence[Tuple[AffineMap, Polyhedron, AffineMap]],
                       ambient: Polyhedron) -> AffineMap:
    """The unique integral affine map ``A`` on aff(ambient) with
    ``A o embed = value`` on each ``sub``.

    Off the affine hull, ``A`` vanishes on a fixed lattice complement of
    the hull's direction lattice, which makes the result deterministic.
    """
    amb = ambient.canonical()
    if amb.is_empty():
        raise InterpolationError("ambient polyhedron is empty", code="UNDERDETERMINED")
    n = amb.dim
    targets = {v.target_dim for _, _, v in constraints}
    if len(targets) != 1:
        raise DimensionError("constraint values must share a target dimension"
                             if targets else "no constraints given")
    m = targets.pop()
    hull_eqs = amb.equalities
    hull_normals = [a for a, _ in hull_eqs]

    rows, rhs = [], []
    for idx, (embed, sub, value) in enumerate(constraints):
        if embed.source_dim != sub.dim or value.source_dim != sub.dim or embed.target_dim != n:
            raise DimensionError(f"constraint {idx} has mismatched dimensions")
        if sub.is_empty():
            continue
        s0, dirs = sub.affine_hull()
        p0 = embed(s0)
        if any(x != b for x, (_, b) in zip(int_matvec(hull_normals, p0), hull_eqs)):
            raise InterpolationError(f"constraint {idx} leaves the affine hull of the ambient",
                                     code="INCONSISTENT", witness={"constraint": idx})
        rows.append(list(p0) + [1])
        rhs.append(value(s0))
        for d in dirs:
            ed = embed.apply_linear(d)
            if any(int_matvec(hull_normals, ed)):
                raise InterpolationError(f"constraint {idx} leaves the affine hull of the ambient",
                                         code="INCONSISTENT", witness={"constraint": idx})
            rows.append(list(ed) + [0])
            rhs.append(value.apply_linear(d))
    for w in lattice_complement(amb):
        rows.append(list(w) + [0])
        rhs.append((0,) * m)

    if not rows:
        raise InterpolationError("no constraints", code="UNDERDETERMINED")
    rk, sols = solve(rows, [[r[i] for r in rhs] for i in range(m)]) if m else (rank(rows), [])
    if rk < n + 1:
        raise InterpolationError(f"constraints determine a space of rank {rk}, need {n + 1}",
                                 code="UNDERDETERMINED", witness={"rank": rk, "needed": n + 1})
    if sols is None:
        raise InterpolationError("constraints conflict", code="INCONSISTENT")
    lin = [sol[:n] for sol in sols]
    bad = [(i, j) for i, row in enumerate(lin) for j, x in enumerate(row) if x.denominator != 1]
    if bad:
        i, j = bad[0]
        raise InterpolationError("interpolated linear part is not integral", code="NON_INTEGRAL",
                                 witness={"row": i, "column": j, "value": str(lin[i][j])})
    return AffineMap(n, m, [[int(x) for x in row] for row in lin], [sol[n] for sol in sols])


def is_iso_onto_face(a: AffineMap, src: Polyhedron, dst: Polyhedron) -> Optional[FaceCertificate]:
    """Certificate that ``a`` maps ``src`` isomorphically onto a face of ``dst``, or ``None``."""
    if a.source_dim != src.dim or a.target_dim != dst.dim:
        return None
    if src.is_empty():
        return None
    img = _injective_image(src.canonical(), a)
    if img is None:
        return None
    if not img.issubset(dst):
        return None
    dcan = dst.canonical()
    v = img.vrep()
    tight = []
    for idx, (nrm, b) in enumerate(dcan.inequalities):
        if (all(int_matvec([nrm], pt)[0] == b for pt in v.vertices)
                and not any(int_matvec([nrm], r)[0] for r in v.rays + v.lines)):
            tight.append(idx)
    face = dcan.add_constraints(equalities=[dcan.inequalities[i] for i in tight]).canonical()
    if face != img:
        return None
    try:
        inverse = affine_interpolate([(a, src, AffineMap.identity(src.dim))], face)
    except InterpolationError:
        return None
    if not maps_agree_on(inverse.compose(a), AffineMap.identity(src.dim), src):
        return None
    return FaceCertificate(face, tuple(tight), inverse)
