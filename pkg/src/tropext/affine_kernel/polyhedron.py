"""Rational polyhedra in H-representation with integral normals."""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from ..errors import DimensionError
from . import linalg
from .dd import cone_generators
from .linalg import as_fraction, int_rank, nullspace, primitive, rref

Constraint = Tuple[Tuple[int, ...], Fraction]


@dataclass(frozen=True)
class VRep:
    """Generators: ``conv(vertices) + cone(rays) + span(lines)``."""

    vertices: Tuple[Tuple[Fraction, ...], ...]
    rays: Tuple[Tuple[int, ...], ...]
    lines: Tuple[Tuple[int, ...], ...]


def _normalize_row(normal, offset) -> Constraint:
    if all(type(x) is int for x in normal):
        g = gcd(*normal)
        if g <= 1:
            return tuple(normal), as_fraction(offset)
        return tuple(x // g for x in normal), as_fraction(offset) / g
    ints, factor = primitive([as_fraction(x) for x in normal])
    return ints, as_fraction(offset) * factor


class Polyhedron:
    """``{x : <a, x> >= b for (a, b) in inequalities, <a, x> = b for equalities}``.

    Normals are stored as primitive integer vectors; offsets are exact
    rationals.  Instances are immutable.  ``canonical()`` returns the
    unique representative of the point set (irredundant facets, equalities
    in reduced echelon form, everything sorted), and equality between
    polyhedra compares point sets through it.
    """

    __slots__ = ("dim", "inequalities", "equalities", "_is_canonical", "_canon", "_vrep")

    def __init__(self, dim: int, inequalities: Iterable = (), equalities: Iterable = ()):
        self.dim = int(dim)
        ineqs = []
        for normal, offset in inequalities:
            if len(normal) != self.dim:
                raise DimensionError(f"normal of length {len(normal)} in ambient dimension {self.dim}")
            a, b = _normalize_row(normal, offset)
            if not any(a) and b <= 0:
                continue
            ineqs.append((a, b))
        eqs = []
        for normal, offset in equalities:
            if len(normal) != self.dim:
                raise DimensionError(f"normal of length {len(normal)} in ambient dimension {self.dim}")
            a, b = _normalize_row(normal, offset)
            if not any(a):
                if b == 0:
                    continue
                # 0 = b with b != 0: infeasible, recorded as 0 >= 1
                ineqs.append((a, Fraction(1)))
                continue
            eqs.append((a, b))
        self.inequalities: Tuple[Constraint, ...] = tuple(ineqs)
        self.equalities: Tuple[Constraint, ...] = tuple(eqs)
        self._is_canonical = False
        self._canon: Optional["Polyhedron"] = None
        self._vrep: Optional[VRep] = None

    # construction helpers

    @classmethod
    def full(cls, dim: int) -> "Polyhedron":
        return cls(dim)

    @classmethod
    def orthant(cls, dim: int) -> "Polyhedron":
        return cls(dim, [(tuple(int(i == j) for i in range(dim)), 0) for j in range(dim)])

    @classmethod
    def point(cls, coords: Sequence) -> "Polyhedron":
        n = len(coords)
        return cls(n, [], [(tuple(int(i == j) for i in range(n)), as_fraction(c)) for j, c in enumerate(coords)])

    @classmethod
    def interval(cls, lo, hi=None) -> "Polyhedron":
        """``[lo, hi]`` in R^1; ``hi=None`` gives the ray ``[lo, inf)``."""
        ineqs = [((1,), lo)]
        if hi is not None:
            ineqs.append(((-1,), -as_fraction(hi)))
        return cls(1, ineqs)

    @classmethod
    def empty(cls, dim: int) -> "Polyhedron":
        return cls(dim, [((0,) * dim, 1)])

    @property
    def ambient_dim(self) -> int:
        return self.dim

    def __repr__(self):
        def row(a, b, op):
            terms = " ".join(f"{c:+d}*x{i}" for i, c in enumerate(a) if c)
            return f"{terms or '0'} {op} {linalg.format_rational(b)}"
        parts = [row(a, b, ">=") for a, b in self.inequalities]
        parts += [row(a, b, "=") for a, b in self.equalities]
        return f"Polyhedron(dim={self.dim}; " + "; ".join(parts) + ")"

    # canonical form

    def _homogenized(self):
        ineqs = []
        for a, b in self.inequalities:
            ineqs.append(_int_row(list(a) + [-b]))
        ineqs.append(tuple([0] * self.dim + [1]))
        eqs = [_int_row(list(a) + [-b]) for a, b in self.equalities]
        return ineqs, eqs

    def _compute(self):
        n = self.dim
        ineqs, eqs = self._homogenized()
        rays, lines = cone_generators(n + 1, ineqs, eqs)
        verts = [r for r in rays if r[n] > 0]
        if not verts:
            canon = Polyhedron.empty(n)
            canon._is_canonical = True
            canon._canon = canon
            canon._vrep = VRep((), (), ())
            return canon
        gens = rays + lines
        cone_dim = int_rank(gens)

        # affine hull: normals orthogonal to every generator of the cone
        orth = nullspace(gens, n + 1)
        eq_rows, pivots = rref(orth, n + 1) if orth else ([], [])
        equalities = []
        for row in eq_rows:
            a, factor = primitive(row[:n])
            equalities.append((a, -row[n] * factor))

        facets = set()
        for a, b in self.inequalities:
            h = _int_row(list(a) + [-b])
            tight = [g for g in rays if _idot(h, g) == 0]
            if len(tight) == len(rays):
                continue
            if int_rank(tight + lines) != cone_dim - 1:
                continue
            red = [Fraction(x) for x in a]
            off = Fraction(b)
            for row, p in zip(eq_rows, pivots):
                c = red[p]
                if c:
                    red = [x - c * y for x, y in zip(red, row[:n])]
                    off = off + c * row[n]
            ints, factor = primitive(red)
            if not any(ints):
                continue
            facets.add((ints, off * factor))

        canon = Polyhedron.__new__(Polyhedron)
        canon.dim = n
        canon.inequalities = tuple(sorted(facets))
        canon.equalities = tuple(sorted(equalities))
        canon._is_canonical = True
        canon._canon = canon
        canon._vrep = _vrep_from_cone(n, rays, lines)
        return canon

    def canonical(self) -> "Polyhedron":
        if self._canon is None:
            canon = _canonical_of(self.dim, self.inequalities, self.equalities)
            self._canon = canon
            self._vrep = canon._vrep
        return self._canon

    @property
    def is_canonical(self) -> bool:
        return self._is_canonical

    def vrep(self) -> VRep:
        if self._vrep is None:
            self.canonical()
        return self._vrep

    def is_empty(self) -> bool:
        return not self.vrep().vertices

    def __eq__(self, other):
        if not isinstance(other, Polyhedron):
            return NotImplemented
        if self.dim != other.dim:
            return False
        a, b = self.canonical(), other.canonical()
        return a.inequalities == b.inequalities and a.equalities == b.equalities

    def __hash__(self):
        c = self.canonical()
        return hash((c.dim, c.inequalities, c.equalities))

    def key(self):
        c = self.canonical()
        return (c.dim, c.inequalities, c.equalities)

    # point-set queries

    def contains(self, point: Sequence) -> bool:
        if len(point) != self.dim:
            raise DimensionError(f"point of length {len(point)} in ambient dimension {self.dim}")
        x = [as_fraction(c) for c in point]
        return (all(linalg.dot(a, x) >= b for a, b in self.inequalities)
                and all(linalg.dot(a, x) == b for a, b in self.equalities))

    def contains_direction(self, d: Sequence, line: bool = False) -> bool:
        """True iff ``d`` lies in the recession cone (lineality space if ``line``)."""
        for a, _ in self.equalities:
            if linalg.dot(a, d) != 0:
                return False
        for a, _ in self.inequalities:
            v = linalg.dot(a, d)
            if v < 0 or (line and v != 0):
                return False
        return True

    def issubset(self, other: "Polyhedron") -> bool:
        if self.dim != other.dim:
            raise DimensionError("ambient dimensions differ")
        v = self.vrep()
        if not v.vertices:
            return True
        return (all(other.contains(p) for p in v.vertices)
                and all(other.contains_direction(r) for r in v.rays)
                and all(other.contains_direction(l, line=True) for l in v.lines))

    def dimension(self) -> int:
        """Affine dimension; -1 for the empty polyhedron."""
        c = self.canonical()
        if c.is_empty():
            return -1
        return self.dim - len(c.equalities)

    def affine_hull(self):
        """``(point, directions)`` with a rational basis of the direction space."""
        c = self.canonical()
        v = c.vrep()
        if not v.vertices:
            raise ValueError("empty polyhedron has no affine hull")
        dirs = nullspace([a for a, _ in c.equalities], self.dim)
        return v.vertices[0], dirs

    def relative_interior_point(self) -> Tuple[Fraction, ...]:
        """Barycenter of the vertices plus the sum of the extreme rays."""
        v = self.vrep()
        if not v.vertices:
            raise ValueError("empty polyhedron")
        k = len(v.vertices)
        pt = [sum((p[i] for p in v.vertices), Fraction(0)) / k for i in range(self.dim)]
        for r in v.rays:
            pt = [x + y for x, y in zip(pt, r)]
        return tuple(pt)

    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        if self.dim != other.dim:
            raise DimensionError("ambient dimensions differ")
        return Polyhedron(self.dim, self.inequalities + other.inequalities,
                          self.equalities + other.equalities)

    def add_constraints(self, inequalities=(), equalities=()) -> "Polyhedron":
        return Polyhedron(self.dim, list(self.inequalities) + list(inequalities),
                          list(self.equalities) + list(equalities))

    def product(self, *others: "Polyhedron") -> "Polyhedron":
        return product(self, *others)


def product(*polys: Polyhedron) -> Polyhedron:
    """Cartesian product with coordinates concatenated in argument order."""
    total = sum(p.dim for p in polys)
    ineqs, eqs = [], []
    shift = 0
    for p in polys:
        pad_l, pad_r = (0,) * shift, (0,) * (total - shift - p.dim)
        ineqs += [(pad_l + a + pad_r, b) for a, b in p.inequalities]
        eqs += [(pad_l + a + pad_r, b) for a, b in p.equalities]
        shift += p.dim
    return Polyhedron(total, ineqs, eqs)


def _int_row(row) -> Tuple[int, ...]:
    ints, _ = primitive(row)
    return ints


def _idot(h, g):
    return sum(a * b for a, b in zip(h, g))


def _vrep_from_cone(n, rays, lines) -> VRep:
    line_rows, pivots = rref([l[:n] for l in lines], n) if lines else ([], [])

    def reduce(vec):
        v = [Fraction(x) for x in vec]
        for row, p in zip(line_rows, pivots):
            c = v[p]
            if c:
                v = [x - c * y for x, y in zip(v, row)]
        return v

    vertices = set()
    recession = set()
    for r in rays:
        t = r[n]
        if t > 0:
            vertices.add(tuple(x / t for x in reduce(r[:n])))
        else:
            ints, _ = primitive(reduce(r[:n]))
            if any(ints):
                recession.add(ints)
    canon_lines = [primitive(row)[0] for row in line_rows]
    return VRep(tuple(sorted(vertices)), tuple(sorted(recession)), tuple(sorted(canon_lines)))


@lru_cache(maxsize=8192)
def _canonical_of(dim: int, inequalities, equalities) -> Polyhedron:
    # rows are already normalized, so equal keys describe equal sets and the
    # (immutable) canonical form can be shared
    p = Polyhedron.__new__(Polyhedron)
    p.dim, p.inequalities, p.equalities = dim, inequalities, equalities
    p._is_canonical, p._canon, p._vrep = False, None, None
    return p._compute()
