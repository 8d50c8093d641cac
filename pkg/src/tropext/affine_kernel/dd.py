"""Double description: extreme rays and lineality of ``{y : A y >= 0, E y = 0}``.

All arithmetic is on primitive integer vectors.  Tight sets are bitmasks
over the constraint index, which keeps the combinatorial adjacency test
cheap.
"""

from typing import List, Sequence, Tuple

from .linalg import primitive_int

IntVec = Tuple[int, ...]


def _dot(h, v):
    return sum(a * b for a, b in zip(h, v))


def _combine(a: int, u: IntVec, b: int, v: IntVec) -> IntVec:
    return primitive_int(tuple(a * x + b * y for x, y in zip(u, v)))


def cone_generators(dim: int, inequalities: Sequence[IntVec],
                    equalities: Sequence[IntVec] = ()):
    """Return ``(rays, lines)`` generating the cone.

    ``rays`` are the extreme rays of the cone modulo its lineality space,
    ``lines`` a basis of the lineality space.
    """
    constraints = [(tuple(h), False) for h in equalities] + [(tuple(h), True) for h in inequalities]
    lines: List[IntVec] = [tuple(int(i == j) for i in range(dim)) for j in range(dim)]
    rays: List[IntVec] = []
    tight: List[int] = []
    processed = 0  # lines lie on every hyperplane seen so far

    for idx, (h, is_ineq) in enumerate(constraints):
        if not any(h):
            continue
        bit = 1 << idx
        vals = [_dot(h, l) for l in lines]
        k = next((i for i, v in enumerate(vals) if v != 0), None)
        if k is not None:
            l0 = lines[k]
            s = vals[k]
            if s < 0:
                l0 = tuple(-x for x in l0)
                s = -s
            new_lines = []
            for i, l in enumerate(lines):
                if i == k:
                    continue
                if vals[i]:
                    l = _combine(s, l, -vals[i], l0)
                new_lines.append(l)
            new_rays = []
            for r in rays:
                hv = _dot(h, r)
                if hv:
                    r = _combine(s, r, -hv, l0)
                new_rays.append(r)
            lines = new_lines
            rays = new_rays
            tight = [t | bit for t in tight]
            if is_ineq:
                rays.append(l0)
                tight.append(processed)
            processed |= bit
            continue

        vals = [_dot(h, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        zero = [i for i, v in enumerate(vals) if v == 0]
        new_rays = []
        new_tight = []
        for i in zero:
            new_rays.append(rays[i])
            new_tight.append(tight[i] | bit)
        if is_ineq:
            for i in pos:
                new_rays.append(rays[i])
                new_tight.append(tight[i])
        if pos and neg:
            nrays = len(rays)
            for i in pos:
                ti = tight[i]
                for j in neg:
                    common = ti & tight[j]
                    adjacent = True
                    for k2 in range(nrays):
                        if k2 != i and k2 != j and (tight[k2] & common) == common:
                            adjacent = False
                            break
                    if adjacent:
                        new_rays.append(_combine(vals[i], rays[j], -vals[j], rays[i]))
                        new_tight.append(common | bit)
        rays = new_rays
        tight = new_tight
        processed |= bit

    return rays, lines
