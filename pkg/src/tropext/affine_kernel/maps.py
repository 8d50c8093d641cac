"""Affine maps with integer linear part and rational translation."""

from fractions import Fraction
from typing import Iterable, Sequence, Tuple

from ..errors import DimensionError, TropextError
from .linalg import as_fraction, int_matvec


def _as_int(x) -> int:
    if isinstance(x, bool):
        raise TypeError("booleans are not integers")
    if isinstance(x, int):
        return x
    f = as_fraction(x)
    if f.denominator != 1:
        raise TropextError(f"linear coefficient {f} is not an integer", code="NON_INTEGRAL",
                           witness=str(f))
    return f.numerator


class AffineMap:
    """``x -> linear @ x + translate`` from R^source_dim to R^target_dim."""

    __slots__ = ("source_dim", "target_dim", "linear", "translate")

    def __init__(self, source_dim: int, target_dim: int, linear: Sequence[Sequence] = None,
                 translate: Sequence = None):
        self.source_dim = int(source_dim)
        self.target_dim = int(target_dim)
        if linear is None:
            linear = [[0] * self.source_dim for _ in range(self.target_dim)]
        if translate is None:
            translate = [0] * self.target_dim
        rows = tuple(tuple(_as_int(x) for x in row) for row in linear)
        if len(rows) != self.target_dim or any(len(r) != self.source_dim for r in rows):
            raise DimensionError(
                f"linear part is not {self.target_dim}x{self.source_dim}")
        t = tuple(as_fraction(x) for x in translate)
        if len(t) != self.target_dim:
            raise DimensionError(f"translation of length {len(t)}, expected {self.target_dim}")
        self.linear: Tuple[Tuple[int, ...], ...] = rows
        self.translate: Tuple[Fraction, ...] = t

    # constructors

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls(n, n, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def constant(cls, source_dim: int, value: Sequence) -> "AffineMap":
        return cls(source_dim, len(value), None, value)

    @classmethod
    def coordinates(cls, source_dim: int, indices: Sequence[int]) -> "AffineMap":
        """Projection ``x -> (x[i] for i in indices)``."""
        return cls(source_dim, len(indices),
                   [[int(j == i) for j in range(source_dim)] for i in indices])

    @classmethod
    def stack(cls, maps: Sequence["AffineMap"], source_dim: int = None) -> "AffineMap":
        """``x -> (m1(x), m2(x), ...)`` for maps with a common source."""
        if not maps:
            if source_dim is None:
                raise ValueError("source_dim required for an empty stack")
            return cls(source_dim, 0)
        n = maps[0].source_dim
        if any(m.source_dim != n for m in maps):
            raise DimensionError("stacked maps have different sources")
        rows, t = [], []
        for m in maps:
            rows += m.linear
            t += m.translate
        return cls(n, len(rows), rows, t)

    @classmethod
    def block_diagonal(cls, maps: Sequence["AffineMap"]) -> "AffineMap":
        """Direct sum acting blockwise on concatenated coordinates."""
        src = sum(m.source_dim for m in maps)
        rows, t = [], []
        shift = 0
        for m in maps:
            for row in m.linear:
                rows.append((0,) * shift + row + (0,) * (src - shift - m.source_dim))
            t += m.translate
            shift += m.source_dim
        return cls(src, len(rows), rows, t)

    # algebra

    def __call__(self, x: Sequence) -> Tuple[Fraction, ...]:
        if len(x) != self.source_dim:
            raise DimensionError(f"point of length {len(x)}, map expects {self.source_dim}")
        lin = int_matvec(self.linear, x)
        return tuple(c + a for a, c in zip(lin, self.translate))

    def apply_linear(self, d: Sequence) -> Tuple:
        return int_matvec(self.linear, d)

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """``self o inner``."""
        if inner.target_dim != self.source_dim:
            raise DimensionError(
                f"cannot compose: inner target {inner.target_dim} != outer source {self.source_dim}")
        inner_rows = [[(j, x) for j, x in enumerate(r) if x] for r in inner.linear]
        lin = []
        for row in self.linear:
            acc = [0] * inner.source_dim
            for i, a in enumerate(row):
                if a:
                    for j, x in inner_rows[i]:
                        acc[j] += a * x
            lin.append(acc)
        t = self(inner.translate)
        return AffineMap(inner.source_dim, self.target_dim, lin, t)

    def __matmul__(self, inner: "AffineMap") -> "AffineMap":
        return self.compose(inner)

    def __add__(self, other: "AffineMap") -> "AffineMap":
        self._check_same_shape(other)
        lin = [[a + b for a, b in zip(r, s)] for r, s in zip(self.linear, other.linear)]
        return AffineMap(self.source_dim, self.target_dim, lin,
                         [a + b for a, b in zip(self.translate, other.translate)])

    def __neg__(self) -> "AffineMap":
        return AffineMap(self.source_dim, self.target_dim,
                         [[-a for a in r] for r in self.linear], [-c for c in self.translate])

    def __sub__(self, other: "AffineMap") -> "AffineMap":
        return self + (-other)

    def scaled(self, k: int) -> "AffineMap":
        return AffineMap(self.source_dim, self.target_dim,
                         [[k * a for a in r] for r in self.linear], [k * c for c in self.translate])

    def _check_same_shape(self, other):
        if (self.source_dim, self.target_dim) != (other.source_dim, other.target_dim):
            raise DimensionError("maps have different shapes")

    def rows(self, indices: Iterable[int]) -> "AffineMap":
        idx = list(indices)
        return AffineMap(self.source_dim, len(idx), [self.linear[i] for i in idx],
                         [self.translate[i] for i in idx])

    @property
    def is_identity(self) -> bool:
        return (self.source_dim == self.target_dim
                and all(c == 0 for c in self.translate)
                and all(a == int(i == j) for i, r in enumerate(self.linear) for j, a in enumerate(r)))

    def __eq__(self, other):
        if not isinstance(other, AffineMap):
            return NotImplemented
        return (self.source_dim == other.source_dim and self.target_dim == other.target_dim
                and self.linear == other.linear and self.translate == other.translate)

    def __hash__(self):
        return hash((self.source_dim, self.target_dim, self.linear, self.translate))

    def __repr__(self):
        return (f"AffineMap({self.source_dim}->{self.target_dim}, linear={[list(r) for r in self.linear]}, "
                f"translate={[str(c) for c in self.translate]})")
