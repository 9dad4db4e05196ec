"""The affine space Hom(W(X), H) = H^n and its extended Boolean algebra.

A point is a tuple (mu(x_1), ..., mu(x_n)); its index is
sum_i mu(x_i) * |H|^(i-1), so x_1 is the least significant digit.  A point
set is a boolean vector over these indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra
from .config import get_guards
from .errors import SortError
from .signature import Substitution, Term, Var, VarSort, check_term


def space_size(H: FiniteAlgebra, sort: VarSort) -> int:
    return get_guards().check_points(H.size, len(sort))


def point_index(values: Sequence[int], m: int) -> int:
    idx = 0
    for v in reversed(values):
        idx = idx * m + int(v)
    return idx


def point_values(index: int, m: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        index, r = divmod(index, m)
        out.append(r)
    return tuple(out)


_coord_cache: dict[tuple[int, int], np.ndarray] = {}


def coordinates(m: int, n: int) -> np.ndarray:
    """Array of shape (n, m**n): row i holds mu(x_i) for every point index."""
    key = (m, n)
    c = _coord_cache.get(key)
    if c is None:
        get_guards().check_points(m, n)
        idx = np.arange(m**n, dtype=np.int64)
        c = np.stack([(idx // m**i) % m for i in range(n)]) if n else np.zeros((0, 1), np.int64)
        c.setflags(write=False)
        if m**n <= 1 << 20:
            _coord_cache[key] = c
    return c


@dataclass(frozen=True)
class Point:
    sort: VarSort
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if len(self.values) != len(self.sort):
            raise SortError(f"point needs {len(self.sort)} coordinates, got {len(self.values)}")

    def __getitem__(self, name: str) -> int:
        return self.values[self.sort.index(name)]

    def index(self, m: int) -> int:
        return point_index(self.values, m)

    @classmethod
    def from_index(cls, sort: VarSort, index: int, m: int) -> "Point":
        return cls(sort, point_values(index, m, len(sort)))


def eval_point(t: Term, mu: Point, H: FiniteAlgebra) -> int:
    if isinstance(t, Var):
        return mu[t.name]
    args = [eval_point(a, mu, H) for a in t.args]
    return int(H.tables[t.sym][tuple(args)])


def eval_term_all(t: Term, sort: VarSort, H: FiniteAlgebra) -> np.ndarray:
    """Value of ``t`` at every point of Hom(W(sort), H), indexed by point index."""
    check_term(t, H.signature, sort)
    coords = coordinates(H.size, len(sort))
    return _eval_vec(t, sort, H, coords)


def _eval_vec(t, sort, H, coords):
    if isinstance(t, Var):
        return coords[sort.index(t.name)]
    if not t.args:
        return np.full(coords.shape[1], int(H.tables[t.sym]), dtype=np.int64)
    return H.tables[t.sym][tuple(_eval_vec(a, sort, H, coords) for a in t.args)]


class PointSet:
    """An element of Bool(W(X), H).  Immutable."""

    __slots__ = ("sort", "algebra", "bits")

    def __init__(self, sort: VarSort, algebra: FiniteAlgebra, bits: np.ndarray):
        bits = np.asarray(bits, dtype=bool)
        n = space_size(algebra, sort)
        if bits.shape != (n,):
            raise SortError(f"bit-vector has shape {bits.shape}, expected ({n},)")
        if bits.flags.writeable:
            bits = bits.copy()
            bits.setflags(write=False)
        object.__setattr__(self, "sort", sort)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, key, value):
        raise AttributeError("PointSet is immutable")

    # constructors
    @classmethod
    def full(cls, sort: VarSort, H: FiniteAlgebra) -> "PointSet":
        return cls(sort, H, np.ones(space_size(H, sort), dtype=bool))

    @classmethod
    def empty(cls, sort: VarSort, H: FiniteAlgebra) -> "PointSet":
        return cls(sort, H, np.zeros(space_size(H, sort), dtype=bool))

    @classmethod
    def from_points(cls, sort: VarSort, H: FiniteAlgebra, points: Iterable) -> "PointSet":
        bits = np.zeros(space_size(H, sort), dtype=bool)
        for p in points:
            vals = p.values if isinstance(p, Point) else tuple(p)
            if len(vals) != len(sort) or any(not 0 <= v < H.size for v in vals):
                raise SortError(f"{vals} is not a point of Hom(W({sort}), {H.name})")
            bits[point_index(vals, H.size)] = True
        return cls(sort, H, bits)

    # inspection
    def __len__(self):
        return int(self.bits.sum())

    def __contains__(self, p) -> bool:
        vals = p.values if isinstance(p, Point) else tuple(p)
        return bool(self.bits[point_index(vals, self.algebra.size)])

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def points(self) -> list[tuple[int, ...]]:
        """Member points as tuples in sort order, sorted."""
        m, n = self.algebra.size, len(self.sort)
        return sorted(point_values(int(i), m, n) for i in self.indices())

    def is_full(self) -> bool:
        return bool(self.bits.all())

    def is_empty(self) -> bool:
        return not self.bits.any()

    def _check(self, other: "PointSet"):
        if other.sort != self.sort or other.algebra is not self.algebra:
            raise SortError(f"point sets over different spaces: {self.sort} vs {other.sort}")

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return (
            other.sort == self.sort
            and other.algebra is self.algebra
            and bool(np.array_equal(self.bits, other.bits))
        )

    def __hash__(self):
        return hash((self.sort, id(self.algebra), self.bits.tobytes()))

    def __le__(self, other: "PointSet") -> bool:
        self._check(other)
        return not (self.bits & ~other.bits).any()

    def __ge__(self, other: "PointSet") -> bool:
        return other <= self

    # Boolean operations
    def __or__(self, other):
        self._check(other)
        return PointSet(self.sort, self.algebra, self.bits | other.bits)

    def __and__(self, other):
        self._check(other)
        return PointSet(self.sort, self.algebra, self.bits & other.bits)

    def __invert__(self):
        return PointSet(self.sort, self.algebra, ~self.bits)

    def __sub__(self, other):
        self._check(other)
        return PointSet(self.sort, self.algebra, self.bits & ~other.bits)

    def __repr__(self):
        return f"PointSet({self.sort}, {self.algebra.name}, {format_pointset(self)})"


def union(A: PointSet, B: PointSet) -> PointSet:
    return A | B


def intersect(A: PointSet, B: PointSet) -> PointSet:
    return A & B


def complement(A: PointSet) -> PointSet:
    return ~A


def _axis(sort: VarSort, x: str) -> int:
    # C-order reshape puts x_n on axis 0
    return len(sort) - 1 - sort.index(x)


def exists_x(A: PointSet, x: str) -> PointSet:
    """Cylindrification: close A along the x coordinate."""
    if x not in A.sort:
        raise SortError(f"variable {x!r} not in sort {A.sort}")
    m, n = A.algebra.size, len(A.sort)
    cube = A.bits.reshape((m,) * n)
    ax = _axis(A.sort, x)
    out = np.broadcast_to(cube.any(axis=ax, keepdims=True), cube.shape)
    return PointSet(A.sort, A.algebra, out.reshape(-1))


def forall_x(A: PointSet, x: str) -> PointSet:
    return ~exists_x(~A, x)


def equality_value(w: Term, w2: Term, sort: VarSort, H: FiniteAlgebra) -> PointSet:
    return PointSet(sort, H, eval_term_all(w, sort, H) == eval_term_all(w2, sort, H))


def substitution_indices(s: Substitution, H: FiniteAlgebra) -> np.ndarray:
    """For each point mu over s.target, the index of the point mu o s over s.source."""
    m = H.size
    idx = np.zeros(space_size(H, s.target), dtype=np.int64)
    for i, w in reversed(list(enumerate(s.images))):
        idx = idx * m + eval_term_all(w, s.target, H)
    return idx


def sstar_pointset(s: Substitution, A: PointSet) -> PointSet:
    """s_* A = { mu over s.target : mu o s in A }."""
    if A.sort != s.source:
        raise SortError(f"set over {A.sort} but substitution source is {s.source}")
    return PointSet(s.target, A.algebra, A.bits[substitution_indices(s, A.algebra)])


# -- output -----------------------------------------------------------------


def format_pointset(A: PointSet) -> str:
    if len(A.sort) == 1:
        return "{" + ", ".join(str(p[0]) for p in A.points()) + "}"
    return "{" + ", ".join("(" + ", ".join(map(str, p)) + ")" for p in A.points()) + "}"


def pointset_to_hex(A: PointSet) -> str:
    """Bit i of the returned integer is point index i."""
    value = int.from_bytes(np.packbits(A.bits, bitorder="little").tobytes(), "little")
    return hex(value)


def pointset_from_hex(text: str, sort: VarSort, H: FiniteAlgebra) -> PointSet:
    n = space_size(H, sort)
    value = int(text, 16)
    if value >> n:
        raise SortError("hex bit-vector longer than the point space")
    raw = np.frombuffer(value.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return PointSet(sort, H, np.unpackbits(raw, bitorder="little")[:n].astype(bool))
