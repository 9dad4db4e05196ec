"""Points of the infinite cyclic group Z (written additively) and the
one-auxiliary-variable linear formulas E y. (x_1 == c_1 y & ... & x_n == c_n y).

Two tuples a, b realize the same type over Z exactly when b = a or b = -a.
When they do not, the test formula of a (or of b) tells them apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import LogeoError

INT64_MAX = 2**63 - 1
DEFAULT_BOUND = 10**6


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class ZPoint:
    values: tuple[int, ...]
    bound: int = DEFAULT_BOUND

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if not vals:
            raise LogeoError("a point of Z needs at least one coordinate")
        big = [v for v in vals if abs(v) > self.bound]
        if big:
            raise LogeoError(f"coordinate {big[0]} exceeds the bound {self.bound}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def parse(cls, text: str, bound: int = DEFAULT_BOUND) -> "ZPoint":
        try:
            return cls(tuple(int(t) for t in text.split(",")), bound)
        except ValueError as exc:
            raise LogeoError(f"not an integer tuple: {text!r}") from exc

    def __len__(self):
        return len(self.values)

    def __neg__(self) -> "ZPoint":
        return ZPoint(tuple(-v for v in self.values), self.bound)

    def is_zero(self) -> bool:
        return not any(self.values)

    def __str__(self):
        return ",".join(map(str, self.values))


@dataclass(frozen=True)
class LinearExistsFormula:
    """E y. AND_i x_i == c_i y.  ``rotation`` records the coordinate that was
    moved to the front when the source tuple started with 0."""

    coeffs: tuple[int, ...]
    rotation: int = 0

    def __post_init__(self):
        if not self.coeffs:
            raise LogeoError("empty coefficient tuple")
        for c in self.coeffs:
            if abs(c) > INT64_MAX:
                raise LogeoError(f"coefficient {c} overflows 64 bits")

    def __len__(self):
        return len(self.coeffs)

    def format(self, names: Sequence[str] | None = None, aux: str = "y") -> str:
        """Formula grammar text; the group is written with * for +, so c y is
        a product of |c| copies of y (inverted when c < 0)."""
        names = list(names) if names is not None else [f"x{i + 1}" for i in range(len(self))]
        parts = [f"{x} == {_multiple(c, aux)}" for x, c in zip(names, self.coeffs)]
        return f"E {aux}. " + " & ".join(parts)

    def __str__(self):
        return self.format()


def _multiple(c: int, y: str) -> str:
    if c == 0:
        return "e"
    body = "*".join([y] * abs(c))
    return body if c > 0 else f"inv({body})"


def build_test_formula(a: ZPoint | Sequence[int]) -> LinearExistsFormula:
    """c_1 = |a_1|, c_i = sgn(a_i a_1)|a_i|.  A zero leading coordinate is
    first rotated away; the zero tuple gives the all-zero formula."""
    vals = a.values if isinstance(a, ZPoint) else tuple(int(v) for v in a)
    if not vals:
        raise LogeoError("empty tuple")
    if not any(vals):
        return LinearExistsFormula(tuple(0 for _ in vals))
    lead = next(i for i, v in enumerate(vals) if v)
    a1 = vals[lead]
    coeffs = tuple(_sign(v * a1) * abs(v) for v in vals)
    return LinearExistsFormula(coeffs, rotation=lead)


_cached_test_formula = lru_cache(maxsize=8192)(build_test_formula)


def eval_exists_linear(f: LinearExistsFormula, b: ZPoint | Sequence[int]) -> bool:
    """Is there an integer y with b_i = c_i y for every i?"""
    vals = b.values if isinstance(b, ZPoint) else tuple(int(v) for v in b)
    if len(vals) != len(f):
        raise LogeoError(f"formula has {len(f)} variables, point has {len(vals)}")
    pivot = next((i for i, c in enumerate(f.coeffs) if c), None)
    if pivot is None:
        return not any(vals)
    c, v = f.coeffs[pivot], vals[pivot]
    if v % c:
        return False
    y = v // c
    for ci, bi in zip(f.coeffs, vals):
        prod = ci * y
        if abs(prod) > INT64_MAX:
            raise LogeoError("product overflows 64 bits")
        if prod != bi:
            return False
    return True


@dataclass(frozen=True)
class ZIsotypy:
    verdict: bool
    witness: LinearExistsFormula | None = None
    true_at: str | None = None  # "a" or "b": where the witness holds

    def __bool__(self):
        return self.verdict


_SAME = ZIsotypy(True)


def z_isotyped(a: ZPoint | Sequence[int], b: ZPoint | Sequence[int]) -> ZIsotypy:
    """a and b have the same type over Z iff b = a or b = -a."""
    a = a if isinstance(a, ZPoint) else ZPoint(tuple(a))
    b = b if isinstance(b, ZPoint) else ZPoint(tuple(b))
    if len(a) != len(b):
        raise LogeoError("tuples of different lengths live in different sorts")
    if b.values == a.values or b.values == tuple(-v for v in a.values):
        return _SAME
    fa = _cached_test_formula(a.values)
    if not eval_exists_linear(fa, b):
        return ZIsotypy(False, fa, "a")
    fb = _cached_test_formula(b.values)
    if not eval_exists_linear(fb, a):
        return ZIsotypy(False, fb, "b")
    raise AssertionError(f"test formulas fail to separate {a} and {b}")


def divisibility_formula(m: Sequence[int], a: Sequence[int]) -> bool:
    """E x. AND_i m_i x == a_i over Z: one integer x with m_i x = a_i for all i."""
    m, a = tuple(int(v) for v in m), tuple(int(v) for v in a)
    if len(m) != len(a):
        raise LogeoError("length mismatch")
    if any(v < 1 for v in m):
        raise LogeoError("multipliers must be positive")
    if a[0] % m[0]:
        return False
    x = a[0] // m[0]
    return all(mi * x == ai for mi, ai in zip(m, a))
