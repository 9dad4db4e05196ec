"""Search for short formulas: separators of two points, and sentences that
hold in one algebra but not in another.

Terms are enumerated modulo their value in the algebras at hand (a term is
kept only if it computes a new function), so the search is complete for the
formula shapes it tries even though the bank stays small.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .algebra import FiniteAlgebra
from .formula import Equality, Exists, Forall, Formula, Not, Subst
from .signature import App, Substitution, Term, Var, VarSort, term_size
from .space import coordinates, point_index, space_size


def prefix_ops(t: Term, infix: str | None) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    own = 0 if t.sym == infix else 1
    return own + sum(prefix_ops(a, infix) for a in t.args)


class TermBank:
    """Semantically distinct terms over ``sort``, smallest first."""

    def __init__(self, algebras: Sequence[FiniteAlgebra], sort: VarSort, max_size: int = 5, cap: int = 64):
        self.algebras = list(algebras)
        self.sort = sort
        sig = self.algebras[0].signature
        self.entries: list[tuple[Term, list[np.ndarray]]] = []
        seen: set[bytes] = set()
        by_size: dict[int, list[tuple[Term, list[np.ndarray]]]] = {}
        coords = [coordinates(H.size, len(sort)) for H in self.algebras]

        def offer(size, t, vecs):
            key = b"|".join(v.tobytes() for v in vecs)
            if key in seen or len(self.entries) >= cap:
                return
            seen.add(key)
            by_size.setdefault(size, []).append((t, vecs))
            self.entries.append((t, vecs))

        for i, v in enumerate(sort):
            offer(1, Var(v), [c[i] for c in coords])
        for c in sig.constants:
            offer(1, App(c), [np.full(co.shape[1], H.constant(c), dtype=np.int64) for H, co in zip(self.algebras, coords)])
        for size in range(2, max_size + 1):
            for o in sig.ops:
                if o.arity == 0:
                    continue
                for parts in _compositions(size - 1, o.arity):
                    pools = [by_size.get(p, []) for p in parts]
                    for args in itertools.product(*pools):
                        vecs = [H.tables[o.sym][tuple(a[1][k] for a in args)] for k, H in enumerate(self.algebras)]
                        offer(size, App(o.sym, tuple(a[0] for a in args)), vecs)

    def atoms(self) -> list[tuple[Equality, list[np.ndarray]]]:
        """Equalities between bank terms, one per distinct value set, ordered
        by (prefix-operation count, size)."""
        infix = self.algebras[0].signature.infix
        cands = []
        for (i, (t1, v1)), (j, (t2, v2)) in itertools.combinations(enumerate(self.entries), 2):
            bits = [a == b for a, b in zip(v1, v2)]
            key = (prefix_ops(t1, infix) + prefix_ops(t2, infix), term_size(t1) + term_size(t2), i, j)
            # constants read better on the right
            eq = Equality(t2, t1) if isinstance(t1, App) and not t1.args else Equality(t1, t2)
            cands.append((key, eq, bits))
        cands.sort(key=lambda c: c[0])
        out, seen = [], set()
        for _, eq, bits in cands:
            k = b"|".join(np.packbits(b).tobytes() for b in bits)
            if k in seen:
                continue
            seen.add(k)
            out.append((eq, bits))
        return out


def _compositions(total: int, k: int):
    if k == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def _quantify(bits: np.ndarray, m: int, n: int, axis_var: int, kind: str) -> np.ndarray:
    cube = bits.reshape((m,) * n)
    ax = n - 1 - axis_var
    red = cube.any(axis=ax, keepdims=True) if kind == "E" else cube.all(axis=ax, keepdims=True)
    return np.broadcast_to(red, cube.shape).reshape(-1)


def padding_substitution(X: VarSort, aux: Sequence[str]) -> Substitution:
    """X + aux -> X, fixing X and sending every auxiliary variable to x_1."""
    Z = X.extend(aux)
    return Substitution(Z, X, tuple(Var(v) for v in X) + tuple(Var(X.vars[0]) for _ in aux))


def padding_index(m: int, n: int, j: int) -> np.ndarray:
    """Index in H^(n+j) of the padded extension of every point of H^n."""
    idx = np.arange(m**n, dtype=np.int64)
    x1 = idx % m
    pad = sum(m ** (n + t) for t in range(j))
    return idx + x1 * pad


def _lits(atoms):
    for eq, bits in atoms:
        yield eq, bits
        yield Not(eq), [~b for b in bits]


class SeparatorSearch:
    """Short formulas over X, each with its value on Hom(W(X), H), tried in a
    fixed order: literals over X, then one quantifier over a literal in X plus
    one auxiliary variable (wrapped in the padding substitution)."""

    def __init__(self, H: FiniteAlgebra, X: VarSort, max_size: int = 5, cap: int = 64):
        self.H, self.X = H, X
        self.max_size, self.cap = max_size, cap
        self._levels: list[tuple[list[Formula], np.ndarray]] = []

    def _level(self, k: int):
        while len(self._levels) <= k:
            self._levels.append(self._build(len(self._levels)))
        return self._levels[k]

    def _build(self, k: int):
        H, X = self.H, self.X
        m, n = H.size, len(X)
        forms, rows = [], []
        if k == 0:
            for eq, bits in _lits(TermBank([H], X, self.max_size, self.cap).atoms()):
                forms.append(eq)
                rows.append(bits[0])
        else:
            (y,) = X.fresh(1)
            Z = X.extend((y,))
            space_size(H, Z)
            pad = padding_index(m, n, 1)
            wrap = padding_substitution(X, (y,))
            for lit, bits in _lits(TermBank([H], Z, self.max_size, self.cap).atoms()):
                for kind in ("E", "A"):
                    for v in (y,) + X.vars:
                        forms.append(Subst(wrap, (Exists if kind == "E" else Forall)(v, lit)))
                        rows.append(_quantify(bits[0], m, n + 1, Z.index(v), kind)[pad])
        return forms, np.array(rows, dtype=bool).reshape(len(rows), m**n)

    def find(self, p: Sequence[int], q: Sequence[int]) -> Formula | None:
        m = self.H.size
        pi, qi = point_index(p, m), point_index(q, m)
        for k in (0, 1):
            forms, rows = self._level(k)
            hit = np.flatnonzero(rows[:, pi] & ~rows[:, qi])
            if len(hit):
                return forms[int(hit[0])]
        return None


def search_point_separator(
    H: FiniteAlgebra, X: VarSort, p: Sequence[int], q: Sequence[int], max_size: int = 5, cap: int = 64
) -> Formula | None:
    """A short formula over X true at p and false at q, or None."""
    return SeparatorSearch(H, X, max_size, cap).find(p, q)


def search_sentence(
    H1: FiniteAlgebra, H2: FiniteAlgebra, X: VarSort, max_size: int = 5, cap: int = 64
) -> Formula | None:
    """A short closed formula over X true in H1 and false in H2."""
    algs = [H1, H2]
    # one quantifier over a literal in one variable
    for v in X.vars[:1]:
        S = VarSort((v,))
        atoms = TermBank(algs, S, max_size, cap).atoms()
        for lit, bits in _lits(atoms):
            for kind in ("E", "A"):
                truth = [b.any() if kind == "E" else b.all() for b in bits]
                if truth[0] and not truth[1]:
                    return (Exists if kind == "E" else Forall)(v, lit)
    # two quantifiers over a literal in two variables
    if len(X) >= 2:
        v, w = X.vars[:2]
        names, wrap = (v, w), None
    else:
        (w,) = X.fresh(1)
        v = X.vars[0]
        names, wrap = (v, w), padding_substitution(X, (w,))
    S = VarSort(names)
    atoms = TermBank(algs, S, max_size, cap).atoms()
    for lit, bits in _lits(atoms):
        for k1, k2 in itertools.product("EA", repeat=2):
            truth = []
            for H, b in zip(algs, bits):
                inner = _quantify(b, H.size, 2, 1, k2)
                truth.append(bool(inner.any() if k1 == "E" else inner.all()))
            if truth[0] and not truth[1]:
                Q1 = Exists if k1 == "E" else Forall
                Q2 = Exists if k2 == "E" else Forall
                body = Q1(v, Q2(w, lit))
                return Subst(wrap, body) if wrap is not None else body
    return None
