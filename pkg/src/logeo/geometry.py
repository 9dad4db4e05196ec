"""The two Galois correspondences between systems and point sets.

Equational side: T' is the algebraic set of a system of equations, A'' the
equational closure of a point set.  Logical side: T^L is the elementary set
of a system of formulas, A^LL the logical closure.  Closures on the formula
side are infinite, so they are exposed only as membership oracles.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .algebra import FiniteAlgebra, _group_symbols, discover
from .config import get_guards
from .errors import GuardError, LogeoError, ParseError, SortError
from .formula import (
    And,
    Equality,
    Formula,
    Not,
    check_formula,
    format_formula,
    parse_formula,
    value,
)
from .signature import Term, VarSort, check_term, format_term, terms_up_to_depth
from .space import Point, PointSet, eval_term_all, point_index, space_size
from .typesys import Partition, rho_partition

MAX_WINDOW_TERMS = 600


@dataclass(frozen=True)
class EquationSystem:
    sort: VarSort
    pairs: tuple[tuple[Term, Term], ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((l, r) for l, r in self.pairs))

    def check(self, H: FiniteAlgebra) -> None:
        for l, r in self.pairs:
            check_term(l, H.signature, self.sort)
            check_term(r, H.signature, self.sort)

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True)
class FormulaSystem:
    sort: VarSort
    formulas: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "formulas", tuple(self.formulas))

    def check(self, H: FiniteAlgebra) -> None:
        for u in self.formulas:
            check_formula(u, H.signature, self.sort)

    def __len__(self):
        return len(self.formulas)


# -- equational side ----------------------------------------------------------


def algebraic_set(T: EquationSystem, H: FiniteAlgebra) -> PointSet:
    """T'_H: the points whose kernel contains every equation of T."""
    T.check(H)
    bits = np.ones(space_size(H, T.sort), dtype=bool)
    for l, r in T.pairs:
        bits &= eval_term_all(l, T.sort, H) == eval_term_all(r, T.sort, H)
    return PointSet(T.sort, H, bits)


def in_equational_closure(T: EquationSystem, w0: Term, w1: Term, H: FiniteAlgebra) -> bool:
    """(w0, w1) in T''_H, i.e. the quasiidentity AND T -> w0 == w1 holds in H."""
    A = algebraic_set(T, H)
    check_term(w0, H.signature, T.sort)
    check_term(w1, H.signature, T.sort)
    agree = eval_term_all(w0, T.sort, H) == eval_term_all(w1, T.sort, H)
    return bool(agree[A.bits].all())


def equations_of(A: PointSet, depth: int) -> EquationSystem:
    """The part of A' among terms of depth <= ``depth``."""
    H, X = A.algebra, A.sort
    terms = _window_terms(H, X, depth)
    vals = [eval_term_all(t, X, H)[A.bits] for t in terms]
    pairs = [
        (terms[i], terms[j])
        for i, j in itertools.combinations(range(len(terms)), 2)
        if np.array_equal(vals[i], vals[j])
    ]
    return EquationSystem(X, tuple(pairs))


_HASH = np.random.default_rng(0x5EED).integers(1, 2**63, size=4096, dtype=np.uint64) | np.uint64(1)


def _group_rows(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First occurrence and group id of each row.  Rows are hashed to 64 bits
    and the grouping is verified; a collision falls back to an exact sort."""
    if rows.shape[1] <= len(_HASH):
        with np.errstate(over="ignore"):
            keys = rows.astype(np.uint64) @ _HASH[: rows.shape[1]]
        _, first, inv = np.unique(keys, return_index=True, return_inverse=True)
        inv = inv.reshape(-1)
        if np.array_equal(rows, rows[first[inv]]):
            return first, inv
    _, first, inv = np.unique(rows, axis=0, return_index=True, return_inverse=True)
    return first, inv.reshape(-1)


def equational_closure(A: PointSet) -> PointSet:
    """A''_H: the points nu with Ker(nu) containing the kernel of every point of A.

    The columns (mu(x_i))_{mu in A} generate a subalgebra S of H^A; nu lies in
    A'' exactly when x_i-column -> nu(x_i) extends to a homomorphism S -> H.
    S is generated round by round, each round applying every operation to
    tuples that involve a fresh element, and every nu rides along as an
    extra block of coordinates.  nu fails as soon as two applications agree
    on A but not at nu."""
    H, X = A.algebra, A.sort
    m, n = H.size, len(X)
    pts = A.indices()  # for empty A, H^A is trivial and every term collapses
    size = m**n
    dtype = np.uint8 if m <= 256 else np.int64
    E = np.empty((0, len(pts)), dtype=dtype)
    V = np.empty((0, size), dtype=dtype)
    ok = np.ones(size, dtype=bool)
    limit = get_guards().points * 16

    def absorb(cE, cV):
        nonlocal E, V, ok
        N = len(E)
        allE = np.concatenate([E, cE])
        if allE.shape[1] == 0:
            allE = np.zeros((len(allE), 1), dtype=dtype)
        first, inv = _group_rows(allE)
        allV = np.concatenate([V, cV])
        ok &= ~np.any(allV != allV[first[inv]], axis=0)
        fresh = np.sort(first[first >= N])
        E = np.concatenate([E, allE[fresh][:, : E.shape[1]]]) if len(fresh) else E
        V = np.concatenate([V, allV[fresh]]) if len(fresh) else V
        if E.shape[0] * (E.shape[1] + size) > limit:
            raise GuardError(f"equational closure needs more than {limit} cells")

    coords = (np.arange(size)[None, :] // m ** np.arange(n)[:, None]) % m
    seeds_E = [np.full(len(pts), H.constant(c), dtype=dtype) for c in H.signature.constants]
    seeds_V = [np.full(size, H.constant(c), dtype=dtype) for c in H.signature.constants]
    seeds_E += [((pts // m**i) % m).astype(dtype) for i in range(n)]
    seeds_V += [coords[i].astype(dtype) for i in range(n)]
    absorb(np.array(seeds_E, dtype=dtype).reshape(len(seeds_E), len(pts)), np.array(seeds_V, dtype=dtype))
    if H.signature.variety.is_group:
        # a finite group is a monoid under *, so right multiplication by the
        # generators reaches all of S, and a map respecting those edges is
        # already a group homomorphism
        mul = H.tables[_group_symbols(H.signature)[0]]
        gens = [(E[k], V[k]) for k in range(len(E))]
        lo = 0
        while lo < len(E):
            hi = len(E)
            for gE, gV in gens:
                absorb(mul[E[lo:hi], gE], mul[V[lo:hi], gV])
            lo = hi
        return PointSet(X, H, ok)
    ops = [(H.tables[o.sym], o.arity) for o in H.signature.ops if o.arity > 0]
    lo = 0
    while lo < len(E):
        hi = len(E)
        for table, ar in ops:
            grid = np.indices((hi,) * ar).reshape(ar, -1)
            grid = grid[:, (grid >= lo).any(axis=0)]
            step = max(1, 2_000_000 // (E.shape[1] + size + 1))
            for s in range(0, grid.shape[1], step):
                idx = grid[:, s : s + step]
                cE = table[tuple(E[i] for i in idx)].astype(dtype)
                cV = table[tuple(V[i] for i in idx)].astype(dtype)
                absorb(cE, cV)
        lo = hi
    return PointSet(X, H, ok)


# -- logical side -------------------------------------------------------------


def elementary_set(T: FormulaSystem, H: FiniteAlgebra) -> PointSet:
    """T^L_H: intersection of the values of the formulas of T."""
    T.check(H)
    out = PointSet.full(T.sort, H)
    for u in T.formulas:
        out = out & value(u, H, T.sort)
    return out


def in_logical_closure(T: FormulaSystem, v: Formula, H: FiniteAlgebra) -> bool:
    """v in T^LL_H, i.e. T -> v holds in H."""
    check_formula(v, H.signature, T.sort)
    return elementary_set(T, H) <= value(v, H, T.sort)


def logical_closure(A: PointSet, rho: Partition | None = None) -> PointSet:
    """A^LL_H.  On a finite algebra every rho-class is definable, so this is
    the union of the rho-classes that meet A."""
    rho = rho or rho_partition(A.algebra, A.sort)
    hit = np.unique(rho.ids[A.bits])
    return PointSet(A.sort, A.algebra, np.isin(rho.ids, hit))


@dataclass(frozen=True)
class ElementaryVerdict:
    elementary: bool
    classes: tuple[int, ...]  # rho-classes contained in A
    partial: tuple[int, ...]  # rho-classes met by A but not contained in it

    def __bool__(self):
        return self.elementary


def is_elementary(A: PointSet, H: FiniteAlgebra | None = None, rho: Partition | None = None) -> ElementaryVerdict:
    """A is elementary iff it is a union of rho-classes; the certificate lists
    the classes it is made of, or the ones it cuts."""
    if H is not None and H is not A.algebra:
        raise SortError("point set belongs to another algebra")
    rho = rho or rho_partition(A.algebra, A.sort)
    inside = np.bincount(rho.ids[A.bits], minlength=rho.num_classes)
    sizes = np.bincount(rho.ids, minlength=rho.num_classes)
    full = tuple(int(c) for c in np.flatnonzero((inside == sizes) & (sizes > 0)))
    cut = tuple(int(c) for c in np.flatnonzero((inside > 0) & (inside < sizes)))
    return ElementaryVerdict(not cut, full, cut)


def point_closure(mu: Point, H: FiniteAlgebra) -> PointSet:
    """{mu}^LL_H, the least elementary set containing mu: its rho-class."""
    return logical_closure(PointSet.from_points(mu.sort, H, [mu]))


# -- the atomic-kernel window -------------------------------------------------


def _window_terms(H: FiniteAlgebra, X: VarSort, depth: int) -> list[Term]:
    if depth < 1:
        raise LogeoError("depth bound must be at least 1")
    # count before building: layer sizes grow doubly exponentially
    total, last = 0, len(X) + len(H.signature.constants)
    for _ in range(depth - 1):
        total += last
        last = sum(total**o.arity - (total - last) ** o.arity for o in H.signature.ops if o.arity > 0)
        if total + last > MAX_WINDOW_TERMS:
            raise GuardError(f"depth {depth} needs more than {MAX_WINDOW_TERMS} terms")
    terms = terms_up_to_depth(H.signature, X, depth)
    return terms


def discovery_depth(mu: Point, H: FiniteAlgebra) -> int:
    """Largest term depth the generation of <mu(X)> needs."""
    d = discover(H, mu.values)
    depth: list[int] = []
    for origin in d.origins:
        depth.append(1 if origin[0] != "op" else 1 + max(depth[a] for a in origin[2]))
    return max(depth)


def tau_coset_formula_system(mu: Point, H: FiniteAlgebra, depth: int | None = None) -> FormulaSystem:
    """Equalities mu satisfies and negated equalities it violates, over terms
    of depth <= ``depth``.  Its elementary set contains the tau-class of mu
    and shrinks to it once the window is deep enough; the default is one more
    than the depth needed to generate the subalgebra <mu(X)>."""
    depth = discovery_depth(mu, H) + 1 if depth is None else depth
    terms = _window_terms(H, mu.sort, depth)
    vals = [eval_term_all(t, mu.sort, H)[point_index(mu.values, H.size)] for t in terms]
    out: list[Formula] = []
    for i, j in itertools.combinations(range(len(terms)), 2):
        eq = Equality(terms[i], terms[j])
        out.append(eq if vals[i] == vals[j] else Not(eq))
    return FormulaSystem(mu.sort, tuple(out))


# -- batch queries ------------------------------------------------------------


@dataclass(frozen=True)
class QueryResult:
    line: int
    kind: str
    query: str
    verdict: bool

    def to_json(self) -> dict:
        return {"line": self.line, "kind": self.kind, "query": self.query, "verdict": self.verdict}


def _split_turnstile(body: str, lineno: int) -> tuple[str, str]:
    left, sep, right = body.partition("|-")
    if not sep:
        raise ParseError(f"line {lineno}: expected '|-'")
    return left.strip(), right.strip()


def _equations(text: str, H: FiniteAlgebra, X: VarSort) -> list[tuple[Term, Term]]:
    """A conjunction of equalities, or nothing."""
    if not text:
        return []
    u = parse_formula(text, H.signature, X)
    out = []
    stack = [u]
    while stack:
        f = stack.pop()
        if isinstance(f, And):
            stack += [f.right, f.left]
        elif isinstance(f, Equality):
            out.append((f.left, f.right))
        else:
            raise ParseError(f"not an equation: {format_formula(f, H.signature)}")
    return out


def run_batch(lines: Iterable[str], H: FiniteAlgebra, X: VarSort, base_dir: str = ".") -> list[QueryResult]:
    """Lines ``CLOSURE? <formula-file> |- <formula>`` and
    ``QUASI? <eq> & <eq> ... |- <w> == <w'>``; '#' starts a comment.
    Formula files are read relative to ``base_dir``."""
    from .formula import formulas_from_lines

    results = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, _, body = line.partition(" ")
        if kind == "CLOSURE?":
            path, goal = _split_turnstile(body, lineno)
            full = path if os.path.isabs(path) else os.path.join(base_dir, path)
            with open(full, encoding="utf-8") as fh:
                T = FormulaSystem(X, tuple(formulas_from_lines(fh.read().splitlines(), H.signature, X)))
            verdict = in_logical_closure(T, parse_formula(goal, H.signature, X), H)
        elif kind == "QUASI?":
            left, goal = _split_turnstile(body, lineno)
            (target,) = _equations(goal, H, X) or [None]
            if target is None:
                raise ParseError(f"line {lineno}: missing goal equation")
            T = EquationSystem(X, tuple(_equations(left, H, X)))
            verdict = in_equational_closure(T, target[0], target[1], H)
        else:
            raise ParseError(f"line {lineno}: unknown query {kind!r}")
        results.append(QueryResult(lineno, kind.rstrip("?").lower(), line, verdict))
    return results


def format_equations(T: EquationSystem, H: FiniteAlgebra) -> str:
    return " & ".join(f"{format_term(l, H.signature)} == {format_term(r, H.signature)}" for l, r in T.pairs)
