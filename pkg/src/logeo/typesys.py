"""Point equivalences tau, rho and rho_0, types, and the perfectness and
homogeneity verdicts.

tau compares atomic kernels.  The pebble partition refines tau by
back-and-forth over the variables of the sort until nothing splits; this is
equivalence under substitution-free formulas.  rho adds auxiliary variables
(formulas s_* v with v over a larger sort) and escalates their number until
the partition projected back to X stops changing.  rho_0 is the orbit
partition of Aut(H).
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import FiniteAlgebra, automorphisms, discover, is_prime, kernel_key
from .errors import GuardError, LogeoError, SortError
from .formula import (
    Equality,
    Exists,
    Formula,
    Not,
    Subst,
    conj,
    format_formula,
    holds_at,
    tautology,
    value,
)
from .signature import App, Var, VarSort, power_term
from .space import Point, PointSet, coordinates, point_index, point_values, space_size
from .synth import SeparatorSearch, padding_index, padding_substitution, search_sentence

log = logging.getLogger(__name__)


def canonical_ids(raw: np.ndarray) -> np.ndarray:
    """Relabel classes 0, 1, ... in order of their least member index."""
    raw = np.asarray(raw).reshape(-1)
    _, first, inv = np.unique(raw, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inv.reshape(-1)]


@dataclass(frozen=True, eq=False)
class Partition:
    sort: VarSort
    algebra: FiniteAlgebra
    ids: np.ndarray
    label: str = ""
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = canonical_ids(self.ids)
        ids.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        if len(ids) != self.algebra.size ** len(self.sort):
            raise SortError("partition size does not match the point space")

    @property
    def num_classes(self) -> int:
        return int(self.ids.max()) + 1 if len(self.ids) else 0

    def classes(self) -> list[np.ndarray]:
        order = np.argsort(self.ids, kind="stable")
        bounds = np.cumsum(np.bincount(self.ids, minlength=self.num_classes))[:-1]
        return np.split(order, bounds)

    def class_sizes(self) -> list[int]:
        return np.bincount(self.ids).tolist()

    def class_of(self, point) -> int:
        vals = point.values if isinstance(point, Point) else tuple(point)
        return int(self.ids[point_index(vals, self.algebra.size)])

    def same(self, p, q) -> bool:
        return self.class_of(p) == self.class_of(q)

    def members(self, cid: int) -> list[tuple[int, ...]]:
        m, n = self.algebra.size, len(self.sort)
        return [point_values(int(i), m, n) for i in np.flatnonzero(self.ids == cid)]

    def class_set(self, cid: int) -> PointSet:
        return PointSet(self.sort, self.algebra, self.ids == cid)

    def representative(self, cid: int) -> tuple[int, ...]:
        i = int(np.argmax(self.ids == cid))
        return point_values(i, self.algebra.size, len(self.sort))

    def refines(self, other: "Partition") -> bool:
        """Every class of self lies inside a class of other."""
        pairs = np.unique(np.stack([self.ids, other.ids]), axis=1)
        return pairs.shape[1] == self.num_classes

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.sort == other.sort and self.algebra is other.algebra and np.array_equal(self.ids, other.ids)

    def __hash__(self):
        return hash((self.sort, id(self.algebra), self.ids.tobytes()))

    def blocks(self) -> list[list[tuple[int, ...]]]:
        return [self.members(c) for c in range(self.num_classes)]

    def __repr__(self):
        return f"Partition({self.label or '?'}, {self.sort}, {self.algebra.name}, {self.num_classes} classes)"


# -- refinement engine ------------------------------------------------------


class _Refinement:
    """Back-and-forth refinement on one or more point spaces H_b^k that share
    class ids (several spaces are used to compare algebras)."""

    def __init__(self, algebras: Sequence[FiniteAlgebra], sort: VarSort):
        self.algebras = list(algebras)
        self.sort = sort
        self.k = len(sort)
        self.sizes = [space_size(H, sort) for H in self.algebras]
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)]).astype(np.int64)
        self.rounds: list[np.ndarray] = [self._tau()]
        self._reps: dict[int, dict[int, int]] = {}
        self._memo: dict = {}

    def _tau(self) -> np.ndarray:
        keys: dict = {}
        out = []
        for H in self.algebras:
            for tup in coordinates(H.size, self.k).T.tolist():
                out.append(keys.setdefault(kernel_key(H, tup), len(keys)))
        return canonical_ids(np.array(out, dtype=np.int64))

    def _fiber_rows(self, ids: np.ndarray, var: int):
        width = max(H.size for H in self.algebras)
        big = np.iinfo(np.int64).max
        rows, shapes = [], []
        for b, H in enumerate(self.algebras):
            m = H.size
            local = ids[self.offsets[b] : self.offsets[b + 1]].reshape((m,) * self.k)
            moved = np.moveaxis(local, self.k - 1 - var, -1)
            r = np.sort(moved.reshape(-1, m), axis=1)
            dup = np.zeros_like(r, dtype=bool)
            dup[:, 1:] = r[:, 1:] == r[:, :-1]
            r = np.sort(np.where(dup, big, r), axis=1)
            if m < width:
                r = np.concatenate([r, np.full((r.shape[0], width - m), big, dtype=np.int64)], axis=1)
            rows.append(r)
            shapes.append(moved.shape)
        _, inv = np.unique(np.concatenate(rows), axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        out, start = [], 0
        for b, H in enumerate(self.algebras):
            m = H.size
            cnt = rows[b].shape[0]
            f = inv[start : start + cnt].reshape(shapes[b][:-1])[..., None]
            f = np.broadcast_to(f, shapes[b])
            out.append(np.moveaxis(f, -1, self.k - 1 - var).reshape(-1))
            start += cnt
        return np.concatenate(out)

    def step(self) -> bool:
        ids = self.rounds[-1]
        cols = [ids] + [self._fiber_rows(ids, i) for i in range(self.k)]
        _, inv = np.unique(np.stack(cols, axis=1), axis=0, return_inverse=True)
        new = canonical_ids(inv.reshape(-1))
        if new.max() == ids.max():
            return False
        self.rounds.append(new)
        return True

    def run(self, max_rounds: int | None = None) -> "_Refinement":
        while (max_rounds is None or len(self.rounds) <= max_rounds) and self.step():
            pass
        return self

    @property
    def final(self) -> np.ndarray:
        return self.rounds[-1]

    # -- separating formulas --

    def _locate(self, g: int) -> tuple[int, tuple[int, ...]]:
        b = int(np.searchsorted(self.offsets, g, side="right") - 1)
        H = self.algebras[b]
        return b, point_values(int(g - self.offsets[b]), H.size, self.k)

    def _rep(self, r: int, cid: int) -> int:
        reps = self._reps.get(r)
        if reps is None:
            _, first = np.unique(self.rounds[r], return_index=True)
            reps = self._reps[r] = {c: int(i) for c, i in enumerate(first)}
        return reps[cid]

    def _fiber_classes(self, r: int, g: int, var: int) -> frozenset[int]:
        b, vals = self._locate(g)
        m = self.algebras[b].size
        local = g - self.offsets[b] - vals[var] * m**var
        idx = self.offsets[b] + local + np.arange(m) * m**var
        return frozenset(self.rounds[r][idx].tolist())

    def _tau_separator(self, p: int, q: int) -> Formula:
        bp, vp = self._locate(p)
        bq, vq = self._locate(q)
        Hp, Hq = self.algebras[bp], self.algebras[bq]
        d = discover(Hp, vp)
        terms: list = []
        for origin in d.origins:
            if origin[0] == "const":
                terms.append(App(origin[1]))
            elif origin[0] == "var":
                terms.append(Var(self.sort.vars[origin[1]]))
            else:
                terms.append(App(origin[1], tuple(terms[a] for a in origin[2])))
        lits: list[Formula] = []
        for i, s in enumerate(d.seeds):
            if d.origins[s] != ("var", i):
                lits.append(Equality(Var(self.sort.vars[i]), terms[s]))
        for (sym, args), r in d.records:
            t = App(sym, tuple(terms[a] for a in args))
            if t != terms[r]:
                lits.append(Equality(t, terms[r]))
        for i, j in itertools.combinations(range(len(terms)), 2):
            a, b = (terms[j], terms[i]) if d.origins[i][0] == "const" else (terms[i], terms[j])
            lits.append(Not(Equality(a, b)))
        lits.sort(key=_formula_size)
        mu = Point(self.sort, vq)
        for lit in lits:
            if not holds_at(lit, mu, Hq):
                return lit
        raise AssertionError("points with different atomic kernels agree on every kernel literal")

    def separator(self, r: int, c: int, d: int) -> Formula:
        """A formula true on round-r class c and false on round-r class d."""
        key = (r, c, d)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        p, q = self._rep(r, c), self._rep(r, d)
        if r == 0:
            out = self._tau_separator(p, q)
        else:
            pc, pd = int(self.rounds[r - 1][p]), int(self.rounds[r - 1][q])
            if pc != pd:
                out = self.separator(r - 1, pc, pd)
            else:
                best = None
                for i in range(self.k):
                    F, G = self._fiber_classes(r - 1, p, i), self._fiber_classes(r - 1, q, i)
                    if F == G:
                        continue
                    for e in sorted(F - G):
                        cand = (len(G), i, e, G, False)
                        best = cand if best is None or cand[0] < best[0] else best
                    for e in sorted(G - F):
                        cand = (len(F), i, e, F, True)
                        best = cand if best is None or cand[0] < best[0] else best
                _, i, e, others, negate = best
                H = self.algebras[0]
                body = conj(
                    (self.separator(r - 1, e, o) for o in sorted(others)),
                    true=tautology(H.signature, self.sort),
                )
                out = Exists(self.sort.vars[i], body)
                if negate:
                    out = Not(out)
        self._memo[key] = out
        return out

    def point_separator(self, p: int, q: int) -> Formula | None:
        r = len(self.rounds) - 1
        c, d = int(self.final[p]), int(self.final[q])
        if c == d:
            return None
        return self.separator(r, c, d)

    def class_formula(self, cid: int, among: Sequence[int] | None = None) -> Formula:
        """True exactly on class ``cid`` among the final classes ``among``."""
        r = len(self.rounds) - 1
        others = [d for d in (range(int(self.final.max()) + 1) if among is None else among) if d != cid]
        H = self.algebras[0]
        parts = list(dict.fromkeys(self.separator(r, cid, d) for d in others))
        return conj(parts, true=tautology(H.signature, self.sort))


def _formula_size(u: Formula) -> int:
    match u:
        case Equality(l, r):
            return _term_nodes(l) + _term_nodes(r)
        case Not(a):
            return 1 + _formula_size(a)
    return 1


def _term_nodes(t) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(_term_nodes(a) for a in t.args)


# -- the partitions -----------------------------------------------------------


def tau_partition(H: FiniteAlgebra, X: VarSort) -> Partition:
    """Points are tau-equivalent iff a_i -> b_i extends to an isomorphism of
    the generated subalgebras."""
    return Partition(X, H, _Refinement([H], X).rounds[0], "tau")


def _escalated(H: FiniteAlgebra, X: VarSort, j: int) -> tuple[_Refinement, np.ndarray]:
    aux = X.fresh(j) if j else ()
    Z = X.extend(aux)
    ref = _Refinement([H], Z).run()
    proj = padding_index(H.size, len(X), j)
    return ref, canonical_ids(ref.final[proj])


def pebble_partition(H: FiniteAlgebra, X: VarSort, k: int | None = None) -> Partition:
    """Equivalence under substitution-free formulas in k variables.

    k = |X| is the plain fixpoint on Hom(W(X), H); k > |X| adds k - |X|
    auxiliary variables and projects back (auxiliary values padded with x_1)."""
    n = len(X)
    k = n if k is None else k
    if k < n:
        raise LogeoError(f"pebble count {k} is below the sort size {n}")
    ref, ids = _escalated(H, X, k - n)
    return Partition(X, H, ids, f"pebble{k}", {"rounds": len(ref.rounds) - 1})


def rho_partition(H: FiniteAlgebra, X: VarSort, max_aux: int | None = None) -> Partition:
    """LKer equivalence, by escalating the number of auxiliary variables until
    two consecutive counts give the same partition of Hom(W(X), H)."""
    limit = H.size if max_aux is None else max_aux
    prev = None
    j = 0
    while True:
        try:
            _, ids = _escalated(H, X, j)
        except GuardError:
            if prev is None:
                raise
            log.warning("rho escalation stopped by the point guard at %d auxiliary variables", j - 1)
            return Partition(X, H, prev, "rho", {"aux": j - 1, "converged": False})
        if prev is not None and np.array_equal(ids, prev):
            return Partition(X, H, ids, "rho", {"aux": j - 1, "converged": True})
        if j >= limit:
            log.warning("rho escalation guard j <= %d reached before stabilizing", limit)
            return Partition(X, H, ids, "rho", {"aux": j, "converged": False})
        prev = ids
        j += 1


def orbit_partition(H: FiniteAlgebra, X: VarSort) -> Partition:
    """Orbits of Aut(H) acting coordinatewise on points."""
    m, n = H.size, len(X)
    space_size(H, X)
    coords = coordinates(m, n)
    best = np.arange(m**n, dtype=np.int64)
    for perm in automorphisms(H).as_array():
        img = np.zeros(m**n, dtype=np.int64)
        for i in reversed(range(n)):
            img = img * m + perm[coords[i]]
        np.minimum(best, img, out=best)
    return Partition(X, H, best, "orbit")


def separating_formula(H: FiniteAlgebra, X: VarSort, mu, nu, max_aux: int | None = None) -> Formula | None:
    """A formula of Phi(X) true at mu and false at nu; None when mu rho nu.

    Short candidates are tried first; otherwise the formula is read off the
    refinement history (possibly wrapped in a substitution from a larger sort)."""
    p = mu.values if isinstance(mu, Point) else tuple(mu)
    q = nu.values if isinstance(nu, Point) else tuple(nu)
    return _Separators(H, X, rho_partition(H, X, max_aux)).between(p, q)


def chain_check(H: FiniteAlgebra, X: VarSort) -> dict:
    orbit, rho, tau = orbit_partition(H, X), rho_partition(H, X), tau_partition(H, X)
    ok1, ok2 = orbit.refines(rho), rho.refines(tau)
    if not (ok1 and ok2):
        raise AssertionError(
            f"partition chain violated on {H.name} over {X}: orbit<=rho {ok1}, rho<=tau {ok2}"
        )
    return {
        "algebra": H.name,
        "sort": str(X),
        "orbit_classes": orbit.num_classes,
        "rho_classes": rho.num_classes,
        "tau_classes": tau.num_classes,
        "orbit_refines_rho": ok1,
        "rho_refines_tau": ok2,
    }


def is_logically_perfect(H: FiniteAlgebra, X: VarSort) -> bool:
    return rho_partition(H, X) == orbit_partition(H, X)


def is_homogeneous(H: FiniteAlgebra, X: VarSort) -> bool:
    return tau_partition(H, X) == orbit_partition(H, X)


def is_strictly_perfect(H: FiniteAlgebra, X: VarSort) -> bool:
    return pebble_partition(H, X) == orbit_partition(H, X)


# -- censuses -----------------------------------------------------------------


@dataclass
class CensusRow:
    cid: int
    size: int
    representative: tuple[int, ...]
    formula: str | None = None


@dataclass
class TypeCensus:
    partition: Partition
    rows: list[CensusRow]

    def to_json(self) -> dict:
        return {
            "algebra": self.partition.algebra.name,
            "sort": list(self.partition.sort.vars),
            "classes": [
                {"id": r.cid, "size": r.size, "representative": list(r.representative), "formula": r.formula}
                for r in self.rows
            ],
        }


def type_census(H: FiniteAlgebra, X: VarSort, with_formulas: bool = False) -> TypeCensus:
    """One row per realized X-type (rho class)."""
    rho = rho_partition(H, X)
    rows = []
    sizes = rho.class_sizes()
    for c in range(rho.num_classes):
        rows.append(CensusRow(c, sizes[c], rho.representative(c)))
    if with_formulas:
        seps = _Separators(H, X, rho)
        for row in rows:
            row.formula = format_formula(seps.class_formula(row.cid), H.signature)
    return TypeCensus(rho, rows)


class _Separators:
    """Separating formulas between points of one space: short candidates
    first, then the refinement history at the escalation level rho used."""

    def __init__(self, H: FiniteAlgebra, X: VarSort, rho: Partition):
        self.H, self.X, self.rho = H, X, rho
        self.search = SeparatorSearch(H, X)
        self._ref = None

    def _structural(self, p, q) -> Formula:
        H, X = self.H, self.X
        j = self.rho.info.get("aux", 0)
        if self._ref is None:
            self._ref = _escalated(H, X, j)[0]
        pad = padding_index(H.size, len(X), j)
        phi = self._ref.point_separator(int(pad[point_index(p, H.size)]), int(pad[point_index(q, H.size)]))
        return Subst(padding_substitution(X, self._ref.sort.vars[len(X):]), phi) if j else phi

    def between(self, p, q) -> Formula | None:
        if self.rho.same(p, q):
            return None
        try:
            short = self.search.find(p, q)
        except GuardError:
            short = None
        return short if short is not None else self._structural(p, q)

    def class_formula(self, cid: int) -> Formula:
        rep = self.rho.representative(cid)
        parts = [self.between(rep, self.rho.representative(d)) for d in range(self.rho.num_classes) if d != cid]
        return conj(list(dict.fromkeys(parts)), true=tautology(self.H.signature, self.X))


def class_defining_formula(H: FiniteAlgebra, X: VarSort, cid: int, rho: Partition | None = None) -> Formula:
    """A formula of Phi(X) whose value is exactly the given rho class."""
    rho = rho or rho_partition(H, X)
    return _Separators(H, X, rho).class_formula(cid)


@dataclass
class IsotypyResult:
    verdict: bool
    witness: Formula | None = None
    true_in: str | None = None
    aux: int = 0
    converged: bool = True


def isotyped(H1: FiniteAlgebra, H2: FiniteAlgebra, X: VarSort, max_aux: int | None = None) -> IsotypyResult:
    """Do H1 and H2 realize the same X-types?  Joint refinement over both
    point spaces, escalating auxiliary variables as for rho."""
    if not H1.same_signature(H2):
        raise LogeoError("isotypy needs a common signature")
    limit = max(H1.size, H2.size) if max_aux is None else max_aux
    prev = None
    j = 0
    while True:
        aux = X.fresh(j) if j else ()
        Z = X.extend(aux)
        try:
            ref = _Refinement([H1, H2], Z).run()
        except GuardError:
            if prev is None:
                raise
            return IsotypyResult(True, aux=j - 1, converged=False)
        p1 = padding_index(H1.size, len(X), j)
        p2 = padding_index(H2.size, len(X), j) + ref.offsets[1]
        c1 = set(ref.final[p1].tolist())
        c2 = set(ref.final[p2].tolist())
        if c1 != c2:
            return IsotypyResult(False, *_isotypy_witness(H1, H2, X, ref, j, c1, c2), aux=j)
        sig = canonical_ids(np.concatenate([ref.final[p1], ref.final[p2]]))
        if prev is not None and np.array_equal(sig, prev):
            return IsotypyResult(True, aux=j - 1)
        if j >= limit:
            return IsotypyResult(True, aux=j, converged=False)
        prev = sig
        j += 1


def _isotypy_witness(H1, H2, X, ref, j, c1, c2):
    for A, B in ((H1, H2), (H2, H1)):
        try:
            s = search_sentence(A, B, X)
        except GuardError:
            s = None
        if s is not None:
            return s, A.name
    # a type realized on one side only, described by the refinement history
    if c1 - c2:
        only, other, true_in = min(c1 - c2), sorted(c2), H1.name
    else:
        only, other, true_in = min(c2 - c1), sorted(c1), H2.name
    chi = ref.class_formula(only, [only] + other)
    body = chi
    for v in reversed(ref.sort.vars):
        body = Exists(v, body)
    if j:
        body = Subst(padding_substitution(X, ref.sort.vars[len(X):]), body)
    return body, true_in


# -- the explicit constructions --------------------------------------------


def _group_check(H: FiniteAlgebra):
    if not H.signature.variety.is_group:
        raise LogeoError(f"{H.name} is not declared a group")


def subspaces(p: int, n: int) -> list[frozenset[tuple[int, ...]]]:
    """All subspaces of F_p^n as sets of vectors."""
    vecs = list(itertools.product(range(p), repeat=n))
    out: set[frozenset] = set()
    for r in range(n + 1):
        for basis in itertools.combinations(vecs, r):
            span = set()
            for coeffs in itertools.product(range(p), repeat=r):
                span.add(tuple(sum(c * b[i] for c, b in zip(coeffs, basis)) % p for i in range(n)))
            if not span:
                span = {(0,) * n}
            out.add(frozenset(span))
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def gaussian_binomial_total(p: int, n: int) -> int:
    """Number of subspaces of F_p^n."""
    total = 0
    for k in range(n + 1):
        num = den = 1
        for i in range(k):
            num *= p ** (n - i) - 1
            den *= p ** (i + 1) - 1
        total += num // den
    return total


def _word(H: FiniteAlgebra, X: VarSort, coeffs: Sequence[int]) -> App | Var:
    """x_1^{c_1} * ... * x_n^{c_n}, or e for the zero vector."""
    sig = H.signature
    factors = [power_term(Var(v), c, sig) for v, c in zip(X, coeffs) if c]
    if not factors:
        return App(sig.constants[0])
    out = factors[0]
    for f in factors[1:]:
        out = App(sig.infix, (out, f))
    return out


def exponent_p_census(p: int, m: int, n: int) -> dict:
    """For H = (Z/p)^m and |X| = n <= m: each subgroup T of W(X) = (Z/p)^n gives
    the formula (AND_{w in T} w == e) & (AND_{w not in T} w != e); its value
    should be one Aut(H)-orbit, and the orbits should be exactly these."""
    from .algebra import elementary_abelian

    if m < n:
        raise LogeoError(f"need m >= n, got m={m}, n={n}")
    H = elementary_abelian(p, m)
    X = VarSort(tuple(f"x{i + 1}" for i in range(n)))
    orbits = orbit_partition(H, X)
    e = App(H.signature.constants[0])
    vecs = sorted((v for v in itertools.product(range(p), repeat=n) if any(v)), key=lambda v: (sum(map(bool, v)), v[::-1]))
    rows = []
    covered = np.zeros(len(orbits.ids), dtype=bool)
    for T in subspaces(p, n):
        lits = []
        for v in vecs:
            eq = Equality(_word(H, X, v), e)
            lits.append(eq if v in T else Not(eq))
        u = conj(lits, true=tautology(H.signature, X))
        val = value(u, H, X)
        ids = set(orbits.ids[val.bits].tolist())
        one_orbit = len(ids) == 1 and int(val.bits.sum()) == int((orbits.ids == next(iter(ids))).sum())
        covered |= val.bits
        rows.append({"dim": _dim(len(T), p), "size": len(val), "one_orbit": one_orbit, "formula": format_formula(u, H.signature)})
    return {
        "p": p, "m": m, "n": n,
        "orbits": orbits.num_classes,
        "subspaces": len(rows),
        "expected_subspaces": gaussian_binomial_total(p, n),
        "all_single_orbits": all(r["one_orbit"] for r in rows),
        "covers_space": bool(covered.all()),
        "rows": rows,
        "ok": orbits.num_classes == len(rows) and all(r["one_orbit"] for r in rows) and bool(covered.all()),
    }  # fmt: skip


def _dim(size: int, p: int) -> int:
    d = 0
    while p**d < size:
        d += 1
    return d


def _divisors(k: int) -> list[int]:
    return [d for d in range(1, k + 1) if k % d == 0]


def order_formula(H: FiniteAlgebra, x: str, order: int) -> Formula:
    """x != e & x^order == e & AND over proper divisors d of x^d != e; for
    order 1 just x == e."""
    sig = H.signature
    e = App(sig.constants[0])
    X = Var(x)
    if order == 1:
        return Equality(X, e)
    parts: list[Formula] = [Not(Equality(X, e)), Equality(power_term(X, order, sig), e)]
    parts += [Not(Equality(power_term(X, d, sig), e)) for d in _divisors(order) if 1 < d < order]
    return conj(parts)


def order_formula_census(H: FiniteAlgebra, X: VarSort) -> dict:
    """Conjunctions of order formulas over the variables of X, one per
    combination of element orders; compares their values with the orbits."""
    _group_check(H)
    if not H.signature.variety.is_abelian:
        mul = H.tables[H.signature.infix]
        if not (mul == mul.T).all():
            raise LogeoError(f"{H.name} is not abelian")
    order = H.size
    if any(order % (q * q) == 0 for q in range(2, order + 1) if is_prime(q)):
        raise LogeoError(f"{H.name} is not a product of cyclic groups of distinct prime orders")
    orbits = orbit_partition(H, X)
    orders = sorted({H.element_order(a) for a in range(H.size)})
    rows = []
    covered = np.zeros(len(orbits.ids), dtype=bool)
    for combo in itertools.product(orders, repeat=len(X)):
        u = conj(order_formula(H, x, k) for x, k in zip(X, combo))
        val = value(u, H, X)
        if val.is_empty():
            continue
        ids = set(orbits.ids[val.bits].tolist())
        one_orbit = len(ids) == 1 and len(val) == int((orbits.ids == next(iter(ids))).sum())
        covered |= val.bits
        rows.append({"orders": list(combo), "size": len(val), "one_orbit": one_orbit,
                     "formula": format_formula(u, H.signature)})  # fmt: skip
    return {
        "algebra": H.name,
        "sort": str(X),
        "orbits": orbits.num_classes,
        "formulas": len(rows),
        "types": rho_partition(H, X).num_classes,
        "all_single_orbits": all(r["one_orbit"] for r in rows),
        "covers_space": bool(covered.all()),
        "rows": rows,
        "ok": all(r["one_orbit"] for r in rows) and bool(covered.all()) and len(rows) == orbits.num_classes,
    }
