"""Finite algebras on the carrier 0..m-1, their automorphisms, and the
pair-closure test behind the atomic-kernel equivalence."""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .config import get_guards
from .errors import AlgebraError, LogeoError
from .signature import OpSym, Signature, Variety, group_signature


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    name: str
    signature: Signature
    size: int
    tables: dict  # sym -> np.ndarray of shape (size,)*arity, int64

    def __post_init__(self):
        if self.size < 1:
            raise AlgebraError("carrier must be nonempty")
        for o in self.signature.ops:
            if o.sym not in self.tables:
                raise AlgebraError(f"missing table for {o.sym!r}")
            t = np.asarray(self.tables[o.sym], dtype=np.int64)
            if t.shape != (self.size,) * o.arity:
                raise AlgebraError(
                    f"table for {o.sym!r} has shape {t.shape}, expected {(self.size,) * o.arity}"
                )
            if t.size and (t.min() < 0 or t.max() >= self.size):
                bad = np.argwhere((t < 0) | (t >= self.size))[0]
                raise AlgebraError(
                    f"entry out of range in {o.sym!r} at {tuple(int(i) for i in bad)}: "
                    f"{int(t[tuple(bad)])} not in 0..{self.size - 1}"
                )
            t.setflags(write=False)
            self.tables[o.sym] = t
        extra = set(self.tables) - {o.sym for o in self.signature.ops}
        if extra:
            raise AlgebraError(f"tables for undeclared symbols {sorted(extra)}")
        object.__setattr__(self, "_kcache", {})

    def __repr__(self):
        return f"FiniteAlgebra({self.name!r}, size={self.size})"

    def __len__(self):
        return self.size

    def op(self, sym: str, *args: int) -> int:
        return int(self.tables[sym][tuple(args)])

    def constant(self, sym: str) -> int:
        return int(self.tables[sym])

    @cached_property
    def _flat(self) -> list[tuple[str, int, list[int]]]:
        return [(o.sym, o.arity, self.tables[o.sym].reshape(-1).tolist()) for o in self.signature.ops]

    # group structure, when the variety says it is a group
    def _group_syms(self) -> tuple[str, str, str]:
        return _group_symbols(self.signature)

    @property
    def identity(self) -> int:
        return self.constant(self._group_syms()[2])

    def mul(self, a: int, b: int) -> int:
        return self.op(self._group_syms()[0], a, b)

    def element_order(self, a: int) -> int:
        e = self.identity
        k, x = 1, a
        while x != e:
            x = self.mul(x, a)
            k += 1
        return k

    def same_signature(self, other: "FiniteAlgebra") -> bool:
        return self.signature.ops == other.signature.ops and self.signature.infix == other.signature.infix


def _group_symbols(sig: Signature) -> tuple[str, str, str]:
    bins = [o.sym for o in sig.ops if o.arity == 2]
    uns = [o.sym for o in sig.ops if o.arity == 1]
    consts = [o.sym for o in sig.ops if o.arity == 0]
    if len(sig.ops) != 3 or len(bins) != 1 or len(uns) != 1 or len(consts) != 1:
        raise AlgebraError("a group signature needs exactly one binary, one unary and one constant symbol")
    return bins[0], uns[0], consts[0]


def check_variety(H: FiniteAlgebra) -> None:
    """Exhaustively verify the identities demanded by the variety tag."""
    v = H.signature.variety
    if not v.is_group:
        return
    mul_s, inv_s, e_s = _group_symbols(H.signature)
    mul, inv, e = H.tables[mul_s], H.tables[inv_s], int(H.tables[e_s])
    idx = np.arange(H.size)

    def fail(what, *w):
        raise AlgebraError(f"identity violation ({what}) at {tuple(int(x) for x in w)}")

    assoc = mul[mul[:, :, None], idx[None, None, :]] == mul[idx[:, None, None], mul[None, :, :]]
    if not assoc.all():
        fail("associativity", *np.argwhere(~assoc)[0])
    for a in range(H.size):
        if mul[e, a] != a or mul[a, e] != a:
            fail("identity element", a)
        if mul[inv[a], a] != e or mul[a, inv[a]] != e:
            fail("inverse", a)
    if v.is_abelian and not (mul == mul.T).all():
        fail("commutativity", *np.argwhere(mul != mul.T)[0])
    if v.kind == "abelian_exponent_p":
        for a in range(H.size):
            x = a
            for _ in range(v.p - 1):
                x = int(mul[x, a])
            if x != e:
                fail(f"x^{v.p} = e", a)


# -- construction -------------------------------------------------------------


def group_from_table(name: str, mul: np.ndarray, variety: Variety | None = None) -> FiniteAlgebra:
    mul = np.asarray(mul, dtype=np.int64)
    m = mul.shape[0]
    e = next(a for a in range(m) if all(mul[a, b] == b == mul[b, a] for b in range(m)))
    inv = np.array([next(b for b in range(m) if mul[a, b] == e) for a in range(m)], dtype=np.int64)
    if variety is None:
        variety = Variety("abelian_group") if (mul == mul.T).all() else Variety("group")
    H = FiniteAlgebra(name, group_signature(variety), m, {"*": mul, "inv": inv, "e": np.int64(e)})
    check_variety(H)
    return H


def cyclic(n: int) -> FiniteAlgebra:
    if n < 1:
        raise LogeoError("cyclic(n) needs n >= 1")
    a = np.arange(n)
    return group_from_table(f"z{n}", (a[:, None] + a[None, :]) % n, Variety("abelian_group"))


def direct_product(H1: FiniteAlgebra, H2: FiniteAlgebra, name: str | None = None) -> FiniteAlgebra:
    """Componentwise tables; the pair (a, b) is encoded as a*|H2| + b."""
    if not H1.same_signature(H2):
        raise LogeoError("direct product needs a common signature")
    m1, m2 = H1.size, H2.size
    tables = {}
    for o in H1.signature.ops:
        t1, t2 = H1.tables[o.sym], H2.tables[o.sym]
        if o.arity == 0:
            tables[o.sym] = np.int64(int(t1) * m2 + int(t2))
            continue
        out = np.empty((m1 * m2,) * o.arity, dtype=np.int64)
        for args in itertools.product(range(m1 * m2), repeat=o.arity):
            a = tuple(x // m2 for x in args)
            b = tuple(x % m2 for x in args)
            out[args] = t1[a] * m2 + t2[b]
        tables[o.sym] = out
    v1, v2 = H1.signature.variety, H2.signature.variety
    if v1 == v2:
        variety = v1
    elif v1.is_abelian and v2.is_abelian:
        variety = Variety("abelian_group")
    elif v1.is_group and v2.is_group:
        variety = Variety("group")
    else:
        variety = Variety("generic")
    sig = H1.signature.with_variety(variety)
    H = FiniteAlgebra(name or f"{H1.name}x{H2.name}", sig, m1 * m2, tables)
    check_variety(H)
    return H


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


def elementary_abelian(p: int, m: int) -> FiniteAlgebra:
    if not is_prime(p):
        raise LogeoError(f"{p} is not prime")
    if m < 1:
        raise LogeoError("elementary_abelian needs m >= 1")
    H = cyclic(p)
    for _ in range(m - 1):
        H = direct_product(H, cyclic(p))
    sig = H.signature.with_variety(Variety("abelian_exponent_p", p))
    out = FiniteAlgebra(f"e{p}^{m}", sig, H.size, dict(H.tables))
    check_variety(out)
    return out


def _perm_group(name: str, perms: list[tuple[int, ...]]) -> FiniteAlgebra:
    # close under composition, then tabulate
    elems = [tuple(range(len(perms[0])))]
    seen = set(elems)
    frontier = list(elems)
    while frontier:
        nxt = []
        for a in frontier:
            for g in perms:
                c = tuple(g[i] for i in a)
                if c not in seen:
                    seen.add(c)
                    elems.append(c)
                    nxt.append(c)
        frontier = nxt
    pos = {p: i for i, p in enumerate(elems)}
    mul = np.array([[pos[tuple(b[i] for i in a)] for b in elems] for a in elems])
    return group_from_table(name, mul)


def dihedral(n: int) -> FiniteAlgebra:
    """Symmetries of the n-gon (order 2n)."""
    r = tuple((i + 1) % n for i in range(n))
    s = tuple((-i) % n for i in range(n))
    return _perm_group(f"d{n}", [r, s])


def symmetric(n: int) -> FiniteAlgebra:
    gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
    return _perm_group(f"s{n}", gens)


def quaternion() -> FiniteAlgebra:
    # unit quaternions +-1, +-i, +-j, +-k as (sign, unit) with unit in 1,i,j,k
    units = {("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
             ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
             ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
             ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1")}
    elems = [(s, u) for u in "1ijk" for s in (1, -1)]
    pos = {x: i for i, x in enumerate(elems)}

    def mult(a, b):
        s, u = units[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    return group_from_table("q8", np.array([[pos[mult(a, b)] for b in elems] for a in elems]))


_MENU_FIXED = {"q8": quaternion, "s3": lambda: symmetric(3), "d4": lambda: dihedral(4), "d3": lambda: dihedral(3)}

GROUPS_UP_TO_8 = (
    "z1", "z2", "z3", "z4", "z2xz2", "z5", "z6", "z2xz3", "s3",
    "z7", "z8", "z2xz4", "z2xz2xz2", "d4", "q8",
)  # fmt: skip

GROUPS_UP_TO_6 = GROUPS_UP_TO_8[:9]


def menu_algebra(name: str) -> FiniteAlgebra:
    """Bundled algebras: z<n>, products like z2xz4, e<p>^<m>, s3, d3, d4, q8."""
    key = name.strip().lower()
    if key in _MENU_FIXED:
        return _MENU_FIXED[key]()
    m = re.fullmatch(r"e(\d+)\^(\d+)", key)
    if m:
        return elementary_abelian(int(m.group(1)), int(m.group(2)))
    parts = key.split("x")
    if all(re.fullmatch(r"z\d+", p) for p in parts):
        H = cyclic(int(parts[0][1:]))
        for p in parts[1:]:
            H = direct_product(H, cyclic(int(p[1:])))
        return H
    raise LogeoError(f"unknown algebra {name!r}")


# -- algebra documents ------------------------------------------------------


def load_algebra(doc) -> FiniteAlgebra:
    """Build and validate an algebra from a parsed JSON document (or a JSON string)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    if not isinstance(doc, dict):
        raise AlgebraError("algebra document must be a JSON object")
    try:
        name = doc["name"]
        sig_doc = doc["signature"]
        carrier = doc["carrier"]
        tables_doc = doc["tables"]
    except KeyError as exc:
        raise AlgebraError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(carrier, int) or carrier < 1:
        raise AlgebraError("carrier must be a positive integer")
    variety = _parse_variety(doc.get("variety", "generic"))
    try:
        ops = tuple(OpSym(str(o["sym"]), int(o["arity"])) for o in sig_doc["ops"])
        sig = Signature(name, ops, sig_doc.get("infix"), variety)
    except (KeyError, TypeError, ValueError) as exc:
        raise AlgebraError(f"bad signature: {exc}") from None
    tables = {}
    for o in ops:
        if o.sym not in tables_doc:
            raise AlgebraError(f"missing table for {o.sym!r}")
        raw = tables_doc[o.sym]
        try:
            arr = np.array(raw, dtype=np.int64)
        except (ValueError, TypeError):
            raise AlgebraError(f"table for {o.sym!r} is not total (ragged or non-integer)") from None
        if arr.shape != (carrier,) * o.arity:
            raise AlgebraError(f"table for {o.sym!r} is not total: shape {arr.shape}")
        tables[o.sym] = arr
    H = FiniteAlgebra(name, sig, carrier, tables)
    check_variety(H)
    return H


def _parse_variety(v) -> Variety:
    if isinstance(v, dict) and set(v) == {"abelian_exponent_p"}:
        return Variety("abelian_exponent_p", int(v["abelian_exponent_p"]))
    if v in ("generic", "group", "abelian_group"):
        return Variety(v)
    raise AlgebraError(f"unknown variety {v!r}")


def algebra_to_json(H: FiniteAlgebra) -> dict:
    sig = H.signature
    d = {"name": H.name, "signature": {"ops": [{"sym": o.sym, "arity": o.arity} for o in sig.ops]}}
    if sig.infix is not None:
        d["signature"]["infix"] = sig.infix
    d["variety"] = sig.variety.to_json()
    d["carrier"] = H.size
    d["tables"] = {o.sym: H.tables[o.sym].tolist() for o in sig.ops}
    return d


# -- subalgebras and atomic kernels -----------------------------------------


def subalgebra_generate(H: FiniteAlgebra, generators: Iterable[int]) -> frozenset[int]:
    S = set(int(g) for g in generators)
    for g in S:
        if not 0 <= g < H.size:
            raise LogeoError(f"generator {g} outside carrier")
    S |= {H.constant(c) for c in H.signature.constants}
    ops = [(sym, ar, flat) for sym, ar, flat in H._flat if ar > 0]
    m = H.size
    frontier = set(S)
    while frontier:
        new = set()
        elems = sorted(S)
        for sym, ar, flat in ops:
            for args in itertools.product(elems, repeat=ar):
                if not frontier.intersection(args):
                    continue
                i = 0
                for a in args:
                    i = i * m + a
                r = flat[i]
                if r not in S:
                    new.add(r)
        S |= new
        frontier = new
    return frozenset(S)


@dataclass(frozen=True)
class Discovery:
    """Canonical walk through the subalgebra generated by a tuple.

    Elements are numbered in order of discovery (constants, then the tuple,
    then closure under the operations in a fixed index order).  Two tuples
    produce the same ``key`` exactly when a_i -> b_i extends to an isomorphism
    of the generated subalgebras."""

    elements: tuple[int, ...]
    origins: tuple  # per element: ("const", sym) | ("var", i) | ("op", sym, arg indices)
    seeds: tuple[int, ...]  # element index of each tuple coordinate
    records: tuple  # ((sym, arg indices), result index) in enumeration order

    @property
    def key(self):
        return (self.seeds, tuple(r for _, r in self.records))


def discover(H: FiniteAlgebra, tup: Sequence[int]) -> Discovery:
    m = H.size
    elems: list[int] = []
    pos: dict[int, int] = {}
    origins: list = []

    def add(el, origin):
        i = pos.get(el)
        if i is None:
            i = pos[el] = len(elems)
            elems.append(el)
            origins.append(origin)
        return i

    for sym, ar, flat in H._flat:
        if ar == 0:
            add(flat[0], ("const", sym))
    seeds = tuple(add(int(a), ("var", i)) for i, a in enumerate(tup))
    records = []
    ops = [(sym, ar, flat) for sym, ar, flat in H._flat if ar > 0]
    k = 0
    while k < len(elems):
        for sym, ar, flat in ops:
            for args in _tuples_with_max(k, ar):
                i = 0
                for a in args:
                    i = i * m + elems[a]
                r = add(flat[i], ("op", sym, args))
                records.append(((sym, args), r))
        k += 1
    return Discovery(tuple(elems), tuple(origins), seeds, tuple(records))


def _tuples_with_max(k: int, arity: int):
    for args in itertools.product(range(k + 1), repeat=arity):
        if k in args:
            yield args


def kernel_key(H: FiniteAlgebra, tup: Sequence[int]):
    """Hashable invariant of Ker(mu) for the point with coordinates ``tup``;
    comparable across algebras of one signature."""
    tup = tuple(int(a) for a in tup)
    cache = H._kcache
    k = cache.get(tup)
    if k is None:
        k = cache[tup] = discover(H, tup).key
    return k


def graph_is_isomorphism(H1: FiniteAlgebra, H2: FiniteAlgebra, pairs) -> bool:
    """Close the pairs (and paired constants) under the operations of H1 x H2;
    true iff the closure is the graph of a bijection."""
    if not H1.same_signature(H2):
        raise LogeoError("graph_is_isomorphism needs a common signature")
    P = {(int(a), int(b)) for a, b in pairs}
    for c in H1.signature.constants:
        P.add((H1.constant(c), H2.constant(c)))
    ops = [o for o in H1.signature.ops if o.arity > 0]
    frontier = set(P)
    while frontier:
        new = set()
        cur = list(P)
        for o in ops:
            t1, t2 = H1.tables[o.sym], H2.tables[o.sym]
            for args in itertools.product(cur, repeat=o.arity):
                if not frontier.intersection(args):
                    continue
                pr = (int(t1[tuple(a for a, _ in args)]), int(t2[tuple(b for _, b in args)]))
                if pr not in P:
                    new.add(pr)
        P |= new
        frontier = new
    firsts = {a for a, _ in P}
    seconds = {b for _, b in P}
    return len(firsts) == len(P) == len(seconds)


# -- automorphisms and isomorphisms -----------------------------------------


def generating_set(H: FiniteAlgebra) -> tuple[int, ...]:
    """A small generating set, chosen greedily."""
    gens: list[int] = []
    S = subalgebra_generate(H, [])
    while len(S) < H.size:
        best, best_S = None, None
        for a in range(H.size):
            if a in S:
                continue
            T = subalgebra_generate(H, gens + [a])
            if best_S is None or len(T) > len(best_S):
                best, best_S = a, T
        gens.append(best)
        S = best_S
    return tuple(gens)


class _Prefix:
    """The subalgebra generated by a prefix of the generators, with the data
    needed to test a candidate image map on it."""

    def __init__(self, H: FiniteAlgebra, gens: Sequence[int]):
        d = discover(H, gens)
        self.origins = d.origins
        elems = np.array(d.elements, dtype=np.int64)
        pos = np.full(H.size, -1, dtype=np.int64)
        pos[elems] = np.arange(len(elems))
        self.n = len(elems)
        self.elements = d.elements
        self.tables = {}
        for o in H.signature.ops:
            t = H.tables[o.sym]
            self.tables[o.sym] = pos[t[np.ix_(*[elems] * o.arity)]] if o.arity else pos[int(t)]

    def image(self, H2: FiniteAlgebra, targets: Sequence[int]) -> np.ndarray | None:
        """Extend generators -> targets along the discovery order; None unless
        the extension is an injective homomorphism on this subalgebra."""
        img = [0] * self.n
        flat = {sym: (ar, f) for sym, ar, f in H2._flat}
        m = H2.size
        for j, origin in enumerate(self.origins):
            if origin[0] == "const":
                img[j] = flat[origin[1]][1][0]
            elif origin[0] == "var":
                img[j] = targets[origin[1]]
            else:
                i = 0
                for a in origin[2]:
                    i = i * m + img[a]
                img[j] = flat[origin[1]][1][i]
        if len(set(img)) != self.n:
            return None
        arr = np.array(img, dtype=np.int64)
        for sym, sub in self.tables.items():
            t2 = H2.tables[sym]
            if sub.ndim == 0:
                ok = arr[int(sub)] == int(t2)
            else:
                ok = (arr[sub] == t2[np.ix_(*[arr] * sub.ndim)]).all()
            if not ok:
                return None
        return arr


def _search_images(H1: FiniteAlgebra, H2: FiniteAlgebra, first_only: bool):
    if H1.size != H2.size or not H1.same_signature(H2):
        return []
    gens = generating_set(H1)
    prefixes = [_Prefix(H1, gens[: i + 1]) for i in range(len(gens))]
    # candidates are filtered by the one-generator invariant
    cands = [[b for b in range(H2.size) if kernel_key(H2, (b,)) == kernel_key(H1, (g,))] for g in gens]
    found = []

    def rec(prefix):
        i = len(prefix)
        for b in cands[i]:
            nxt = prefix + (b,)
            img = prefixes[i].image(H2, nxt)
            if img is None:
                continue
            if i + 1 == len(gens):
                perm = np.empty(H1.size, dtype=np.int64)
                perm[list(prefixes[i].elements)] = img
                found.append(tuple(int(x) for x in perm))
                if first_only:
                    return True
            elif rec(nxt):
                return True
        return False

    if not gens:
        # the constants already generate everything
        img = _Prefix(H1, ()).image(H2, ())
        if img is not None:
            perm = np.empty(H1.size, dtype=np.int64)
            perm[list(_Prefix(H1, ()).elements)] = img
            found.append(tuple(int(x) for x in perm))
        return found
    rec(())
    return found


@dataclass(frozen=True)
class AutGroup:
    algebra: FiniteAlgebra
    perms: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.perms)

    def __iter__(self):
        return iter(self.perms)

    def as_array(self) -> np.ndarray:
        return np.array(self.perms, dtype=np.int64).reshape(len(self.perms), self.algebra.size)


def automorphisms(H: FiniteAlgebra) -> AutGroup:
    get_guards().check_carrier(H.size)
    cached = getattr(H, "_aut", None)
    if cached is None:
        perms = sorted(_search_images(H, H, first_only=False))
        cached = AutGroup(H, tuple(perms))
        object.__setattr__(H, "_aut", cached)
    return cached


def is_automorphism(H: FiniteAlgebra, perm: Sequence[int]) -> bool:
    p = np.asarray(perm, dtype=np.int64)
    if sorted(p.tolist()) != list(range(H.size)):
        return False
    for o in H.signature.ops:
        t = H.tables[o.sym]
        if o.arity == 0:
            if p[int(t)] != int(t):
                return False
            continue
        grids = np.indices((H.size,) * o.arity)
        lhs = p[t]
        rhs = t[tuple(p[g] for g in grids)]
        if not (lhs == rhs).all():
            return False
    return True


def isomorphic(H1: FiniteAlgebra, H2: FiniteAlgebra) -> tuple[int, ...] | None:
    """A witnessing isomorphism H1 -> H2 as a permutation list, or None."""
    get_guards().check_carrier(max(H1.size, H2.size))
    found = _search_images(H1, H2, first_only=True)
    return found[0] if found else None
