"""Randomized checks of the laws of the extended Boolean algebras
Bool(W(X), H) and of the substitution maps s_* between them.

Every law here is a theorem about the set semantics, so any violation is an
implementation bug.  Instances are drawn from a seeded ``random.Random``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import FiniteAlgebra, menu_algebra
from .errors import LogeoError
from .formula import (
    And,
    Equality,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Subst,
    format_formula,
    holds_at,
    value,
)
from .geometry import FormulaSystem, elementary_set
from .signature import App, Substitution, Term, Var, VarSort, apply_substitution_term, compose, single_substitution
from .space import Point, PointSet, eval_point, exists_x, forall_x, point_values, sstar_pointset

DEFAULT_ALGEBRAS = ("z2", "z4", "z2xz2", "s3", "q8")
MAX_POINTS = 4096


# -- random syntax ------------------------------------------------------------


def random_term(rng: random.Random, H: FiniteAlgebra, sort: VarSort, size: int = 3) -> Term:
    sig = H.signature
    if size <= 1 or rng.random() < 0.25:
        pool = [Var(v) for v in sort] + [App(c) for c in sig.constants]
        return rng.choice(pool)
    op = rng.choice([o for o in sig.ops if o.arity > 0])
    budget = max(1, (size - 1) // op.arity)
    return App(op.sym, tuple(random_term(rng, H, sort, budget) for _ in range(op.arity)))


def random_substitution(rng: random.Random, H: FiniteAlgebra, source: VarSort, target: VarSort) -> Substitution:
    return Substitution(source, target, tuple(random_term(rng, H, target, 3) for _ in source))


def random_formula(
    rng: random.Random, H: FiniteAlgebra, sort: VarSort, depth: int = 3, pool: Sequence[VarSort] = ()
) -> Formula:
    """A formula over ``sort``; Subst nodes pull formulas back from sorts in ``pool``."""
    if depth <= 0 or rng.random() < 0.2:
        return Equality(random_term(rng, H, sort), random_term(rng, H, sort))
    kind = rng.choice(["not", "and", "or", "E", "A", "subst"] if pool else ["not", "and", "or", "E", "A"])
    sub = lambda: random_formula(rng, H, sort, depth - 1, pool)  # noqa: E731
    match kind:
        case "not":
            return Not(sub())
        case "and":
            return And(sub(), sub())
        case "or":
            return Or(sub(), sub())
        case "E":
            return Exists(rng.choice(sort.vars), sub())
        case "A":
            return Forall(rng.choice(sort.vars), sub())
    src = rng.choice(list(pool))
    s = random_substitution(rng, H, src, sort)
    return Subst(s, random_formula(rng, H, src, depth - 1, ()))


def random_set(rng: random.Random, H: FiniteAlgebra, sort: VarSort) -> PointSet:
    n = H.size ** len(sort)
    density = rng.choice([0.1, 0.3, 0.5, 0.8])
    bits = np.array([rng.random() < density for _ in range(n)], dtype=bool)
    return PointSet(sort, H, bits)


# -- the suite ------------------------------------------------------------------


@dataclass
class AxiomResult:
    name: str
    instances: int = 0
    violations: int = 0
    example: str | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {"axiom": self.name, "instances": self.instances, "violations": self.violations, "example": self.example}


@dataclass
class AxiomReport:
    seed: int
    samples: int
    algebras: list[str]
    results: list[AxiomResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "samples": self.samples,
            "algebras": self.algebras,
            "ok": self.ok,
            "results": [r.to_json() for r in self.results],
        }


class _Ctx:
    """One random instance: an algebra, a sort X and a second sort Y."""

    def __init__(self, rng: random.Random, algebras: Sequence[FiniteAlgebra], min_vars: int = 1, max_vars: int = 3):
        self.rng = rng
        sizes = range(min_vars, max(min_vars, max_vars) + 1)
        choices = [(H, n) for H in algebras for n in sizes if H.size**n <= MAX_POINTS]
        if not choices:
            raise LogeoError(f"no algebra has |H|^{min_vars} <= {MAX_POINTS}")
        self.H, n = rng.choice(choices)
        self.X = VarSort(tuple(f"x{i + 1}" for i in range(n)))
        k = rng.choice([k for k in (1, 2, 3) if self.H.size**k <= MAX_POINTS])
        self.Y = VarSort(tuple(f"y{i + 1}" for i in range(k)))

    def set(self, sort=None):
        return random_set(self.rng, self.H, sort or self.X)

    def var(self, sort=None):
        return self.rng.choice((sort or self.X).vars)

    def term(self, sort=None, size=3):
        return random_term(self.rng, self.H, sort or self.X, size)

    def subst(self, source=None, target=None):
        return random_substitution(self.rng, self.H, source or self.X, target or self.Y)

    def formula(self, sort=None, depth=3):
        sort = sort or self.X
        other = self.Y if sort is self.X else self.X
        return random_formula(self.rng, self.H, sort, depth, (other,))

    def value(self, w1, w2, sort=None):
        return value(Equality(w1, w2), self.H, sort or self.X)


Check = Callable[[_Ctx], "tuple[bool, str] | bool"]
_CHECKS: list[tuple[str, int, Check]] = []


def _axiom(name: str, min_vars: int = 1):
    def deco(fn: Check) -> Check:
        _CHECKS.append((name, min_vars, fn))
        return fn

    return deco


@_axiom("exists-empty")
def _(c):
    x = c.var()
    return exists_x(PointSet.empty(c.X, c.H), x).is_empty()


@_axiom("exists-extensive")
def _(c):
    A, x = c.set(), c.var()
    return A <= exists_x(A, x)


@_axiom("exists-meet")
def _(c):
    A, B, x = c.set(), c.set(), c.var()
    return exists_x(A & exists_x(B, x), x) == exists_x(A, x) & exists_x(B, x)


@_axiom("forall-full")
def _(c):
    return forall_x(PointSet.full(c.X, c.H), c.var()).is_full()


@_axiom("forall-reductive")
def _(c):
    A, x = c.set(), c.var()
    return forall_x(A, x) <= A


@_axiom("forall-join")
def _(c):
    A, B, x = c.set(), c.set(), c.var()
    return forall_x(A | forall_x(B, x), x) == forall_x(A, x) | forall_x(B, x)


@_axiom("exists-commute", min_vars=2)
def _(c):
    A = c.set()
    x, y = c.rng.sample(list(c.X.vars), 2)
    return exists_x(exists_x(A, y), x) == exists_x(exists_x(A, x), y)


@_axiom("equality-unit")
def _(c):
    w = c.term()
    return c.value(w, w).is_full()


@_axiom("equality-compatible")
def _(c):
    op = c.rng.choice([o for o in c.H.signature.ops if o.arity > 0])
    ws = [c.term() for _ in range(op.arity)]
    vs = [c.term() for _ in range(op.arity)]
    lhs = PointSet.full(c.X, c.H)
    for w, v in zip(ws, vs):
        lhs = lhs & c.value(w, v)
    return lhs <= c.value(App(op.sym, tuple(ws)), App(op.sym, tuple(vs)))


@_axiom("subst-agree-off-x")
def _(c):
    # s1 and s2 differ only at x, so s1_* Ex A = s2_* Ex A
    A, x = c.set(), c.var()
    s1 = c.subst()
    images = tuple(c.term(c.Y) if v == x else s1(v) for v in c.X)
    s2 = Substitution(c.X, c.Y, images)
    B = exists_x(A, x)
    return sstar_pointset(s1, B) == sstar_pointset(s2, B)


@_axiom("subst-exists-commute")
def _(c):
    # s x = y a variable that no other image s x' mentions
    A, x = c.set(), c.var()
    y = c.var(c.Y)
    others = [v for v in c.Y.vars if v != y]
    images = []
    for v in c.X:
        if v == x:
            images.append(Var(y))
        elif others:
            images.append(random_term(c.rng, c.H, VarSort(tuple(others)), 3))
        else:
            images.append(App(c.rng.choice(c.H.signature.constants)))
    s = Substitution(c.X, c.Y, tuple(images))
    return sstar_pointset(s, exists_x(A, x)) == exists_x(sstar_pointset(s, A), y)


@_axiom("subst-equality")
def _(c):
    w1, w2, s = c.term(), c.term(), c.subst()
    lhs = sstar_pointset(s, c.value(w1, w2))
    return lhs == c.value(apply_substitution_term(s, w1), apply_substitution_term(s, w2), c.Y)


@_axiom("subst-replace-equal")
def _(c):
    A, x = c.set(), c.var()
    w, w2 = c.term(), c.term()
    sw, sw2 = single_substitution(x, w, c.X), single_substitution(x, w2, c.X)
    return sstar_pointset(sw, A) & c.value(w, w2) <= sstar_pointset(sw2, A)


@_axiom("subst-boolean")
def _(c):
    A, B, s = c.set(), c.set(), c.subst()
    f = lambda S: sstar_pointset(s, S)  # noqa: E731
    return f(A | B) == f(A) | f(B) and f(A & B) == f(A) & f(B) and f(~A) == ~f(A)


@_axiom("subst-functor")
def _(c):
    A = c.set()
    s, t = c.subst(c.X, c.Y), c.subst(c.Y, c.X)
    composed = sstar_pointset(compose(t, s), A)
    ident = sstar_pointset(Substitution.identity(c.X), A)
    return composed == sstar_pointset(t, sstar_pointset(s, A)) and ident == A


@_axiom("value-pointwise")
def _(c):
    u, s = c.formula(), c.subst()
    lhs = value(Subst(s, u), c.H, c.Y)
    if lhs != sstar_pointset(s, value(u, c.H, c.X)):
        return False, format_formula(u, c.H.signature)
    m = c.H.size
    for _ in range(8):
        idx = c.rng.randrange(m ** len(c.Y))
        mu = Point(c.Y, point_values(idx, m, len(c.Y)))
        if holds_at(Subst(s, u), mu, c.H) != (mu in lhs):
            return False, format_formula(u, c.H.signature)
    return True


@_axiom("elementary-subst")
def _(c):
    T = [c.formula(depth=2) for _ in range(c.rng.randint(0, 3))]
    s = c.subst()
    lhs = elementary_set(FormulaSystem(c.Y, tuple(Subst(s, u) for u in T)), c.H)
    return lhs == sstar_pointset(s, elementary_set(FormulaSystem(c.X, tuple(T)), c.H))


@_axiom("lker-subst")
def _(c):
    u, s = c.formula(depth=2), c.subst()
    m = c.H.size
    mu = Point(c.Y, point_values(c.rng.randrange(m ** len(c.Y)), m, len(c.Y)))
    mu_s = Point(c.X, tuple(eval_point(w, mu, c.H) for w in s.images))
    if mu_s in value(u, c.H, c.X):
        return mu in value(Subst(s, u), c.H, c.Y)
    return True


def axiom_names() -> list[str]:
    return [name for name, _, _ in _CHECKS]


def run_axioms(
    algebras: Sequence[FiniteAlgebra | str] = DEFAULT_ALGEBRAS,
    samples: int = 500,
    seed: int = 0,
    only: Sequence[str] | None = None,
    max_vars: int = 3,
) -> AxiomReport:
    """``samples`` instances per law; sorts have between 1 (2 for laws that
    need two variables) and ``max_vars`` variables."""
    algs = [menu_algebra(a) if isinstance(a, str) else a for a in algebras]
    report = AxiomReport(seed, samples, [H.name for H in algs])
    for name, min_vars, check in _CHECKS:
        if only is not None and name not in only:
            continue
        rng = random.Random(f"{seed}:{name}")
        res = AxiomResult(name)
        for _ in range(samples):
            ctx = _Ctx(rng, algs, min_vars, max_vars)
            out = check(ctx)
            ok, detail = out if isinstance(out, tuple) else (bool(out), None)
            res.instances += 1
            if not ok:
                res.violations += 1
                if res.example is None:
                    res.example = f"{ctx.H.name} over {ctx.X}" + (f": {detail}" if detail else "")
        report.results.append(res)
    return report
