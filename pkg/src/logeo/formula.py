"""Formulas of Phi(X): equalities, Boolean connectives, quantifiers and
substitution nodes, with the value map into Bool(W(X), H).

Nodes do not carry their sort; every operation that needs one takes it
explicitly.  A ``Subst`` node knows its inner sort through ``s.source`` and
its outer sort through ``s.target``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from .algebra import FiniteAlgebra
from .errors import LogeoError, ParseError, SortError
from .signature import (
    App,
    Signature,
    Substitution,
    Term,
    TokenStream,
    Var,
    VarSort,
    check_term,
    format_term,
    parse_term_tokens,
    term_vars,
    terms_up_to_depth,
    tokenize,
)
from .space import (
    Point,
    PointSet,
    equality_value,
    eval_point,
    exists_x,
    forall_x,
    sstar_pointset,
)


@dataclass(frozen=True)
class Equality:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Subst:
    s: Substitution
    body: "Formula"


Formula = Equality | Not | And | Or | Exists | Forall | Subst


def conj(parts: Iterable[Formula], true: Formula | None = None) -> Formula:
    parts = list(parts)
    if not parts:
        if true is None:
            raise LogeoError("empty conjunction needs an explicit tautology")
        return true
    return reduce(And, parts)


def disj(parts: Iterable[Formula], false: Formula | None = None) -> Formula:
    parts = list(parts)
    if not parts:
        if false is None:
            raise LogeoError("empty disjunction needs an explicit contradiction")
        return false
    return reduce(Or, parts)


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def tautology(sig: Signature, sort: VarSort) -> Formula:
    t = App(sig.constants[0]) if sig.constants else Var(sort.vars[0])
    return Equality(t, t)


# -- structure --------------------------------------------------------------


def free_vars(u: Formula) -> set[str]:
    match u:
        case Equality(l, r):
            return term_vars(l) | term_vars(r)
        case Not(a):
            return free_vars(a)
        case And(a, b) | Or(a, b):
            return free_vars(a) | free_vars(b)
        case Exists(x, b) | Forall(x, b):
            return free_vars(b) - {x}
        case Subst(s, b):
            out: set[str] = set()
            for v in free_vars(b):
                out |= term_vars(s(v))
            return out
    raise TypeError(f"not a formula: {u!r}")


def is_closed(u: Formula) -> bool:
    return not free_vars(u)


def in_phi0(u: Formula) -> bool:
    """Syntactic membership in the substitution-free fragment."""
    match u:
        case Equality():
            return True
        case Not(a) | Exists(_, a) | Forall(_, a):
            return in_phi0(a)
        case And(a, b) | Or(a, b):
            return in_phi0(a) and in_phi0(b)
    return False


def outer_vars(u: Formula) -> list[str]:
    """Variables of u's own sort that occur in u, in order of first occurrence."""
    seen: dict[str, None] = {}

    def walk_term(t):
        if isinstance(t, Var):
            seen.setdefault(t.name)
        else:
            for a in t.args:
                walk_term(a)

    def walk(f):
        match f:
            case Equality(l, r):
                walk_term(l)
                walk_term(r)
            case Not(a):
                walk(a)
            case And(a, b) | Or(a, b):
                walk(a)
                walk(b)
            case Exists(x, b) | Forall(x, b):
                seen.setdefault(x)
                walk(b)
            case Subst(s, _):
                for t in s.images:
                    walk_term(t)

    walk(u)
    return list(seen)


def check_formula(u: Formula, sig: Signature, sort: VarSort) -> None:
    match u:
        case Equality(l, r):
            check_term(l, sig, sort)
            check_term(r, sig, sort)
        case Not(a):
            check_formula(a, sig, sort)
        case And(a, b) | Or(a, b):
            check_formula(a, sig, sort)
            check_formula(b, sig, sort)
        case Exists(x, b) | Forall(x, b):
            if x not in sort:
                raise SortError(f"quantified variable {x!r} not in sort {sort}")
            check_formula(b, sig, sort)
        case Subst(s, b):
            if s.target != sort:
                raise SortError(f"substitution lands in {s.target}, expected {sort}")
            for t in s.images:
                check_term(t, sig, sort)
            check_formula(b, sig, s.source)
        case _:
            raise TypeError(f"not a formula: {u!r}")


def formula_depth(u: Formula) -> int:
    match u:
        case Equality():
            return 1
        case Not(a) | Exists(_, a) | Forall(_, a) | Subst(_, a):
            return 1 + formula_depth(a)
        case And(a, b) | Or(a, b):
            return 1 + max(formula_depth(a), formula_depth(b))
    raise TypeError(f"not a formula: {u!r}")


# -- printing ---------------------------------------------------------------

_PREC = {Or: 1, And: 2}


def format_formula(u: Formula, sig: Signature) -> str:
    match u:
        case Equality(l, r):
            return f"{format_term(l, sig)} == {format_term(r, sig)}"
        case Not(a):
            return f"!({format_formula(a, sig)})"
        case And(a, b) | Or(a, b):
            op = " & " if isinstance(u, And) else " | "
            p = _PREC[type(u)]
            left = format_formula(a, sig)
            right = format_formula(b, sig)
            if isinstance(a, (Exists, Forall)) or (type(a) in _PREC and _PREC[type(a)] < p):
                left = f"({left})"
            if isinstance(b, (Exists, Forall)) or (type(b) in _PREC and _PREC[type(b)] <= p):
                right = f"({right})"
            return left + op + right
        case Exists(x, b):
            return f"E {x}. {format_formula(b, sig)}"
        case Forall(x, b):
            return f"A {x}. {format_formula(b, sig)}"
        case Subst(s, b):
            maps = ", ".join(f"{v} := {format_term(t, sig)}" for v, t in zip(s.source, s.images))
            return f"subst[{maps}]({format_formula(b, sig)})"
    raise TypeError(f"not a formula: {u!r}")


# -- parsing ----------------------------------------------------------------


def parse_formula(text: str, sig: Signature, sort: VarSort) -> Formula:
    """Parse ``text`` as a formula over ``sort``.

    Grammar: quantifiers ``E v.`` / ``A v.`` scope to the end or the closing
    parenthesis; then ``->`` (right associative), ``|``, ``&``, unary ``!``;
    atoms ``t == t'`` and ``t != t'``; ``subst[v := t, ...](formula)`` where
    the bracketed variables form the inner sort."""
    ts = TokenStream(tokenize(text, sig), text)
    u = _Parser(ts, sig).formula(sort)
    if ts.peek.kind != "end":
        raise ts.error(f"trailing input {ts.peek.text!r}")
    return u


class _Parser:
    def __init__(self, ts: TokenStream, sig: Signature):
        self.ts = ts
        self.sig = sig

    def formula(self, sort):
        left = self.disj(sort)
        if self.ts.accept("->"):
            return implies(left, self.formula(sort))
        return left

    def disj(self, sort):
        left = self.conj(sort)
        while self.ts.accept("|"):
            left = Or(left, self.conj(sort))
        return left

    def conj(self, sort):
        left = self.unary(sort)
        while self.ts.accept("&"):
            left = And(left, self.unary(sort))
        return left

    def unary(self, sort):
        ts = self.ts
        if ts.accept("!"):
            return Not(self.unary(sort))
        tok = ts.peek
        if (
            tok.kind == "ident"
            and tok.text in ("E", "A")
            and ts.peek_at(1).kind == "ident"
            and ts.peek_at(2).text == "."
        ):
            ts.next()
            var = ts.next()
            ts.expect(".")
            if var.text not in sort:
                raise SortError(f"quantified variable {var.text!r} not in sort {sort} (position {var.pos})")
            body = self.formula(sort)
            return Exists(var.text, body) if tok.text == "E" else Forall(var.text, body)
        if tok.kind == "ident" and tok.text == "subst" and ts.peek_at(1).text == "[":
            return self.subst(sort)
        if tok.kind == "punct" and tok.text == "(":
            save = ts.i
            try:
                ts.next()
                u = self.formula(sort)
                ts.expect(")")
                if ts.peek.text not in ("==", "!=") and ts.peek.kind != "infix":
                    return u
            except (ParseError, SortError):
                pass
            ts.i = save
        return self.atom(sort)

    def atom(self, sort):
        ts = self.ts
        left = parse_term_tokens(ts, self.sig, sort)
        if ts.accept("=="):
            return Equality(left, parse_term_tokens(ts, self.sig, sort))
        if ts.accept("!="):
            return Not(Equality(left, parse_term_tokens(ts, self.sig, sort)))
        raise ts.error(f"expected '==' or '!=', found {ts.peek.text or 'end of input'!r}")

    def subst(self, sort):
        ts = self.ts
        ts.next()
        ts.expect("[")
        names: list[str] = []
        images: list[Term] = []
        while True:
            tok = ts.next()
            if tok.kind != "ident":
                raise ParseError("expected a variable in subst brackets", tok.pos, ts.text)
            if tok.text in names:
                raise SortError(f"variable {tok.text!r} mapped twice in subst brackets (position {tok.pos})")
            ts.expect(":=")
            try:
                images.append(parse_term_tokens(ts, self.sig, sort))
            except SortError as exc:
                raise SortError(f"sort mismatch inside subst brackets: {exc}") from None
            names.append(tok.text)
            if not ts.accept(","):
                break
        ts.expect("]")
        ts.expect("(")
        inner = VarSort(tuple(names))
        body = self.formula(inner)
        ts.expect(")")
        return Subst(Substitution(inner, sort, tuple(images)), body)


# -- semantics --------------------------------------------------------------


def value(u: Formula, H: FiniteAlgebra, sort: VarSort) -> PointSet:
    """Val^X_H(u) by structural recursion."""
    match u:
        case Equality(l, r):
            return equality_value(l, r, sort, H)
        case Not(a):
            return ~value(a, H, sort)
        case And(a, b):
            return value(a, H, sort) & value(b, H, sort)
        case Or(a, b):
            return value(a, H, sort) | value(b, H, sort)
        case Exists(x, b):
            return exists_x(value(b, H, sort), x)
        case Forall(x, b):
            return forall_x(value(b, H, sort), x)
        case Subst(s, b):
            if s.target != sort:
                raise SortError(f"substitution lands in {s.target}, expected {sort}")
            return sstar_pointset(s, value(b, H, s.source))
    raise TypeError(f"not a formula: {u!r}")


def holds_at(u: Formula, mu: Point, H: FiniteAlgebra) -> bool:
    """Tarskian evaluation at one point, independent of the set-valued path."""
    match u:
        case Equality(l, r):
            return eval_point(l, mu, H) == eval_point(r, mu, H)
        case Not(a):
            return not holds_at(a, mu, H)
        case And(a, b):
            return holds_at(a, mu, H) and holds_at(b, mu, H)
        case Or(a, b):
            return holds_at(a, mu, H) or holds_at(b, mu, H)
        case Exists(x, b) | Forall(x, b):
            i = mu.sort.index(x)
            results = (
                holds_at(b, Point(mu.sort, mu.values[:i] + (a,) + mu.values[i + 1 :]), H)
                for a in range(H.size)
            )
            return any(results) if isinstance(u, Exists) else all(results)
        case Subst(s, b):
            nu = Point(s.source, tuple(eval_point(t, mu, H) for t in s.images))
            return holds_at(b, nu, H)
    raise TypeError(f"not a formula: {u!r}")


def lker_contains(mu: Point, u: Formula, H: FiniteAlgebra) -> bool:
    """u in LKer(mu)."""
    return mu in value(u, H, mu.sort)


def closed_sort(u: Formula, sort: VarSort | None = None) -> VarSort:
    if sort is not None:
        return sort
    names = outer_vars(u)
    if not names:
        raise SortError("cannot infer a sort for a formula without variables")
    return VarSort(tuple(names))


def in_theory(u: Formula, H: FiniteAlgebra, sort: VarSort | None = None) -> bool:
    """u in Th^X(H) for a closed u."""
    if not is_closed(u):
        raise SortError(f"formula has free variables {sorted(free_vars(u))}")
    return value(u, H, closed_sort(u, sort)).is_full()


# -- atomic kernel windows ----------------------------------------------------


def kernel_window(mu: Point, H: FiniteAlgebra, depth: int) -> tuple[list[Equality], list[Equality]]:
    """Equalities between distinct terms of depth <= ``depth`` split into the
    ones mu satisfies and the ones it violates."""
    if depth < 1:
        raise LogeoError("depth bound must be at least 1")
    terms = terms_up_to_depth(H.signature, mu.sort, depth)
    vals = [eval_point(t, mu, H) for t in terms]
    sat, unsat = [], []
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            (sat if vals[i] == vals[j] else unsat).append(Equality(terms[i], terms[j]))
    return sat, unsat


def kernel_of_point_restricted(mu: Point, H: FiniteAlgebra, depth: int) -> frozenset[Equality]:
    return frozenset(kernel_window(mu, H, depth)[0])


def formulas_from_lines(lines: Sequence[str], sig: Signature, sort: VarSort) -> list[Formula]:
    """Batch format: one formula per line, '#' starts a comment."""
    out = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse_formula(line, sig, sort))
    return out
