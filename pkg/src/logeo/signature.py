"""Signatures, variable sorts, terms of W(X) and substitutions between sorts.

Terms are plain syntax trees. Nothing here knows about algebras; whether two
terms are "equal" is always decided by evaluating them in some finite algebra.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import ParseError, SortError

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Variety:
    kind: str = "generic"  # generic | group | abelian_group | abelian_exponent_p
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("generic", "group", "abelian_group", "abelian_exponent_p"):
            raise ValueError(f"unknown variety {self.kind!r}")
        if (self.kind == "abelian_exponent_p") != (self.p is not None):
            raise ValueError("exponent p is given exactly for abelian_exponent_p")

    @property
    def is_group(self) -> bool:
        return self.kind != "generic"

    @property
    def is_abelian(self) -> bool:
        return self.kind in ("abelian_group", "abelian_exponent_p")

    def to_json(self):
        if self.kind == "abelian_exponent_p":
            return {"abelian_exponent_p": self.p}
        return self.kind


@dataclass(frozen=True)
class OpSym:
    sym: str
    arity: int


@dataclass(frozen=True)
class Signature:
    name: str
    ops: tuple[OpSym, ...]
    infix: str | None = None
    variety: Variety = field(default_factory=Variety)

    def __post_init__(self):
        if not self.ops:
            raise ValueError("a signature needs at least one symbol")
        syms = [o.sym for o in self.ops]
        if len(set(syms)) != len(syms):
            raise ValueError(f"duplicate operation symbols in {syms}")
        for o in self.ops:
            if o.arity < 0:
                raise ValueError(f"negative arity for {o.sym}")
            if o.sym != self.infix and not _IDENT.match(o.sym):
                raise ValueError(f"prefix symbol {o.sym!r} is not an identifier")
        if self.infix is not None:
            if self.arity(self.infix) != 2:
                raise ValueError("the infix symbol must be a declared binary operation")
            if _IDENT.match(self.infix) or any(c in self.infix for c in "()[],.!&|=:"):
                raise ValueError(f"bad infix symbol {self.infix!r}")

    def arity(self, sym: str) -> int:
        for o in self.ops:
            if o.sym == sym:
                return o.arity
        raise KeyError(sym)

    def has(self, sym: str) -> bool:
        return any(o.sym == sym for o in self.ops)

    @property
    def constants(self) -> tuple[str, ...]:
        return tuple(o.sym for o in self.ops if o.arity == 0)

    def with_variety(self, variety: Variety) -> "Signature":
        return Signature(self.name, self.ops, self.infix, variety)


def group_signature(variety: Variety | None = None) -> Signature:
    return Signature(
        "group",
        (OpSym("*", 2), OpSym("inv", 1), OpSym("e", 0)),
        infix="*",
        variety=variety or Variety("group"),
    )


@dataclass(frozen=True)
class VarSort:
    """The finite variable set X; declaration order fixes the point encoding."""

    vars: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise SortError("a sort needs at least one variable")
        if len(set(self.vars)) != len(self.vars):
            raise SortError(f"repeated variable in sort {self.vars}")
        for v in self.vars:
            if not _IDENT.match(v):
                raise SortError(f"variable name {v!r} is not an ASCII identifier")

    @classmethod
    def parse(cls, text: str) -> "VarSort":
        return cls(tuple(v.strip() for v in text.split(",") if v.strip()))

    def __len__(self):
        return len(self.vars)

    def __iter__(self):
        return iter(self.vars)

    def __contains__(self, name):
        return name in self.vars

    def index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise SortError(f"variable {name!r} not in sort {self}") from None

    def extend(self, extra: Sequence[str]) -> "VarSort":
        return VarSort(self.vars + tuple(extra))

    def fresh(self, count: int, stem: str = "y", avoid: Sequence[str] = ()) -> tuple[str, ...]:
        """``count`` variable names outside this sort and ``avoid``."""
        taken = set(self.vars) | set(avoid)
        if count == 1 and stem not in taken:
            return (stem,)
        out: list[str] = []
        for i in itertools.count(1):
            if len(out) == count:
                break
            if f"{stem}{i}" not in taken:
                out.append(f"{stem}{i}")
        return tuple(out)

    def __str__(self):
        return ",".join(self.vars)


# -- terms ------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    sym: str
    args: tuple = ()


Term = Var | App


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 1
    return 1 + max(term_depth(a) for a in t.args)


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def check_term(t: Term, sig: Signature, sort: VarSort) -> None:
    if isinstance(t, Var):
        if t.name not in sort:
            raise SortError(f"variable {t.name!r} not in sort {sort}")
        return
    try:
        ar = sig.arity(t.sym)
    except KeyError:
        raise SortError(f"unknown symbol {t.sym!r}") from None
    if ar != len(t.args):
        raise SortError(f"{t.sym} takes {ar} arguments, got {len(t.args)}")
    for a in t.args:
        check_term(a, sig, sort)


def format_term(t: Term, sig: Signature) -> str:
    if isinstance(t, Var):
        return t.name
    if sig.infix is not None and t.sym == sig.infix:
        left, right = t.args
        r = format_term(right, sig)
        if isinstance(right, App) and right.sym == sig.infix:
            r = f"({r})"
        return f"{format_term(left, sig)}{sig.infix}{r}"
    if not t.args:
        return t.sym
    return f"{t.sym}({', '.join(format_term(a, sig) for a in t.args)})"


def power_term(t: Term, k: int, sig: Signature) -> Term:
    """t*t*...*t (k factors, left-nested); k = 0 gives the first constant."""
    if k == 0:
        return App(sig.constants[0])
    out = t
    for _ in range(k - 1):
        out = App(sig.infix, (out, t))
    return out


# -- lexing and term parsing -----------------------------------------------

_PUNCT = ("==", "!=", "->", ":=", "(", ")", "[", "]", ",", ".", "!", "&", "|")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | punct | infix | end
    text: str
    pos: int


def tokenize(text: str, sig: Signature) -> list[Token]:
    toks: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        m = re.compile(r"[A-Za-z_][A-Za-z0-9_]*").match(text, i)
        if m:
            toks.append(Token("ident", m.group(), i))
            i = m.end()
            continue
        if sig.infix is not None and text.startswith(sig.infix, i):
            # "==" and "!=" win over a one-character infix like "="
            if not any(text.startswith(p, i) and len(p) > len(sig.infix) for p in _PUNCT):
                toks.append(Token("infix", sig.infix, i))
                i += len(sig.infix)
                continue
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append(Token("punct", p, i))
                i += len(p)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", i, text)
    toks.append(Token("end", "", n))
    return toks


class TokenStream:
    def __init__(self, tokens: list[Token], text: str):
        self.toks = tokens
        self.i = 0
        self.text = text

    @property
    def peek(self) -> Token:
        return self.toks[self.i]

    def peek_at(self, k: int) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "end":
            self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.peek.text == text and self.peek.kind in ("punct", "infix"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.peek
        if t.text != text or t.kind not in ("punct", "infix"):
            raise self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.peek.pos, self.text)


def parse_term_tokens(ts: TokenStream, sig: Signature, sort: VarSort) -> Term:
    left = _parse_atom(ts, sig, sort)
    while ts.peek.kind == "infix":
        ts.next()
        right = _parse_atom(ts, sig, sort)
        left = App(sig.infix, (left, right))
    return left


def _parse_atom(ts: TokenStream, sig: Signature, sort: VarSort) -> Term:
    tok = ts.peek
    if tok.kind == "punct" and tok.text == "(":
        ts.next()
        t = parse_term_tokens(ts, sig, sort)
        ts.expect(")")
        return t
    if tok.kind != "ident":
        raise ts.error(f"expected a term, found {tok.text or 'end of input'!r}")
    ts.next()
    name = tok.text
    if ts.peek.kind == "punct" and ts.peek.text == "(":
        if not sig.has(name):
            raise ParseError(f"unknown symbol {name!r}", tok.pos, ts.text)
        ts.next()
        args: list[Term] = []
        if not ts.accept(")"):
            args.append(parse_term_tokens(ts, sig, sort))
            while ts.accept(","):
                args.append(parse_term_tokens(ts, sig, sort))
            ts.expect(")")
        if sig.arity(name) != len(args):
            raise ParseError(
                f"{name} takes {sig.arity(name)} arguments, got {len(args)}", tok.pos, ts.text
            )
        return App(name, tuple(args))
    if name in sort:
        return Var(name)
    if sig.has(name):
        if sig.arity(name) != 0:
            raise ParseError(f"{name} takes {sig.arity(name)} arguments, got 0", tok.pos, ts.text)
        return App(name)
    raise SortError(f"variable {name!r} not in sort {sort} (position {tok.pos})")


def parse_term(text: str, sig: Signature, sort: VarSort) -> Term:
    ts = TokenStream(tokenize(text, sig), text)
    t = parse_term_tokens(ts, sig, sort)
    if ts.peek.kind != "end":
        raise ts.error(f"trailing input {ts.peek.text!r}")
    return t


# -- substitutions ----------------------------------------------------------


@dataclass(frozen=True)
class Substitution:
    """s: W(X) -> W(Y), given by one term over ``target`` per variable of ``source``."""

    source: VarSort
    target: VarSort
    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != len(self.source):
            raise SortError("a substitution must give one image per source variable")
        for t in self.images:
            extra = term_vars(t) - set(self.target.vars)
            if extra:
                raise SortError(f"image term uses {sorted(extra)} outside target sort {self.target}")

    def __call__(self, name: str) -> Term:
        return self.images[self.source.index(name)]

    @classmethod
    def identity(cls, sort: VarSort) -> "Substitution":
        return cls(sort, sort, tuple(Var(v) for v in sort))

    @classmethod
    def from_mapping(cls, source: VarSort, target: VarSort, mapping: dict) -> "Substitution":
        return cls(source, target, tuple(mapping.get(v, Var(v)) for v in source))

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            t == Var(v) for v, t in zip(self.source, self.images)
        )


def apply_substitution_term(s: Substitution, t: Term) -> Term:
    if isinstance(t, Var):
        return s(t.name)
    return App(t.sym, tuple(apply_substitution_term(s, a) for a in t.args))


def compose(t: Substitution, s: Substitution) -> Substitution:
    """t after s: X -> Z for s: X -> Y and t: Y -> Z."""
    if s.target != t.source:
        raise SortError(f"cannot compose: {s.target} is not {t.source}")
    return Substitution(s.source, t.target, tuple(apply_substitution_term(t, w) for w in s.images))


def single_substitution(x: str, w: Term, sort: VarSort) -> Substitution:
    """s^x_w on W(X): x goes to w, every other variable is fixed."""
    sort.index(x)
    return Substitution(sort, sort, tuple(w if v == x else Var(v) for v in sort))


# -- enumeration ------------------------------------------------------------


def terms_up_to_depth(sig: Signature, sort: VarSort, depth: int) -> list[Term]:
    """Every term of depth <= ``depth`` (variables and constants have depth 1),
    grouped by depth, deterministic order."""
    if depth < 1:
        return []
    by_depth: list[list[Term]] = [[Var(v) for v in sort] + [App(c) for c in sig.constants]]
    for _ in range(depth - 1):
        below = [t for layer in by_depth for t in layer]
        prev = set(by_depth[-1])
        layer = []
        for o in sig.ops:
            if o.arity == 0:
                continue
            for args in itertools.product(below, repeat=o.arity):
                if any(a in prev for a in args):
                    layer.append(App(o.sym, args))
        by_depth.append(layer)
    return [t for layer in by_depth for t in layer]


def iter_terms_by_size(sig: Signature, sort: VarSort, max_size: int) -> Iterator[Term]:
    """Every term with at most ``max_size`` nodes, smallest first."""
    by_size: dict[int, list[Term]] = {1: [Var(v) for v in sort] + [App(c) for c in sig.constants]}
    yield from by_size[1]
    for size in range(2, max_size + 1):
        layer: list[Term] = []
        for o in sig.ops:
            if o.arity == 0:
                continue
            for parts in _compositions(size - 1, o.arity):
                pools = [by_size.get(p, []) for p in parts]
                for args in itertools.product(*pools):
                    layer.append(App(o.sym, tuple(args)))
        by_size[size] = layer
        yield from layer


def _compositions(total: int, k: int):
    if k == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest
