import dataclasses
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from logeo.algebra import cyclic, menu_algebra
from logeo.errors import GuardError, LogeoError, ParseError
from logeo.formula import parse_formula, value
from logeo.geometry import (
    EquationSystem,
    FormulaSystem,
    algebraic_set,
    elementary_set,
    equational_closure,
    equations_of,
    in_equational_closure,
    in_logical_closure,
    is_elementary,
    logical_closure,
    point_closure,
    run_batch,
    tau_coset_formula_system,
)
from logeo.signature import App, Var, VarSort, Variety, parse_term
from logeo.space import Point, PointSet
from logeo.typesys import rho_partition, tau_partition

X = VarSort.parse("x")
X12 = VarSort.parse("x1,x2")


def eqs(H, sort, *pairs):
    return EquationSystem(sort, tuple((parse_term(a, H.signature, sort), parse_term(b, H.signature, sort)) for a, b in pairs))


def fs(H, sort, *texts):
    return FormulaSystem(sort, tuple(parse_formula(t, H.signature, sort) for t in texts))


def test_algebraic_set_examples():
    Z2 = cyclic(2)
    assert algebraic_set(eqs(Z2, X12, ("x1*x2", "e")), Z2).points() == [(0, 0), (1, 1)]
    assert algebraic_set(EquationSystem(X12, ()), Z2).is_full()
    T = EquationSystem(X, ((Var("x"), App("e")), (Var("x"), App("inv", (App("e"),)))))
    assert algebraic_set(T, Z2).points() == [(0,)]
    T = eqs(Z2, X, ("x", "e"), ("x", "x*x*x"), ("x*x", "inv(x)*x"))
    assert algebraic_set(T, Z2).points() == [(0,)]


def test_quasiidentity_examples():
    Z2, Z4 = cyclic(2), cyclic(4)
    T = eqs(Z2, X12, ("x1*x2", "e"))
    assert in_equational_closure(T, Var("x1"), Var("x2"), Z2)
    w = parse_term("x1*inv(x2)", Z2.signature, X12)
    assert in_equational_closure(EquationSystem(X12, ()), w, w, Z2)
    T = eqs(Z4, X, ("x*x", "e"))
    assert not in_equational_closure(T, Var("x"), App("e"), Z4)


def test_elementary_set_examples():
    Z4 = cyclic(4)
    assert elementary_set(fs(Z4, X, "x == e & !(x == e)"), Z4).is_empty()
    XY = VarSort.parse("x,y")
    assert elementary_set(fs(Z4, XY, "E y. x == y", "!(E y. x == y)"), Z4).is_empty()
    assert elementary_set(fs(Z4, X, "x*x == e", "!(x == e)"), Z4).points() == [(2,)]


def test_logical_closure_examples():
    Z4 = cyclic(4)
    T = fs(Z4, X, "x*x == e")
    assert in_logical_closure(T, parse_formula("x*x*x == x", Z4.signature, X), Z4)
    assert in_logical_closure(T, T.formulas[0], Z4)
    v = parse_formula("x*x*x*x == e", Z4.signature, X)
    assert in_logical_closure(FormulaSystem(X, ()), v, Z4) == value(v, Z4, X).is_full()


def test_is_elementary_examples():
    Z4 = cyclic(4)
    single = PointSet.from_points(X, Z4, [(1,)])
    verdict = is_elementary(single, Z4)
    assert not verdict and verdict.partial == (1,)
    assert is_elementary(PointSet.full(X, Z4))
    assert is_elementary(PointSet.from_points(X, Z4, [(1,), (3,)])).classes == (1,)


def test_point_closure():
    Z4 = cyclic(4)
    A = point_closure(Point(X, (1,)), Z4)
    assert A.points() == [(1,), (3,)]
    assert logical_closure(A) == A


def test_tau_coset_system(z2xz4):
    mu = Point(X, (4,))  # (1, 0)
    T = tau_coset_formula_system(mu, z2xz4, 3)
    texts = {parse_formula(t, z2xz4.signature, X) for t in ("x*x == e", "!(x == e)")}
    xx_e = parse_formula("e == x*x", z2xz4.signature, X)
    assert texts <= set(T.formulas) or xx_e in T.formulas
    tau = tau_partition(z2xz4, X)
    assert elementary_set(T, z2xz4) == tau.class_set(tau.class_of((4,)))
    T1, T2 = tau_coset_formula_system(mu, z2xz4, 1), tau_coset_formula_system(mu, z2xz4, 2)
    assert elementary_set(T2, z2xz4) <= elementary_set(T1, z2xz4)
    e = tau_coset_formula_system(Point(X, (0,)), z2xz4)
    assert elementary_set(e, z2xz4).points() == [(0,)]


def test_tau_coset_default_depth_is_exact():
    for name in ("z4", "s3", "q8", "z2xz4"):
        H = menu_algebra(name)
        tau = tau_partition(H, X)
        for a in range(H.size):
            T = tau_coset_formula_system(Point(X, (a,)), H)
            assert elementary_set(T, H) == tau.class_set(tau.class_of((a,)))


def test_window_guard():
    with pytest.raises(GuardError):
        tau_coset_formula_system(Point(X, (1,)), cyclic(30))
    with pytest.raises(LogeoError):
        tau_coset_formula_system(Point(X, (1,)), cyclic(4), 0)


def test_equational_closure_small():
    Z4 = cyclic(4)
    assert equational_closure(PointSet.from_points(X, Z4, [(2,)])).points() == [(0,), (2,)]
    assert equational_closure(PointSet.from_points(X, Z4, [(1,)])).is_full()
    # no point at all: every equation holds vacuously, so only e survives
    assert equational_closure(PointSet.empty(X, Z4)).points() == [(0,)]


def _closure_oracle(A, depth):
    # A'' through a window of equations deep enough for these small groups
    return algebraic_set(equations_of(A, depth), A.algebra)


@pytest.mark.parametrize("name", ["z2", "z4", "z2xz2", "s3"])
def test_equational_closure_matches_window(name):
    H = menu_algebra(name)
    rng = random.Random(name)
    for _ in range(15):
        bits = np.array([rng.random() < 0.2 for _ in range(H.size)])
        A = PointSet(X, H, bits)
        assert equational_closure(A) == _closure_oracle(A, 3)


SMALL = ["z2", "z4", "z2xz2", "s3"]


@st.composite
def pointsets(draw):
    H = menu_algebra(draw(st.sampled_from(SMALL)))
    sort = draw(st.sampled_from([X, X12]))
    size = H.size ** len(sort)
    bits = draw(st.lists(st.booleans(), min_size=size, max_size=size))
    return PointSet(sort, H, np.array(bits))


@given(pointsets())
def test_group_closure_matches_generic_walk(A):
    H = A.algebra
    G = dataclasses.replace(H, signature=H.signature.with_variety(Variety("generic")))
    assert np.array_equal(equational_closure(A).bits, equational_closure(PointSet(A.sort, G, A.bits)).bits)


@given(pointsets(), st.data())
def test_closure_operator_laws(A, data):
    size = len(A.bits)
    extra = np.array(data.draw(st.lists(st.booleans(), min_size=size, max_size=size)))
    B = A | PointSet(A.sort, A.algebra, extra)
    for close in (equational_closure, logical_closure):
        cA, cB = close(A), close(B)
        assert A <= cA and close(cA) == cA and cA <= cB
    assert logical_closure(A) <= equational_closure(A)


@given(pointsets())
def test_closed_sets_are_elementary(A):
    assert is_elementary(logical_closure(A))
    assert is_elementary(equational_closure(A))


@given(pointsets(), pointsets())
def test_intersection_of_elementary_sets(A, B):
    if A.sort != B.sort or A.algebra is not B.algebra:
        return
    assert is_elementary(logical_closure(A) & logical_closure(B))


@pytest.mark.parametrize("name", ["z4", "z2xz4", "s3", "q8"])
def test_rho_classes_elementary(name):
    H = menu_algebra(name)
    for sort in (X, X12):
        rho = rho_partition(H, sort)
        for c in range(rho.num_classes):
            assert is_elementary(rho.class_set(c))


def test_antitone_equational():
    H = cyclic(4)
    small = eqs(H, X12, ("x1*x1", "e"))
    big = eqs(H, X12, ("x1*x1", "e"), ("x2", "x1"))
    assert algebraic_set(big, H) <= algebraic_set(small, H)


def test_batch(tmp_path):
    H = cyclic(4)
    (tmp_path / "t.txt").write_text("# square roots of e\nx*x == e\n", encoding="utf-8")
    lines = [
        "CLOSURE? t.txt |- x*x*x == x",
        "CLOSURE? t.txt |- x == e",
        "QUASI? x*x == e |- x == e",
        "QUASI? x == e & x*x == e |- inv(x) == x",
        "QUASI? |- x == x   # no hypotheses",
    ]
    out = run_batch(lines, H, X, str(tmp_path))
    assert [r.verdict for r in out] == [True, False, False, True, True]
    assert [r.kind for r in out] == ["closure", "closure", "quasi", "quasi", "quasi"]
    with pytest.raises(ParseError):
        run_batch(["WHAT? x"], H, X)
    with pytest.raises(LogeoError):
        run_batch(["QUASI? E x. x == e |- x == x"], H, X)
