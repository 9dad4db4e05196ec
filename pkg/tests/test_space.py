import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from logeo.algebra import cyclic, menu_algebra
from logeo.config import Guards, guards_from_env, set_guards
from logeo.errors import GuardError, LogeoError, SortError
from logeo.signature import App, Substitution, Var, VarSort, parse_term
from logeo.space import (
    Point,
    PointSet,
    equality_value,
    eval_point,
    exists_x,
    forall_x,
    format_pointset,
    point_index,
    point_values,
    pointset_from_hex,
    pointset_to_hex,
    sstar_pointset,
)

X = VarSort.parse("x")
X12 = VarSort.parse("x1,x2")


def term(text, H, sort):
    return parse_term(text, H.signature, sort)


def test_encoding_is_little_endian():
    assert point_index((1, 2), 4) == 1 + 2 * 4
    assert point_values(9, 4, 2) == (1, 2)


def test_eval_point():
    Z4 = cyclic(4)
    mu = Point(X12, (1, 2))
    assert eval_point(term("x1*x2*x1", Z4, X12), mu, Z4) == 0
    assert eval_point(Var("x1"), mu, Z4) == 1
    assert eval_point(App("e"), mu, Z4) == 0


def test_equality_values():
    Z3, Z4 = cyclic(3), cyclic(4)
    assert equality_value(term("x*x*x", Z3, X), App("e"), X, Z3).is_full()
    w = term("inv(x)*x", Z4, X)
    assert equality_value(w, w, X, Z4).is_full()
    assert equality_value(term("x*x", Z4, X), App("e"), X, Z4).points() == [(0,), (2,)]


def test_exists_examples():
    Z2 = cyclic(2)
    A = PointSet.from_points(X12, Z2, [(0, 0)])
    assert exists_x(A, "x1").points() == [(0, 0), (1, 0)]
    assert exists_x(PointSet.empty(X12, Z2), "x2").is_empty()
    assert exists_x(PointSet.full(X12, Z2), "x2").is_full()
    with pytest.raises(SortError):
        exists_x(A, "y")


def test_forall_examples():
    Z2 = cyclic(2)
    assert forall_x(PointSet.full(X, Z2), "x").is_full()
    assert forall_x(PointSet.from_points(X, Z2, [(1,)]), "x").is_empty()


def test_sstar_examples():
    Z2 = cyclic(2)
    XY = VarSort.parse("x,y")
    A = equality_value(Var("x"), App("e"), X, Z2)
    s = Substitution(X, XY, (term("x*y", Z2, XY),))
    assert sstar_pointset(s, A) == equality_value(term("x*y", Z2, XY), App("e"), XY, Z2)
    assert sstar_pointset(s, A).points() == [(0, 0), (1, 1)]
    assert sstar_pointset(Substitution.identity(X), A) == A
    const = Substitution(X, XY, (App("e"),))
    assert sstar_pointset(const, A).is_full()
    with pytest.raises(SortError):
        sstar_pointset(s, PointSet.full(XY, Z2))


def test_boolean_examples():
    Z4 = cyclic(4)
    A = equality_value(Var("x"), App("e"), X, Z4)
    B = equality_value(term("x*x", Z4, X), App("e"), X, Z4)
    assert (A | ~A).is_full()
    assert (A & PointSet.empty(X, Z4)).is_empty()
    assert format_pointset(A | B) == "{0, 2}"


def test_sets_over_different_spaces_do_not_mix():
    with pytest.raises(SortError):
        PointSet.full(X, cyclic(2)) | PointSet.full(X12, cyclic(2))


def test_pointset_immutable():
    A = PointSet.full(X, cyclic(2))
    with pytest.raises(AttributeError):
        A.bits = None
    with pytest.raises(ValueError):
        A.bits[0] = False


def test_hex_round_trip():
    H = cyclic(4)
    A = PointSet.from_points(X12, H, [(0, 0), (3, 3), (1, 2)])
    text = pointset_to_hex(A)
    assert int(text, 16) == (1 << 0) | (1 << 15) | (1 << 9)
    assert pointset_from_hex(text, X12, H) == A


def test_format_tuples():
    A = PointSet.from_points(X12, cyclic(2), [(1, 0), (0, 1)])
    assert format_pointset(A) == "{(0, 1), (1, 0)}"


def test_points_guard():
    prev = set_guards(Guards(points=100))
    try:
        with pytest.raises(GuardError):
            PointSet.full(VarSort.parse("a,b,c,d"), cyclic(4))
    finally:
        set_guards(prev)


def test_guards_from_env():
    g = guards_from_env({"LOGEO_GUARDS": "points=65536,carrier=32"})
    assert g == Guards(65536, 32)
    with pytest.raises(LogeoError):
        guards_from_env({"LOGEO_GUARDS": "colour=3"})


SPACES = [("z2", 3), ("z4", 2), ("s3", 2), ("z2xz2", 2)]


@st.composite
def sets(draw, count=2):
    name, n = draw(st.sampled_from(SPACES))
    H = menu_algebra(name)
    sort = VarSort(tuple(f"x{i + 1}" for i in range(n)))
    size = H.size**n
    out = [PointSet(sort, H, np.array(draw(st.lists(st.booleans(), min_size=size, max_size=size)))) for _ in range(count)]
    x = draw(st.sampled_from(sort.vars))
    return out, x


@given(sets())
def test_quantifier_laws(data):
    (A, B), x = data
    assert A <= exists_x(A, x)
    assert exists_x(A & exists_x(B, x), x) == exists_x(A, x) & exists_x(B, x)
    assert forall_x(A, x) <= A
    assert forall_x(A | forall_x(B, x), x) == forall_x(A, x) | forall_x(B, x)
    assert exists_x(exists_x(A, x), x) == exists_x(A, x)


@given(sets(1))
def test_exists_matches_definition(data):
    (A,), x = data
    H, sort = A.algebra, A.sort
    i = sort.index(x)
    E = exists_x(A, x)
    for idx in range(H.size ** len(sort)):
        p = point_values(idx, H.size, len(sort))
        witness = any(p[:i] + (a,) + p[i + 1 :] in A for a in range(H.size))
        assert (p in E) == witness
