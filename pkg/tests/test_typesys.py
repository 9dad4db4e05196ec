import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from logeo.algebra import (
    GROUPS_UP_TO_6,
    GROUPS_UP_TO_8,
    automorphisms,
    cyclic,
    elementary_abelian,
    graph_is_isomorphism,
    menu_algebra,
)
from logeo.errors import LogeoError
from logeo.formula import Not, format_formula, holds_at, in_theory, is_closed, lker_contains, value
from logeo.signature import VarSort, group_signature
from logeo.space import Point, point_values
from logeo.typesys import (
    Partition,
    canonical_ids,
    chain_check,
    class_defining_formula,
    exponent_p_census,
    gaussian_binomial_total,
    is_homogeneous,
    is_logically_perfect,
    is_strictly_perfect,
    isotyped,
    orbit_partition,
    order_formula_census,
    pebble_partition,
    rho_partition,
    separating_formula,
    subspaces,
    tau_partition,
    type_census,
)

from strategies import formulas

X = VarSort.parse("x")
X12 = VarSort.parse("x1,x2")

# z2xz4 elements: (a, b) is 4a + b
E, ORDER2, ORDER4 = [0], [2, 4, 6], [1, 3, 5, 7]


def blocks(P):
    return sorted(sorted(p[0] for p in b) for b in P.blocks())


def test_canonical_ids_first_occurrence():
    assert canonical_ids(np.array([7, 7, 3, 9, 3])).tolist() == [0, 0, 1, 2, 1]


def test_tau_examples(z2xz4, z4):
    assert blocks(tau_partition(z2xz4, X)) == sorted([E, ORDER2, ORDER4])
    assert blocks(tau_partition(z4, X)) == [[0], [1, 3], [2]]


def _tau_oracle(H, sort):
    m, n = H.size, len(sort)
    pts = [point_values(i, m, n) for i in range(m**n)]
    ids, reps = [], []
    for p in pts:
        for k, r in enumerate(reps):
            if graph_is_isomorphism(H, H, list(zip(p, r))):
                ids.append(k)
                break
        else:
            ids.append(len(reps))
            reps.append(p)
    return np.array(ids)


@pytest.mark.parametrize("name", ["z4", "z2xz4", "s3", "q8", "z6"])
def test_tau_matches_pair_closure_oracle(name):
    H = menu_algebra(name)
    for sort in (X, X12):
        assert np.array_equal(tau_partition(H, sort).ids, canonical_ids(_tau_oracle(H, sort)))


def test_pebble_examples(z4, z2xz4):
    assert blocks(pebble_partition(z4, X)) == [[0], [1, 3], [2]]
    assert blocks(pebble_partition(z2xz4, X, 1)) == sorted([E, ORDER2, ORDER4])
    assert blocks(pebble_partition(z2xz4, X, 2)) == sorted([E, [2], [4, 6], ORDER4])
    assert pebble_partition(cyclic(1), X12).num_classes == 1
    with pytest.raises(LogeoError):
        pebble_partition(z4, X12, 1)


@pytest.mark.parametrize("name", ["z2xz4", "d4", "q8", "z8"])
def test_pebble_monotone_in_k(name):
    H = menu_algebra(name)
    parts = [pebble_partition(H, X, k) for k in (1, 2, 3)]
    assert parts[1].refines(parts[0]) and parts[2].refines(parts[1])


def test_rho_examples(z2xz4, z4):
    rho = rho_partition(z2xz4, X)
    assert blocks(rho) == sorted([E, [2], [4, 6], ORDER4])
    assert rho.info == {"aux": 1, "converged": True}
    assert blocks(rho_partition(z4, X)) == [[0], [1, 3], [2]]
    assert rho.same((5,), (5,))


def test_orbit_examples(z2xz4):
    assert blocks(orbit_partition(z2xz4, X)) == sorted([E, [2], [4, 6], ORDER4])
    assert blocks(orbit_partition(elementary_abelian(2, 2), X)) == [[0], [1, 2, 3]]
    assert orbit_partition(cyclic(1), X12).num_classes == 1


def _orbit_oracle(H, sort):
    m, n = H.size, len(sort)
    auts = list(automorphisms(H))
    ids = -np.ones(m**n, dtype=np.int64)
    nxt = 0
    for i in range(m**n):
        if ids[i] >= 0:
            continue
        p = point_values(i, m, n)
        for s in auts:
            q = tuple(s[a] for a in p)
            ids[sum(v * m**k for k, v in enumerate(q))] = nxt
        nxt += 1
    return ids


@pytest.mark.parametrize("name", GROUPS_UP_TO_8)
def test_orbits_match_brute_force(name):
    H = menu_algebra(name)
    assert np.array_equal(orbit_partition(H, X12).ids, canonical_ids(_orbit_oracle(H, X12)))


@pytest.mark.parametrize("name", GROUPS_UP_TO_8 + ("e2^3", "z30"))
def test_chain(name):
    H = menu_algebra(name)
    for sort in (X, X12) if H.size <= 8 else (X,):
        rep = chain_check(H, sort)
        assert rep["orbit_refines_rho"] and rep["rho_refines_tau"]
        assert rep["orbit_classes"] >= rep["rho_classes"] >= rep["tau_classes"]


def test_verdicts(z2xz4, z4):
    assert not is_homogeneous(z2xz4, X)
    assert is_logically_perfect(z2xz4, X)
    assert not is_strictly_perfect(z2xz4, X)
    assert is_homogeneous(z4, X) and is_logically_perfect(z4, X) and is_strictly_perfect(z4, X)
    assert is_logically_perfect(cyclic(1), X12)
    for p, m in ((2, 2), (2, 3), (3, 2)):
        E_ = elementary_abelian(p, m)
        for sort in (X, X12):
            assert is_homogeneous(E_, sort)


def test_census_examples():
    assert len(type_census(cyclic(30), X).rows) == 8
    assert len(type_census(elementary_abelian(2, 3), X12).rows) == 5
    assert len(type_census(cyclic(1), X).rows) == 1


@pytest.mark.parametrize("name", ["z2xz4", "s3", "q8"])
def test_census_formulas_define_their_classes(name):
    H = menu_algebra(name)
    census = type_census(H, X12, with_formulas=True)
    rho = census.partition
    assert sum(r.size for r in census.rows) == H.size**2
    for row in census.rows:
        u = class_defining_formula(H, X12, row.cid, rho)
        assert value(u, H, X12) == rho.class_set(row.cid)
    assert census.to_json()["classes"][0]["formula"]


def test_separating_formula(z2xz4):
    u = separating_formula(z2xz4, X, (2,), (4,))
    V = value(u, z2xz4, X)
    # equivalent to E y. y*y == x: the squares
    assert V.points() == [(0,), (2,)]
    assert separating_formula(z2xz4, X, (4,), (6,)) is None


@pytest.mark.parametrize("name", ["z2xz4", "d4", "q8"])
def test_separating_formulas_all_pairs(name):
    H = menu_algebra(name)
    rho = rho_partition(H, X12)
    reps = [rho.representative(c) for c in range(rho.num_classes)]
    for p, q in itertools.permutations(reps[:8], 2):
        u = separating_formula(H, X12, p, q)
        assert holds_at(u, Point(X12, p), H) and not holds_at(u, Point(X12, q), H)


def test_isotyped_examples():
    r = isotyped(cyclic(6), menu_algebra("z2xz3"), X12)
    assert r.verdict and r.witness is None
    r = isotyped(cyclic(4), menu_algebra("z2xz2"), X)
    assert not r.verdict
    assert format_formula(r.witness, group_signature()) == "E x. !(x*x == e)"
    assert r.true_in == "z4"
    H = menu_algebra("q8")
    assert isotyped(H, H, X12).verdict


@pytest.mark.parametrize("a,b", list(itertools.combinations(GROUPS_UP_TO_6, 2)))
def test_non_isomorphic_witness_is_closed_and_separates(a, b):
    A, B = menu_algebra(a), menu_algebra(b)
    r = isotyped(A, B, X)
    if r.verdict:
        return
    T, F = (A, B) if r.true_in == A.name else (B, A)
    assert is_closed(r.witness)
    assert in_theory(r.witness, T) and in_theory(Not(r.witness), F)


def test_isotypy_structural_fallback():
    # d4 and q8 agree on all one-quantifier sentences in one variable
    r = isotyped(menu_algebra("d4"), menu_algebra("q8"), X12)
    assert not r.verdict and is_closed(r.witness)
    T, F = (menu_algebra("d4"), menu_algebra("q8"))
    if r.true_in != "d4":
        T, F = F, T
    assert in_theory(r.witness, T) and not in_theory(r.witness, F)


def test_subspace_counts():
    for p, n in ((2, 1), (2, 2), (2, 3), (3, 2)):
        assert len(subspaces(p, n)) == gaussian_binomial_total(p, n)
    assert gaussian_binomial_total(2, 2) == 5


@pytest.mark.parametrize("p,m,n,expected", [(2, 3, 2, 5), (2, 2, 2, 5), (3, 2, 1, 2)])
def test_exponent_p_census(p, m, n, expected):
    r = exponent_p_census(p, m, n)
    assert r["ok"] and r["orbits"] == expected == r["subspaces"]


def test_exponent_p_census_needs_m_ge_n():
    with pytest.raises(LogeoError):
        exponent_p_census(2, 1, 2)


def test_order_census_one_variable():
    r = order_formula_census(cyclic(30), X)
    assert r["ok"] and r["formulas"] == 8 == r["orbits"] == r["types"]
    gens = [row for row in r["rows"] if row["orders"] == [30]]
    assert gens[0]["size"] == 8
    assert order_formula_census(cyclic(6), X)["orbits"] == 4
    first = r["rows"][0]
    assert first["orders"] == [1] and first["size"] == 1


def test_order_census_two_variables_is_not_orbitwise():
    # (1, 1) and (1, 5) in Z/6 have the same coordinate orders but lie in
    # different orbits: x1 == x2 holds at one and not the other
    r = order_formula_census(cyclic(6), X12)
    assert not r["all_single_orbits"] and not r["ok"]
    assert r["formulas"] < r["orbits"]


def test_order_census_precondition():
    with pytest.raises(LogeoError):
        order_formula_census(cyclic(4), X)
    with pytest.raises(LogeoError):
        order_formula_census(menu_algebra("s3"), X)


def test_partition_api(z4):
    P = rho_partition(z4, X)
    assert P.num_classes == 3 and P.class_sizes() == [1, 2, 1]
    assert P.members(1) == [(1,), (3,)] and P.representative(1) == (1,)
    assert P == Partition(X, z4, np.array([5, 6, 7, 6]))
    assert P.refines(tau_partition(z4, X))


G = group_signature()
XY = VarSort.parse("x,y")


@given(st.sampled_from(["z2xz4", "s3", "d4"]), formulas(G, XY, X, 6), st.data())
def test_rho_classes_share_logical_kernels(name, u, data):
    H = menu_algebra(name)
    rho = rho_partition(H, XY)
    c = data.draw(st.integers(0, rho.num_classes - 1))
    members = rho.members(c)
    mu, nu = data.draw(st.sampled_from(members)), data.draw(st.sampled_from(members))
    assert lker_contains(Point(XY, mu), u, H) == lker_contains(Point(XY, nu), u, H)


@pytest.mark.parametrize("name", GROUPS_UP_TO_8)
def test_census_count_equals_orbits_when_perfect(name):
    H = menu_algebra(name)
    if is_logically_perfect(H, X12):
        assert len(type_census(H, X12).rows) == orbit_partition(H, X12).num_classes


def test_homogeneity_and_strict_perfectness_per_sort():
    # the two verdicts agree once quantified over all sorts, but not sort by sort
    H = menu_algebra("z2xz4")
    assert (is_homogeneous(H, X), is_strictly_perfect(H, X)) == (False, False)
    assert (is_homogeneous(H, X12), is_strictly_perfect(H, X12)) == (False, True)
    for name in ("z4", "s3", "q8", "e2^3"):
        H = menu_algebra(name)
        for sort in (X, X12):
            assert is_homogeneous(H, sort) and is_strictly_perfect(H, sort)
