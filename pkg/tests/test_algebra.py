import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from logeo.algebra import (
    GROUPS_UP_TO_8,
    algebra_to_json,
    automorphisms,
    cyclic,
    direct_product,
    elementary_abelian,
    graph_is_isomorphism,
    is_automorphism,
    isomorphic,
    kernel_key,
    load_algebra,
    menu_algebra,
    subalgebra_generate,
)
from logeo.config import Guards, set_guards
from logeo.errors import AlgebraError, GuardError, LogeoError


def z4_doc(**over):
    doc = {
        "name": "cyclic-group-4",
        "signature": {"infix": "*", "ops": [{"sym": "*", "arity": 2}, {"sym": "inv", "arity": 1}, {"sym": "e", "arity": 0}]},
        "variety": "abelian_group",
        "carrier": 4,
        "tables": {
            "*": [[(a + b) % 4 for b in range(4)] for a in range(4)],
            "inv": [(-a) % 4 for a in range(4)],
            "e": 0,
        },
    }
    doc.update(over)
    return doc


def test_load_cyclic_four():
    H = load_algebra(z4_doc())
    assert H.size == 4 and H.op("*", 3, 2) == 1 and H.identity == 0


def test_load_from_json_text_round_trip():
    H = load_algebra(json.dumps(z4_doc()))
    again = load_algebra(algebra_to_json(H))
    assert all(np.array_equal(H.tables[k], again.tables[k]) for k in H.tables)


def test_entry_out_of_range():
    doc = z4_doc()
    doc["tables"]["*"][1][1] = 7
    with pytest.raises(AlgebraError, match="out of range"):
        load_algebra(doc)


def test_exponent_violation_reports_witness():
    with pytest.raises(AlgebraError, match="1"):
        load_algebra(z4_doc(variety={"abelian_exponent_p": 2}))


def test_ragged_table_rejected():
    doc = z4_doc()
    doc["tables"]["*"][2] = [0, 1]
    with pytest.raises(AlgebraError):
        load_algebra(doc)


def test_missing_field():
    doc = z4_doc()
    del doc["carrier"]
    with pytest.raises(AlgebraError, match="carrier"):
        load_algebra(doc)


def test_nonassociative_group_rejected():
    doc = z4_doc()
    doc["tables"]["*"] = [[(a - b) % 4 for b in range(4)] for a in range(4)]
    with pytest.raises(AlgebraError):
        load_algebra(doc)


def test_constructions():
    assert direct_product(cyclic(2), cyclic(4)).size == 8
    E = elementary_abelian(2, 3)
    assert E.size == 8 and all(E.mul(a, a) == E.identity for a in range(8))
    with pytest.raises(LogeoError):
        elementary_abelian(4, 2)


def test_product_encoding():
    H = direct_product(cyclic(2), cyclic(4))
    # (a, b) is a*4 + b
    assert H.mul(1 * 4 + 3, 1 * 4 + 2) == 0 * 4 + 1


def test_z30_is_product_of_prime_cycles():
    P = direct_product(direct_product(cyclic(2), cyclic(3)), cyclic(5))
    assert isomorphic(cyclic(30), P) is not None


def test_subalgebra_generate():
    Z4 = cyclic(4)
    assert subalgebra_generate(Z4, {2}) == {0, 2}
    assert subalgebra_generate(Z4, {1}) == {0, 1, 2, 3}
    assert subalgebra_generate(Z4, set()) == {0}


@pytest.mark.parametrize("name", GROUPS_UP_TO_8)
def test_subalgebra_generate_monotone_idempotent(name):
    H = menu_algebra(name)
    for a, b in itertools.combinations(range(H.size), 2):
        S = subalgebra_generate(H, {a})
        assert subalgebra_generate(H, S) == S
        assert S <= subalgebra_generate(H, {a, b})


def test_graph_examples():
    H = menu_algebra("z2xz4")
    assert graph_is_isomorphism(H, H, [(4, 2)])
    Z4 = cyclic(4)
    assert not graph_is_isomorphism(Z4, Z4, [(1, 2)])
    assert all(graph_is_isomorphism(H, H, [(a, a)]) for a in range(H.size))


@pytest.mark.parametrize("name,order", [("z4", 2), ("z2xz4", 8), ("e2^3", 168), ("z2xz2", 6), ("q8", 24), ("d4", 8), ("s3", 6), ("z30", 8)])
def test_automorphism_counts(name, order):
    assert len(automorphisms(menu_algebra(name))) == order


def _brute_aut(H):
    return {p for p in itertools.permutations(range(H.size)) if is_automorphism(H, p)}


@pytest.mark.parametrize("name", ["z4", "z2xz2", "s3", "z6", "z2xz4"])
def test_automorphisms_match_brute_force(name):
    H = menu_algebra(name)
    assert set(map(tuple, automorphisms(H))) == _brute_aut(H)


@pytest.mark.parametrize("name", GROUPS_UP_TO_8)
def test_automorphism_group_closed(name):
    H = menu_algebra(name)
    auts = {tuple(p) for p in automorphisms(H)}
    assert tuple(range(H.size)) in auts
    for p, q in itertools.islice(itertools.product(auts, repeat=2), 400):
        assert tuple(p[i] for i in q) in auts


def test_isomorphic():
    A, B = cyclic(6), menu_algebra("z2xz3")
    iso = isomorphic(A, B)
    assert iso is not None
    assert all(B.mul(iso[a], iso[b]) == iso[A.mul(a, b)] for a in range(6) for b in range(6))
    assert isomorphic(cyclic(4), menu_algebra("z2xz2")) is None
    H = menu_algebra("d4")
    assert isomorphic(H, H) is not None
    assert isomorphic(menu_algebra("d4"), menu_algebra("q8")) is None


def test_carrier_guard():
    prev = set_guards(Guards(carrier=8))
    try:
        with pytest.raises(GuardError):
            automorphisms(cyclic(9))
    finally:
        set_guards(prev)


ORACLE_GROUPS = ["z4", "z2xz4", "s3", "q8", "d4", "z6"]


@given(st.sampled_from(ORACLE_GROUPS), st.data())
def test_kernel_key_agrees_with_pair_closure(name, data):
    """Equal kernel keys exactly when a_i -> b_i extends to an isomorphism."""
    H = menu_algebra(name)
    n = data.draw(st.integers(1, 2))
    a = data.draw(st.tuples(*[st.integers(0, H.size - 1)] * n))
    b = data.draw(st.tuples(*[st.integers(0, H.size - 1)] * n))
    same = kernel_key(H, a) == kernel_key(H, b)
    assert same == graph_is_isomorphism(H, H, list(zip(a, b)))


@given(st.sampled_from([("z6", "z2xz3"), ("z4", "z2xz2"), ("s3", "z6"), ("d4", "q8")]), st.data())
def test_kernel_key_across_algebras(pair, data):
    H1, H2 = (menu_algebra(p) for p in pair)
    a = data.draw(st.tuples(st.integers(0, H1.size - 1), st.integers(0, H1.size - 1)))
    b = data.draw(st.tuples(st.integers(0, H2.size - 1), st.integers(0, H2.size - 1)))
    assert (kernel_key(H1, a) == kernel_key(H2, b)) == graph_is_isomorphism(H1, H2, list(zip(a, b)))


@given(st.sampled_from(["z4", "z2xz4", "z6"]), st.data())
def test_pair_order_irrelevant_for_abelian(name, data):
    H = menu_algebra(name)
    pairs = data.draw(st.lists(st.tuples(st.integers(0, H.size - 1), st.integers(0, H.size - 1)), min_size=1, max_size=3))
    perm = data.draw(st.permutations(pairs))
    assert graph_is_isomorphism(H, H, pairs) == graph_is_isomorphism(H, H, perm)
