import numpy as np
import pytest
from hypothesis import given, strategies as st

from centralam.groups import (
    GroupSpecError,
    NormalSubgroup,
    NotNormalError,
    OrderTooLarge,
    center,
    conjugacy_classes,
    derived_subgroup,
    exponent,
    from_table,
    make_group,
    normal_closure,
    normal_subgroups,
    perm_group,
    quotient,
)

from oracles import (
    center_brute,
    classes_brute,
    commutator_subgroup_brute,
    exponent_brute,
    is_associative,
    perm_group_brute,
    sl2_order_brute,
)

FAMILY_ORDERS = [
    ("cyclic:1", 1),
    ("cyclic:12", 12),
    ("dihedral:6", 6),
    ("dihedral:16", 16),
    ("quaternion:8", 8),
    ("quaternion:12", 12),
    ("sym:4", 24),
    ("alt:5", 60),
    ("heisenberg:3", 27),
    ("heisenberg:5", 125),
    ("aff:7", 42),
    ("sl2:3", 24),
    ("sl2:5", 120),
    ("direct(cyclic:2,sym:3)", 12),
]

SMALL = ["cyclic:6", "dihedral:8", "dihedral:10", "quaternion:8", "sym:3", "sym:4", "alt:4",
         "heisenberg:3", "aff:5", "sl2:3", "direct(sym:3,cyclic:3)", "quaternion:16"]


@pytest.mark.parametrize("spec,order", FAMILY_ORDERS)
def test_family_orders(spec, order):
    g = make_group(spec)
    assert g.order == order
    g.check()


@pytest.mark.parametrize("spec", SMALL)
def test_axioms_against_brute_force(spec):
    g = make_group(spec)
    assert is_associative(g.mul)
    assert set(map(frozenset, conjugacy_classes(g).members)) == set(classes_brute(g.mul))
    assert set(center(g)) == center_brute(g.mul)
    assert set(derived_subgroup(g).elements) == commutator_subgroup_brute(g.mul)
    assert exponent(g) == exponent_brute(g.mul)


def test_class_order_is_canonical():
    cd = conjugacy_classes(make_group("sym:4"))
    assert cd.sizes == tuple(sorted(cd.sizes))
    assert cd.members[0] == (0,)
    for c in range(cd.class_count):
        for j in range(len(cd.power_map[c])):
            assert cd.power(c, j) == cd.power(c, j + len(cd.power_map[c]))


def test_power_maps_agree_with_group():
    g = make_group("sl2:3")
    cd = conjugacy_classes(g)
    for c, r in enumerate(cd.representatives):
        for j in range(1, 13):
            assert cd.class_of[g.power(r, j)] == cd.power(c, j)


def test_sl2_order_matches_count():
    for p in (3, 5):
        assert make_group(f"sl2:{p}").order == sl2_order_brute(p)


def test_perm_closure_matches_brute():
    gens = [(1, 2, 3, 4, 0), (1, 0, 2, 3, 4)]
    assert perm_group(gens).order == len(perm_group_brute(gens)) == 120


@pytest.mark.parametrize("bad", ["", "cyclic", "cyclic:x", "foo:3", "cyclic:0", "dihedral:7", "quaternion:6",
                                 "heisenberg:4", "aff:6", "sl2:4", "direct(cyclic:2)", "ctbl:x.json"])
def test_malformed_specs(bad):
    with pytest.raises(GroupSpecError):
        make_group(bad)


def test_order_cap():
    with pytest.raises(OrderTooLarge):
        make_group("cyclic:50", max_order=20)
    with pytest.raises(OrderTooLarge):
        make_group("direct(sym:5,sym:5)", max_order=2000)


def test_from_table_rejects_non_group():
    with pytest.raises(GroupSpecError):
        from_table([[0, 1], [1, 1]]).check()


def test_quotient_rejects_non_normal():
    g = make_group("sym:3")
    t = next(x for x in range(6) if g.element_orders[x] == 2)
    with pytest.raises(NotNormalError):
        quotient(g, NormalSubgroup(g, (0, t)))
    # the normal closure of a transposition is all of S3
    assert normal_closure(g, [t]).order == 6


def test_quotient_by_center_of_d8():
    g = make_group("dihedral:8")
    z = normal_closure(g, [x for x in center(g) if x != 0])
    q = quotient(g, z)
    assert q.order == 4 and q.is_abelian
    q.check()


def test_normal_subgroups_of_s4():
    orders = sorted(n.order for n in normal_subgroups(make_group("sym:4")))
    assert orders == [1, 4, 12, 24]


@given(st.integers(1, 60))
def test_cyclic_is_abelian_with_n_classes(n):
    g = make_group(f"cyclic:{n}")
    assert g.is_abelian
    assert conjugacy_classes(g).class_count == n


@given(st.integers(3, 30))
def test_dihedral_class_count(m):
    g = make_group(f"dihedral:{2 * m}")
    k = conjugacy_classes(g).class_count
    assert k == ((m + 6) // 2 if m % 2 == 0 else (m + 3) // 2)
    assert np.array_equal(g.mul[0], np.arange(2 * m))
