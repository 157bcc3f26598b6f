from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crownlab.caps import CapExceeded, HypothesisError
from crownlab.gamma import (
    GammaSet,
    UnknownGroupError,
    audit_inequality_chain,
    catalog,
    entry,
    gamma_alternating,
    gamma_for,
    gamma_psl2,
    gamma_table,
    out_bound_check,
    prime_divisors,
    read_simple_catalog,
    verify_gamma,
)
from crownlab.lattice import enumerate_subgroups


def test_catalog_contents():
    names = [e.name for e in catalog()]
    assert names == ["A5", "A6", "A7", "A8", "L2(7)", "L2(8)", "L2(11)"]
    big = {e.name: e for e in catalog(large=True)}
    assert big["L3(3)"].order == 5616 and big["L3(3)"].degree == 13
    assert big["U3(3)"].order == 6048 and big["U3(3)"].degree == 28


def test_catalog_examples():
    a5 = entry("A5")
    assert (a5.order, a5.out_order, a5.f) == (60, 2, Fraction(7, 2))
    l28 = entry("L2(8)")
    assert (l28.order, l28.out_order, l28.f, l28.degree) == (504, 3, 4, 9)
    a6 = entry("A6")
    assert (a6.order, a6.out_order, a6.f) == (360, 4, 4)
    assert a5.aut_order == 120


def test_entry_lookup():
    assert entry("psl2(7)").name == "L2(7)"
    with pytest.raises(UnknownGroupError):
        entry("M11")
    with pytest.raises(HypothesisError):
        entry("U3(3)", large=False)


@pytest.mark.parametrize("name", ["A5", "A6", "L2(7)", "L2(8)", "L2(11)"])
def test_entries_are_simple(name):
    assert entry(name).check_simple()


def test_gamma_alternating_examples():
    assert gamma_alternating(5).primes == {5, 3}
    assert gamma_alternating(6).primes == {2, 3, 5}
    assert gamma_alternating(7).primes == {7, 5}
    assert gamma_alternating(8).primes == {2, 7, 5}
    with pytest.raises(ValueError):
        gamma_alternating(4)


@pytest.mark.parametrize("r", range(5, 41))
def test_gamma_alternating_budget(r):
    g = gamma_alternating(r)
    assert len(g) <= (r // 2 + 1)
    assert all(r >= p for p in g.primes)


def test_gamma_psl2_examples():
    assert gamma_psl2(5).primes == {2, 5}
    assert gamma_psl2(7).primes == {2, 7}
    assert gamma_psl2(11).primes == {2, 11}
    for bad in (3, 9, 4):
        with pytest.raises(ValueError):
            gamma_psl2(bad)


def test_gamma_table():
    assert gamma_table("L2(8)").primes == {2, 3}
    assert gamma_table("L3(3)").primes == {2, 13}
    assert gamma_table("U3(3)").primes == {3, 7}
    assert gamma_table("L2(8)").source == "table"
    with pytest.raises(UnknownGroupError):
        gamma_table("J1")


def test_gamma_set_rejects_composites():
    with pytest.raises(ValueError):
        GammaSet({2, 4}, "user")


def test_verify_gamma_examples():
    v = verify_gamma(entry("A5"), GammaSet({3, 5}, "user"))
    assert v.passed and v.class_indices == [5, 6, 10]
    v = verify_gamma(entry("L2(8)"), gamma_table("L2(8)"))
    assert v.passed and v.class_indices == [9, 28, 36]


def test_verify_gamma_counterexample():
    # 7 does not divide |A5|; a prime dividing |S| but missing an index also fails
    with pytest.raises(HypothesisError):
        verify_gamma(entry("A5"), GammaSet({7}, "user"))
    v = verify_gamma(entry("A5"), GammaSet({2}, "user"))
    assert not v.passed and v.counterexample == 5


def test_verify_gamma_cap():
    with pytest.raises(CapExceeded):
        verify_gamma(entry("A8"), gamma_alternating(8))


@pytest.mark.parametrize("name", ["A5", "A6", "L2(7)", "L2(8)", "L2(11)"])
def test_soundness_on_catalog(name):
    S = entry(name)
    assert verify_gamma(S, gamma_for(S)).passed


@pytest.mark.parametrize("name", ["A5", "L2(7)"])
def test_every_proper_subgroup_index_is_hit(name):
    S = entry(name)
    gamma = gamma_for(S).primes
    lattice = enumerate_subgroups(S.group)
    for node in lattice.nodes[:-1]:
        assert prime_divisors(S.order // node.order) & gamma


def test_out_bound():
    for S in catalog(large=True):
        assert out_bound_check(S).passed
        assert S.out_order ** 4 <= S.order


def test_audit_examples():
    a = audit_inequality_chain(entry("A5"), 1, 60, 2)
    assert a.mu == 2 and a.m == 3
    assert a.step("k <= f(S)mu+1").value == 8
    assert a.step("k <= 53|S|^(t mu)/(90 t |Out|)").value == 1060
    assert a.all_hold
    a = audit_inequality_chain(entry("A5"), 1, 2, 3)
    assert a.mu == 1
    assert a.step("f(S)mu+1 <= 53|S|^(t mu)/(90 t |Out|)").holds
    assert audit_inequality_chain(entry("L2(7)"), 2, 12, 1).all_hold


def test_audit_with_exact_probability():
    a = audit_inequality_chain(entry("A5"), 1, 2, 2, p_exact=Fraction(19, 30))
    assert a.step("k <= P|N|^m/c").value == 19
    assert a.step("k <= P|N|^m/c").holds


@given(st.sampled_from(["A5", "A6", "A7", "L2(7)", "L2(8)", "L2(11)"]),
       st.integers(1, 3), st.integers(2, 10 ** 4))
def test_audit_monotone(name, t, n):
    a = audit_inequality_chain(entry(name), t, n, 1)
    assert a.step("f(S)mu+1 <= 53|S|^(t mu)/(90 t |Out|)").holds


def test_user_catalog(tmp_path):
    path = tmp_path / "simple.grp"
    path.write_text("# name: myA5\n# out: 2\n# family: alternating 5\ndegree 5\n(1,2,3)\n(1,2,3,4,5)\n"
                    "---\n# name: L2(7)\n# out: 2\ndegree 7\n(1,2,3,4,5,6,7)\n(1,2)(3,6)\n")
    entries = read_simple_catalog(path)
    assert [e.name for e in entries] == ["myA5", "L2(7)"]
    assert entries[0].f == Fraction(7, 2) and entries[1].order == 168
    assert verify_gamma(entries[0], gamma_for(entries[0])).passed
    bad = tmp_path / "bad.grp"
    bad.write_text("degree 5\n(1,2,3)\n")
    with pytest.raises(ValueError):
        read_simple_catalog(bad)


@pytest.mark.parametrize("name, primes, indices", [
    ("L3(3)", {2, 13}, [13, 13, 144, 234]),
    ("U3(3)", {3, 7}, [28, 36, 63, 63]),
])
def test_large_table_entries(name, primes, indices):
    S = entry(name, large=True)
    v = verify_gamma(S, gamma_table(name))
    assert gamma_table(name).primes == primes
    assert v.passed and sorted(v.class_indices) == indices
