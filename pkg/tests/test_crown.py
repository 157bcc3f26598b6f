import random
from fractions import Fraction

import pytest

from conftest import alternating, brute_force_phi, cyclic, direct_product, grp, symmetric
from crownlab.caps import HypothesisError
from crownlab.crown import (
    BOUND_53_90,
    CAutBound,
    CrownSpec,
    ThresholdExceeded,
    abelian_bound,
    aut_classes_of_generating_pairs,
    check_53_90,
    congruent_coordinates,
    crown_power,
    crown_threshold,
    find_complement,
    hall_power_generators,
    p_ln_exact,
    p_ln_montecarlo,
)
from crownlab.group import PermGroup
from crownlab.mintrans import d_min

V4 = lambda: grp("(1,2)(3,4)", "(1,3)(2,4)")  # noqa: E731
C3 = lambda: grp("(1,2,3)")  # noqa: E731


def test_crown_orders():
    assert crown_power(CrownSpec(symmetric(3), C3(), 2)).order() == 18
    A5 = alternating(5)
    L2 = crown_power(CrownSpec(A5, A5, 2))
    assert L2.degree == 10 and L2.order() == 3600
    assert crown_power(CrownSpec(symmetric(4), V4(), 1)).order() == 24


@pytest.mark.parametrize("L, N, kmax", [
    (symmetric(3), C3(), 4),
    (symmetric(4), V4(), 3),
    (alternating(5), alternating(5), 3),
])
def test_order_identity(L, N, kmax):
    for k in range(1, kmax + 1):
        assert crown_power(CrownSpec(L, N, k)).order() == N.order() ** (k - 1) * L.order()


def test_spec_validation():
    CrownSpec(symmetric(3), C3(), 2).validate()
    CrownSpec(symmetric(4), V4(), 2).validate()
    CrownSpec(alternating(5), alternating(5), 2).validate()
    with pytest.raises(HypothesisError):
        CrownSpec(cyclic(6), grp("(1,3,5)(2,4,6)"), 2).validate()
    with pytest.raises(HypothesisError):
        CrownSpec(symmetric(4), alternating(4), 2).validate()
    with pytest.raises(ValueError):
        CrownSpec(symmetric(3), C3(), 0)


def test_uncomplemented_abelian_n_rejected():
    # C4 has the unique minimal normal subgroup C2, which has no complement
    with pytest.raises(HypothesisError):
        CrownSpec(cyclic(4), grp("(1,3)(2,4)"), 2).validate()


def test_find_complement():
    K = find_complement(symmetric(3), C3())
    assert K.order() == 2
    assert find_complement(cyclic(4), grp("(1,3)(2,4)")) is None


def test_congruence_law():
    for L, N, k in [(symmetric(3), C3(), 3), (symmetric(4), V4(), 2), (alternating(5), alternating(5), 2)]:
        spec = CrownSpec(L, N, k)
        G = crown_power(spec)
        rng = random.Random(0)
        for _ in range(25):
            assert congruent_coordinates(G.random_element(rng), spec)


def test_p_exact_examples():
    A5 = alternating(5)
    assert p_ln_exact(A5, A5, 2).value == Fraction(19, 30)
    assert p_ln_exact(A5, A5, 1).value == 0
    assert p_ln_exact(symmetric(3), C3(), 2).value == Fraction(2, 3)


def test_p_exact_denominator():
    S3 = symmetric(3)
    est = p_ln_exact(S3, C3(), 2)
    # phi_S3(2) / (phi_C2(2) * 3^2) = 18 / 27
    assert est.value == Fraction(brute_force_phi(S3, 2), 3 * 9)
    assert 0 <= est.value <= 1


def test_p_exact_s5_over_a5():
    value = p_ln_exact(symmetric(5), alternating(5), 2).value
    assert value >= BOUND_53_90
    assert check_53_90(symmetric(5), alternating(5), 2).passed


def test_montecarlo_zero_d():
    A5 = alternating(5)
    assert p_ln_montecarlo(A5, A5, 0, trials=10).value == 0


def test_montecarlo_reproducible_and_sharded():
    S4 = symmetric(4)
    a = p_ln_montecarlo(S4, V4(), 2, trials=3000, seed=5, shards=3)
    b = p_ln_montecarlo(S4, V4(), 2, trials=3000, seed=5, shards=3)
    assert (a.successes, a.accepted) == (b.successes, b.accepted)
    exact = float(p_ln_exact(S4, V4(), 2).value)
    assert abs(a.value - exact) <= 4 * a.stderr + 1e-9


def test_montecarlo_agreement_over_seeds():
    A5 = alternating(5)
    exact = float(Fraction(19, 30))
    hits = 0
    for seed in range(20):
        est = p_ln_montecarlo(A5, A5, 2, trials=2000, seed=seed)
        hits += abs(est.value - exact) <= 3 * est.stderr
    assert hits >= 19


def test_montecarlo_large_d():
    A5 = alternating(5)
    est = p_ln_montecarlo(A5, A5, 6, trials=500, seed=0)
    assert est.value >= 0.99


def test_montecarlo_no_accepted_samples():
    # with a single element, images never generate the nontrivial quotient S4/V4
    with pytest.raises(HypothesisError):
        p_ln_montecarlo(symmetric(4), V4(), 1, trials=200, seed=0)


def test_thresholds():
    A5 = alternating(5)
    assert crown_threshold(A5, A5, 2, CAutBound.simple(60, 2)) == 19
    assert crown_threshold(A5, A5, 2, CAutBound(1, 60, 2)) == 19
    with pytest.raises(HypothesisError):
        crown_threshold(symmetric(3), C3(), 2, CAutBound(1, 3, 1))


def test_a6_threshold_with_lemma_bound():
    A6 = alternating(6)
    caut = CAutBound(1, 360, 4)
    assert caut.bound == 1440 and not caut.is_exact
    p = p_ln_exact(A6, A6, 2).value
    assert crown_threshold(A6, A6, 2, caut, p) == int(p * 360 ** 2 / 1440)


def test_caut_bound_invariant():
    with pytest.raises(ValueError):
        CAutBound(1, 60, 2, exact=500)


def test_abelian_bound():
    spec = CrownSpec(symmetric(3), C3(), 2)
    assert abelian_bound(spec) == 3
    assert d_min(crown_power(spec)).d <= 3
    c2 = cyclic(2)
    spec = CrownSpec(c2, c2, 3)
    assert abelian_bound(spec) == 4
    assert d_min(crown_power(spec)).d == 3
    assert abelian_bound(CrownSpec(symmetric(3), C3(), 1)) == 2
    with pytest.raises(HypothesisError):
        abelian_bound(CrownSpec(alternating(5), alternating(5), 2))


def test_d_min_nondecreasing_in_k():
    ds = [d_min(crown_power(CrownSpec(symmetric(3), C3(), k))).d for k in (1, 2, 3)]
    assert ds == sorted(ds)
    ds = [d_min(crown_power(CrownSpec(alternating(5), alternating(5), k))).d for k in (1, 2)]
    assert ds == sorted(ds)


def test_check_53_90():
    A5 = alternating(5)
    r2 = check_53_90(A5, A5, 2)
    r3 = check_53_90(A5, A5, 3)
    assert r2.passed and r3.passed
    assert r3.probability.value >= r2.probability.value
    assert check_53_90(A5, A5, 2, exact=False, trials=5000).passed
    with pytest.raises(HypothesisError):
        check_53_90(A5, A5, 1)
    with pytest.raises(HypothesisError):
        check_53_90(symmetric(3), C3(), 2)


def test_hall_small():
    A5 = alternating(5)
    hp = hall_power_generators(A5, 2, 120)
    assert hp.group.order() == 3600 and hp.group.degree == 10
    assert hp.threshold == 19


def test_hall_exhaustion():
    with pytest.raises(ThresholdExceeded, match="19 Aut-classes"):
        hall_power_generators(alternating(5), 20, 120)


def test_aut_classes_count():
    reps, count = aut_classes_of_generating_pairs(alternating(5), 120)
    assert count == 19 == len(reps)
    with pytest.raises(HypothesisError):
        aut_classes_of_generating_pairs(alternating(5), 240)


def test_spec_sharpness_for_a5():
    hp = hall_power_generators(alternating(5), 19, 120)
    assert hp.group.order() == 60 ** 19
    assert PermGroup(list(hp.generators), 95).order() == 60 ** 19


def test_a5_squared_is_a_crown():
    A5 = alternating(5)
    G = direct_product(A5, A5)
    assert G.order() == crown_power(CrownSpec(A5, A5, 2)).order()
