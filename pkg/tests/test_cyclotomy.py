"""Cyclotomic classes, character sums, trace-zero counts, multiset identity."""

from math import gcd

import pytest

from ovoidcodes.cyclotomy import (
    CyclotomicSystem,
    check_scaling_multiset,
    count_trace_zero,
    gaussian_periods,
)
from ovoidcodes.gf import tower


def _periods_oracle(tw, N):
    """Independent scalar-loop character sum, no reshape tricks."""
    big = tw.big
    out = []
    for i in range(N):
        total = 0
        x = big.pow(big.alpha, i)
        theta = big.pow(big.alpha, N)
        for _ in range((tw.r - 1) // N):
            total += -1 if big.trace_to_prime(x) else 1
            x = big.mul(x, theta)
        out.append(total)
    return out


def test_classes_partition_multiplicative_group():
    tw = tower(2)
    for N in (3, 5, 15, 17, 85):
        sys_n = CyclotomicSystem(tw, N)
        seen = set()
        for i in range(N):
            cls = sys_n.class_elements(i)
            assert len(cls) == sys_n.class_size
            seen.update(int(v) for v in cls)
            assert all(sys_n.class_of(int(v)) == i for v in cls[:5])
        assert len(seen) == tw.r - 1 and 0 not in seen


def test_class_index_matches_discrete_log():
    tw = tower(2)
    sys5 = CyclotomicSystem(tw, 5)
    big = tw.big
    for j in (0, 1, 7, 84, 253):
        assert sys5.class_of(big.pow(big.alpha, j)) == j % 5


def test_semiprimitive_periods_small_oracle():
    tw = tower(2)
    eta = gaussian_periods(tw, 5)
    assert eta.tolist() == _periods_oracle(tw, 5) == [-13, 3, 3, 3, 3]


@pytest.mark.parametrize(
    "m,expect_head",
    [(2, -13), (3, -57), (4, -241)],
)
def test_semiprimitive_periods_all_q(m, expect_head):
    # order q+1: one exceptional value -(q^2-q+1), the rest q-1
    tw = tower(m)
    q = tw.q
    eta = gaussian_periods(tw, q + 1)
    assert int(eta[0]) == expect_head == -(q * q - q + 1)
    assert all(int(v) == q - 1 for v in eta[1:])
    assert int(eta.sum()) == -1


def test_period_sum_and_parity_invariants():
    tw = tower(3)
    for N in (3, 5, 7, 9, 13, 35, 63, 65, 91):
        eta = gaussian_periods(tw, N)
        assert int(eta.sum()) == -1
        class_size = (tw.r - 1) // N
        assert all((int(v) - class_size) % 2 == 0 for v in eta)


def test_trace_zero_count_closed_form_vs_brute_full_transversal():
    tw = tower(2)
    big = tw.big
    for N in (5, 15, 51):
        d = gcd((tw.r - 1) // (tw.q - 1), N)
        for i in range(d):
            a = big.pow(big.alpha, i)
            res = count_trace_zero(tw, a, N)
            assert res.oracle_checked
            assert res.closed_form == res.brute_force == res.value


def test_trace_zero_frozen_values_q4():
    # class 0 -> count 16 -> weight 16; class 1 -> count 76 -> weight 12
    tw = tower(2)
    big = tw.big
    n, N = 17, 15
    z0 = count_trace_zero(tw, 1, N).value
    z1 = count_trace_zero(tw, big.alpha, N).value
    assert (z0, z1) == (16, 76)
    assert n - (z0 - 1) // N == 16
    assert n - (z1 - 1) // N == 12


def test_trace_zero_of_zero_is_whole_field():
    tw = tower(2)
    assert count_trace_zero(tw, 0, 15).value == tw.r


def test_scaling_multiset_identity_acceptance_divisors():
    tw = tower(2)
    for e1 in (5, 15, 17, 51, 85):
        d = gcd((tw.r - 1) // (tw.q - 1), e1)
        for i in range(e1):
            rep = check_scaling_multiset(tw, e1, i)
            assert rep.ok, rep
            assert rep.coarse_order == d
            assert rep.multiplicity == (tw.q - 1) * d // e1


def test_scaling_multiset_edge_full_group():
    tw = tower(2)
    rep = check_scaling_multiset(tw, 1, 0)
    assert rep.ok and rep.multiplicity == tw.q - 1 and rep.coarse_order == 1


def test_scaling_multiset_frozen_examples():
    tw = tower(2)
    r15 = check_scaling_multiset(tw, 15, 0)
    assert r15.ok and r15.multiplicity == 1 and r15.coarse_order == 5
    r5 = check_scaling_multiset(tw, 5, 2)
    assert r5.ok and r5.multiplicity == 3


def test_bad_parameters_rejected():
    tw = tower(2)
    with pytest.raises(ValueError):
        CyclotomicSystem(tw, 7)  # 7 does not divide 255
    with pytest.raises(ValueError):
        check_scaling_multiset(tw, 255, 255)
    with pytest.raises(ValueError):
        count_trace_zero(tw, 1, 7)
