"""Design extraction and exhaustive verification at q = 4 and 8."""

from itertools import combinations
from math import comb

import numpy as np
import pytest

from ovoidcodes.cycliccode import build_cyclic_code, code_from_matrix
from ovoidcodes.designs import (
    complement_design,
    coplanar_quadruples,
    dependency_coefficients,
    dual_weight4_supports,
    supports_of_weight,
    verify_design,
)
from ovoidcodes.gf import tower
from ovoidcodes.projgeo import elliptic_quadric, points_from_code, secant_sections, tits_ovoid

# (m, q, blocks of min weight, steiner k, dual4 blocks)
CASES = [(2, 4, 68, 5, 340), (3, 8, 520, 9, 65520)]


def _code_of_points(ps):
    return code_from_matrix(ps.q, ps.points.T.copy(), origin=ps.provenance)


@pytest.mark.parametrize("m,q,b_min,k_st,b_d4", CASES)
def test_minweight_supports_and_design(m, q, b_min, k_st, b_d4):
    code = build_cyclic_code(tower(m), q * q - 1)
    blocks, ratio = supports_of_weight(code, q * q - q)
    assert ratio == q - 1
    assert blocks.shape == (b_min, q * q - q)
    lam = (q - 2) * (q * q - q - 1)
    design = verify_design(blocks, code.n, expected_lambda=lam)
    assert design.verified and design.lam == lam
    assert design.count_identity_holds()


@pytest.mark.parametrize("m,q,b_min,k_st,b_d4", CASES)
def test_complement_is_steiner_system(m, q, b_min, k_st, b_d4):
    code = build_cyclic_code(tower(m), q * q - 1)
    blocks, _ = supports_of_weight(code, q * q - q)
    base = verify_design(blocks, code.n)
    comp = complement_design(base)
    assert comp.verified and comp.k == k_st and comp.lam == 1
    assert comp.b == b_min
    assert comp.count_identity_holds()
    # involution: block arrays are canonical (row-sorted, lex-ordered)
    again = complement_design(comp)
    assert np.array_equal(again.blocks, base.blocks)


@pytest.mark.parametrize("m,q,b_min,k_st,b_d4", CASES)
def test_dual_weight4_supports_and_design(m, q, b_min, k_st, b_d4):
    code = build_cyclic_code(tower(m), q * q - 1)
    supports = dual_weight4_supports(code)
    assert supports.shape == (b_d4, 4)
    design = verify_design(supports, code.n, expected_lambda=q - 2)
    assert design.verified and design.lam == q - 2
    assert design.count_identity_holds()
    # each support really carries a full-support dependency
    for row in supports[:: max(1, b_d4 // 7)]:
        coeffs = dependency_coefficients(code, tuple(int(x) for x in row))
        assert all(c != 0 for c in coeffs)


@pytest.mark.parametrize("m,q", [(2, 4), (3, 8)])
def test_dual4_exhaustive_equals_section_fast_path(m, q):
    code = build_cyclic_code(tower(m), q * q - 1)
    ps = points_from_code(code)
    slow = dual_weight4_supports(code)
    fast = coplanar_quadruples(secant_sections(ps))
    assert np.array_equal(slow, fast)


def test_theorem_applies_to_classical_ovoid_codes_q4():
    # the same three designs arise from the elliptic quadric's code
    ps = elliptic_quadric(4)
    code = _code_of_points(ps)
    blocks, ratio = supports_of_weight(code, 12)
    assert ratio == 3 and blocks.shape[0] == 68
    d = verify_design(blocks, 17, expected_lambda=22)
    assert d.verified
    comp = complement_design(d)
    assert comp.verified and comp.lam == 1 and comp.k == 5
    d4 = verify_design(dual_weight4_supports(code), 17, expected_lambda=2)
    assert d4.verified


def test_theorem_applies_to_tits_ovoid_code_q8():
    ps = tits_ovoid(8)
    code = _code_of_points(ps)
    blocks, ratio = supports_of_weight(code, 56)
    assert ratio == 7 and blocks.shape[0] == 520
    d = verify_design(blocks, 65, expected_lambda=330)
    assert d.verified
    comp = complement_design(d)
    assert comp.verified and comp.lam == 1 and comp.k == 9
    d4 = verify_design(dual_weight4_supports(code), 65, expected_lambda=6)
    assert d4.verified


def test_weight_zero_support_is_empty():
    code = build_cyclic_code(tower(2), 15)
    blocks, ratio = supports_of_weight(code, 0)
    assert blocks.shape == (1, 0) and ratio == 1


def test_triple_counts_against_itertools_oracle():
    code = build_cyclic_code(tower(2), 15)
    blocks, _ = supports_of_weight(code, 12)
    design = verify_design(blocks, 17)
    oracle = {}
    for row in blocks:
        for tri in combinations(sorted(int(x) for x in row), 3):
            oracle[tri] = oracle.get(tri, 0) + 1
    assert len(oracle) == comb(17, 3)
    assert set(oracle.values()) == {design.lam}


def test_non_design_reports_witnesses():
    code = build_cyclic_code(tower(2), 15)
    blocks, _ = supports_of_weight(code, 12)
    broken = blocks[:-1]
    rep = verify_design(broken, 17)
    assert not rep.verified
    assert rep.failure and "witness_low" in rep.failure
    lo = rep.failure["witness_low"]
    hi = rep.failure["witness_high"]
    assert lo[3] < hi[3]
    # the witness triples genuinely achieve the reported coverages
    for a, b, c, cov in (lo, hi):
        found = sum(
            1 for row in broken if {a, b, c}.issubset({int(x) for x in row})
        )
        assert found == cov


def test_expected_lambda_mismatch_fails():
    code = build_cyclic_code(tower(2), 15)
    blocks, _ = supports_of_weight(code, 12)
    rep = verify_design(blocks, 17, expected_lambda=21)
    assert not rep.verified and rep.failure == {"lambda": 22, "expected": 21}


def test_mixed_block_sizes_rejected():
    with pytest.raises(ValueError):
        verify_design(np.array([[0, 1, 2], [0, 1, 2, 3]], dtype=object), 17)


def test_duplicate_blocks_rejected():
    with pytest.raises(ValueError):
        verify_design([(0, 1, 2, 3), (0, 1, 2, 3)], 17)
