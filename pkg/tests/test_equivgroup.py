"""Equivalence machinery: fingerprints, frame search, witness soundness."""

from unittest import mock

import numpy as np
import pytest

from ovoidcodes._kernels import HAVE_NUMBA
from ovoidcodes.cycliccode import build_cyclic_code
from ovoidcodes.equivgroup import (
    Fingerprint,
    fingerprint,
    find_frame,
    random_disguise,
    search_equivalence,
)
from ovoidcodes.gf import tower
from ovoidcodes.projgeo import (
    apply_semilinear,
    elliptic_quadric,
    points_from_code,
    random_invertible_matrix,
    tits_ovoid,
)


def _code_ovoid(m):
    q = 2**m
    return points_from_code(build_cyclic_code(tower(m), q * q - 1))


def test_fingerprint_structure_q4():
    ps = elliptic_quadric(4)
    fp = fingerprint(ps)
    assert fp.q == 4 and fp.v == 17 and fp.circles == 68
    # every point pair lies on exactly q+1 circles of the inversive plane
    assert fp.pair_coverage == ((5, 136),)
    assert sum(c for _, c in fp.intersection_dist) == 68 * 67 // 2


def test_fingerprint_invariant_under_coordinate_changes():
    ps = elliptic_quadric(4)
    base = fingerprint(ps)
    rng = np.random.default_rng(11)
    for _ in range(10):
        mat = random_invertible_matrix(4, rng)
        frob = int(rng.integers(0, 2))
        assert fingerprint(apply_semilinear(ps, mat, frob)) == base


def test_fingerprint_intersection_moments_match_brute_force():
    ps = elliptic_quadric(4)
    fp = fingerprint(ps)
    from ovoidcodes.projgeo import secant_sections

    sections = secant_sections(ps)
    masks = [frozenset(int(x) for x in row) for row in sections]
    hist = {0: 0, 1: 0, 2: 0}
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            hist[len(masks[i] & masks[j])] += 1
    assert dict(fp.intersection_dist) == {k: v for k, v in hist.items() if v}


def test_fingerprints_elliptic_vs_tits_q8_agree_hence_inconclusive():
    # both components are parameter-determined for ovoids of equal q, so the
    # two inequivalent families agree and discrimination falls to the exact
    # search (demonstrated in the acceptance suite via the code ovoid)
    fe = fingerprint(elliptic_quadric(8))
    ft = fingerprint(tits_ovoid(8))
    assert fe == ft
    assert fe.pair_coverage == ((9, 65 * 64 // 2),)


def test_identity_sets_short_circuit():
    ps = elliptic_quadric(4)
    rep = search_equivalence(ps, ps)
    assert rep.verdict == "equivalent"
    assert rep.witness_matrix == np.eye(4, dtype=int).tolist()
    assert rep.witness_frobenius == 0


def test_self_search_finds_multiple_witnesses():
    ps = elliptic_quadric(4)
    rep = search_equivalence(ps, ps, max_witnesses=2)
    assert rep.verdict == "equivalent"
    assert rep.witnesses_found == 2
    assert rep.extra_witnesses  # a second, distinct stabilizer element


@pytest.mark.parametrize("make", [elliptic_quadric, lambda q: _code_ovoid(q.bit_length() - 1)])
def test_planted_isomorphism_round_trip_q4(make):
    base = make(4)
    rng = np.random.default_rng(23)
    for _ in range(3):
        disguised, mat, frob = random_disguise(base, rng)
        rep = search_equivalence(base, disguised)
        assert rep.verdict == "equivalent"
        assert rep.witness_matrix is not None
        # the witness re-verification is done inside search_equivalence;
        # re-apply it here independently as well
        wit = np.array(rep.witness_matrix, dtype=np.uint8)
        image = apply_semilinear(base, wit, rep.witness_frobenius)
        assert sorted(image.codes.tolist()) == sorted(disguised.codes.tolist())


def test_planted_round_trip_q8_all_three_ovoids():
    rng = np.random.default_rng(31)
    for base in (elliptic_quadric(8), _code_ovoid(3), tits_ovoid(8)):
        disguised, _, _ = random_disguise(base, rng)
        rep = search_equivalence(base, disguised)
        assert rep.verdict == "equivalent", (base.provenance, rep.reason)


def test_search_symmetry_q4():
    a = _code_ovoid(2)
    b = elliptic_quadric(4)
    rab = search_equivalence(a, b)
    rba = search_equivalence(b, a)
    assert rab.verdict == rba.verdict == "equivalent"


def test_zero_budget_is_inconclusive_never_inequivalent():
    a = _code_ovoid(2)
    b = elliptic_quadric(4)
    rep = search_equivalence(a, b, budget=0)
    assert rep.verdict == "inconclusive"


def test_fingerprint_mismatch_short_circuits_to_inequivalent():
    a = _code_ovoid(2)
    b = elliptic_quadric(4)
    fake = Fingerprint(q=4, v=17, circles=68, pair_coverage=((5, 136),), intersection_dist=((9, 9),))
    real = fingerprint(b)
    with mock.patch("ovoidcodes.equivgroup.fingerprint", side_effect=[fake, real]):
        rep = search_equivalence(a, b)
    assert rep.verdict == "inequivalent"
    assert rep.candidates == 0  # no search ran
    assert "fingerprint" in rep.reason


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
def test_backends_agree_on_witness_q4():
    a = _code_ovoid(2)
    b = elliptic_quadric(4)
    r_nb = search_equivalence(a, b, impl="numba")
    a2 = _code_ovoid(2)
    b2 = elliptic_quadric(4)
    r_np = search_equivalence(a2, b2, impl="numpy")
    assert r_nb.verdict == r_np.verdict == "equivalent"
    assert r_nb.witness_matrix == r_np.witness_matrix
    assert r_nb.witness_frobenius == r_np.witness_frobenius


def test_frame_is_generic():
    ps = elliptic_quadric(8)
    frame = find_frame(ps)
    assert len(set(frame.indices)) == 5
    assert len(set(frame.probes) | set(frame.indices)) == 8
    # Sinv sends the fifth frame point to the all-ones vector
    from ovoidcodes.equivgroup import gf_mat_vec

    u5 = gf_mat_vec(frame.s_inv, ps.points[frame.indices[4]], ps.field)
    assert u5.tolist() == [1, 1, 1, 1]
    # and u_all holds exactly those products
    assert np.array_equal(frame.u_all[frame.indices[4]], u5)


def test_non_ovoid_input_rejected():
    ps = elliptic_quadric(4)
    pts = ps.points[:10]
    from ovoidcodes.projgeo import ProjPointSet

    small = ProjPointSet(4, pts, "fragment")
    with pytest.raises(ValueError):
        search_equivalence(small, small)


def test_sampling_mode_q16_planted():
    ps = elliptic_quadric(16)
    rng = np.random.default_rng(5)
    mat = random_invertible_matrix(16, rng)
    disguised = apply_semilinear(ps, mat, 1)
    rep = search_equivalence(ps, disguised, budget=100_000, seed=0)
    assert rep.mode == "sampling"
    assert rep.verdict in ("equivalent", "inconclusive")
    if rep.verdict == "equivalent":
        wit = np.array(rep.witness_matrix, dtype=np.uint8)
        image = apply_semilinear(ps, wit, rep.witness_frobenius)
        assert sorted(image.codes.tolist()) == sorted(disguised.codes.tolist())


def test_exact_mode_rejected_beyond_q8():
    ps = elliptic_quadric(16)
    with pytest.raises(ValueError):
        search_equivalence(ps, ps, exact=True)
