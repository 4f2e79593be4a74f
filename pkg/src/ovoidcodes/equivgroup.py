"""Projective-semilinear equivalence of ovoids: invariant fingerprints as a
pre-filter, exact frame-backtracking over all of PGammaL(4, q) at q <= 8,
and randomized frame sampling beyond.

A candidate map is fixed by a field automorphism plus the images of a
projective frame; the search holds one frame of the source set fixed and
scans ordered image tuples in the target set, pruning with probe points
(the first probe is confined to a plane section, which filters an order of
magnitude harder than raw membership).  Every reported witness is
re-verified by an independent application of the map before it is trusted.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field
from itertools import combinations
from math import comb

import numpy as np

from . import _kernels
from .gf import FieldContext
from .projgeo import (
    ProjPointSet,
    apply_semilinear,
    certify_cap,
    secant_plane_rows,
    secant_sections,
)

EXACT_SEARCH_MAX_Q = 8
DEFAULT_BUDGET = 10**10


# ---------------------------------------------------------------------------
# fingerprints


@dataclass(frozen=True)
class Fingerprint:
    """Isomorphism-invariant data of an ovoid's inversive-plane structure.

    Holds the sorted multiset of per-pair circle coverages and the
    distribution of pairwise circle intersections; two equivalent ovoids
    must agree, a difference proves inequivalence, agreement is
    inconclusive.
    """

    q: int
    v: int
    circles: int
    pair_coverage: tuple[tuple[int, int], ...]
    intersection_dist: tuple[tuple[int, int], ...]

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "v": self.v,
            "circles": self.circles,
            "pair_coverage": [list(x) for x in self.pair_coverage],
            "intersection_dist": [list(x) for x in self.intersection_dist],
        }


def fingerprint(ps: ProjPointSet) -> Fingerprint:
    """Fingerprint from the plane sections (the inversive-plane blocks).

    The intersection distribution is computed from the coverage moments:
    two circles share at most two points (two planes meet in a line, and a
    line meets a cap twice), so the counts of circle pairs meeting in 0, 1
    and 2 points are exactly determined by sum C(cover(pair), 2) and
    sum C(cover(point), 2).
    """
    if "fingerprint" in ps._cache:
        return ps._cache["fingerprint"]
    sections = secant_sections(ps)
    v = len(ps)
    b, k = sections.shape

    pair_tmpl = np.array(list(combinations(range(k), 2)), dtype=np.int64)
    pairs = sections[:, pair_tmpl]  # (b, C(k,2), 2)
    flat = pairs.reshape(-1, 2)
    lo = np.minimum(flat[:, 0], flat[:, 1]).astype(np.int64)
    hi = np.maximum(flat[:, 0], flat[:, 1]).astype(np.int64)
    pair_counts = np.zeros(v * v, dtype=np.int64)
    np.add.at(pair_counts, lo * v + hi, 1)
    iu = np.triu_indices(v, k=1)
    cover = pair_counts.reshape(v, v)[iu]
    vals, cnts = np.unique(cover, return_counts=True)
    coverage_ms = tuple((int(a), int(c)) for a, c in zip(vals, cnts))

    point_cover = np.bincount(sections.ravel(), minlength=v).astype(object)
    n2 = int(sum(int(c) * (int(c) - 1) // 2 for c in cover))
    moment1 = int(sum(int(c) * (int(c) - 1) // 2 for c in point_cover))
    n1 = moment1 - 2 * n2
    n0 = comb(b, 2) - n1 - n2
    if min(n0, n1, n2) < 0:
        raise ArithmeticError("circle intersection moments inconsistent (arithmetic bug)")
    dist = tuple((s, c) for s, c in ((0, n0), (1, n1), (2, n2)) if c)

    fp = Fingerprint(q=ps.q, v=v, circles=b, pair_coverage=coverage_ms, intersection_dist=dist)
    ps._cache["fingerprint"] = fp
    return fp


# ---------------------------------------------------------------------------
# frames and map construction


def gf_mat_inv(mat: np.ndarray, fld: FieldContext) -> np.ndarray:
    n = mat.shape[0]
    work = np.zeros((n, 2 * n), dtype=np.int64)
    work[:, :n] = mat
    for i in range(n):
        work[i, n + i] = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r, col]), None)
        if piv is None:
            raise np.linalg.LinAlgError("matrix is singular over GF(q)")
        work[[col, piv]] = work[[piv, col]]
        s = fld.inv(int(work[col, col]))
        work[col] = [fld.mul(s, int(x)) for x in work[col]]
        for r in range(n):
            if r != col and work[r, col]:
                f = int(work[r, col])
                work[r] ^= np.array([fld.mul(f, int(x)) for x in work[col]], dtype=np.int64)
    return work[:, n:].astype(np.uint8)


def gf_mat_vec(mat: np.ndarray, vec: np.ndarray, fld: FieldContext) -> np.ndarray:
    out = np.zeros(mat.shape[0], dtype=np.int64)
    for r in range(mat.shape[0]):
        acc = 0
        for c in range(mat.shape[1]):
            acc ^= fld.mul(int(mat[r, c]), int(vec[c]))
        out[r] = acc
    return out.astype(np.uint8)


@dataclass
class SourceFrame:
    """Greedy-lexicographic frame of a point set plus probe bookkeeping."""

    indices: tuple[int, int, int, int, int]
    probes: tuple[int, int, int]
    s_inv: np.ndarray
    u_all: np.ndarray


def find_frame(ps: ProjPointSet) -> SourceFrame:
    """First five points (in the set's order) forming a projective frame.

    The first probe point is chosen on the plane section through the first
    three frame points so its image under any candidate map is confined to
    one target circle.
    """
    fld = ps.field
    pts = ps.points.astype(np.int64)
    n = len(ps)
    from .cycliccode import rank_over_gf

    i1, i2 = 0, 1
    i3 = next(
        (i for i in range(n) if i not in (i1, i2) and rank_over_gf(pts[[i1, i2, i]], fld) == 3),
        None,
    )
    if i3 is None:
        raise ValueError("point set spans no plane")
    i4 = next(
        (i for i in range(n) if i not in (i1, i2, i3) and rank_over_gf(pts[[i1, i2, i3, i]], fld) == 4),
        None,
    )
    if i4 is None:
        raise ValueError("point set spans no 3-space")
    P = np.zeros((4, 4), dtype=np.uint8)
    P[:, 0], P[:, 1], P[:, 2], P[:, 3] = pts[i1], pts[i2], pts[i3], pts[i4]
    Pinv = gf_mat_inv(P, fld)
    i5 = c5 = None
    for i in range(n):
        if i in (i1, i2, i3, i4):
            continue
        c = gf_mat_vec(Pinv, pts[i], fld)
        if np.all(c != 0):
            i5, c5 = i, c
            break
    if i5 is None:
        raise ValueError("no fifth frame point with full support exists")

    # S maps the standard frame to (a1..a5); its inverse sends a5 to all-ones
    s_inv = np.zeros((4, 4), dtype=np.uint8)
    for r in range(4):
        s = fld.inv(int(c5[r]))
        for c in range(4):
            s_inv[r, c] = fld.mul(s, int(Pinv[r, c]))

    mul = fld.mul_table()
    u_all = np.zeros((n, 4), dtype=np.uint8)
    for r in range(4):
        acc = mul[s_inv[r, 0], ps.points[:, 0]]
        for c in range(1, 4):
            acc = acc ^ mul[s_inv[r, c], ps.points[:, c]]
        u_all[:, r] = acc

    # probe on the section through the first three frame points: its image
    # coordinates have a zero in the a4 slot, i.e. the point is coplanar
    frame = (i1, i2, i3, i4, i5)
    p6 = next(
        (
            i
            for i in range(n)
            if i not in frame and rank_over_gf(pts[[i1, i2, i3, i]], fld) == 3
        ),
        None,
    )
    if p6 is None:
        raise ValueError("no probe point on the first frame plane")
    rest = [i for i in range(n) if i not in frame and i != p6]
    if len(rest) < 2:
        raise ValueError("point set too small for probe selection")
    return SourceFrame(indices=frame, probes=(p6, rest[0], rest[1]), s_inv=s_inv, u_all=u_all)


def _witness_matrix(Bpts: np.ndarray, wit: np.ndarray, src: SourceFrame, fld: FieldContext) -> np.ndarray:
    """Projectivity matrix from a frame-image witness row, canonically scaled."""
    i1, i2, i3, i4, i5 = (int(x) for x in wit)
    B4 = np.zeros((4, 4), dtype=np.uint8)
    B4[:, 0], B4[:, 1], B4[:, 2], B4[:, 3] = Bpts[i1], Bpts[i2], Bpts[i3], Bpts[i4]
    inv4 = gf_mat_inv(B4, fld)
    c = gf_mat_vec(inv4, Bpts[i5], fld)
    if not np.all(c != 0):
        raise ArithmeticError("witness image tuple is not a frame (arithmetic bug)")
    M = np.zeros((4, 4), dtype=np.uint8)
    for r in range(4):
        for cc in range(4):
            acc = 0
            for t in range(4):
                acc ^= fld.mul(fld.mul(int(B4[r, t]), int(c[t])), int(src.s_inv[t, cc]))
            M[r, cc] = acc
    flat = M.ravel()
    lead = int(flat[np.argmax(flat != 0)])
    s = fld.inv(lead)
    return np.array([[fld.mul(s, int(x)) for x in row] for row in M], dtype=np.uint8)


# ---------------------------------------------------------------------------
# the search


@dataclass
class EquivalenceReport:
    verdict: str  # equivalent | inequivalent | inconclusive
    reason: str
    mode: str
    witness_matrix: list[list[int]] | None = None
    witness_frobenius: int | None = None
    witnesses_found: int = 0
    fingerprint_a: Fingerprint | None = None
    fingerprint_b: Fingerprint | None = None
    fingerprints_equal: bool | None = None
    candidates: int = 0
    tuples: int = 0
    elapsed: float = 0.0
    extra_witnesses: list = dc_field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "mode": self.mode,
            "witness": None
            if self.witness_matrix is None
            else {"matrix": self.witness_matrix, "frobenius_exponent": self.witness_frobenius},
            "witnesses_found": self.witnesses_found,
            "fingerprints_equal": self.fingerprints_equal,
            "fingerprint_a": None if self.fingerprint_a is None else self.fingerprint_a.to_dict(),
            "fingerprint_b": None if self.fingerprint_b is None else self.fingerprint_b.to_dict(),
            "candidates": self.candidates,
            "tuples": self.tuples,
        }


def _sorted_copy(ps: ProjPointSet) -> ProjPointSet:
    order = np.argsort(ps.codes, kind="stable")
    return ProjPointSet(ps.q, ps.points[order], provenance=ps.provenance + "+sorted")


def _target_tables(B: ProjPointSet):
    """member_raw / plane_row / per-circle raw bitmaps for the search."""
    if "search_tables" not in B._cache:
        q = B.q
        mul = B.field.mul_table()
        member_raw = B.member_raw()
        plane_row, sections = secant_plane_rows(B)
        circle_raw = np.zeros((sections.shape[0], q**4), dtype=np.uint8)
        for s in range(sections.shape[0]):
            pts = B.points[sections[s]]
            for lam in range(1, q):
                circle_raw[s, _kernels.pack_codes(mul[lam, pts], q)] = 1
        B._cache["search_tables"] = (member_raw, plane_row, circle_raw)
    return B._cache["search_tables"]


def _verify_witness(A: ProjPointSet, B: ProjPointSet, mat: np.ndarray, frob: int) -> bool:
    image = apply_semilinear(A, mat, frob)
    return sorted(image.codes.tolist()) == sorted(B.codes.tolist())


def _require_certified_ovoid(ps: ProjPointSet, impl=None):
    cert = ps._cache.get("certificate")
    if cert is None:
        cert = certify_cap(ps, impl=impl)
    if not cert.is_ovoid:
        raise ValueError(f"{ps.provenance}: not a certified ovoid")


def search_equivalence(
    A: ProjPointSet,
    B: ProjPointSet,
    budget: int = DEFAULT_BUDGET,
    exact: bool | None = None,
    seed: int = 0,
    max_witnesses: int = 1,
    impl: str | None = None,
) -> EquivalenceReport:
    """Decide whether some element of PGammaL(4, q) maps A onto B.

    Exact mode (default for q <= 8) scans, per field automorphism, every
    ordered frame-image tuple in B; exhausting the space without a witness
    proves inequivalence.  Beyond q = 8 a seeded random frame sampler runs
    instead, and only 'equivalent' (witness) or 'inconclusive' can result.
    A fingerprint mismatch short-circuits to 'inequivalent' without search.
    """
    t0 = time.perf_counter()
    if A.q != B.q:
        raise ValueError("point sets live over different fields")
    if len(A) != len(B):
        raise ValueError("point sets have different sizes")
    q, m = A.q, A.m
    _require_certified_ovoid(A, impl=impl)
    _require_certified_ovoid(B, impl=impl)
    if exact is None:
        exact = q <= EXACT_SEARCH_MAX_Q
    if exact and q > EXACT_SEARCH_MAX_Q:
        raise ValueError(f"exact search is limited to q <= {EXACT_SEARCH_MAX_Q}")
    mode = "exact" if exact else "sampling"

    fp_a, fp_b = fingerprint(A), fingerprint(B)
    fp_equal = fp_a == fp_b
    report = EquivalenceReport(
        verdict="inconclusive",
        reason="",
        mode=mode,
        fingerprint_a=fp_a,
        fingerprint_b=fp_b,
        fingerprints_equal=fp_equal,
    )
    if not fp_equal:
        report.verdict = "inequivalent"
        report.reason = "fingerprint mismatch (true invariant differs)"
        report.elapsed = time.perf_counter() - t0
        return report

    if max_witnesses == 1 and sorted(A.codes.tolist()) == sorted(B.codes.tolist()):
        ident = np.eye(4, dtype=np.uint8)
        report.verdict = "equivalent"
        report.reason = "sets are identical"
        report.witness_matrix = ident.tolist()
        report.witness_frobenius = 0
        report.witnesses_found = 1
        report.elapsed = time.perf_counter() - t0
        return report

    Bs = _sorted_copy(B)
    mul = B.field.mul_table()
    inv = B.field.inv_table()

    if not exact:
        return _sampling_search(A, B, Bs, report, budget, seed, t0)

    member_raw, plane_row, circle_raw = _target_tables(Bs)
    remaining = budget
    witnesses = []
    exhausted_all = True
    for frob in range(m):
        At = apply_semilinear(A, np.eye(4, dtype=np.uint8), frob)
        Ats = _sorted_copy(At)
        src = find_frame(Ats)
        status, wits, cand, tup = _kernels.search_frame_maps(
            Bs.points,
            Bs.codes.astype(np.int64),
            member_raw,
            plane_row,
            circle_raw,
            src.u_all,
            src.probes,
            mul,
            inv,
            q,
            m,
            0,
            len(Bs),
            remaining,
            max_witnesses - len(witnesses),
            impl=impl,
        )
        report.candidates += cand
        report.tuples += tup
        remaining -= cand
        for wit in wits:
            mat = _witness_matrix(Bs.points, wit, src, B.field)
            if not _verify_witness(A, B, mat, frob):
                raise ArithmeticError("witness failed independent re-verification")
            witnesses.append((mat, frob))
        if status == 1:
            exhausted_all = False
            break
        if len(witnesses) >= max_witnesses:
            exhausted_all = status == 0 and frob == m - 1
            break

    report.elapsed = time.perf_counter() - t0
    if witnesses:
        mat, frob = witnesses[0]
        report.verdict = "equivalent"
        report.reason = "witness map found and re-verified"
        report.witness_matrix = [[int(x) for x in row] for row in mat]
        report.witness_frobenius = frob
        report.witnesses_found = len(witnesses)
        report.extra_witnesses = [
            {"matrix": [[int(x) for x in row] for row in w], "frobenius_exponent": f}
            for w, f in witnesses[1:]
        ]
        return report
    if exhausted_all:
        report.verdict = "inequivalent"
        report.reason = "frame space exhausted over every field automorphism"
    else:
        report.verdict = "inconclusive"
        report.reason = "budget exhausted before the frame space was covered"
    return report


def _sampling_search(A, B, Bs, report, budget, seed, t0):
    """Randomized frame-image sampling for q beyond exact range."""
    q, m = A.q, A.m
    fld = A.field
    rng = np.random.default_rng(seed)
    member_raw = Bs.member_raw()
    nB = len(Bs)
    frames = {frob: find_frame(_sorted_copy(apply_semilinear(A, np.eye(4, dtype=np.uint8), frob)))
              for frob in range(m)}
    mul = fld.mul_table()
    attempts = 0
    while attempts < budget:
        attempts += 1
        frob = int(rng.integers(0, m))
        src = frames[frob]
        pick = rng.choice(nB, size=5, replace=False)
        B4 = np.zeros((4, 4), dtype=np.uint8)
        for c in range(4):
            B4[:, c] = Bs.points[pick[c]]
        try:
            inv4 = gf_mat_inv(B4, fld)
        except np.linalg.LinAlgError:
            continue
        cvec = gf_mat_vec(inv4, Bs.points[pick[4]], fld)
        if not np.all(cvec != 0):
            continue
        # image of every source point under B4 . diag(c) . Sinv
        Mc = np.zeros((4, 4), dtype=np.uint8)
        for r in range(4):
            for cc in range(4):
                Mc[r, cc] = fld.mul(int(B4[r, cc]), int(cvec[cc]))
        imgs = np.zeros((src.u_all.shape[0], 4), dtype=np.uint8)
        for r in range(4):
            acc = mul[Mc[r, 0], src.u_all[:, 0]]
            for cc in range(1, 4):
                acc = acc ^ mul[Mc[r, cc], src.u_all[:, cc]]
            imgs[:, r] = acc
        codes = _kernels.pack_codes(imgs, q)
        if np.all(member_raw[codes] != 0):
            mat = np.zeros((4, 4), dtype=np.uint8)
            for r in range(4):
                for cc in range(4):
                    acc = 0
                    for t in range(4):
                        acc ^= fld.mul(int(Mc[r, t]), int(src.s_inv[t, cc]))
                    mat[r, cc] = acc
            flat = mat.ravel()
            s = fld.inv(int(flat[np.argmax(flat != 0)]))
            mat = np.array([[fld.mul(s, int(x)) for x in row] for row in mat], dtype=np.uint8)
            if _verify_witness(A, B, mat, frob):
                report.verdict = "equivalent"
                report.reason = f"witness found by random sampling after {attempts} attempts"
                report.witness_matrix = [[int(x) for x in row] for row in mat]
                report.witness_frobenius = frob
                report.witnesses_found = 1
                report.candidates = attempts
                report.elapsed = time.perf_counter() - t0
                return report
    report.verdict = "inconclusive"
    report.reason = f"no witness in {attempts} random frame samples"
    report.candidates = attempts
    report.elapsed = time.perf_counter() - t0
    return report


def random_disguise(ps: ProjPointSet, rng: np.random.Generator) -> tuple[ProjPointSet, np.ndarray, int]:
    """Image of the set under a random secret semilinear map (for round trips)."""
    from .projgeo import random_invertible_matrix

    mat = random_invertible_matrix(ps.q, rng)
    frob = int(rng.integers(0, ps.m))
    return apply_semilinear(ps, mat, frob), mat, frob
