"""Points of PG(3, q), the two classical ovoid constructions, code-to-point
extraction, and cap certification.

Points are length-4 uint8 rows normalized so the first nonzero coordinate
is 1; a point set keeps its rows in construction order plus packed integer
codes for O(1) membership.  Certification checks every point triple for
collinearity (line sweep by default, naive rank scan as an oracle) and
tallies the intersection size of every plane of PG(3, q).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .gf import FieldContext, field


def _m_of(q: int) -> int:
    m = q.bit_length() - 1
    if 1 << m != q or m < 1:
        raise ValueError(f"q={q} is not a positive power of two")
    return m


def normalize_rows(rows: np.ndarray, fld: FieldContext) -> np.ndarray:
    """Scale each nonzero row so its first nonzero coordinate is 1."""
    rows = np.asarray(rows, dtype=np.uint8)
    if (~rows.any(axis=1)).any():
        raise ValueError("zero vector is not a projective point")
    inv = fld.inv_table()
    mul = fld.mul_table()
    first = np.argmax(rows != 0, axis=1)
    lead = rows[np.arange(rows.shape[0]), first]
    return mul[inv[lead][:, None], rows]


class ProjPointSet:
    """Ordered distinct points of PG(3, q) with a provenance tag."""

    def __init__(self, q: int, points: np.ndarray, provenance: str):
        self.q = q
        self.m = _m_of(q)
        self.field = field(self.m)
        pts = normalize_rows(points, self.field)
        self.points = np.ascontiguousarray(pts, dtype=np.uint8)
        self.codes = _kernels.pack_codes(self.points, q)
        self.provenance = provenance
        self._cache: dict = {}
        if len(set(self.codes.tolist())) != len(self.codes):
            raise ValueError("point set contains duplicate projective points")

    def __len__(self):
        return self.points.shape[0]

    def lookup_table(self) -> np.ndarray:
        if "lookup" not in self._cache:
            t = np.full(self.q**4, -1, dtype=np.int32)
            t[self.codes] = np.arange(len(self), dtype=np.int32)
            self._cache["lookup"] = t
        return self._cache["lookup"]

    def member_raw(self) -> np.ndarray:
        """Raw-code membership: 1 at every scalar multiple of a point."""
        if "member_raw" not in self._cache:
            mul = self.field.mul_table()
            t = np.zeros(self.q**4, dtype=np.uint8)
            for s in range(1, self.q):
                t[_kernels.pack_codes(mul[s, self.points], self.q)] = 1
            self._cache["member_raw"] = t
        return self._cache["member_raw"]


# ---------------------------------------------------------------------------
# constructions


def elliptic_quadric(q: int) -> ProjPointSet:
    """Classical ovoid: (x, y, x^2 + x y + a y^2, 1) plus (0, 0, 1, 0).

    The parameter a is the smallest-bits element making t^2 + t + a rootless
    over GF(q), verified by exhaustive root check.
    """
    m = _m_of(q)
    if m < 2:
        raise ValueError("elliptic quadric requires q = 2^m with m >= 2")
    fld = field(m)
    a = None
    for cand in range(q):
        if all(fld.mul(t, t) ^ t ^ cand != 0 for t in range(q)):
            a = cand
            break
    if a is None:
        raise RuntimeError("no rootless quadratic parameter found (unreachable)")
    mul = fld.mul_table()
    xs, ys = np.meshgrid(np.arange(q, dtype=np.uint8), np.arange(q, dtype=np.uint8), indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    y2 = mul[ys, ys]
    z = mul[xs, xs] ^ mul[xs, ys] ^ mul[a, y2]
    pts = np.stack([xs, ys, z, np.ones_like(xs)], axis=1)
    pts = np.concatenate([pts, np.array([[0, 0, 1, 0]], dtype=np.uint8)], axis=0)
    ps = ProjPointSet(q, pts, provenance=f"elliptic(q={q}, a={a:#x})")
    ps.quadric_parameter = a
    return ps


def tits_ovoid(q: int) -> ProjPointSet:
    """Non-classical ovoid for q = 2^(2e+1), e >= 1:
    (x, y, x^s + x y + y^(s+2), 1) with s = 2^(e+1), plus (0, 0, 1, 0)."""
    m = _m_of(q)
    if m < 3 or m % 2 == 0:
        raise ValueError(f"q={q} is not 2^(2e+1) with e >= 1")
    e = (m - 1) // 2
    sigma = 1 << (e + 1)
    fld = field(m)
    mul = fld.mul_table()
    pow_sigma = np.array([fld.pow(v, sigma) for v in range(q)], dtype=np.uint8)
    xs, ys = np.meshgrid(np.arange(q, dtype=np.uint8), np.arange(q, dtype=np.uint8), indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    y_s2 = mul[pow_sigma[ys], mul[ys, ys]]
    z = pow_sigma[xs] ^ mul[xs, ys] ^ y_s2
    pts = np.stack([xs, ys, z, np.ones_like(xs)], axis=1)
    pts = np.concatenate([pts, np.array([[0, 0, 1, 0]], dtype=np.uint8)], axis=0)
    ps = ProjPointSet(q, pts, provenance=f"tits(q={q}, sigma={sigma})")
    ps.sigma = sigma
    return ps


def points_from_code(code) -> ProjPointSet:
    """Columns of the generator matrix as points, after verifying the code
    has ovoid-code parameters (length q^2+1, rank 4, weights q^2-q and q^2).
    """
    q, n = code.q, code.n
    if n != q * q + 1:
        raise ValueError(f"length {n} != q^2+1 = {q * q + 1}")
    if code.k != 4:
        raise ValueError(f"rank {code.k} != 4")
    wd = code.weight_distribution()
    expect = {0: 1, q * q - q: (q * q - q) * (q * q + 1), q * q: (q - 1) * (q * q + 1)}
    if wd != expect:
        raise ValueError(f"weight distribution {wd} is not the forced ovoid-code enumerator")
    cols = np.ascontiguousarray(code.matrix.T, dtype=np.uint8)
    return ProjPointSet(q, cols, provenance=f"from-code({code.origin})")


# ---------------------------------------------------------------------------
# certification


def enumerate_planes(q: int) -> np.ndarray:
    """All q^3 + q^2 + q + 1 planes as normalized dual 4-vectors."""
    qs = np.arange(q, dtype=np.uint8)
    a, b, c = (x.ravel() for x in np.meshgrid(qs, qs, qs, indexing="ij"))
    one = np.ones_like(a)
    zero = np.zeros_like(a)
    block1 = np.stack([one, a, b, c], axis=1)
    a2, b2 = (x.ravel() for x in np.meshgrid(qs, qs, indexing="ij"))
    block2 = np.stack([np.zeros_like(a2), np.ones_like(a2), a2, b2], axis=1)
    block3 = np.stack([zero[:q], zero[:q], one[:q], qs], axis=1)
    block4 = np.array([[0, 0, 0, 1]], dtype=np.uint8)
    return np.concatenate([block1, block2, block3, block4], axis=0)


@dataclass
class CapCertificate:
    """Outcome of exhaustive cap and plane-section checks."""

    q: int
    size: int
    is_cap: bool
    witness: tuple[int, int, int] | None
    plane_profile: dict[int, int]
    is_ovoid: bool
    method: str
    naive_agrees: bool | None = None

    def profile_matches_ovoid(self) -> bool:
        q = self.q
        return self.plane_profile == {1: q * q + 1, q + 1: q**3 + q}


def certify_cap(ps: ProjPointSet, impl: str | None = None, with_naive_oracle: bool = False) -> CapCertificate:
    """Check every triple for collinearity and profile every plane.

    The default triple check sweeps the q-1 further line points of each
    point pair against a hash of the set; the naive O(n^3) rank scan can be
    run alongside as an oracle (q <= 8 scale).
    """
    q = ps.q
    mul = ps.field.mul_table()
    inv = ps.field.inv_table()

    witness = _kernels.collinear_witness(ps.points, ps.lookup_table(), mul, inv, q, impl=impl)
    naive_agrees = None
    if with_naive_oracle:
        naive = _kernels.dependent_triple(ps.points, mul, inv, impl=impl)
        naive_agrees = (witness is None) == (naive is None)
        if witness is not None and naive is not None:
            naive_agrees = naive_agrees and tuple(naive) == tuple(witness)

    planes = enumerate_planes(q)
    counts = _kernels.plane_intersection_counts(planes, ps.points, mul, impl=impl)
    prof_vals, prof_cnts = np.unique(counts, return_counts=True)
    profile = {int(v): int(c) for v, c in zip(prof_vals, prof_cnts)}
    if sum(profile.values()) != q**3 + q**2 + q + 1:
        raise ArithmeticError("plane tally does not cover PG(3, q) (arithmetic bug)")

    is_cap = witness is None
    cert = CapCertificate(
        q=q,
        size=len(ps),
        is_cap=is_cap,
        witness=witness,
        plane_profile=profile,
        is_ovoid=False,
        method=f"line-sweep[{impl or _kernels.ACTIVE_BACKEND}]",
        naive_agrees=naive_agrees,
    )
    cert.is_ovoid = is_cap and len(ps) == q * q + 1 and cert.profile_matches_ovoid()

    ps._cache["certificate"] = cert
    ps._cache["plane_counts"] = counts
    ps._cache["planes"] = planes
    return cert


def secant_sections(ps: ProjPointSet) -> np.ndarray:
    """Point-index lists of all (q+1)-point plane sections, row per plane."""
    if "sections" not in ps._cache:
        if "plane_counts" not in ps._cache:
            certify_cap(ps)
        q = ps.q
        counts = ps._cache["plane_counts"]
        planes = ps._cache["planes"]
        sec_planes = planes[counts == q + 1]
        mul = ps.field.mul_table()
        acc = mul[sec_planes[:, 0][:, None], ps.points[None, :, 0]]
        for c in range(1, 4):
            acc = acc ^ mul[sec_planes[:, c][:, None], ps.points[None, :, c]]
        rows, cols = np.nonzero(acc == 0)
        if rows.size != sec_planes.shape[0] * (q + 1):
            raise ArithmeticError("secant sections are not all of size q+1")
        sections = cols.reshape(sec_planes.shape[0], q + 1).astype(np.int32)
        ps._cache["sections"] = sections
        ps._cache["secant_planes"] = sec_planes
    return ps._cache["sections"]


def secant_plane_rows(ps: ProjPointSet) -> tuple[np.ndarray, np.ndarray]:
    """(plane_row, sections): map from normalized plane code to secant row."""
    sections = secant_sections(ps)
    planes = ps._cache["secant_planes"]
    plane_row = np.full(ps.q**4, -1, dtype=np.int32)
    plane_row[_kernels.pack_codes(planes, ps.q)] = np.arange(planes.shape[0], dtype=np.int32)
    return plane_row, sections


# ---------------------------------------------------------------------------
# coordinate changes


def frobenius_table(q: int) -> np.ndarray:
    fld = field(_m_of(q))
    return np.array([fld.mul(v, v) for v in range(q)], dtype=np.uint8)


def apply_semilinear(ps: ProjPointSet, mat: np.ndarray, frob_exp: int = 0) -> ProjPointSet:
    """Image of the set under x -> M . x^(2^frob_exp), renormalized."""
    frob = frobenius_table(ps.q)
    pts = ps.points
    for _ in range(frob_exp % ps.m):
        pts = frob[pts]
    mul = ps.field.mul_table()
    out = np.zeros_like(pts)
    for rr in range(4):
        acc = mul[int(mat[rr, 0]), pts[:, 0]]
        for cc in range(1, 4):
            acc = acc ^ mul[int(mat[rr, cc]), pts[:, cc]]
        out[:, rr] = acc
    return ProjPointSet(ps.q, out, provenance=f"{ps.provenance}+map")


def random_invertible_matrix(q: int, rng: np.random.Generator) -> np.ndarray:
    from .cycliccode import rank_over_gf

    fld = field(_m_of(q))
    while True:
        mat = rng.integers(0, q, size=(4, 4)).astype(np.uint8)
        if rank_over_gf(mat, fld) == 4:
            return mat


# ---------------------------------------------------------------------------
# point-set file format: header "PG3 q=<q>", one point per line, hex symbols


def format_point_set(ps: ProjPointSet) -> str:
    lines = [f"PG3 q={ps.q}"]
    for row in ps.points:
        lines.append(" ".join(f"{int(v):x}" for v in row))
    return "\n".join(lines) + "\n"


def parse_point_set(text: str, provenance: str = "file") -> ProjPointSet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("PG3 q="):
        raise ValueError("point-set file must start with 'PG3 q=<q>'")
    q = int(lines[0].split("=", 1)[1])
    rows = []
    for ln in lines[1:]:
        row = [int(tok, 16) for tok in ln.split()]
        if len(row) != 4:
            raise ValueError("each point needs exactly 4 symbols")
        if any(v >= q for v in row):
            raise ValueError("symbol out of range for GF(q)")
        rows.append(row)
    return ProjPointSet(q, np.array(rows, dtype=np.uint8), provenance=provenance)
