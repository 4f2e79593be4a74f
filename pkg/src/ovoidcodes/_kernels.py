"""Hot inner loops: numba kernels with pure-numpy fallbacks.

Every public function here dispatches between a compiled kernel and a
vectorized numpy implementation.  The default backend is numba whenever it
imports; setting OVOIDCODES_DISABLE_NUMBA=1 (or a failed import) selects the
numpy path.  Both implementations are always importable so tests and the
benchmark script can compare them directly via the ``impl`` argument.

Conventions shared by all kernels: GF(q) symbols are uint8, points are rows
of (n, 4) arrays normalized so the first nonzero coordinate is 1, and a
point packs into the integer code ((c0*q + c1)*q + c2)*q + c3.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("OVOIDCODES_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _env in {"1", "true", "yes", "on"}

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled by environment flag")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # signature-compatible no-op decorator
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


ACTIVE_BACKEND = "numba" if HAVE_NUMBA else "numpy"


def _pick(impl, nb_fn, np_fn):
    if impl is None:
        impl = ACTIVE_BACKEND
    if impl == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        return nb_fn
    if impl == "numpy":
        return np_fn
    raise ValueError(f"unknown backend {impl!r}")


def pack_codes(points: np.ndarray, q: int) -> np.ndarray:
    """Integer code of each point row."""
    p = points.astype(np.int64)
    return (((p[:, 0] * q + p[:, 1]) * q + p[:, 2]) * q + p[:, 3]).astype(np.int64)


# ---------------------------------------------------------------------------
# collinear-triple detection


@njit(cache=True)
def _collinear_sweep_nb(pts, lookup, mul, inv, q):
    n = pts.shape[0]
    for i in range(n):
        x0 = pts[i, 0]
        x1 = pts[i, 1]
        x2 = pts[i, 2]
        x3 = pts[i, 3]
        for j in range(i + 1, n):
            y0 = pts[j, 0]
            y1 = pts[j, 1]
            y2 = pts[j, 2]
            y3 = pts[j, 3]
            best = -1
            for t in range(1, q):
                z0 = x0 ^ mul[t, y0]
                z1 = x1 ^ mul[t, y1]
                z2 = x2 ^ mul[t, y2]
                z3 = x3 ^ mul[t, y3]
                if z0 != 0:
                    s = inv[z0]
                elif z1 != 0:
                    s = inv[z1]
                elif z2 != 0:
                    s = inv[z2]
                elif z3 != 0:
                    s = inv[z3]
                else:
                    continue
                w0 = mul[s, z0]
                w1 = mul[s, z1]
                w2 = mul[s, z2]
                w3 = mul[s, z3]
                code = ((np.int64(w0) * q + w1) * q + w2) * q + w3
                k = lookup[code]
                if k >= 0 and k != i and k != j:
                    if best < 0 or k < best:
                        best = k
            if best >= 0:
                return i, j, best
    return -1, -1, -1


def _collinear_sweep_np(pts, lookup, mul, inv, q):
    n = pts.shape[0]
    for i in range(n - 1):
        x = pts[i]
        rest = pts[i + 1 :]
        nj = rest.shape[0]
        hits = np.full((q - 1, nj), -1, dtype=np.int64)
        for t in range(1, q):
            z = x[None, :] ^ mul[t, rest]
            first = np.argmax(z != 0, axis=1)
            s = inv[z[np.arange(nj), first]]
            w = mul[s[:, None], z]
            codes = (((w[:, 0].astype(np.int64) * q + w[:, 1]) * q + w[:, 2]) * q) + w[:, 3]
            k = lookup[codes]
            ok = (k >= 0) & (k != i) & (k != np.arange(i + 1, n))
            hits[t - 1] = np.where(ok, k, -1)
        any_hit = (hits >= 0).any(axis=0)
        if any_hit.any():
            jj = int(np.argmax(any_hit))
            col = hits[:, jj]
            kk = int(col[col >= 0].min())
            return i, jj + i + 1, kk
    return -1, -1, -1


def collinear_witness(pts, lookup, mul, inv, q, impl=None):
    """First collinear triple by line sweep, or None.

    For each point pair the q-1 further points of their line are probed
    against the set; scanning pairs in lexicographic order makes the returned
    triple the lexicographically first one.
    """
    fn = _pick(impl, _collinear_sweep_nb, _collinear_sweep_np)
    i, j, k = fn(pts, lookup, mul, inv, q)
    if i < 0:
        return None
    return tuple(sorted((int(i), int(j), int(k))))


@njit(cache=True)
def _rank_rows_nb(rows, mul, inv):
    m = rows.shape[0]
    work = rows.copy()
    rank = 0
    for col in range(4):
        piv = -1
        for r in range(rank, m):
            if work[r, col] != 0:
                piv = r
                break
        if piv < 0:
            continue
        tmp0 = work[rank, 0]
        tmp1 = work[rank, 1]
        tmp2 = work[rank, 2]
        tmp3 = work[rank, 3]
        work[rank, 0] = work[piv, 0]
        work[rank, 1] = work[piv, 1]
        work[rank, 2] = work[piv, 2]
        work[rank, 3] = work[piv, 3]
        work[piv, 0] = tmp0
        work[piv, 1] = tmp1
        work[piv, 2] = tmp2
        work[piv, 3] = tmp3
        s = inv[work[rank, col]]
        for cc in range(4):
            work[rank, cc] = mul[s, work[rank, cc]]
        for r in range(m):
            if r != rank and work[r, col] != 0:
                f = work[r, col]
                for cc in range(4):
                    work[r, cc] ^= mul[f, work[rank, cc]]
        rank += 1
        if rank == m:
            break
    return rank


@njit(cache=True)
def _dependent_triple_nb(cols, mul, inv):
    n = cols.shape[0]
    rows = np.empty((3, 4), np.uint8)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for cc in range(4):
                    rows[0, cc] = cols[i, cc]
                    rows[1, cc] = cols[j, cc]
                    rows[2, cc] = cols[k, cc]
                if _rank_rows_nb(rows, mul, inv) < 3:
                    return i, j, k
    return -1, -1, -1


def _dependent_triple_np(cols, mul, inv):
    n = cols.shape[0]
    if n < 3:
        return -1, -1, -1
    idx = np.array(
        [(i, j, k) for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)],
        dtype=np.int64,
    ).reshape(-1, 3)
    a = cols[idx[:, 0]].astype(np.uint8)
    b = cols[idx[:, 1]].astype(np.uint8)
    c = cols[idx[:, 2]].astype(np.uint8)

    def det3(u, v, w, c0, c1, c2):
        # char-2 3x3 determinant of the chosen coordinate columns
        t0 = mul[v[:, c1], w[:, c2]] ^ mul[v[:, c2], w[:, c1]]
        t1 = mul[v[:, c0], w[:, c2]] ^ mul[v[:, c2], w[:, c0]]
        t2 = mul[v[:, c0], w[:, c1]] ^ mul[v[:, c1], w[:, c0]]
        return mul[u[:, c0], t0] ^ mul[u[:, c1], t1] ^ mul[u[:, c2], t2]

    dep = np.ones(idx.shape[0], dtype=bool)
    for cset in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        dep &= det3(a, b, c, *cset) == 0
        if not dep.any():
            return -1, -1, -1
    w = int(np.argmax(dep))
    return int(idx[w, 0]), int(idx[w, 1]), int(idx[w, 2])


def dependent_triple(cols, mul, inv, impl=None):
    """First linearly dependent column triple (rank < 3), or None.

    Doubles as the naive O(n^3) collinearity oracle when the columns are
    normalized projective points.
    """
    fn = _pick(impl, _dependent_triple_nb, _dependent_triple_np)
    i, j, k = fn(cols, mul, inv)
    if i < 0:
        return None
    return (int(i), int(j), int(k))


# ---------------------------------------------------------------------------
# plane incidence profile


@njit(cache=True)
def _plane_counts_nb(planes, pts, mul):
    P = planes.shape[0]
    n = pts.shape[0]
    out = np.zeros(P, np.int32)
    for p in range(P):
        h0 = planes[p, 0]
        h1 = planes[p, 1]
        h2 = planes[p, 2]
        h3 = planes[p, 3]
        cnt = 0
        for i in range(n):
            v = mul[h0, pts[i, 0]] ^ mul[h1, pts[i, 1]] ^ mul[h2, pts[i, 2]] ^ mul[h3, pts[i, 3]]
            if v == 0:
                cnt += 1
        out[p] = cnt
    return out


def _plane_counts_np(planes, pts, mul):
    acc = mul[planes[:, 0][:, None], pts[None, :, 0]]
    for c in range(1, 4):
        acc = acc ^ mul[planes[:, c][:, None], pts[None, :, c]]
    return (acc == 0).sum(axis=1).astype(np.int32)


def plane_intersection_counts(planes, pts, mul, impl=None):
    """|plane ∩ point set| for every plane row."""
    fn = _pick(impl, _plane_counts_nb, _plane_counts_np)
    return fn(planes, pts, mul)


# ---------------------------------------------------------------------------
# codeword weight enumeration


@njit(cache=True)
def _weight_hist4_nb(s0, s1, s2, s3):
    q = s0.shape[0]
    n = s0.shape[1]
    hist = np.zeros(n + 1, np.int64)
    buf1 = np.empty(n, np.uint8)
    buf2 = np.empty(n, np.uint8)
    for c0 in range(q):
        r0 = s0[c0]
        for c1 in range(q):
            r1 = s1[c1]
            for i in range(n):
                buf1[i] = r0[i] ^ r1[i]
            for c2 in range(q):
                r2 = s2[c2]
                for i in range(n):
                    buf2[i] = buf1[i] ^ r2[i]
                for c3 in range(q):
                    r3 = s3[c3]
                    w = 0
                    for i in range(n):
                        if buf2[i] ^ r3[i]:
                            w += 1
                    hist[w] += 1
    return hist


def _weight_hist4_np(s0, s1, s2, s3):
    q, n = s0.shape
    hist = np.zeros(n + 1, np.int64)
    tail = s1[:, None, None, :] ^ s2[None, :, None, :] ^ s3[None, None, :, :]
    tail = tail.reshape(-1, n)
    for c0 in range(q):
        w = np.count_nonzero(tail ^ s0[c0], axis=1)
        hist += np.bincount(w, minlength=n + 1).astype(np.int64)
    return hist


def weight_histogram(scaled_rows, impl=None):
    """Histogram of codeword weights over all combinations of four rows.

    ``scaled_rows`` is (4, q, n) with scaled_rows[j][c] = c * row_j; rows
    beyond the code dimension must be zero (the caller divides the counts).
    """
    fn = _pick(impl, _weight_hist4_nb, _weight_hist4_np)
    return fn(scaled_rows[0], scaled_rows[1], scaled_rows[2], scaled_rows[3])


# ---------------------------------------------------------------------------
# t-subset coverage counting (t = 3)


@njit(cache=True)
def _triple_cover_nb(blocks, c3, c2, counts):
    b, k = blocks.shape
    for bi in range(b):
        for x in range(k - 2):
            ax = blocks[bi, x]
            for y in range(x + 1, k - 1):
                base = c2[blocks[bi, y]] + ax
                for z in range(y + 1, k):
                    counts[c3[blocks[bi, z]] + base] += 1


def _triple_cover_np(blocks, c3, c2, counts):
    b, k = blocks.shape
    tmpl = np.array(
        [(x, y, z) for x in range(k) for y in range(x + 1, k) for z in range(y + 1, k)],
        dtype=np.int64,
    )
    for bi in range(b):
        row = blocks[bi]
        tr = row[tmpl]
        ranks = c3[tr[:, 2]] + c2[tr[:, 1]] + tr[:, 0]
        np.add.at(counts, ranks, 1)


def triple_cover_counts(blocks, v, impl=None):
    """Count, for every 3-subset of range(v), the blocks containing it.

    Blocks are rows of sorted point indices; the result is indexed by the
    colex rank C(c,3) + C(b,2) + a of the triple a < b < c.
    """
    blocks = np.ascontiguousarray(blocks, dtype=np.int64)
    xs = np.arange(v, dtype=np.int64)
    c2 = xs * (xs - 1) // 2
    c3 = xs * (xs - 1) * (xs - 2) // 6
    total = int(v * (v - 1) * (v - 2) // 6)
    counts = np.zeros(total, dtype=np.int64)
    fn = _pick(impl, _triple_cover_nb, _triple_cover_np)
    fn(blocks, c3, c2, counts)
    return counts


# ---------------------------------------------------------------------------
# dependent 4-subsets of code columns (weight-4 dual supports)


@njit(cache=True)
def _dependent_quads_nb(cols, mul, inv, out, flags, max_count):
    n = cols.shape[0]
    work = np.empty((4, 5), np.uint8)
    cnt = 0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for l in range(k + 1, n):
                    for cc in range(4):
                        work[0, cc] = cols[i, cc]
                        work[1, cc] = cols[j, cc]
                        work[2, cc] = cols[k, cc]
                        work[3, cc] = cols[l, cc]
                    # each row is one chosen column vector; a dependency
                    # among columns = row combination summing to zero
                    rank = 0
                    for col in range(4):
                        piv = -1
                        for r in range(rank, 4):
                            if work[r, col] != 0:
                                piv = r
                                break
                        if piv < 0:
                            continue
                        if piv != rank:
                            for cc in range(4):
                                t = work[rank, cc]
                                work[rank, cc] = work[piv, cc]
                                work[piv, cc] = t
                        s = inv[work[rank, col]]
                        for cc in range(4):
                            work[rank, cc] = mul[s, work[rank, cc]]
                        for r in range(4):
                            if r != rank and work[r, col] != 0:
                                f = work[r, col]
                                for cc in range(4):
                                    work[r, cc] ^= mul[f, work[rank, cc]]
                        rank += 1
                    if rank == 4:
                        continue
                    out[cnt, 0] = i
                    out[cnt, 1] = j
                    out[cnt, 2] = k
                    out[cnt, 3] = l
                    flags[cnt] = rank
                    cnt += 1
                    if cnt >= max_count:
                        return cnt
    return cnt


def _dependent_quads_np(cols, mul, inv, out, flags, max_count):
    n = cols.shape[0]
    idx = np.array(
        [
            (i, j, k, l)
            for i in range(n)
            for j in range(i + 1, n)
            for k in range(j + 1, n)
            for l in range(k + 1, n)
        ],
        dtype=np.int64,
    ).reshape(-1, 4)

    def det3(u, v, w, c0, c1, c2):
        t0 = mul[v[:, c1], w[:, c2]] ^ mul[v[:, c2], w[:, c1]]
        t1 = mul[v[:, c0], w[:, c2]] ^ mul[v[:, c2], w[:, c0]]
        t2 = mul[v[:, c0], w[:, c1]] ^ mul[v[:, c1], w[:, c0]]
        return mul[u[:, c0], t0] ^ mul[u[:, c1], t1] ^ mul[u[:, c2], t2]

    a, b, c, d = (cols[idx[:, t]] for t in range(4))
    # det4 by char-2 Laplace expansion along the first row
    dets = np.zeros(idx.shape[0], dtype=np.uint8)
    csets = ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))
    for col, cset in enumerate(csets):
        dets ^= mul[a[:, col], det3(b, c, d, *cset)]
    dep = np.nonzero(dets == 0)[0]
    cnt = min(len(dep), max_count)
    if cnt:
        out[:cnt] = idx[dep[:cnt]]
        for row in range(cnt):
            flags[row] = _rank_rows_np(cols[out[row]], mul, inv)
    return cnt


def _rank_rows_np(rows, mul, inv):
    work = rows.astype(np.uint8).copy()
    m = work.shape[0]
    rank = 0
    for col in range(work.shape[1]):
        piv = None
        for r in range(rank, m):
            if work[r, col]:
                piv = r
                break
        if piv is None:
            continue
        work[[rank, piv]] = work[[piv, rank]]
        s = inv[work[rank, col]]
        work[rank] = mul[s, work[rank]]
        for r in range(m):
            if r != rank and work[r, col]:
                work[r] = work[r] ^ mul[work[r, col], work[rank]]
        rank += 1
        if rank == m:
            break
    return rank


def dependent_quads(cols, mul, inv, max_count, impl=None):
    """Dependent 4-subsets of columns in lexicographic order, with ranks.

    Returns (count, indices (count, 4), ranks (count,)).  The scan stops
    once max_count subsets are collected, so max_count=1 finds the first
    witness cheaply; exhaustive callers size the buffer above the expected
    total and treat a full buffer as an error.
    """
    out = np.zeros((max_count, 4), dtype=np.int32)
    flags = np.zeros(max_count, dtype=np.int8)
    fn = _pick(impl, _dependent_quads_nb, _dependent_quads_np)
    cnt = int(fn(cols, mul, inv, out, flags, max_count))
    return cnt, out[:cnt], flags[:cnt]


# ---------------------------------------------------------------------------
# projective frame search for ovoid equivalence
#
# The source frame (a1..a5, all in the transformed set A) is folded into
# u_all = Sinv . a for every a in A, where S maps the standard frame to the
# source frame; a candidate is an ordered 4-tuple (b1..b4) of target points
# of full rank plus a 5th point b5.  The unique projectivity sending the
# source frame to (b1..b5) maps probe point p to B4 . (c * u_p) with
# c = inv(B4) . b5, which is GF(2)-linear in the packed code of b5, so each
# probe is two table lookups and one xor per candidate.


@njit(cache=True)
def _det3_nb(a, b, c, c0, c1, c2, mul):
    t0 = mul[b[c1], c[c2]] ^ mul[b[c2], c[c1]]
    t1 = mul[b[c0], c[c2]] ^ mul[b[c2], c[c0]]
    t2 = mul[b[c0], c[c1]] ^ mul[b[c1], c[c0]]
    return mul[a[c0], t0] ^ mul[a[c1], t1] ^ mul[a[c2], t2]


@njit(cache=True)
def _invert4_nb(mat, out, mul, inv):
    # Gauss-Jordan on [mat | I]; returns False when singular
    work = np.zeros((4, 8), np.uint8)
    for r in range(4):
        for c in range(4):
            work[r, c] = mat[r, c]
        work[r, 4 + r] = 1
    for col in range(4):
        piv = -1
        for r in range(col, 4):
            if work[r, col] != 0:
                piv = r
                break
        if piv < 0:
            return False
        if piv != col:
            for c in range(8):
                t = work[col, c]
                work[col, c] = work[piv, c]
                work[piv, c] = t
        s = inv[work[col, col]]
        for c in range(8):
            work[col, c] = mul[s, work[col, c]]
        for r in range(4):
            if r != col and work[r, col] != 0:
                f = work[r, col]
                for c in range(8):
                    work[r, c] ^= mul[f, work[col, c]]
    for r in range(4):
        for c in range(4):
            out[r, c] = work[r, 4 + c]
    return True


@njit(cache=True)
def _build_split_table_nb(W, mul, m, lsb_index, tbl_lo, tbl_hi):
    # basis images of the GF(2)-linear map v -> pack(W . v) on packed codes
    q = 1 << m
    lob = 2 * m
    nbits = 4 * m
    basis = np.empty(nbits, np.int64)
    for jj in range(nbits):
        coord = 3 - (jj // m)  # low bits of the code hold coordinate 3
        val = 1 << (jj % m)
        v0 = mul[W[0, coord], val]
        v1 = mul[W[1, coord], val]
        v2 = mul[W[2, coord], val]
        v3 = mul[W[3, coord], val]
        basis[jj] = ((np.int64(v0) * q + v1) * q + v2) * q + v3
    tbl_lo[0] = 0
    for v in range(1, tbl_lo.shape[0]):
        low = lsb_index[v]
        tbl_lo[v] = tbl_lo[v & (v - 1)] ^ basis[low]
    tbl_hi[0] = 0
    for v in range(1, tbl_hi.shape[0]):
        low = lsb_index[v]
        tbl_hi[v] = tbl_hi[v & (v - 1)] ^ basis[lob + low]
    return 0


@njit(cache=True)
def _search_maps_nb(
    Bco,
    Bcodes,
    member_raw,
    plane_row,
    circle_raw,
    u_all,
    p6,
    p7,
    p8,
    mul,
    inv,
    q,
    m,
    lsb_index,
    b1_start,
    b1_stop,
    budget,
    wit_out,
    max_wit,
):
    nB = Bco.shape[0]
    nA = u_all.shape[0]
    lob = 2 * m
    lomask = (1 << lob) - 1
    tsz = 1 << lob
    tbl6_lo = np.zeros(tsz, np.int64)
    tbl6_hi = np.zeros(tsz, np.int64)
    tbl7_lo = np.zeros(tsz, np.int64)
    tbl7_hi = np.zeros(tsz, np.int64)
    tbl8_lo = np.zeros(tsz, np.int64)
    tbl8_hi = np.zeros(tsz, np.int64)
    B4 = np.zeros((4, 4), np.uint8)
    inv4 = np.zeros((4, 4), np.uint8)
    W = np.zeros((4, 4), np.uint8)
    cvec = np.zeros(4, np.uint8)
    h = np.zeros(4, np.uint8)
    u6 = u_all[p6]
    u7 = u_all[p7]
    u8 = u_all[p8]
    cand = np.int64(0)
    tup = np.int64(0)
    found = 0
    status = 0
    for i1 in range(b1_start, b1_stop):
        pt1 = Bco[i1]
        for i2 in range(nB):
            if i2 == i1:
                continue
            pt2 = Bco[i2]
            for i3 in range(nB):
                if i3 == i1 or i3 == i2:
                    continue
                pt3 = Bco[i3]
                # plane through b1, b2, b3 (char-2 cross product)
                h[0] = _det3_nb(pt1, pt2, pt3, 1, 2, 3, mul)
                h[1] = _det3_nb(pt1, pt2, pt3, 0, 2, 3, mul)
                h[2] = _det3_nb(pt1, pt2, pt3, 0, 1, 3, mul)
                h[3] = _det3_nb(pt1, pt2, pt3, 0, 1, 2, mul)
                use_circle = False
                crow = 0
                if h[0] != 0 or h[1] != 0 or h[2] != 0 or h[3] != 0:
                    if h[0] != 0:
                        s = inv[h[0]]
                    elif h[1] != 0:
                        s = inv[h[1]]
                    elif h[2] != 0:
                        s = inv[h[2]]
                    else:
                        s = inv[h[3]]
                    hc = (
                        (np.int64(mul[s, h[0]]) * q + mul[s, h[1]]) * q + mul[s, h[2]]
                    ) * q + mul[s, h[3]]
                    crow = plane_row[hc]
                    if crow >= 0:
                        use_circle = True
                for i4 in range(nB):
                    if i4 == i1 or i4 == i2 or i4 == i3:
                        continue
                    if use_circle and circle_raw[crow, Bcodes[i4]] != 0:
                        continue  # coplanar with b1,b2,b3: rank < 4
                    for r in range(4):
                        B4[r, 0] = pt1[r]
                        B4[r, 1] = pt2[r]
                        B4[r, 2] = pt3[r]
                        B4[r, 3] = Bco[i4, r]
                    if not _invert4_nb(B4, inv4, mul, inv):
                        continue
                    tup += 1
                    if cand >= budget:
                        return 1, found, cand, tup
                    # W6 = B4 . diag(u6) . inv4
                    for a in range(4):
                        for b in range(4):
                            acc = 0
                            for t in range(4):
                                acc ^= mul[mul[B4[a, t], u6[t]], inv4[t, b]]
                            W[a, b] = acc
                    _build_split_table_nb(W, mul, m, lsb_index, tbl6_lo, tbl6_hi)
                    built_78 = False
                    for i5 in range(nB):
                        if i5 == i1 or i5 == i2 or i5 == i3 or i5 == i4:
                            continue
                        cand += 1
                        code5 = Bcodes[i5]
                        im6 = tbl6_lo[code5 & lomask] ^ tbl6_hi[code5 >> lob]
                        if use_circle:
                            if circle_raw[crow, im6] == 0:
                                continue
                        else:
                            if member_raw[im6] == 0:
                                continue
                        if not built_78:
                            for a in range(4):
                                for b in range(4):
                                    acc = 0
                                    for t in range(4):
                                        acc ^= mul[mul[B4[a, t], u7[t]], inv4[t, b]]
                                    W[a, b] = acc
                            _build_split_table_nb(W, mul, m, lsb_index, tbl7_lo, tbl7_hi)
                            for a in range(4):
                                for b in range(4):
                                    acc = 0
                                    for t in range(4):
                                        acc ^= mul[mul[B4[a, t], u8[t]], inv4[t, b]]
                                    W[a, b] = acc
                            _build_split_table_nb(W, mul, m, lsb_index, tbl8_lo, tbl8_hi)
                            built_78 = True
                        im7 = tbl7_lo[code5 & lomask] ^ tbl7_hi[code5 >> lob]
                        if member_raw[im7] == 0:
                            continue
                        im8 = tbl8_lo[code5 & lomask] ^ tbl8_hi[code5 >> lob]
                        if member_raw[im8] == 0:
                            continue
                        # full verification: c = inv4 . b5, all coordinates nonzero
                        ok = True
                        for r in range(4):
                            acc = 0
                            for t in range(4):
                                acc ^= mul[inv4[r, t], Bco[i5, t]]
                            if acc == 0:
                                ok = False
                                break
                            cvec[r] = acc
                        if not ok:
                            continue
                        for pt in range(nA):
                            a0 = 0
                            a1 = 0
                            a2 = 0
                            a3 = 0
                            for t in range(4):
                                d = mul[cvec[t], u_all[pt, t]]
                                a0 ^= mul[B4[0, t], d]
                                a1 ^= mul[B4[1, t], d]
                                a2 ^= mul[B4[2, t], d]
                                a3 ^= mul[B4[3, t], d]
                            code = ((np.int64(a0) * q + a1) * q + a2) * q + a3
                            if member_raw[code] == 0:
                                ok = False
                                break
                        if not ok:
                            continue
                        wit_out[found, 0] = i1
                        wit_out[found, 1] = i2
                        wit_out[found, 2] = i3
                        wit_out[found, 3] = i4
                        wit_out[found, 4] = i5
                        found += 1
                        if found >= max_wit:
                            return 2, found, cand, tup
    return status, found, cand, tup


def _apply_cols_np(M, V, mul):
    # M: (4,4) columns-as-map, V: (nc,4) input vectors -> (nc,4) images
    out = np.empty((V.shape[0], 4), dtype=np.uint8)
    for a in range(4):
        acc = mul[M[a, 0], V[:, 0]]
        for t in range(1, 4):
            acc = acc ^ mul[M[a, t], V[:, t]]
        out[:, a] = acc
    return out


def _det3_np(a, b, c, c0, c1, c2, mul):
    t0 = mul[b[c1], c[c2]] ^ mul[b[c2], c[c1]]
    t1 = mul[b[c0], c[c2]] ^ mul[b[c2], c[c0]]
    t2 = mul[b[c0], c[c1]] ^ mul[b[c1], c[c0]]
    return mul[a[c0], t0] ^ mul[a[c1], t1] ^ mul[a[c2], t2]


def _search_maps_np(
    Bco,
    Bcodes,
    member_raw,
    plane_row,
    circle_raw,
    u_all,
    p6,
    p7,
    p8,
    mul,
    inv,
    q,
    m,
    lsb_index,
    b1_start,
    b1_stop,
    budget,
    wit_out,
    max_wit,
):
    # Enumerates the coefficient vector c (first entry 1, all nonzero)
    # instead of b5 and recovers b5 = B4 . c by membership, avoiding any
    # matrix inversions; witnesses are reordered per 4-tuple to match the
    # compiled kernel's b5-ascending order.
    nB = Bco.shape[0]
    nz = np.arange(1, q, dtype=np.uint8)
    grid = np.stack(np.meshgrid(nz, nz, nz, indexing="ij"), axis=-1).reshape(-1, 3)
    Cnz = np.concatenate(
        [np.ones((grid.shape[0], 1), dtype=np.uint8), grid.astype(np.uint8)], axis=1
    )
    bindex = np.full(member_raw.shape[0], -1, dtype=np.int64)
    bindex[Bcodes] = np.arange(nB)
    u6, u7, u8 = u_all[p6], u_all[p7], u_all[p8]
    cand = 0
    tup = 0
    found = 0
    for i1 in range(b1_start, b1_stop):
        pt1 = Bco[i1]
        for i2 in range(nB):
            if i2 == i1:
                continue
            pt2 = Bco[i2]
            for i3 in range(nB):
                if i3 == i1 or i3 == i2:
                    continue
                pt3 = Bco[i3]
                h = np.array(
                    [
                        _det3_np(pt1, pt2, pt3, 1, 2, 3, mul),
                        _det3_np(pt1, pt2, pt3, 0, 2, 3, mul),
                        _det3_np(pt1, pt2, pt3, 0, 1, 3, mul),
                        _det3_np(pt1, pt2, pt3, 0, 1, 2, mul),
                    ],
                    dtype=np.uint8,
                )
                circle = member_raw
                if h.any():
                    s = inv[h[h != 0][0]]
                    hn = mul[s, h]
                    hc = int(
                        ((int(hn[0]) * q + int(hn[1])) * q + int(hn[2])) * q + int(hn[3])
                    )
                    crow = int(plane_row[hc])
                    if crow >= 0:
                        circle = circle_raw[crow]
                for i4 in range(nB):
                    if i4 == i1 or i4 == i2 or i4 == i3:
                        continue
                    if circle is not member_raw:
                        if circle[Bcodes[i4]]:
                            continue
                    M = np.stack([pt1, pt2, pt3, Bco[i4]], axis=1)
                    if circle is member_raw and _rank_rows_np(M.T, mul, inv) < 4:
                        continue  # degenerate triple path: reject singular maps
                    tup += 1
                    if cand >= budget:
                        return 1, found, cand, tup
                    cand += Cnz.shape[0]
                    b5raw = _apply_cols_np(M, Cnz, mul)
                    codes5 = pack_codes(b5raw, q)
                    alive = member_raw[codes5] != 0
                    if alive.any():
                        Mu6 = mul[M, u6[None, :]]
                        im6 = pack_codes(_apply_cols_np(Mu6, Cnz, mul), q)
                        alive &= circle[im6] != 0
                    if alive.any():
                        Mu7 = mul[M, u7[None, :]]
                        alive &= member_raw[pack_codes(_apply_cols_np(Mu7, Cnz, mul), q)] != 0
                    if alive.any():
                        Mu8 = mul[M, u8[None, :]]
                        alive &= member_raw[pack_codes(_apply_cols_np(Mu8, Cnz, mul), q)] != 0
                    hits = []
                    for s_idx in np.nonzero(alive)[0]:
                        cv = Cnz[s_idx]
                        Mc = mul[M, cv[None, :]]
                        imgs = _apply_cols_np(Mc, u_all, mul)
                        if np.all(member_raw[pack_codes(imgs, q)] != 0):
                            raw = b5raw[s_idx]
                            lead = raw[np.argmax(raw != 0)]
                            norm = mul[inv[lead], raw]
                            i5 = int(bindex[int(pack_codes(norm[None, :], q)[0])])
                            if i5 < 0:
                                raise AssertionError("witness b5 missing from index")
                            hits.append(i5)
                    for i5 in sorted(hits):
                        wit_out[found, 0] = i1
                        wit_out[found, 1] = i2
                        wit_out[found, 2] = i3
                        wit_out[found, 3] = i4
                        wit_out[found, 4] = i5
                        found += 1
                        if found >= max_wit:
                            return 2, found, cand, tup
    return 0, found, cand, tup


def search_frame_maps(
    Bco,
    Bcodes,
    member_raw,
    plane_row,
    circle_raw,
    u_all,
    probes,
    mul,
    inv,
    q,
    m,
    b1_start,
    b1_stop,
    budget,
    max_witnesses,
    impl=None,
):
    """Scan frame-image candidates in B for maps sending the source set onto B.

    Returns (status, witnesses, candidates, tuples): status 0 = range fully
    scanned, 1 = budget exhausted, 2 = witness quota reached.  Witness rows
    hold the five target-point indices of the frame image, in scan order.
    Candidate counts (and hence budget units) are backend-specific: the
    compiled kernel counts b5 choices, the numpy path counts coefficient
    vectors; witnesses and their order are identical either way.
    """
    lob = 2 * m
    lsb_index = np.zeros(1 << lob, dtype=np.int64)
    for v in range(1, 1 << lob):
        lsb_index[v] = (v & -v).bit_length() - 1
    wit_out = np.zeros((max_witnesses, 5), dtype=np.int32)
    p6, p7, p8 = probes
    fn = _pick(impl, _search_maps_nb, _search_maps_np)
    status, found, cand, tup = fn(
        Bco,
        Bcodes,
        member_raw,
        plane_row,
        circle_raw,
        u_all,
        p6,
        p7,
        p8,
        mul,
        inv,
        q,
        m,
        lsb_index,
        b1_start,
        b1_stop,
        budget,
        wit_out,
        max_witnesses,
    )
    return int(status), wit_out[: int(found)].copy(), int(cand), int(tup)
