"""Trace-construction cyclic codes over GF(q), their weight distributions
(computed two independent ways), and the dual-distribution machinery.

The code of parameters (r, N) has symbols Tr_{r/q}(beta theta^i) with
theta = alpha^N and beta running over GF(r); a GF(q)-basis {1, alpha,
alpha^2, alpha^3} of GF(r) supplies a deterministic 4-row generator matrix.
All counting is exact integer arithmetic; weight counts at q = 16 and above
do not fit common machine words.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import comb, gcd

import numpy as np

from . import _kernels
from .cyclotomy import CyclotomicSystem
from .gf import FieldContext, TowerContext, field

ENUMERATION_BUDGET = 1 << 28  # max q^k for direct codeword enumeration


@dataclass
class LinearCode:
    """Linear [n, k] code over GF(q) held as a generator matrix.

    The matrix keeps one row per constructing basis element (4 for the
    cyclic construction); ``k`` is its rank.  ``row_basis`` gives a
    row-reduced k x n basis for enumeration.
    """

    q: int
    n: int
    k: int
    matrix: np.ndarray
    origin: str
    symbol_field: FieldContext
    tower: TowerContext | None = None
    N: int | None = None
    _cache: dict = dc_field(default_factory=dict, repr=False)

    def row_basis(self) -> np.ndarray:
        if "basis" not in self._cache:
            basis = _rref(self.matrix, self.symbol_field)
            if basis.shape[0] != self.k:
                raise ArithmeticError("rank changed under reduction (arithmetic bug)")
            self._cache["basis"] = basis
        return self._cache["basis"]

    def weight_distribution(self, method: str = "auto") -> dict[int, int]:
        if method == "auto":
            method = "periods" if (self.tower is not None and self.q**self.k > ENUMERATION_BUDGET) else "enumeration"
        key = f"wd_{method}"
        if key not in self._cache:
            if method == "enumeration":
                self._cache[key] = weight_distribution_enumeration(self)
            elif method == "periods":
                if self.tower is None or self.N is None:
                    raise ValueError("period-based weights need the cyclic construction context")
                self._cache[key] = weight_distribution_periods(self.tower, self.N)
            else:
                raise ValueError(f"unknown method {method!r}")
        return self._cache[key]

    def minimum_weight(self) -> int:
        wd = self.weight_distribution()
        return min(w for w in wd if w > 0)


def _rref(mat: np.ndarray, fld: FieldContext) -> np.ndarray:
    work = mat.astype(np.int64).copy()
    rows, cols = work.shape
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if work[r, c]), None)
        if piv is None:
            continue
        work[[rank, piv]] = work[[piv, rank]]
        s = fld.inv(int(work[rank, c]))
        work[rank] = [fld.mul(s, int(v)) for v in work[rank]]
        for r in range(rows):
            if r != rank and work[r, c]:
                f = int(work[r, c])
                work[r] ^= np.array([fld.mul(f, int(v)) for v in work[rank]], dtype=np.int64)
        rank += 1
        if rank == rows:
            break
    return work[:rank].astype(np.uint8)


def rank_over_gf(mat: np.ndarray, fld: FieldContext) -> int:
    return _rref(mat, fld).shape[0]


def multiplicative_order(a: int, n: int) -> int:
    if gcd(a, n) != 1:
        raise ValueError(f"{a} is not invertible mod {n}")
    o, x = 1, a % n
    while x != 1:
        x = (x * a) % n
        o += 1
    return o


def build_cyclic_code(tw: TowerContext, N: int) -> LinearCode:
    """Trace code of parameters (r, N) with the canonical 4-row matrix.

    Row j is the codeword of beta = alpha^j, j = 0..3; column i collects the
    symbols at theta^i.  The dimension equals the multiplicative order of q
    modulo n, which for N = q^2 - 1 is 4.
    """
    r, q = tw.r, tw.q
    if N <= 1:
        raise ValueError("N must exceed 1")
    if (r - 1) % N != 0:
        raise ValueError(f"N={N} does not divide r-1={r - 1}")
    n = (r - 1) // N
    m0 = multiplicative_order(q, n) if n > 1 else 1
    big = tw.big
    i = np.arange(n, dtype=np.int64)
    rows = []
    for j in range(4):
        elems = big.exp[(j + N * i) % (r - 1)].astype(np.int64)
        rows.append(tw.symbols(elems))
    G = np.stack(rows).astype(np.uint8)
    code = LinearCode(
        q=q,
        n=n,
        k=m0,
        matrix=G,
        origin=f"cyclic(m={tw.m}, N={N})",
        symbol_field=tw.sub,
        tower=tw,
        N=N,
    )
    actual = rank_over_gf(G, tw.sub)
    if actual != m0:
        raise ArithmeticError(f"generator rank {actual} != order of q mod n = {m0}")
    return code


def code_from_matrix(q: int, mat: np.ndarray, origin: str = "external") -> LinearCode:
    m = q.bit_length() - 1
    if 1 << m != q:
        raise ValueError(f"q={q} is not a power of two")
    fld = field(m)
    mat = np.asarray(mat, dtype=np.uint8)
    k = rank_over_gf(mat, fld)
    return LinearCode(q=q, n=mat.shape[1], k=k, matrix=mat, origin=origin, symbol_field=fld)


# ---------------------------------------------------------------------------
# weight distributions


def weight_distribution_enumeration(code: LinearCode, impl: str | None = None) -> dict[int, int]:
    """Exact weight counts by enumerating all q^k codewords."""
    q, n, k = code.q, code.n, code.k
    if q**k > ENUMERATION_BUDGET:
        raise ValueError(f"enumeration budget exceeded: q^k = {q**k} > {ENUMERATION_BUDGET}")
    mul = code.symbol_field.mul_table()
    basis = code.row_basis()
    scaled = np.zeros((4, q, n), dtype=np.uint8)
    for j in range(min(k, 4)):
        scaled[j] = mul[:, basis[j]]
    hist = _kernels.weight_histogram(scaled, impl=impl)
    pad = q ** (4 - k) if k < 4 else 1
    out = {}
    for w, cnt in enumerate(hist.tolist()):
        if cnt == 0:
            continue
        if cnt % pad:
            raise ArithmeticError("padded enumeration count not divisible (arithmetic bug)")
        out[w] = cnt // pad
    return out


def weight_distribution_periods(tw: TowerContext, N: int) -> dict[int, int]:
    """Weight counts from character sums: the weight of the beta-codeword
    depends only on beta's coarse cyclotomic class, so class sizes aggregate
    directly.  Must match enumeration wherever both run."""
    r, q = tw.r, tw.q
    if (r - 1) % N != 0 or N <= 1:
        raise ValueError(f"N={N} must divide r-1={r - 1} and exceed 1")
    n = (r - 1) // N
    m0 = multiplicative_order(q, n) if n > 1 else 1
    d = gcd((r - 1) // (q - 1), N)
    eta = CyclotomicSystem(tw, d).gaussian_periods()
    class_size = (r - 1) // d
    # the parameter space maps q^(4-m0)-to-1 onto the code (weight-0 classes
    # are the nonzero kernel), so count all parameters per weight, zero
    # included, then divide
    preimages = q ** (4 - m0)
    raw: dict[int, int] = {0: 1}
    for kk in range(d):
        num = (q - 1) * (r - 1 - d * int(eta[kk]))
        den = q * N
        if num % den:
            raise ArithmeticError(f"weight formula not integral for class {kk}")
        w = num // den
        raw[w] = raw.get(w, 0) + class_size
    dist: dict[int, int] = {}
    for w, cnt in raw.items():
        if cnt % preimages:
            raise ArithmeticError(f"weight-{w} parameter count not divisible by preimage count")
        dist[w] = cnt // preimages
    return dist


def pless_moment_checks(dist: dict[int, int], n: int, k: int, q: int) -> dict[str, bool]:
    """First two power-moment identities (valid when the dual distance is >= 2)."""
    total = sum(cnt for w, cnt in dist.items() if w > 0)
    moment1 = total == q**k - 1
    s = sum(w * cnt for w, cnt in dist.items())
    moment2 = s == q ** (k - 1) * (q - 1) * n
    return {"sum_nonzero": moment1, "weighted_sum": moment2}


# ---------------------------------------------------------------------------
# dual distributions


def krawtchouk(n: int, q: int, ell: int, w: int) -> int:
    lo = max(0, ell - (n - w))
    hi = min(w, ell)
    return sum(
        (-1) ** j * (q - 1) ** (ell - j) * comb(w, j) * comb(n - w, ell - j)
        for j in range(lo, hi + 1)
    )


def macwilliams_transform(dist: dict[int, int], n: int, k: int, q: int) -> dict[int, int]:
    """Dual weight distribution as exact integers; inexact division raises."""
    size = q**k
    out = {}
    for ell in range(n + 1):
        s = sum(cnt * krawtchouk(n, q, ell, w) for w, cnt in dist.items())
        val, rem = divmod(s, size)
        if rem:
            raise ArithmeticError(f"MacWilliams count at weight {ell} not integral")
        if val < 0:
            raise ArithmeticError(f"negative dual count at weight {ell}")
        if val:
            out[ell] = val
    return out


def dual_weight_closed_form(q: int, ell: int) -> int:
    """Dual weight count of a [q^2+1, 4, q^2-q] code from the closed form.

    Defined for 4 <= ell <= q^2 plus the separate top weight q^2 + 1; the
    counts at 1..3 are zero because the dual has minimum distance 4 and are
    asserted separately rather than read from the formula.
    """
    if q < 4:
        raise ValueError("closed form requires q >= 4")
    nn = q * q + 1
    if not 4 <= ell <= nn:
        raise ValueError(f"ell={ell} outside [4, {nn}]")
    u = (q * q - q) * nn
    v = (q - 1) * nn
    if ell == nn:
        num = (q - 1) ** nn + u * (q - 1) ** (q + 1) + v * (q - 1)
    else:
        num = comb(nn, ell) * (q - 1) ** ell
        num += u * sum(
            comb(q * q - q, i) * (-1) ** i * comb(q + 1, ell - i) * (q - 1) ** (ell - i)
            for i in range(max(0, ell - (q + 1)), min(q * q - q, ell) + 1)
        )
        num += v * ((-1) ** ell * comb(q * q, ell) + (-1) ** (ell - 1) * (q - 1) * comb(q * q, ell - 1))
    val, rem = divmod(num, q**4)
    if rem:
        raise ArithmeticError(f"closed form at weight {ell} not divisible by q^4")
    return val


def dual_distribution_closed_form(q: int) -> dict[int, int]:
    out = {0: 1}
    for ell in range(4, q * q + 2):
        val = dual_weight_closed_form(q, ell)
        if val:
            out[ell] = val
    return out


# ---------------------------------------------------------------------------
# structural checks


def griesmer_check(code: LinearCode) -> bool:
    """n == sum of ceil(d / q^i) over i < k, with d the minimum weight."""
    d = code.minimum_weight()
    total = 0
    for i in range(code.k):
        total += -(-d // code.q**i)
    return total == code.n


@dataclass
class DualDistanceWitness:
    distance: int
    support: tuple[int, ...]
    coefficients: tuple[int, ...]


def dual_min_distance(code: LinearCode, impl: str | None = None) -> DualDistanceWitness:
    """Dual minimum distance by direct column-dependency search.

    A dependent set of ell generator columns is the support of a dual
    codeword of weight <= ell; the scan exhibits the first witness and
    proves no smaller one exists.
    """
    fld = code.symbol_field
    mul, inv = fld.mul_table(), fld.inv_table()
    cols = np.ascontiguousarray(code.matrix.T, dtype=np.uint8)

    zero = np.nonzero(~cols.any(axis=1))[0]
    if zero.size:
        i = int(zero[0])
        return DualDistanceWitness(1, (i,), (1,))

    codes = {}
    for i in range(cols.shape[0]):
        v = cols[i]
        lead = int(v[np.argmax(v != 0)])
        vn = mul[inv[lead], v]
        c = int(_kernels.pack_codes(vn[None, :], code.q)[0])
        if c in codes:
            j = i
            i0 = codes[c]
            lam = _solve_pair(cols[i0], cols[j], fld)
            return DualDistanceWitness(2, (i0, j), lam)
        codes[c] = i

    tri = _kernels.dependent_triple(cols, mul, inv, impl=impl)
    if tri is not None:
        lam = _nullspace_coeffs(cols[list(tri)], fld)
        return DualDistanceWitness(3, tri, lam)

    cnt, quads, _ = _kernels.dependent_quads(cols, mul, inv, max_count=1, impl=impl)
    if cnt == 0:
        raise ArithmeticError("no dependent 4-set found; dual distance exceeds 4")
    quad = tuple(int(x) for x in quads[0])
    lam = _nullspace_coeffs(cols[list(quad)], fld)
    return DualDistanceWitness(4, quad, lam)


def _solve_pair(u: np.ndarray, v: np.ndarray, fld: FieldContext):
    # u, v proportional: v = s u
    iu = int(np.argmax(u != 0))
    s = fld.mul(int(v[iu]), fld.inv(int(u[iu])))
    return (s, 1)


def _nullspace_coeffs(vecs: np.ndarray, fld: FieldContext) -> tuple[int, ...]:
    """One nonzero dependency among the given 4-vectors (rows)."""
    t = len(vecs)
    # solve lambda . vecs = 0 by reducing the t x 4 system's transpose
    work = np.zeros((4, t + 1), dtype=np.int64)
    work[:, :t] = np.asarray(vecs, dtype=np.int64).T
    rank = 0
    pivots = []
    for c in range(t):
        piv = next((r for r in range(rank, 4) if work[r, c]), None)
        if piv is None:
            continue
        work[[rank, piv]] = work[[piv, rank]]
        s = fld.inv(int(work[rank, c]))
        work[rank] = [fld.mul(s, int(x)) for x in work[rank]]
        for r in range(4):
            if r != rank and work[r, c]:
                f = int(work[r, c])
                work[r] ^= np.array([fld.mul(f, int(x)) for x in work[rank]], dtype=np.int64)
        pivots.append(c)
        rank += 1
    free = [c for c in range(t) if c not in pivots]
    if not free:
        raise ArithmeticError("vectors are independent; no dependency exists")
    fc = free[0]
    lam = [0] * t
    lam[fc] = 1
    for r, pc in enumerate(pivots):
        lam[pc] = int(work[r, fc])
    # verify
    acc = np.zeros(4, dtype=np.int64)
    for coef, vec in zip(lam, vecs):
        acc ^= np.array([fld.mul(coef, int(x)) for x in vec], dtype=np.int64)
    if acc.any():
        raise ArithmeticError("dependency verification failed (arithmetic bug)")
    return tuple(lam)


def solve_membership(code: LinearCode, word: np.ndarray) -> np.ndarray | None:
    """Coefficients expressing word in the row basis, or None if not in the code."""
    fld = code.symbol_field
    basis = code.row_basis()
    k, n = basis.shape
    # pivot columns of the RREF basis are identity-like; read coefficients there
    pivots = []
    for r in range(k):
        c = int(np.argmax(basis[r] != 0))
        pivots.append(c)
    coeff = np.array([int(word[c]) for c in pivots], dtype=np.int64)
    # recombine and compare
    acc = np.zeros(n, dtype=np.int64)
    for x, row in zip(coeff, basis):
        acc ^= np.array([fld.mul(int(x), int(v)) for v in row], dtype=np.int64)
    if np.array_equal(acc, np.asarray(word, dtype=np.int64)):
        return coeff.astype(np.uint8)
    return None


def cyclic_shift(word: np.ndarray) -> np.ndarray:
    return np.roll(word, -1)


# ---------------------------------------------------------------------------
# matrix file format: header "q n k", then one row of hex symbols per line


def format_matrix(code: LinearCode) -> str:
    lines = [f"{code.q} {code.n} {code.k}"]
    for row in code.matrix:
        lines.append(" ".join(f"{int(v):x}" for v in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> LinearCode:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError("matrix header must be 'q n k'")
    q, n, k = (int(x) for x in head)
    rows = []
    for ln in lines[1:]:
        row = [int(tok, 16) for tok in ln.split()]
        if len(row) != n:
            raise ValueError(f"row length {len(row)} != n = {n}")
        if any(v >= q for v in row):
            raise ValueError("symbol out of range for GF(q)")
        rows.append(row)
    code = code_from_matrix(q, np.array(rows, dtype=np.uint8))
    if code.k != k:
        raise ValueError(f"declared dimension {k} != computed rank {code.k}")
    return code
