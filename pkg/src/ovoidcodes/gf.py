"""Arithmetic for GF(2^k) and the subfield tower GF(q) < GF(r), r = q^4.

Field elements are plain Python ints: bit i is the coefficient of x^i of a
polynomial over GF(2), reduced modulo a fixed irreducible polynomial.  Zero
is 0 and the multiplicative identity is 1.  Addition is xor.

Multiplication goes through exp/log tables for degrees up to
``TABLE_DEGREE_LIMIT`` (overridable via the OVOIDCODES_TABLE_DEGREE
environment variable) and falls back to carry-less multiplication with
reduction above that.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

# exp/log tables up to 2^24 entries (two int32 arrays, ~128 MiB)
TABLE_DEGREE_LIMIT = int(os.environ.get("OVOIDCODES_TABLE_DEGREE", "24"))

MAX_DEGREE = 40

# parity of the low 16 bits, used to evaluate GF(2)-linear forms in bulk
_PARITY16 = np.zeros(1 << 16, dtype=np.uint8)
for _i in range(1, 1 << 16):
    _PARITY16[_i] = _PARITY16[_i >> 1] ^ (_i & 1)


def parity_u32(arr: np.ndarray) -> np.ndarray:
    """Bit parity of each entry of an integer array (entries < 2^32)."""
    a = arr.astype(np.int64)
    return _PARITY16[a & 0xFFFF] ^ _PARITY16[(a >> 16) & 0xFFFF]


# ---------------------------------------------------------------------------
# polynomials over GF(2), encoded as ints


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2) polynomials."""
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        a <<= 1
        b >>= 1
    return acc


def polymod(a: int, f: int) -> int:
    """Reduce polynomial a modulo f."""
    df = f.bit_length() - 1
    da = a.bit_length() - 1
    while da >= df:
        a ^= f << (da - df)
        da = a.bit_length() - 1
    return a


def mulmod(a: int, b: int, f: int) -> int:
    return polymod(clmul(a, b), f)


def powmod(a: int, e: int, f: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = mulmod(r, a, f)
        a = mulmod(a, a, f)
        e >>= 1
    return r


def polygcd(a: int, b: int) -> int:
    while b:
        a, b = b, polymod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f: int) -> bool:
    """Rabin test: x^(2^k) = x mod f and gcd(x^(2^(k/p)) - x, f) = 1."""
    k = f.bit_length() - 1
    if k < 1:
        return False
    x = polymod(2, f)  # x itself reduces for degree-1 moduli
    t = x
    for _ in range(k):
        t = mulmod(t, t, f)
    if t != x:
        return False
    for p in _prime_factors(k):
        t = x
        for _ in range(k // p):
            t = mulmod(t, t, f)
        if polygcd(t ^ x, f) != 1:
            return False
    return True


def _has_full_order(e: int, f: int, order: int, order_factors: list[int]) -> bool:
    if powmod(e, order, f) != 1:
        return False
    return all(powmod(e, order // p, f) != 1 for p in order_factors)


def choose_modulus(k: int) -> int:
    """Smallest-as-integer irreducible degree-k polynomial with x primitive.

    A primitive polynomial exists for every k, so the generic-irreducible
    fallback is never reached for the degrees supported here; it is kept for
    robustness.
    """
    if k == 1:
        return 0b11
    order = (1 << k) - 1
    factors = _prime_factors(order)
    first_irreducible = 0
    for low in range(1, 1 << k, 2):
        f = (1 << k) | low
        if not is_irreducible(f):
            continue
        if not first_irreducible:
            first_irreducible = f
        if _has_full_order(2, f, order, factors):
            return f
    return first_irreducible


# ---------------------------------------------------------------------------


class FieldContext:
    """GF(2^k) with a fixed modulus, primitive element and optional tables.

    The modulus defaults to :func:`choose_modulus`; it is re-verified
    irreducible at construction, and the primitive element's order is
    verified against every maximal proper divisor of 2^k - 1.
    """

    def __init__(self, k: int, modulus: int | None = None):
        if not 1 <= k <= MAX_DEGREE:
            raise ValueError(f"field degree {k} out of supported range 1..{MAX_DEGREE}")
        self.k = k
        self.order = 1 << k
        self.modulus = choose_modulus(k) if modulus is None else modulus
        if self.modulus.bit_length() - 1 != k or not is_irreducible(self.modulus):
            raise ValueError(f"modulus {self.modulus:#x} is not irreducible of degree {k}")

        self._mult_order = self.order - 1
        self._order_factors = _prime_factors(self._mult_order) if self._mult_order > 1 else []

        self.exp: np.ndarray | None = None
        self.log: np.ndarray | None = None
        if k <= TABLE_DEGREE_LIMIT:
            self._build_tables()

        self.alpha = self.find_primitive()
        self.tr2_mask = self._trace_mask()

    def _build_tables(self):
        # exp/log stepping by x; only valid when x generates GF(2^k)*, which
        # choose_modulus guarantees.  Custom moduli without that property
        # fall back to table-less arithmetic.
        n = self._mult_order
        exp = np.zeros(max(n, 1), dtype=np.int32)
        log = np.full(self.order, -1, dtype=np.int32)
        x = 1
        f, k = self.modulus, self.k
        for i in range(n):
            if x == 1 and i > 0:
                return
            exp[i] = x
            log[x] = i
            x <<= 1
            if x >> k:
                x ^= f
        if x != 1:
            return
        self.exp = exp
        self.log = log

    def _trace_mask(self) -> int:
        mask = 0
        for i in range(self.k):
            e = 1 << i
            t = 0
            c = e
            for _ in range(self.k):
                t ^= c
                c = self.mul(c, c)
            mask |= (t & 1) << i
        return mask

    # -- scalar arithmetic --------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.log is not None:
            return int(self.exp[(int(self.log[a]) + int(self.log[b])) % self._mult_order])
        return mulmod(a, b, self.modulus)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^k)")
        if self.log is not None:
            return int(self.exp[(-int(self.log[a])) % self._mult_order])
        return powmod(a, self._mult_order - 1, self.modulus)

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e else 1
        e %= self._mult_order
        if self.log is not None:
            return int(self.exp[(int(self.log[a]) * e) % self._mult_order])
        return powmod(a, e, self.modulus)

    def element_order(self, a: int) -> int:
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        o = self._mult_order
        for p in self._order_factors:
            while o % p == 0 and self.pow(a, o // p) == 1:
                o //= p
        return o

    def find_primitive(self) -> int:
        """Smallest-bits element of multiplicative order 2^k - 1."""
        if self._mult_order == 1:
            return 1
        for a in range(2, self.order):
            if self.pow(a, self._mult_order) != 1:
                continue
            if all(self.pow(a, self._mult_order // p) != 1 for p in self._order_factors):
                return a
        raise RuntimeError("no primitive element found (unreachable)")

    def trace_to_prime(self, e: int) -> int:
        """Absolute trace Tr down to GF(2), as a bit."""
        return int(bin(e & self.tr2_mask).count("1") & 1)

    def elements(self) -> range:
        return range(self.order)

    def mul_table(self) -> np.ndarray:
        """Dense q x q multiplication table (small fields only)."""
        if self.k > 8:
            raise ValueError("dense multiplication table restricted to k <= 8")
        q = self.order
        t = np.zeros((q, q), dtype=np.uint8)
        for a in range(1, q):
            for b in range(1, q):
                t[a, b] = self.mul(a, b)
        return t

    def inv_table(self) -> np.ndarray:
        if self.k > 8:
            raise ValueError("dense inverse table restricted to k <= 8")
        t = np.zeros(self.order, dtype=np.uint8)
        for a in range(1, self.order):
            t[a] = self.inv(a)
        return t

    def header(self) -> dict:
        """Reproducibility header: degree, modulus and alpha in hex."""
        return {"k": self.k, "modulus": f"{self.modulus:#x}", "alpha": f"{self.alpha:#x}"}

    def __repr__(self):
        return f"FieldContext(k={self.k}, modulus={self.modulus:#x})"


@lru_cache(maxsize=None)
def field(k: int) -> FieldContext:
    return FieldContext(k)


# ---------------------------------------------------------------------------


class TowerContext:
    """Paired fields GF(q) in GF(r), q = 2^m, r = q^4.

    GF(r) is represented directly as GF(2)[x]/(modulus of degree 4m); the
    subfield is located inside it as the fixed field of e -> e^q.  Codeword
    symbols live in the standalone m-bit representation of GF(q); the
    embed/project bijection is fixed once at construction by sending the
    standalone primitive root to the smallest-bits root of its minimal
    polynomial inside GF(r).
    """

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("m must be >= 1")
        if 4 * m > MAX_DEGREE:
            raise ValueError(f"GF(2^{4 * m}) exceeds the supported field size")
        self.m = m
        self.q = 1 << m
        self.r = 1 << (4 * m)
        self.big = field(4 * m)
        self.sub = field(m)

        self._build_embedding()
        self._build_trace_masks()

    # -- embedding ----------------------------------------------------------

    def _build_embedding(self):
        big, sub, q, r = self.big, self.sub, self.q, self.r
        step = (r - 1) // (q - 1) if q > 2 else r - 1
        # roots of the standalone modulus among the order-(q-1) subgroup
        gen_candidates = []
        if q == 2:
            gen_candidates = [1]
        else:
            for j in range(1, q - 1):
                w = big.pow(big.alpha, step * j)
                acc, rem = 0, sub.modulus
                p = 1
                while rem:
                    if rem & 1:
                        acc ^= p
                    p = big.mul(p, w)
                    rem >>= 1
                if acc == 0:
                    gen_candidates.append(w)
        if not gen_candidates:
            raise RuntimeError("no root of the subfield modulus in the tower (unreachable)")
        w = min(gen_candidates)

        embed = np.zeros(q, dtype=np.int64)
        embed[1] = 1
        g = sub.alpha
        acc_sub, acc_big = 1, 1
        for _ in range(q - 2):
            acc_sub = sub.mul(acc_sub, g)
            acc_big = big.mul(acc_big, w)
            embed[acc_sub] = acc_big
        self.embed_table = embed
        self.project_map = {int(embed[s]): s for s in range(q)}
        if len(self.project_map) != q:
            raise RuntimeError("subfield embedding is not injective (arithmetic bug)")
        self.subfield_image = np.sort(embed)

    def embed(self, e: int) -> int:
        """Standalone GF(q) element -> its image in GF(r)."""
        return int(self.embed_table[e])

    def project(self, e: int) -> int:
        """Image element in GF(r) -> standalone GF(q) bits."""
        try:
            return self.project_map[e]
        except KeyError:
            raise ValueError(f"{e:#x} is not in the GF({self.q}) subfield image") from None

    # -- traces -------------------------------------------------------------

    def _frob_q(self, e: int) -> int:
        for _ in range(self.m):
            e = self.big.mul(e, e)
        return e

    def trace_to_sub_raw(self, e: int) -> int:
        """Tr from GF(r) onto GF(q), returned in the GF(r) representation."""
        t, c = 0, e
        for _ in range(4):
            t ^= c
            c = self._frob_q(c)
        return t

    def trace_to_sub(self, e: int) -> int:
        """Tr from GF(r) onto GF(q), returned as standalone GF(q) bits."""
        return self.project(self.trace_to_sub_raw(e))

    def _build_trace_masks(self):
        # symbol(x) = project(Tr_{r/q}(x)) is GF(2)-linear in the bits of x:
        # bit b of symbol = parity(x & tp_masks[b])
        k = 4 * self.m
        masks = [0] * self.m
        for i in range(k):
            t = self.trace_to_sub(1 << i)
            for b in range(self.m):
                if (t >> b) & 1:
                    masks[b] |= 1 << i
        self.tp_masks = np.array(masks, dtype=np.int64)

    def symbols(self, elems: np.ndarray) -> np.ndarray:
        """Vectorized project(Tr_{r/q}(.)) for an int array of GF(r) elements."""
        out = np.zeros(elems.shape, dtype=np.uint8)
        for b in range(self.m):
            out |= parity_u32(elems & int(self.tp_masks[b])) << b
        return out

    def char_bits(self, elems: np.ndarray) -> np.ndarray:
        """Vectorized absolute trace Tr_{r/2} as bits (additive character sign)."""
        return parity_u32(elems & self.big.tr2_mask)

    def header(self) -> dict:
        return {
            "m": self.m,
            "q": self.q,
            "r": self.r,
            "modulus": f"{self.big.modulus:#x}",
            "alpha": f"{self.big.alpha:#x}",
            "sub_modulus": f"{self.sub.modulus:#x}",
            "sub_alpha": f"{self.sub.alpha:#x}",
        }

    def __repr__(self):
        return f"TowerContext(m={self.m}, q={self.q}, r={self.r})"


@lru_cache(maxsize=None)
def tower(m: int) -> TowerContext:
    return TowerContext(m)
