"""Cyclotomic classes of GF(r)*, their character sums, and the trace-zero
solution count they control.

For a divisor N of r - 1 the class of index i is alpha^i times the subgroup
generated by alpha^N; class membership is discrete log mod N.  The character
sum over a class counts trace-zero minus trace-one elements (the additive
character of GF(r) is (-1)^Tr(x) in characteristic 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .gf import TowerContext, parity_u32


class CyclotomicSystem:
    """Order-N cyclotomic classes of GF(r)* over a fixed tower."""

    def __init__(self, tw: TowerContext, N: int):
        r = tw.r
        if N < 1 or (r - 1) % N != 0:
            raise ValueError(f"N={N} must divide r-1={r - 1}")
        self.tower = tw
        self.N = N
        self.class_size = (r - 1) // N
        self._periods: np.ndarray | None = None

    def class_of(self, e: int) -> int:
        """Class index of a nonzero element: discrete log mod N."""
        big = self.tower.big
        if e == 0:
            raise ValueError("zero element belongs to no cyclotomic class")
        if big.log is not None:
            return int(big.log[e]) % self.N
        # coset walk for table-less fields
        theta = big.pow(big.alpha, self.N)
        x = e
        for i in range(self.N):
            y = x
            for _ in range(self.class_size):
                if y == 1:
                    return i
                y = big.mul(y, theta)
            x = big.mul(x, big.inv(big.alpha))
        raise RuntimeError("element not reached by any class (arithmetic bug)")

    def class_elements(self, i: int) -> np.ndarray:
        big = self.tower.big
        logs = (i + self.N * np.arange(self.class_size, dtype=np.int64)) % (self.tower.r - 1)
        return big.exp[logs].astype(np.int64)

    def gaussian_periods(self) -> np.ndarray:
        """Character sum over each class, as exact signed integers.

        Computed by direct summation: the elements in discrete-log order are
        exp[j], and exp[j] lies in class j mod N, so a reshape of the trace
        bits gives all N sums in one pass.
        """
        if self._periods is None:
            tw = self.tower
            elems = tw.big.exp[: tw.r - 1].astype(np.int64)
            bits = parity_u32(elems & tw.big.tr2_mask).astype(np.int64)
            per_class = bits.reshape(self.class_size, self.N).sum(axis=0)
            self._periods = (self.class_size - 2 * per_class).astype(np.int64)
        return self._periods


def gaussian_periods(tw: TowerContext, N: int) -> np.ndarray:
    return CyclotomicSystem(tw, N).gaussian_periods()


# brute force is affordable (and mandatory as a self-check) up to this r
BRUTE_FORCE_R_LIMIT = 1 << 16


def _count_trace_zero_brute(tw: TowerContext, a: int, N: int) -> int:
    big = tw.big
    r = tw.r
    logs = np.arange(r - 1, dtype=np.int64)
    la = int(big.log[a])
    vals = big.exp[(logs * N + la) % (r - 1)].astype(np.int64)
    syms = tw.symbols(vals)
    return int((syms == 0).sum()) + 1  # x = 0 always solves


@dataclass
class TraceZeroCount:
    """Number of x in GF(r) with Tr(a x^N) = 0, plus how it was obtained."""

    value: int
    closed_form: int
    brute_force: int | None

    @property
    def oracle_checked(self) -> bool:
        return self.brute_force is not None


def count_trace_zero(tw: TowerContext, a: int, N: int) -> TraceZeroCount:
    """Solutions of Tr_{r/q}(a x^N) = 0 via the character-sum closed form.

    The closed form is (q + r - 1 + (q-1) d eta_k) / q with
    d = gcd((r-1)/(q-1), N) and k the order-d class index of a; whenever
    r <= 2^16 a brute-force count runs as well and must agree.
    """
    r, q = tw.r, tw.q
    if (r - 1) % N != 0 or N < 1:
        raise ValueError(f"N={N} must divide r-1={r - 1}")
    if a == 0:
        return TraceZeroCount(value=r, closed_form=r, brute_force=r if r <= BRUTE_FORCE_R_LIMIT else None)
    d = gcd((r - 1) // (q - 1), N)
    sys_d = CyclotomicSystem(tw, d)
    eta = sys_d.gaussian_periods()
    k = sys_d.class_of(a)
    num = q + r - 1 + (q - 1) * d * int(eta[k])
    if num % q != 0:
        raise ArithmeticError(f"closed-form numerator {num} not divisible by q={q}")
    z = num // q
    brute = None
    if r <= BRUTE_FORCE_R_LIMIT:
        brute = _count_trace_zero_brute(tw, a, N)
        if brute != z:
            raise ArithmeticError(
                f"trace-zero count mismatch: closed form {z} vs brute force {brute} "
                f"(a={a:#x}, N={N})"
            )
    return TraceZeroCount(value=z, closed_form=z, brute_force=brute)


@dataclass
class ScalingMultisetReport:
    """Result of the subfield-scaling multiset identity check.

    The multiset { x*y : y in GF(q)*, x in class i of order e1 } must equal
    the order-d class of the same index repeated (q-1)*d/e1 times, where
    d = gcd((r-1)/(q-1), e1).
    """

    e1: int
    class_index: int
    coarse_order: int
    multiplicity: int
    ok: bool
    detail: str = ""


def check_scaling_multiset(tw: TowerContext, e1: int, i: int) -> ScalingMultisetReport:
    """Materialize the scaled-class multiset and verify it exactly."""
    r, q = tw.r, tw.q
    if (r - 1) % e1 != 0:
        raise ValueError(f"e1={e1} must divide r-1={r - 1}")
    if not 0 <= i < e1:
        raise ValueError(f"class index {i} out of range for e1={e1}")
    if r > BRUTE_FORCE_R_LIMIT:
        raise ValueError("explicit multiset check restricted to r <= 2^16")
    d = gcd((r - 1) // (q - 1), e1)
    mult_expected, rem = divmod((q - 1) * d, e1)
    if rem:
        return ScalingMultisetReport(e1, i, d, 0, False, "expected multiplicity not integral")

    big = tw.big
    xs = CyclotomicSystem(tw, e1).class_elements(i)
    scalars = np.array([tw.embed(y) for y in range(1, q)], dtype=np.int64)
    lx = big.log[xs].astype(np.int64)
    ls = big.log[scalars].astype(np.int64)
    prods = big.exp[(lx[:, None] + ls[None, :]) % (r - 1)].astype(np.int64).ravel()

    counts = np.bincount(prods, minlength=r)
    target = CyclotomicSystem(tw, d).class_elements(i % d)
    expect = np.zeros(r, dtype=np.int64)
    expect[target] = mult_expected
    ok = bool(np.array_equal(counts, expect))
    detail = "" if ok else "multiset differs from the scaled coarse class"
    return ScalingMultisetReport(e1, i, d, mult_expected, ok, detail)
