#!/usr/bin/env python3
"""Benchmark the compiled kernels against their pure-numpy fallbacks.

Runs every dual-path kernel on representative workloads and prints a table
of per-call times and speedups.  The numba path is compiled (and cached)
before timing so JIT cost is excluded.

Usage: python benchmarks/bench_kernels.py [--repeat N]
Setting OVOIDCODES_DISABLE_NUMBA=1 would remove the compiled path entirely;
this script instead selects backends explicitly, so run it with the flag
unset.
"""

import argparse
import time

import numpy as np

from ovoidcodes import _kernels as K
from ovoidcodes.cycliccode import build_cyclic_code, weight_distribution_enumeration
from ovoidcodes.designs import supports_of_weight
from ovoidcodes.equivgroup import _target_tables, _sorted_copy, find_frame
from ovoidcodes.gf import tower
from ovoidcodes.projgeo import certify_cap, elliptic_quadric, enumerate_planes, points_from_code


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba unavailable (or disabled); nothing to compare")

    rows = []

    def bench(name, call):
        call("numba")  # warm the JIT cache
        t_nb = timeit(lambda: call("numba"), args.repeat)
        t_np = timeit(lambda: call("numpy"), args.repeat)
        rows.append((name, t_nb, t_np))

    # line-sweep collinearity, q = 32 ovoid (1025 points)
    ps32 = elliptic_quadric(32)
    mul32, inv32 = ps32.field.mul_table(), ps32.field.inv_table()
    look32 = ps32.lookup_table()
    bench(
        "collinear sweep q=32 (1025 pts)",
        lambda impl: K.collinear_witness(ps32.points, look32, mul32, inv32, 32, impl=impl),
    )

    # plane profile, q = 32 (33825 planes x 1025 points)
    planes32 = enumerate_planes(32)
    bench(
        "plane profile q=32 (33825 planes)",
        lambda impl: K.plane_intersection_counts(planes32, ps32.points, mul32, impl=impl),
    )

    # codeword weight enumeration, q = 16 (65536 words of length 257)
    code16 = build_cyclic_code(tower(4), 255)
    bench(
        "weight enumeration q=16 (4^8 words)",
        lambda impl: weight_distribution_enumeration(code16, impl=impl),
    )

    # design triple counting, q = 8 minweight design (520 blocks of size 56)
    code8 = build_cyclic_code(tower(3), 63)
    blocks8, _ = supports_of_weight(code8, 56)
    bench(
        "triple cover q=8 (520 x C(56,3))",
        lambda impl: K.triple_cover_counts(blocks8, 65, impl=impl),
    )

    # dependent 4-subsets, q = 8 (C(65,4) = 677040 subsets)
    cols8 = np.ascontiguousarray(code8.matrix.T, dtype=np.uint8)
    mul8, inv8 = code8.symbol_field.mul_table(), code8.symbol_field.inv_table()
    bench(
        "dependent quads q=8 (C(65,4))",
        lambda impl: K.dependent_quads(cols8, mul8, inv8, max_count=70000, impl=impl),
    )

    # frame search, q = 4 full exhaustion (both ovoids equivalent, so scan
    # is cut short at the first witness; use max_witnesses high to exhaust)
    ps4 = points_from_code(build_cyclic_code(tower(2), 15))
    certify_cap(ps4)
    B4 = _sorted_copy(ps4)
    member_raw, plane_row, circle_raw = _target_tables(B4)
    src = find_frame(B4)
    mul4, inv4 = ps4.field.mul_table(), ps4.field.inv_table()
    bench(
        "frame search q=4 (full scan)",
        lambda impl: K.search_frame_maps(
            B4.points,
            B4.codes.astype(np.int64),
            member_raw,
            plane_row,
            circle_raw,
            src.u_all,
            src.probes,
            mul4,
            inv4,
            4,
            2,
            0,
            len(B4),
            10**12,
            10_000,  # above the stabilizer size, so the scan never stops early
            impl=impl,
        )[3],
    )

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for name, t_nb, t_np in rows:
        print(f"{name:<{width}}  {t_nb * 1e3:>8.2f}ms  {t_np * 1e3:>8.2f}ms  {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
