"""Time the numba and numpy kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--points 20000] [--seeds 2000] [--repeat 5]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from mixedlink import kernels
from mixedlink.covering import CoveringSpec, pullback
from mixedlink.grammar import parse

CASES = {
    "phi21*(z1^2+z2^2)": pullback(parse("z1^2 + z2^2"), CoveringSpec.homogeneous_spec(2, 2, 1)),
    "phi31*(z1^3+z2^2+z3^5)": pullback(parse("z1^3 + z2^2 + z3^5"), CoveringSpec.homogeneous_spec(3, 3, 1)),
}


def _sphere(rng, m, n, r):
    Z = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    return r * Z / np.linalg.norm(Z, axis=1, keepdims=True)


def bench(points: int, seeds: int, repeat: int) -> list[tuple[str, str, float, float]]:
    rng = np.random.default_rng(0)
    rows = []
    for name, g in CASES.items():
        poly = g.numeric()
        Z = _sphere(rng, points, g.n, 0.5)
        S = _sphere(rng, seeds, g.n, 0.5)
        jobs = {
            "eval_grad": lambda which: kernels.eval_grad(poly, Z, which=which),
            "project": lambda which: kernels.project(poly, S, r2=0.25, which=which),
        }
        for kernel, fn in jobs.items():
            times = {}
            for which in ("numpy", "numba"):
                fn(which)  # compile / warm caches
                times[which] = min(timeit.repeat(lambda: fn(which), number=1, repeat=repeat))
            rows.append((name, kernel, times["numpy"], times["numba"]))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--seeds", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not kernels.NUMBA_AVAILABLE:
        raise SystemExit("numba is not importable; nothing to compare")
    print(f"{'case':26} {'kernel':10} {'numpy [s]':>10} {'numba [s]':>10} {'speed-up':>9}")
    for name, kernel, t_np, t_nb in bench(args.points, args.seeds, args.repeat):
        print(f"{name:26} {kernel:10} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
