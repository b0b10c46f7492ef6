"""Compare the numba and numpy backends of the hot kernels.

Run with ``python benchmarks/bench_kernels.py``. Each kernel is timed on
inputs of the size used by the sampling oracles and the Horner evaluation
of families; the first numba call (compilation) is excluded.
"""

import argparse
import timeit

import numpy as np

from sectorial import _kernels


def cases(rng, dim, samples, degree):
    M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    U = rng.standard_normal((samples, dim)) + 1j * rng.standard_normal((samples, dim))
    coeffs = rng.standard_normal((degree + 1, dim, dim)) + 0j
    re, im = rng.standard_normal(samples), rng.standard_normal(samples)
    w = np.ones(samples)
    return {
        "quad_forms": lambda b: _kernels.quad_forms(M, U, backend=b),
        "horner": lambda b: _kernels.horner(coeffs, 0.3 + 0.2j, backend=b),
        "sector_excess": lambda b: _kernels.sector_excess(re, im, 0.0, 1.0, w, backend=b),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=100)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--degree", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    rng = np.random.default_rng(0)
    print(f"dim={args.dim} samples={args.samples} degree={args.degree}")
    print(f"{'kernel':<15}" + "".join(f"{b:>14}" for b in backends))
    for name, fn in cases(rng, args.dim, args.samples, args.degree).items():
        row = f"{name:<15}"
        for b in backends:
            fn(b)  # warm-up, includes compilation for numba
            number = 3
            best = min(timeit.repeat(lambda: fn(b), number=number, repeat=args.repeat)) / number
            row += f"{best * 1e3:>11.3f} ms"
        print(row)


if __name__ == "__main__":
    main()
