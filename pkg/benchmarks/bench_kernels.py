"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one row per kernel: best-of-N wall time for each backend, the speedup,
and the largest absolute difference between the two outputs.
"""

import argparse
import math
import timeit

import numpy as np
from scipy.special import ndtr, roots_hermite

from anticonc import _kernels_py as py

try:
    from anticonc import _ckernels as cy
except ImportError:
    cy = None


def cases(rng):
    x, w = roots_hermite(512)
    nodes, weights = x * math.sqrt(2.0), w / math.sqrt(math.pi)
    sr, s1 = math.sqrt(0.5), math.sqrt(0.5)
    a = np.linspace(-8, 8, 4097)
    gx = rng.uniform(0, 40, 200_000)
    kt = np.linspace(0, 1, 1001)
    kv = kt**3
    t = rng.uniform(0, 1, 1_000_000)
    ka = np.linspace(-8, 8, 4097)
    kg = ndtr(ka) ** 10
    kdg = 10 * ndtr(ka) ** 9 * np.exp(-ka**2 / 2) / math.sqrt(2 * math.pi)
    v = rng.uniform(1e-9, 1 - 1e-9, 200_000)
    samples = rng.normal(size=2_000_000)
    return [
        ("gamma_pq (a=3.5, 2e5 pts)", lambda k: k.gamma_pq(3.5, gx)[0]),
        ("equicorr_diag (512 nodes, 4097 pts, d=100)", lambda k: k.equicorr_diag(a, nodes, weights, sr, s1, 100)),
        ("equicorr_diag_deriv (same)", lambda k: k.equicorr_diag_deriv(a, nodes, weights, sr, s1, 100)),
        ("pwl_eval (1001 knots, 1e6 pts)", lambda k: k.pwl_eval(kt, kv, t)),
        ("pwl_inverse (1001 knots, 1e6 pts)", lambda k: k.pwl_inverse(kt, kv, t)),
        ("hermite_invert (4097 knots, 2e5 pts)", lambda k: k.hermite_invert(ka, kg, kdg, v)),
        ("window_count (2e6 samples)", lambda k: np.float64(k.window_count(samples, 0.0, 0.1))),
    ]


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if cy is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first")
    rng = np.random.default_rng(0)
    print(f"{'kernel':46s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s} {'max |diff|':>11s}")
    for label, fn in cases(rng):
        tp = best(lambda: fn(py), args.repeat)
        tc = best(lambda: fn(cy), args.repeat)
        diff = float(np.max(np.abs(np.asarray(fn(py)) - np.asarray(fn(cy)))))
        print(f"{label:46s} {tp * 1e3:12.2f} {tc * 1e3:12.2f} {tp / tc:8.2f} {diff:11.2e}")


if __name__ == "__main__":
    main()
