"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--boxes 50000]

Times the two hot kernels on random polynomials, then a full branch-and-prune
run under each backend (switched through ``VISICUT_PURE_PYTHON`` in a
subprocess, since the backend is chosen at import).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from visicut import kernels

PRUNE_SNIPPET = """
import time
from visicut.fileio import load_instance
from visicut.tighten import prune_enclosure
from visicut.visibility import region_description
from visicut.kernels import BACKEND
reg = region_description(load_instance("fixture:example_quad"))
t = time.perf_counter()
prune_enclosure(reg, {depth})
print(BACKEND, time.perf_counter() - t)
"""


def bench_kernel(name, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    return name, best


def prune_time(pure: bool, depth: int) -> tuple[str, float]:
    env = dict(os.environ)
    if pure:
        env["VISICUT_PURE_PYTHON"] = "1"
    else:
        env.pop("VISICUT_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", PRUNE_SNIPPET.format(depth=depth)],
                         env=env, capture_output=True, text=True, check=True).stdout.split()
    return out[0], float(out[1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--boxes", type=int, default=50_000)
    ap.add_argument("--terms", type=int, default=10)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--depth", type=int, default=16, help="prune depth for the end-to-end run")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    coeffs = rng.uniform(-5, 5, args.terms)
    exps = rng.integers(0, 3, size=(args.terms, args.n))
    lo = rng.uniform(-2, 1, size=(args.boxes, args.n))
    hi = lo + rng.uniform(0, 1, size=(args.boxes, args.n))
    X = rng.uniform(-2, 2, size=(args.boxes, args.n))

    backends = kernels.available_backends()
    print(f"{args.boxes} boxes/points, {args.terms} terms, n={args.n}, best of {args.repeat}")
    print(f"{'kernel':<22}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for label, call in (
        ("interval_eval_boxes", lambda b: kernels.interval_eval_boxes(coeffs, exps, lo, hi, backend=b)),
        ("eval_points", lambda b: kernels.eval_points(coeffs, exps, X, backend=b)),
    ):
        times = [bench_kernel(b, lambda b=b: call(b), args.repeat)[1] for b in backends]
        row = f"{label:<22}" + "".join(f"{1e3 * t:>10.2f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[-1] / times[0]:>11.1f}x"
        print(row)

    print(f"\nprune_enclosure on the quad example, depth {args.depth}:")
    for pure in (False, True):
        name, t = prune_time(pure, args.depth)
        print(f"  backend {name:<8} {t:.3f}s")


if __name__ == "__main__":
    main()
