"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]
"""

import argparse
import time

import numpy as np

from wulffkit import kernels
from wulffkit.anisotropy import Ellipsoid, dual_norm
from wulffkit.sphere import seed_directions


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def cases(scale, rng):
    n = int(20_000 * scale)
    x = rng.normal(size=(n, 3))
    seeds = seed_directions(2, 4096)
    weights = rng.uniform(0.5, 2.0, size=seeds.shape[0])
    sphere = rng.normal(size=(int(100_000 * scale), 3))
    sphere /= np.linalg.norm(sphere, axis=1, keepdims=True)
    shell = 1.01 * sphere[::-1] + 0.05
    far = sphere + np.array([5.0, 0.0, 0.0])
    gamma = Ellipsoid(np.diag([4.0, 1.0, 1.0]))
    return {
        f"seed_topk {n}x{seeds.shape[0]} k=8": lambda: kernels.seed_topk(x, seeds, weights, 8),
        f"directed_max_min near {sphere.shape[0]}": lambda: kernels.directed_max_min(shell, sphere),
        f"directed_max_min far {sphere.shape[0]}": lambda: kernels.directed_max_min(far, sphere),
        f"dual_norm {n} points": lambda: dual_norm(gamma, x),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--scale", type=float, default=1.0, help="multiplies every problem size")
    args = parser.parse_args()

    backends = kernels.available_backends()
    timings = {}
    for name in backends:
        previous = kernels.use_backend(name)
        try:
            for label, fn in cases(args.scale, np.random.default_rng(0)).items():
                timings[label, name] = best_of(fn, args.repeat)
        finally:
            kernels.use_backend(previous)

    labels = list(dict.fromkeys(label for label, _ in timings))
    print(f"{'case':<36}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for label in labels:
        row = [timings[label, b] for b in backends]
        speedup = (f"{timings[label, 'python'] / timings[label, 'compiled']:>9.1f}x"
                   if "compiled" in backends else f"{'n/a':>10}")
        print(f"{label:<36}" + "".join(f"{t:>11.3f}s" for t in row) + speedup)


if __name__ == "__main__":
    main()
