"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--n 64] [--dim 2] [--repeat 5]

Reports per-call kernel timings and one end-to-end run per backend.
"""
import argparse
import timeit

import numpy as np

from kgdamp import kernels
from kgdamp.integrators import SimParams, run
from kgdamp.experiments import preset
from kgdamp.spectral_core import make_grid


def kernel_cases(shape, rng):
    z = [np.ascontiguousarray(rng.normal(size=shape) + 1j * rng.normal(size=shape)) for _ in range(3)]
    r = [np.ascontiguousarray(rng.uniform(1, 5, size=shape)) for _ in range(3)]
    return {
        "power_nonlinearity(p=2)": lambda: kernels.power_nonlinearity(z[0], 2.0),
        "power_nonlinearity(p=2.5)": lambda: kernels.power_nonlinearity(z[0], 2.5),
        "advance": lambda: kernels.advance(z[0], z[1], z[2], r[0], r[1], r[2]),
        "weighted_sum_sq": lambda: kernels.weighted_sum_sq(z[0], r[0]),
        "abs_power_sum(q=4)": lambda: kernels.abs_power_sum(z[0], 4.0),
        "all_finite": lambda: kernels.all_finite(z[0]),
    }


def best_of(func, repeat, number):
    return min(timeit.repeat(func, repeat=repeat, number=number)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--dim", type=int, default=2, choices=(1, 2))
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--t-final", type=float, default=5.0)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    if len(backends) == 1:
        print("compiled extension not available; timing the numpy fallback only")
    shape = (args.n,) * args.dim
    rng = np.random.default_rng(0)
    original = kernels.BACKEND

    print(f"kernels on a {'x'.join(map(str, shape))} grid (microseconds per call)")
    print(f"{'kernel':28s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    names = list(kernel_cases(shape, rng))
    for name in names:
        times = []
        for b in backends:
            kernels.set_backend(b)
            times.append(best_of(kernel_cases(shape, rng)[name], args.repeat, 200))
        line = f"{name:28s}" + "".join(f"{1e6 * t:12.2f}" for t in times)
        if len(times) > 1:
            line += f"{times[1] / times[0]:11.2f}x"
        print(line)

    name = "fig2_left" if args.dim == 2 else "fig1_left"
    grid = make_grid(args.dim, args.n)
    psi0, v0 = preset(name, grid)
    params = SimParams(t_final=args.t_final)
    print(f"\nend-to-end {name}, {params.n_steps} steps")
    for b in backends:
        kernels.set_backend(b)
        t = best_of(lambda: run(psi0, v0, params), max(1, args.repeat // 2), 1)
        print(f"  {b:8s} {t:8.3f} s  ({1e6 * t / params.n_steps:.1f} us/step)")
    kernels.set_backend(original)


if __name__ == "__main__":
    main()
