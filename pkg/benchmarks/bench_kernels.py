"""Compare the numba kernels with their numpy counterparts.

Usage::

    python3 benchmarks/bench_kernels.py [--n 200000] [--repeat 5]

Each kernel is called once to trigger compilation, then timed with
``timeit``; the best of ``--repeat`` runs is reported.
"""

import argparse
import timeit

import numpy as np

from epkit import kernels


def cases(n, rng):
    c = lambda: rng.normal(size=n) + 1j * rng.normal(size=n)  # noqa: E731
    eps1, eps2, omega = c(), c(), c()
    t = np.linspace(0, 2 * np.pi, n)
    z = 1j + 1e-2 * np.exp(1j * t)
    s = np.sqrt(z * z + 1)
    dz = 1e-2j * np.exp(1j * t)
    steps = max(n // 100, 10)
    hs = rng.normal(size=(steps, 5, 2, 2)) + 1j * rng.normal(size=(steps, 5, 2, 2))
    y0 = np.array([1.0 + 0j, 0.0 + 0j])
    return {
        "eig2_batch": (eps1, eps2, omega, 1e-9),
        "landscape": (eps1, eps2, omega, 1e-9),
        "rigidity_from_w": (eps1,),
        "continue_signs": (s,),
        "continue_affine": (z, s),
        "connection_integrand": (z, s, dz),
        "rk4_doubling": (hs, 1e-3, y0),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not kernels.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, call_args in cases(args.n, rng).items():
        np_fn = getattr(kernels, "np_" + name)
        nb_fn = getattr(kernels, "nb_" + name)
        nb_fn(*call_args)
        t_np = min(timeit.repeat(lambda: np_fn(*call_args), number=1, repeat=args.repeat))
        t_nb = min(timeit.repeat(lambda: nb_fn(*call_args), number=1, repeat=args.repeat))
        print(f"{name:<22}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
