"""Time the compiled and numpy kernel backends on the experiment workloads.

Usage: python3 benchmarks/bench_kernels.py [--trials 1024] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from chirpaf.kernels import PREFERRED, available_backends, get_backend

N = 127


def workloads(trials: int, rng: np.random.Generator):
    r = rng.standard_normal((trials, N)) + 1j * rng.standard_normal((trials, N))
    s = np.exp(2j * np.pi * rng.integers(0, 4, N) / 4)
    n = np.arange(N, dtype=float)
    ct = np.cos(2 * np.pi * rng.random((trials, 5, 5)))
    ph = 2 * np.pi * rng.random((trials, 5, 5))
    return {
        "peaks H=3 D=127": lambda b: b.correlator_peaks(r, s, np.array([-0.66, 0.0, 0.66]), np.arange(N)),
        "peaks H=7 D=127": lambda b: b.correlator_peaks(r, s, np.linspace(-1, 1, 7), np.arange(N)),
        "peaks H=127 D=13": lambda b: b.correlator_peaks(r, s, np.arange(N) - 63.0, np.arange(13)),
        "clarke L=5 P=5": lambda b: b.clarke_gains(0.1, ct, ph, n),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = available_backends()
    backends = {n: get_backend(n) for n in names}
    print(f"backends: {', '.join(names)}; default dispatch {PREFERRED}")
    print(f"{'kernel':<20}" + "".join(f"{n + ' us/trial':>20}" for n in names))
    for label, fn in workloads(args.trials, np.random.default_rng(0)).items():
        cells = []
        for name in names:
            best = min(timeit.repeat(lambda: fn(backends[name]), number=1, repeat=args.repeat))
            cells.append(f"{1e6 * best / args.trials:>20.2f}")
        print(f"{label:<20}" + "".join(cells))


if __name__ == "__main__":
    main()
