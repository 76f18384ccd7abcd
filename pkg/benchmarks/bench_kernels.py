"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 3]

Both paths run in one process; the ``accelerated`` argument picks the path
per call, so ``DISTAMP_NUMBA`` only matters if numba is missing entirely.
"""

import argparse
import time

import numpy as np

from distamp import kernels
from distamp._accel import NUMBA_ENABLED
from distamp.fock import CoherentSpec, coherent_exact


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def cases():
    state = coherent_exact(CoherentSpec(100.0, 0.0), 250).amplitudes
    rho = np.outer(state, state.conj())

    def walk(acc):
        return kernels.walk_trials(100, 0.5 / 10_000, 10_000, 20_000,
                                   np.random.Generator(np.random.PCG64(1)), 1, accelerated=acc)

    yield "branch_gram  N_T=10 dim=30", lambda acc: kernels.branch_gram(0.1, 10, 30, accelerated=acc)
    yield "kraus_pairs  200 pairs dim=251", lambda acc: kernels.kraus_pairs(rho, 0.03, 200, accelerated=acc)
    yield "walk_trials  N_T=1e4 20k trials", walk


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if not NUMBA_ENABLED:
        raise SystemExit("numba is unavailable or disabled; nothing to compare")
    print(f"{'kernel':34s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, fn in cases():
        fn(True)  # compile outside the timed region
        t_fast, a = best_of(lambda: fn(True), args.repeat)
        t_slow, b = best_of(lambda: fn(False), args.repeat)
        same = all(np.allclose(x, y, rtol=1e-12, atol=1e-14) for x, y in zip(a, b)) \
            if isinstance(a, tuple) else np.allclose(a, b, rtol=1e-12, atol=1e-14)
        flag = "" if same else "  results differ"
        print(f"{name:34s} {t_fast:10.4f} {t_slow:10.4f} {t_slow / t_fast:8.1f}{flag}")


if __name__ == "__main__":
    main()
