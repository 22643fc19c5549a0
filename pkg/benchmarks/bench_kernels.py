"""Compare the numba kernels with their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``. The numba timings exclude
the first (compiling) call.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from freegame import _kernels as k


def best_of(fn, *args, repeat: int = 5) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not k.HAVE_NUMBA:
        print("numba disabled (FREEGAME_NUMBA=0 or not installed); nothing to compare")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':<28}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for side in (16, 32, 64):
        W = rng.normal(size=(side, side))
        W = W @ W.T
        assert np.allclose(k.skron(W), k.skron_numpy(W), atol=1e-12)
        a = best_of(k.skron_numpy, W, repeat=args.repeat)
        b = best_of(k.skron, W, repeat=args.repeat)
        print(f"{'skron side=' + str(side):<28}{a:>12.4f}{b:>12.4f}{a / b:>10.1f}")
    for n, d in ((4, 3), (3, 8), (6, 3)):
        dim = d ** n
        rr, cc = np.divmod(np.arange(dim * dim, dtype=np.int64), dim)
        assert np.array_equal(k.pair_counts(rr, cc, n, d), k.pair_counts_numpy(rr, cc, n, d))
        a = best_of(k.pair_counts_numpy, rr, cc, n, d, repeat=args.repeat)
        b = best_of(k.pair_counts, rr, cc, n, d, repeat=args.repeat)
        print(f"{f'pair_counts n={n} d={d}':<28}{a:>12.4f}{b:>12.4f}{a / b:>10.1f}")


if __name__ == "__main__":
    main()
