"""Compare the numba and numpy batch-recovery backends.

    python3 benchmarks/bench_kernels.py [--trials N] [--repeat R]

Times one full window (every tuple index m) of ``batch_recover`` per backend,
after a warm-up call, and checks that both backends give identical output.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from mwrc import _kernels
from mwrc.protocol import batch_recover
from mwrc.schedule import build_schedule


def window(messages, sched, q, backend):
    return [batch_recover(messages, sched, m, q, backend) for m in range(1, sched.num_users + 1)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--q", type=int, default=5)
    ap.add_argument("--users", type=int, nargs="+", default=[3, 6, 10])
    args = ap.parse_args()

    backends = sorted(_kernels.IMPLEMENTATIONS)
    print(f"default backend: {_kernels.BACKEND}; trials={args.trials} q={args.q}")
    print(f"{'L':>3} " + " ".join(f"{b + ' [ms]':>14}" for b in backends) + "   speedup")
    rng = np.random.default_rng(0)
    for L in args.users:
        sched = build_schedule(L)
        msgs = rng.integers(0, args.q, size=(args.trials, L), dtype=np.int64)
        results = {b: window(msgs, sched, args.q, b) for b in backends}  # warm-up
        ref = results[backends[0]]
        for b in backends[1:]:
            assert all(np.array_equal(x, y) for x, y in zip(ref, results[b])), b
        best = {
            b: min(timeit.repeat(lambda b=b: window(msgs, sched, args.q, b), number=1, repeat=args.repeat))
            for b in backends
        }
        line = f"{L:>3} " + " ".join(f"{1e3 * best[b]:>14.2f}" for b in backends)
        if "numba" in best:
            line += f"   {best['numpy'] / best['numba']:.2f}x"
        print(line)


if __name__ == "__main__":
    main()
