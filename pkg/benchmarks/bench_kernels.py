"""Throughput of the numba and numpy trial kernels on the same trial range.

    python benchmarks/bench_kernels.py --trials 200000

Both paths are checked to return identical per-trial error counts.
"""
import argparse
import time

import numpy as np

from rasm import _kernels
from rasm.baselines import RGSSK, RSM
from rasm.montecarlo import SystemConfig, _prepare
from rasm.rng import stream_key

CASES = [
    SystemConfig(8, 4),
    SystemConfig(16, 4),
    SystemConfig(16, 4, 4),
    SystemConfig(8, 16, scheme=RSM),
    SystemConfig(8, 7, scheme=RGSSK, n_s=3),
]


def _call(fn, prep, snr, start, count):
    key = stream_key(prep.key_seed, snr)
    std = (10 ** (-snr / 10)) ** 0.5
    return fn(key, np.int64(start), np.int64(count), prep.n_res, prep.n_rx, prep.assign,
              prep.points, prep.sym_of_word, prep.word_of_sym, prep.b, prep.b2, std)


def bench(fn, prep, trials, chunk, snr=0.0):
    _call(fn, prep, snr, 0, 64)  # compile / warm caches
    t0 = time.perf_counter()
    parts = [_call(fn, prep, snr, s, min(chunk, trials - s)) for s in range(0, trials, chunk)]
    return time.perf_counter() - t0, np.concatenate(parts)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--chunk", type=int, default=8192, help="numpy batch size")
    args = ap.parse_args()

    print(f"{'config':34s} {'numba s':>9s} {'numpy s':>9s} {'speedup':>8s}  Mtrials/s (numba)")
    for cfg in CASES:
        prep = _prepare(cfg)
        t_nb, e_nb = bench(_kernels.simulate_numba, prep, args.trials, 1 << 18)
        t_np, e_np = bench(_kernels.simulate_numpy, prep, args.trials, args.chunk)
        if not np.array_equal(e_nb, e_np):
            raise SystemExit(f"{cfg.label}: backends disagree")
        print(f"{cfg.label:34s} {t_nb:9.3f} {t_np:9.3f} {t_np / t_nb:8.1f}  {args.trials / t_nb / 1e6:.2f}")


if __name__ == "__main__":
    main()
