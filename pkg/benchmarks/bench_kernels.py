"""Compiled vs pure-Python kernels on random complete instances.

    python benchmarks/bench_kernels.py [--sizes 200 500 1000] [--repeat 3] [--seed 0]
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from matchkit import _pykernels
from matchkit.core import RoommateInstance
from matchkit.doubling import double

try:
    from matchkit import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def random_roommates(n: int, rng: random.Random) -> RoommateInstance:
    prefs = []
    for i in range(1, n + 1):
        row = [j for j in range(1, n + 1) if j != i]
        rng.shuffle(row)
        prefs.append(row)
    return RoommateInstance(prefs)


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(sizes, enum_size, rng):
    for n in sizes:
        inner = double(random_roommates(n, rng)).inner
        pref, lens = inner.men_pref_array
        mr, wr = inner.men_rank_array, inner.women_rank_array
        wife0 = _pykernels.gale_shapley(pref, lens, wr)
        wifez_h = _pykernels.gale_shapley(*inner.women_pref_array, mr)
        wifez = [0] * (n + 1)
        for w, m in enumerate(wifez_h[1:], 1):
            wifez[m] = w
        yield f"gale_shapley n={n}", lambda k, a=(pref, lens, wr): k.gale_shapley(*a)
        yield f"rotation_chase n={n}", lambda k, a=(pref, mr, wr, wife0, wifez): k.rotation_chase(*a)
    inst = random_roommates(enum_size, rng)
    yield f"sr_stable_matchings n={enum_size}", lambda k, a=(inst.rank_array, enum_size): k.sr_stable_matchings(*a)
    inner = double(random_roommates(6, rng)).inner
    pref, lens = inner.men_pref_array
    args = (pref, lens, inner.men_rank_array, inner.women_rank_array)
    yield "sm_stable_matchings n=6 (doubled)", lambda k, a=args: k.sm_stable_matchings(*a)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 500, 1000])
    ap.add_argument("--enum-size", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
    rng = random.Random(args.seed)
    print(f"{'kernel':<36}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    speedups = []
    for name, run in cases(args.sizes, args.enum_size, rng):
        py = best_of(lambda: run(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:<36}{py:>12.4f}{'-':>12}{'-':>10}")
            continue
        if run(_pykernels) != run(_ckernels):
            raise SystemExit(f"{name}: backends disagree")
        cy = best_of(lambda: run(_ckernels), args.repeat)
        speedups.append(py / cy)
        print(f"{name:<36}{py:>12.4f}{cy:>12.4f}{py / cy:>9.1f}x")
    if speedups:
        print(f"geometric-mean speedup {statistics.geometric_mean(speedups):.1f}x")


if __name__ == "__main__":
    main()
