"""Benchmark the counting kernels: compiled extension vs pure NumPy.

Micro level: count_candidates on packed bitmaps of a mining-shaped
workload. Macro level: a full mine() run in a subprocess per backend.

    python3 benchmarks/bench_kernels.py [--rows 20000] [--items 300]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from rulelens import _kernels_py

try:
    from rulelens import _speedups
except ImportError:
    _speedups = None


def micro(rows: int, n_items: int, n_cands: int, k: int, repeats: int = 3):
    rng = np.random.Generator(np.random.PCG64(7))
    table = rng.random((n_items, rows)) < rng.uniform(0.05, 0.5, size=(n_items, 1))
    masks = np.vstack([_kernels_py.pack_bool(row) for row in table])
    label = _kernels_py.pack_bool(rng.random(rows) < 0.2)
    cands = np.vstack([
        rng.choice(n_items, size=k, replace=False) for _ in range(n_cands)
    ]).astype(np.int32)
    cands.sort(axis=1)

    results = {}
    for name, fn in [("pure", _kernels_py.count_candidates),
                     ("compiled", _speedups.count_candidates if _speedups else None)]:
        if fn is None:
            results[name] = None
            continue
        best = float("inf")
        out = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            out = fn(masks, label, cands)
            best = min(best, time.perf_counter() - t0)
        results[name] = (best, out)
    if _speedups is not None:
        np.testing.assert_array_equal(results["pure"][1][0], results["compiled"][1][0])
        np.testing.assert_array_equal(results["pure"][1][1], results["compiled"][1][1])
    return results


MACRO_SNIPPET = """
import time
from rulelens import synth, miner, discretize
from rulelens.dataset import split_train_test
import rulelens
ds, _, _ = synth.generate(42, n_rows={rows})
train, _ = split_train_test(ds, 0.8, 7)
cuts = discretize.discretize_features(train)
config = miner.MiningConfig()
items = miner.build_item_universe(train, cuts, config)
t0 = time.perf_counter()
rules = miner.mine(train, items, config)
print(f"{{rulelens.kernel_backend}} {{time.perf_counter() - t0:.3f}} {{len(rules)}}")
"""


def macro(rows: int):
    out = {}
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("RULELENS_PURE", None)
        if pure:
            env["RULELENS_PURE"] = "1"
        proc = subprocess.run(
            [sys.executable, "-c", MACRO_SNIPPET.format(rows=rows)],
            capture_output=True, text=True, env=env, check=True,
        )
        backend, seconds, n_rules = proc.stdout.split()
        out[backend] = (float(seconds), int(n_rules))
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=20_000)
    parser.add_argument("--items", type=int, default=300)
    parser.add_argument("--cands", type=int, default=50_000)
    parser.add_argument("--k", type=int, default=3)
    args = parser.parse_args()

    print(f"kernel micro-benchmark: {args.cands} candidates of {args.k} items, "
          f"{args.rows} rows, {args.items} items")
    results = micro(args.rows, args.items, args.cands, args.k)
    pure_s = results["pure"][0]
    print(f"  pure      {pure_s * 1e3:9.1f} ms")
    if results["compiled"] is None:
        print("  compiled  (extension not built)")
    else:
        comp_s = results["compiled"][0]
        print(f"  compiled  {comp_s * 1e3:9.1f} ms   ({pure_s / comp_s:.1f}x faster)")

    print("full mine() on the synthetic dataset:")
    for backend, (seconds, n_rules) in macro(args.rows // 2).items():
        print(f"  {backend:9s} {seconds * 1e3:9.1f} ms   ({n_rules} rules)")


if __name__ == "__main__":
    main()
