"""Benchmark the batched inference kernels: numba JIT vs numpy fallback.

The kernel implementation is chosen at import time from the
FUZZTERM_DISABLE_NUMBA environment variable, so each path runs in its own
subprocess and the parent prints the comparison.

Usage: python3 benchmarks/bench_kernels.py [--rows 200000] [--repeats 5]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _worker(rows: int, repeats: int) -> dict:
    import numpy as np

    from fuzzterm import load_bundled
    from fuzzterm.kernels import NUMBA_ENABLED

    kb = load_bundled("fcc")
    system = kb.system()
    rng = np.random.default_rng(42)
    X = rng.random((rows, 4))

    system.infer_batch(X[:128])  # trigger JIT compilation outside the timing
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        out = system.infer_batch(X)
        best = min(best, time.perf_counter() - start)
    return {
        "numba": NUMBA_ENABLED,
        "rows": rows,
        "best_s": best,
        "rows_per_s": rows / best,
        "checksum": float(out.sum()),
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args(argv)

    if args.worker:
        print(json.dumps(_worker(args.rows, args.repeats)))
        return 0

    results = {}
    for label, disable in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, FUZZTERM_DISABLE_NUMBA=disable)
        proc = subprocess.run(
            [sys.executable, __file__, "--worker",
             "--rows", str(args.rows), "--repeats", str(args.repeats)],
            env=env, capture_output=True, text=True, check=True,
        )
        results[label] = json.loads(proc.stdout.strip().splitlines()[-1])

    if results["numba"]["numba"] is False:
        print("note: numba unavailable; both runs used the numpy fallback")
    for label, r in results.items():
        print(
            f"{label:>6}: {r['rows']} rows in {r['best_s']:.4f}s "
            f"({r['rows_per_s']:,.0f} rows/s)"
        )
    if abs(results["numba"]["checksum"] - results["numpy"]["checksum"]) > 1e-6:
        print("warning: path outputs disagree")
        return 1
    speedup = results["numpy"]["best_s"] / results["numba"]["best_s"]
    print(f"speedup (numba over numpy): {speedup:.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
