"""Compare the numba kernels against the pure-Python fallback.

Runs each hot kernel in this process (current mode) and, unless this
process is already the fallback, re-runs the same workloads in a child
process with TRIPINBALL_DISABLE_NUMBA=1 and prints the speedups.

Run: python benchmarks/bench_kernels.py [--pure-scale N]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def workloads(scale=1):
    """(label, callable, work units) triples; scale shrinks the slow path."""
    from tripinball import _kernels

    n_orbit = 1_000_000 // scale
    esc = max(int(400 / scale**0.5), 40)
    return [
        (
            f"attractor orbit ({n_orbit} steps)",
            lambda: _kernels.attractor_kernel(
                0.3, np.uint64(7), np.uint64(0), 10_000 // scale, n_orbit, 100
            ),
            n_orbit,
        ),
        (
            f"escape raster ({esc}x{esc}, n=30)",
            lambda: _kernels.escape_kernel(
                0.55, 0.0, 1.0, 0.0, np.pi / 2, esc, esc, 30, 1
            ),
            esc * esc,
        ),
        (
            f"measure histogram ({n_orbit} steps)",
            lambda: _kernels.measure_kernel(
                0.3, np.uint64(5), np.uint64(0), n_orbit, 10_000 // scale, 1024, 64, 100
            ),
            n_orbit,
        ),
    ]


def run_current(scale=1):
    from tripinball._numba import NUMBA_DISABLED

    results = []
    for name, job, units in workloads(scale):
        job()  # warm: trigger compilation outside the timing
        t0 = time.perf_counter()
        job()
        results.append({"name": name, "seconds": time.perf_counter() - t0, "units": units})
    return {"fallback": NUMBA_DISABLED, "scale": scale, "timings": results}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--pure-scale",
        type=int,
        default=20,
        help="divide work by this factor on the pure-Python path (default 20)",
    )
    parser.add_argument("--emit-json", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.emit_json:
        print(json.dumps(run_current(args.pure_scale)))
        return

    here = run_current(1)
    mode = "pure-python" if here["fallback"] else "numba"
    print(f"current mode: {mode}")
    for row in here["timings"]:
        print(f"  {row['name']:42s} {row['seconds'] * 1e3:10.1f} ms")

    if here["fallback"]:
        return

    env = dict(os.environ, TRIPINBALL_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, __file__, "--emit-json", "--pure-scale", str(args.pure_scale)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    pure = json.loads(out.stdout.strip().splitlines()[-1])
    print(f"pure-python fallback (reduced work, per-unit comparison):")
    for fast, slow in zip(here["timings"], pure["timings"]):
        speedup = (slow["seconds"] / slow["units"]) / (fast["seconds"] / fast["units"])
        print(
            f"  {slow['name']:42s} {slow['seconds'] * 1e3:10.1f} ms"
            f"   -> numba ~{speedup:,.0f}x faster per unit"
        )


if __name__ == "__main__":
    main()
