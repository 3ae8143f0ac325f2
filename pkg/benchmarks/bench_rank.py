"""Rank and Betti-table timings for the numba and pure-numpy backends.

Each backend runs in its own interpreter because the backend is fixed at
import time by NSPCHECK_DISABLE_NUMBA.

    python benchmarks/bench_rank.py [--sizes 100 200 400] [--repeat 3]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = "--worker"


def _worker(sizes: list[int], repeat: int) -> dict:
    import numpy as np

    from nspcheck import BACKEND, betti_table, make_subsystem, parse_model
    from nspcheck.linalg import rank

    p = 32003
    rng = np.random.default_rng(0)
    out = {"backend": BACKEND, "rank": {}, "betti": {}}
    rank(rng.integers(0, p, size=(8, 8)), p)  # compile outside the timing
    for n in sizes:
        M = rng.integers(0, p, size=(n, n))
        best = min(_time(lambda: rank(M, p)) for _ in range(repeat))
        out["rank"][str(n)] = best
    for model, p_max, J in (("p2:d=3", 2, 4), ("p2:d=4", 2, 5)):
        V = make_subsystem(parse_model(model))
        out["betti"][model] = min(_time(lambda: betti_table(V, p_max, J)) for _ in range(repeat))
    return out


def _time(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def _run(disable_numba: bool, sizes: list[int], repeat: int) -> dict:
    env = dict(os.environ)
    if disable_numba:
        env["NSPCHECK_DISABLE_NUMBA"] = "1"
    else:
        env.pop("NSPCHECK_DISABLE_NUMBA", None)
    cmd = [sys.executable, __file__, WORKER, "--repeat", str(repeat), "--sizes", *map(str, sizes)]
    res = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument(WORKER, action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.worker:
        print(json.dumps(_worker(args.sizes, args.repeat)))
        return 0
    fast = _run(False, args.sizes, args.repeat)
    slow = _run(True, args.sizes, args.repeat)
    print(f"{'case':<16}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for group in ("rank", "betti"):
        for key in fast[group]:
            a, b = fast[group][key], slow[group][key]
            label = f"{group} {key}"
            print(f"{label:<16}{a:>11.4f}s{b:>11.4f}s{b / a:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
