"""Time the numba kernels against the pure-numpy fallback.

Each backend runs in its own interpreter because the backend is fixed at
import time by BESSELCALL_DISABLE_JIT. Compilation is excluded: every case is
called once before timing.

    python3 benchmarks/bench_backends.py [--repeat 3] [--json out.json]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from besselcall import _jit, analytic, mc, quad
from besselcall.analytic import make_params
from besselcall.mc import MCConfig

repeat = int(sys.argv[1])
ts = np.geomspace(1e-3, 1e3, 200)


def curve_closed():
    p = make_params(3, 0.5)
    return [analytic.price(p, t) for t in ts]


def curve_integral():
    p = make_params(5, 1.0)
    return [analytic.price(p, t) for t in ts]


def last_passage():
    p = make_params(7, 2.0)
    return [analytic.price_via_last_passage(p, t) for t in ts[::10]]


def normalization():
    return quad.density_normalization(make_params(5, 2.0))


def mc_endpoint():
    return mc.estimate_price_mc(make_params(5, 1.0), 1.0, MCConfig(n_samples=200_000, seed=1))


def mc_hitting():
    return mc.estimate_hitting(3, 1.0, MCConfig(n_samples=10_000, seed=1, path_step=1e-2))


cases = [curve_closed, curve_integral, last_passage, normalization, mc_endpoint, mc_hitting]
out = {"backend": _jit.BACKEND, "seconds": {}}
for fn in cases:
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out["seconds"][fn.__name__] = best
print(json.dumps(out))
"""


def run_backend(disable: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("BESSELCALL_DISABLE_JIT", None)
    if disable:
        env["BESSELCALL_DISABLE_JIT"] = "1"
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True)
    if proc.returncode:
        sys.exit(proc.stderr)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write the raw timings here")
    args = ap.parse_args()
    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    print(f"{'case':<16}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>10}")
    for name, tf in fast["seconds"].items():
        ts = slow["seconds"][name]
        print(f"{name:<16}{tf:>12.4f}{ts:>12.4f}{ts / tf:>9.1f}x")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"numba": fast, "numpy": slow}, fh, indent=2)


if __name__ == "__main__":
    main()
