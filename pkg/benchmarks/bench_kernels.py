"""Compare the compiled lattice kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--n 8001] [--repeat 200]

Times each kernel on the same random half-line data, checks that both
backends agree, then times a short defect run under each backend (the run
is launched in a subprocess so the backend choice happens at import).
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from sshg_defect.simulator import _kernels_py as pure

try:
    from sshg_defect.simulator import _kernels as compiled
except ImportError:
    compiled = None

RUN_SNIPPET = """
import json, time
from sshg_defect.simulator import COMPILED, SimConfig, InitialCondition, run
cfg = SimConfig(L=40, dx=0.01, dt=0.004, t_end=4.0, output_every=250,
                ic=InitialCondition("packet", {"k": 2.0, "amplitude": 1e-3, "width": 4.0, "center": -20.0}))
t = time.perf_counter(); run(cfg)
print(json.dumps({"compiled": COMPILED, "seconds": time.perf_counter() - t}))
"""


def bench_kernels(n, repeat):
    rng = np.random.default_rng(7)
    phi = rng.normal(scale=0.1, size=n)
    v = rng.normal(scale=0.1, size=n)
    out = np.empty(n)
    dx = 0.01
    cases = {
        "accel": lambda k: k.accel(phi, 0.01, -0.02, 1 / dx**2, 2.0, out),
        "energy": lambda k: k.energy(phi, v, dx, 1.0),
        "momentum": lambda k: k.momentum(phi, v, dx),
        "rk4_step": lambda k: k.rk4_defect_step(phi, v, phi[::-1].copy(), v[::-1].copy(), 0.01,
                                                0.004, dx, 1.0, 1.5, 0.7, 10.0),
    }
    rows = []
    for name, call in cases.items():
        t_py = min(timeit.repeat(lambda: call(pure), number=repeat, repeat=3)) / repeat
        row = {"kernel": name, "numpy_us": t_py * 1e6}
        if compiled is not None:
            t_c = min(timeit.repeat(lambda: call(compiled), number=repeat, repeat=3)) / repeat
            row["compiled_us"] = t_c * 1e6
            row["speedup"] = t_py / t_c
            if name == "accel":
                a = np.empty(n); b = np.empty(n)
                pure.accel(phi, 0.01, -0.02, 1 / dx**2, 2.0, a)
                compiled.accel(phi, 0.01, -0.02, 1 / dx**2, 2.0, b)
                row["max_abs_diff"] = float(np.max(np.abs(a - b)))
            elif name == "rk4_step":
                a, b = call(pure), call(compiled)
                row["max_abs_diff"] = max(float(np.max(np.abs(np.asarray(x) - np.asarray(y))))
                                          for x, y in zip(a, b))
            else:
                row["max_abs_diff"] = abs(call(pure) - call(compiled))
        rows.append(row)
    return rows


def bench_run(pure_python):
    env = dict(os.environ)
    env.pop("SSHG_PURE_PYTHON", None)
    if pure_python:
        env["SSHG_PURE_PYTHON"] = "1"
    res = subprocess.run([sys.executable, "-c", RUN_SNIPPET], env=env, capture_output=True, text=True,
                         check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8001)
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--skip-run", action="store_true")
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; timing the numpy kernels only")
    print(f"{'kernel':10s} {'numpy us':>10s} {'compiled us':>12s} {'speedup':>8s} {'max diff':>10s}")
    for r in bench_kernels(args.n, args.repeat):
        print(f"{r['kernel']:10s} {r['numpy_us']:10.1f} {r.get('compiled_us', float('nan')):12.1f} "
              f"{r.get('speedup', float('nan')):8.2f} {r.get('max_abs_diff', float('nan')):10.2e}")
    if not args.skip_run:
        for flag in (True, False):
            r = bench_run(flag)
            print(f"full run (t_end=4, dx=0.01): compiled={r['compiled']} {r['seconds']:.2f} s")


if __name__ == "__main__":
    main()
