"""Time the numba and numpy builds of the two hot kernels.

Run both backends from one process is not possible (the backend is chosen at
import time), so this script re-executes itself in a subprocess with
WQED_DISABLE_NUMBA=1 to collect the fallback numbers.

Usage: python benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import time

import numpy as np


def bench_eval_terms(nterm=200, npts=20000, repeats=20):
    from wqed import _kernels

    rng = np.random.default_rng(7)
    packed = _kernels.PackedTerms(
        delays=rng.uniform(0, 5, nterm),
        poles=rng.normal(size=nterm) - 1j * rng.uniform(0.1, 2, nterm),
        coeffs=(rng.normal(size=(nterm, 4))
                + 1j * rng.normal(size=(nterm, 4))).astype(complex),
        anti=np.zeros(nterm, dtype=bool))
    t = np.linspace(0, 10, npts)
    _kernels.eval_terms_grid(packed, t)  # warm-up / jit compile
    t0 = time.perf_counter()
    for _ in range(repeats):
        _kernels.eval_terms_grid(packed, t)
    return (time.perf_counter() - t0) / repeats


def bench_dde(nq=3, nsteps=20000, repeats=5):
    from wqed import _kernels

    dt = 1e-3
    delay_steps = np.abs(np.subtract.outer(range(nq), range(nq))) * 500
    delay_steps = delay_steps.astype(np.int64)
    phase = np.exp(1j * 3.7 * dt * delay_steps)
    alpha0 = np.zeros(nq, dtype=complex)
    alpha0[0] = 1.0
    args = (alpha0, nsteps, dt, delay_steps, phase, 1.0,
            np.zeros(nq, dtype=complex), 1.0, np.zeros(nq))
    _kernels.dde_rk4(*args)  # warm-up / jit compile
    t0 = time.perf_counter()
    for _ in range(repeats):
        _kernels.dde_rk4(*args)
    return (time.perf_counter() - t0) / repeats


def run():
    from wqed import _kernels

    return {
        "backend": "numba" if _kernels.USING_NUMBA else "numpy",
        "eval_terms_grid_s": bench_eval_terms(),
        "dde_rk4_s": bench_dde(),
    }


def main():
    here = run()
    env = dict(os.environ, WQED_DISABLE_NUMBA="1", WQED_BENCH_CHILD="1")
    out = subprocess.run([sys.executable, __file__], env=env,
                         capture_output=True, text=True, check=True)
    results = [here] + [json.loads(line) for line in out.stdout.splitlines()
                        if line.startswith("{")]
    for r in results:
        print(f"{r['backend']:>6}: eval_terms_grid {r['eval_terms_grid_s']*1e3:8.2f} ms   "
              f"dde_rk4 {r['dde_rk4_s']*1e3:8.2f} ms")
    if len(results) == 2 and results[0]["backend"] != results[1]["backend"]:
        for key in ("eval_terms_grid_s", "dde_rk4_s"):
            ratio = results[1][key] / results[0][key]
            print(f"speedup {key.removesuffix('_s')}: {ratio:.1f}x")


if __name__ == "__main__":
    if os.environ.get("WQED_BENCH_CHILD"):
        print(json.dumps(run()))
    else:
        main()
