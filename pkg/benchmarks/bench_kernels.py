"""Timing comparison of the compiled and the pure-numpy kernel backends.

The backend is chosen once at import time from RUELLEZETA_NUMBA, so the
comparison runs the same workload in two subprocesses, one per setting.
Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import time

import numpy as np

REPEATS = 5
N_TARGETS = 400
N_TERMS = 20000
N_SEGMENTS = 64


def _workload(rng):
    offsets = np.linspace(0, N_TERMS, N_SEGMENTS + 1).astype(np.int64)
    base = dict(
        ma=rng.normal(1.0, 0.3, N_TERMS),
        mb=rng.normal(0.0, 0.5, N_TERMS),
        mc=rng.normal(0.0, 0.5, N_TERMS),
        md=rng.normal(1.0, 0.3, N_TERMS),
        mdet=rng.uniform(0.5, 2.0, N_TERMS),
        offsets=offsets,
        cx=rng.uniform(-3.0, 3.0, N_TARGETS),
        cy=rng.uniform(0.1, 3.0, N_TARGETS),
        sigma=0.05,
    )
    section = dict(
        tm=rng.uniform(-1.0, 1.0, N_TERMS),
        tp=rng.uniform(-1.0, 1.0, N_TERMS),
        offsets=offsets,
        gm=rng.uniform(-1.0, 1.0, N_TARGETS),
        gp=rng.uniform(-1.0, 1.0, N_TARGETS),
        sigma=0.01,
        wrap=True,
    )
    return base, section


def run_backend():
    from ruellezeta import kernels

    rng = np.random.default_rng(7)
    base, section = _workload(rng)
    kernels.warmup()  # compilation must not count toward the timings

    report = {"backend": kernels.backend_name()}
    for name, fn, kw in (("base_sums", kernels.base_sums, base),
                         ("section_sums", kernels.section_sums, section)):
        best = float("inf")
        for _ in range(REPEATS):
            t0 = time.perf_counter()
            out = fn(**kw)
            best = min(best, time.perf_counter() - t0)
        report[name] = {"seconds": best, "checksum": float(out.sum())}
    print(json.dumps(report))


def main():
    results = {}
    for flag in ("1", "0"):
        env = dict(os.environ, RUELLEZETA_NUMBA=flag)
        proc = subprocess.run([sys.executable, __file__, "--run"],
                              env=env, capture_output=True, text=True,
                              check=True)
        results[flag] = json.loads(proc.stdout.splitlines()[-1])

    fast, slow = results["1"], results["0"]
    print("backend A: %s" % fast["backend"])
    print("backend B: %s" % slow["backend"])
    print("%-14s %12s %12s %9s" % ("kernel", "A [ms]", "B [ms]", "B/A"))
    for name in ("base_sums", "section_sums"):
        ta, tb = fast[name]["seconds"], slow[name]["seconds"]
        print("%-14s %12.3f %12.3f %9.2f" % (name, 1e3 * ta, 1e3 * tb,
                                             tb / ta))
        ca, cb = fast[name]["checksum"], slow[name]["checksum"]
        rel = abs(ca - cb) / max(abs(ca), 1e-300)
        if rel > 1e-12:
            raise SystemExit("backend results disagree on %s: %.3g"
                             % (name, rel))
    print("checksums agree to 1e-12 relative")


if __name__ == "__main__":
    if "--run" in sys.argv:
        run_backend()
    else:
        main()
