#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Each backend runs in its own subprocess so the MAGCAS_BACKEND environment
variable can steer kernel selection at import time. The workload is one
warmup call (absorbing JIT compilation) followed by timed Casimir-energy
evaluations for the AFM and the ferrimagnet presets; the two backends
must agree to 1e-9 relative.

Usage: python benchmarks/bench_backends.py [--nz 8] [--repeats 3]
"""

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import magcas as mc
from magcas.materials import override_params

nz = int(sys.argv[1])
repeats = int(sys.argv[2])

import dataclasses
afm = dataclasses.replace(mc.preset("Cr2O3").params, delta=0.0, K=None)
yig = override_params(mc.preset("YIG"), l=1.9).params

out = {"backend": mc.BACKEND, "cases": {}}
for name, model in (("AFM delta=0", afm), ("YIG l=1.9", yig)):
    mc.casimir_energy(model, 2)  # warmup: JIT compile + node caches
    times = []
    value = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        res = mc.casimir_energy(model, nz)
        times.append(time.perf_counter() - t0)
        value = res.E_cas
    out["cases"][name] = {"seconds": sorted(times)[len(times) // 2],
                          "E_cas": value}
print(json.dumps(out))
"""


def run_backend(backend: str, nz: int, repeats: int) -> dict:
    env = dict(os.environ, MAGCAS_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, "-c", _WORKER, str(nz), str(repeats)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nz", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    results = {}
    for backend in ("numpy", "numba"):
        try:
            results[backend] = run_backend(backend, args.nz, args.repeats)
        except subprocess.CalledProcessError as exc:
            print(f"{backend}: failed\n{exc.stderr}", file=sys.stderr)
            if backend == "numba":
                print("(numba not installed? numpy path already benchmarked)")
                results[backend] = None
            else:
                return 1

    print(f"\nworkload: casimir_energy at N_z={args.nz}, median of {args.repeats}\n")
    print(f"{'case':<14s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s} {'rel diff':>10s}")
    ok = True
    for case in results["numpy"]["cases"]:
        np_case = results["numpy"]["cases"][case]
        if results["numba"] is None:
            print(f"{case:<14s} {np_case['seconds']:>10.3f} {'-':>10s} {'-':>8s} {'-':>10s}")
            continue
        nb_case = results["numba"]["cases"][case]
        rel = abs(np_case["E_cas"] - nb_case["E_cas"]) / max(abs(np_case["E_cas"]), 1e-300)
        ok &= rel < 1e-9
        print(f"{case:<14s} {np_case['seconds']:>10.3f} {nb_case['seconds']:>10.3f} "
              f"{np_case['seconds'] / nb_case['seconds']:>7.1f}x {rel:>10.2e}")
    if not ok:
        print("\nbackend disagreement above 1e-9 relative", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
