"""Compare the compiled and pure-Python kernels on identical workloads.

    python benchmarks/bench_kernels.py [--repeat 3] [--runs 20000]

Prints best-of-``repeat`` wall time per backend, the speedup, and whether
the two backends produced bit-identical output.
"""
import argparse
import time

import numpy as np

from zeno_tsvf.kernels import available_backends
from zeno_tsvf.schedule import ProtocolParams, build_schedule


def best_of(repeat, fn):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def forward_job(mod, c):
    def go():
        state = np.array([1, 0, 0], dtype=np.complex128)
        leaks = np.zeros((len(c["op"]), 2), dtype=np.complex128)
        mod.evolve(c["op"], c["mi"], c["mj"], c["cos"], c["sin"], state, 0, len(c["op"]), leaks)
        return leaks
    return go


def backward_job(mod, c):
    def go():
        out = np.zeros((len(c["op"]) + 1, 3), dtype=np.complex128)
        phi = np.array([0, 1, 0], dtype=np.complex128)
        mod.backward(c["op"], c["mi"], c["mj"], c["cos"], c["sin"], phi, len(c["op"]), out)
        return out
    return go


def trajectory_job(mod, c, flags, u):
    def go():
        n = u.shape[0]
        event = np.empty(n, dtype=np.int64)
        port = np.empty(n, dtype=np.int8)
        found = np.zeros((n, int(flags.sum())), dtype=np.uint8)
        mod.trajectories(c["op"], c["mi"], c["mj"], c["cos"], c["sin"], flags, u,
                         event, port, found)
        return event
    return go


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--runs", type=int, default=20000, help="trajectories per batch")
    args = ap.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the Python backend is available")

    big = build_schedule(ProtocolParams(25, 1000, 1)).compiled
    small = build_schedule(ProtocolParams(5, 5, 0))
    sc = small.compiled
    flags = np.zeros(len(small), dtype=np.int8)
    for loc in small.inner_slices():
        flags[loc.after_event_index] = 1
    draws = int(flags.sum()) + int(np.count_nonzero(sc["op"] != 0))
    u = np.random.Generator(np.random.PCG64(1)).random((args.runs, draws))

    jobs = {
        f"forward M=25 N=1000 ({len(big['op'])} events)": lambda m: forward_job(m, big),
        f"backward M=25 N=1000 ({len(big['op'])} events)": lambda m: backward_job(m, big),
        f"trajectories M=5 N=5 x {args.runs}": lambda m: trajectory_job(m, sc, flags, u),
    }
    print(f"{'workload':<42}{'backend':<9}{'seconds':>10}")
    for name, make in jobs.items():
        times, outs = {}, {}
        for label, mod in backends.items():
            times[label], outs[label] = best_of(args.repeat, make(mod))
            print(f"{name:<42}{label:<9}{times[label]:>10.4f}")
        if len(outs) == 2:
            same = np.array_equal(outs["python"], outs["cython"])
            print(f"{'':<42}speedup x{times['python'] / times['cython']:.1f}, identical={same}")


if __name__ == "__main__":
    main()
