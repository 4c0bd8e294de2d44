"""Compare the compiled and pure-Python refinement kernels.

Usage: python3 benchmarks/bench_refinement.py [--pairs N] [--repeat R]

Two workloads. "generated" builds the transfer problems of generated system
pairs once and times only the greatest-fixpoint refinement on them. "random"
times refinement on random problems in the same array layout, large enough
that the kernel dominates. Both kernels must delete the same pairs.
"""

import argparse
import random
import time

import numpy as np

from tempora import kernels
from tempora.harness import GeneratorConfig, generate_family
from tempora.relations import TRANSFER_MODE, Flavor, transfer_problem, universe


def generated(n, seed):
    out = []
    for i in range(n):
        cls = ("async", "ext-sync", "sync")[i % 3]
        cfg = GeneratorConfig(seed=seed + i, max_states=6, max_trajectories=8, internal_horizon=10,
                              external_horizon=5, max_runs=80, axiom_class=cls)
        (s1, s2), _, _ = generate_family(cfg, 2, random.Random(seed + i))
        for fl in Flavor:
            prob = transfer_problem(s1, s2, TRANSFER_MODE[fl])
            out.append((prob.matrix(universe(s1, s2, fl)), prob.arrays))
    return out


def synthetic(n_states, n_inst, rng, cands=3, obls=3, partners=3):
    i32 = lambda v: np.asarray(v, dtype=np.int32)
    inst_a = rng.integers(0, n_states, n_inst)
    inst_b = rng.integers(0, n_states, n_inst)
    n_c = n_inst * cands
    n_o = n_c * obls
    cptr = np.arange(0, n_c + 1, cands)
    optr = np.arange(0, n_o + 1, obls)
    obl_a = rng.integers(0, n_states, n_o)
    sptr = np.arange(0, n_o * partners + 1, partners)
    set_b = rng.integers(0, n_states, n_o * partners)
    M = (rng.random((n_states, n_states)) < 0.8).astype(np.uint8)
    return M, tuple(i32(v) for v in (inst_a, inst_b, cptr, optr, obl_a, sptr, set_b))


def time_kernel(problems, name, repeat):
    k = kernels.get(name)
    best, deleted = float("inf"), None
    for _ in range(repeat):
        mats = [M.copy() for M, _ in problems]
        t0 = time.perf_counter()
        counts = [int(k.refine(M, *arrays)) for M, (_, arrays) in zip(mats, problems)]
        best = min(best, time.perf_counter() - t0)
        deleted = (counts, [M.tobytes() for M in mats])
    return best, deleted


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=30)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    workloads = {
        "generated": generated(args.pairs, args.seed),
        "random-small": [synthetic(20, 2_000, rng) for _ in range(5)],
        "random-large": [synthetic(80, 40_000, rng)],
    }
    names = ["python"] + (["compiled"] if kernels.compiled_available() else [])
    print(f"active kernel: {kernels.BACKEND}; best of {args.repeat}")
    for label, problems in workloads.items():
        n_inst = sum(len(arrays[0]) for _, arrays in problems)
        times, outs = {}, {}
        for n in names:
            times[n], outs[n] = time_kernel(problems, n, args.repeat)
        if len({repr(o) for o in outs.values()}) != 1:
            raise SystemExit(f"{label}: kernels disagree")
        line = f"  {label:13s} {len(problems):4d} problems {n_inst:7d} instances"
        line += "".join(f"  {n} {times[n] * 1e3:9.2f} ms" for n in names)
        if len(names) == 2 and times["compiled"] > 0:
            line += f"  speedup {times['python'] / times['compiled']:6.1f}x"
        print(line)
    if len(names) == 1:
        print("  compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
