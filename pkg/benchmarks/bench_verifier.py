"""Compare the compiled and pure-Python exploration kernels.

    python benchmarks/bench_verifier.py [--repeat 3] [--max-states 300000]
"""

from __future__ import annotations

import argparse
import time

from ringsynth import verifier
from ringsynth.protocol import Action, Protocol
from ringsynth.spec_model import LocalityRelation, eval_relation_expr, parse_spec

SUMNOT2 = parse_spec('{"domain":4,"r":[[0,2],[2,0]],"q_expr":"((p+s)%4)!=2 && (p!=0 || s!=0)"}')
SUMNOT2_P = Protocol(4, frozenset(Action(*a) for a in [(0, 2, 3), (3, 3, 2), (2, 0, 2)]))
STAB = Protocol(3, frozenset(Action(*a) for a in [(0, 2, 1), (1, 1, 2), (2, 0, 1)]))
STAB_Q = eval_relation_expr("(p+s)!=2", 3)
AGREE_P = Protocol(4, frozenset(Action(*a) for a in [(0, 2, 1), (3, 1, 2), (2, 0, 1), (2, 3, 1), (1, 0, 1), (1, 2, 1), (1, 3, 1)]))
AGREE_Q = eval_relation_expr("p==s", 4)


def workloads(max_states):
    for n in (8, 10, 12):
        if 3**n <= max_states:
            yield f"stabilizer convergence M=3 N={n}", lambda k, n=n: verifier.check_convergence(STAB, STAB_Q, n, kernel=k)
    for n in (6, 8, 9):
        if 4**n <= max_states:
            yield f"agreement convergence M=4 N={n}", lambda k, n=n: verifier.check_convergence(AGREE_P, AGREE_Q, n, kernel=k)
    for n in (8, 10):
        if 4**n <= max_states:
            yield f"sum-not-2 leads-to M=4 N={n}", lambda k, n=n: verifier.check_leadsto(SUMNOT2_P, SUMNOT2, n, kernel=k)
    if 3**10 <= max_states:
        yield "stabilizer closure M=3 N=10", lambda k: verifier.check_closure(STAB, STAB_Q, 10, kernel=k)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-states", type=int, default=300_000, help="skip workloads with more global states")
    args = ap.parse_args(argv)
    if verifier.KERNEL != "cython":
        print("compiled kernel not built; only the Python kernel is timed")
    print(f"{'workload':40} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, run in workloads(args.max_states):
        t_py, r_py = best_of(lambda: run("python"), args.repeat)
        if verifier.KERNEL == "cython":
            t_c, r_c = best_of(lambda: run("cython"), args.repeat)
            assert r_py == r_c, f"kernels disagree on {name}"
            print(f"{name:40} {t_py:10.3f} {t_c:10.4f} {t_py / t_c:7.0f}x")
        else:
            print(f"{name:40} {t_py:10.3f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
