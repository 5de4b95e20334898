"""Compare the compiled and pure-Python search kernels on a few workloads.

    python benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import time

from repairlp import kernels
from repairlp.compiler import StabilizerPolicy, repair_program
from repairlp.grounder import DomainDeclaration, ground
from repairlp.parser import parse_constraints, parse_instance
from repairlp.solver import answer_sets
from repairlp.wfs import well_founded


def salary_workload(n: int):
    facts = " ".join(f'salary("e{i}",{1000 + i}). salary("e{i}",{2000 + i}).' for i in range(n))
    r = parse_instance(facts)
    ics = parse_constraints("-salary(X,Y) v -salary(X,Z) v Y=Z.")
    return ground(repair_program(ics, r.schema), r)


def transitive_workload():
    r = parse_instance("p(a,b). p(b,c).")
    ics = parse_constraints("-p(X,Y) v -p(Y,Z) v p(X,Z).")
    prog = repair_program(ics, r.schema, policy=StabilizerPolicy.NAIVE)
    return ground(prog, r, DomainDeclaration.finite("abc"))


def chain_workload(n: int):
    r = parse_instance(" ".join(f"p(c{i})." for i in range(n)) + " q(c0).")
    ics = parse_constraints("-p(X) v q(X). -q(X) v r(X).")
    return ground(repair_program(ics, r.schema), r)


WORKLOADS = {
    "salary-fd x6 (64 answer sets)": lambda: salary_workload(6),
    "transitive naive": transitive_workload,
    "inclusion chain x8": lambda: chain_workload(8),
}


def timed(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = ["python"]
    try:
        kernels.get_backend("cython")
        names.insert(0, "cython")
    except ImportError:
        print("compiled kernels unavailable; timing the pure-Python backend only")
    saved = kernels.backend
    print(f"{'workload':34} {'task':12} " + " ".join(f"{n:>10}" for n in names) + "   speedup")
    try:
        for label, make in WORKLOADS.items():
            g = make()
            for task, fn in (("answer sets", lambda: answer_sets(g, self_check=False)), ("wfs", lambda: well_founded(g))):
                times = []
                for name in names:
                    kernels.backend = kernels.get_backend(name)
                    times.append(timed(fn, args.repeat))
                speed = f"{times[-1] / times[0]:8.1f}x" if len(times) == 2 else ""
                print(f"{label:34} {task:12} " + " ".join(f"{t * 1000:8.1f}ms" for t in times) + f"  {speed}")
    finally:
        kernels.backend = saved


if __name__ == "__main__":
    main()
