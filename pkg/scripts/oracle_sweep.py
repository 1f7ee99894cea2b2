"""Compare evolved fronts with exhaustive enumeration on seeded synthetic instances.

Example: python scripts/oracle_sweep.py --start 0 --count 30 --population 50 --generations 100
"""
import argparse
import time

from iacopt.moea import AlgoParams, run_evolution
from iacopt.oracle import brute_force_pareto
from iacopt.orchestrator import select_algorithm
from iacopt.problem import build_problem
from iacopt.synthetic import random_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--count", type=int, default=30)
    ap.add_argument("--population", type=int, default=50)
    ap.add_argument("--generations", type=int, default=100)
    ap.add_argument("--algorithm", choices=("auto", "nsga2", "nsga3"), default="auto")
    args = ap.parse_args()

    equal = subset = unsound = 0
    started = time.perf_counter()
    print(f"{'seed':>5} {'space':>5} {'M':>2} {'algo':>6} {'front':>5} {'found':>5}  result")
    for seed in range(args.start, args.start + args.count):
        inst = random_instance(seed)
        prob = build_problem(inst.spec, inst.catalogue)
        truth = brute_force_pareto(prob)
        want = {s.genotype for s in truth if s.feasible}
        algo = select_algorithm(inst.spec, args.algorithm)
        params = AlgoParams(population_size=args.population, generations=args.generations, seed=seed)
        found = run_evolution(prob, params, algo).solutions
        got = {s.genotype for s in found}
        equal += got == want
        subset += got <= want
        unsound += bool(want) and any(not s.feasible for s in found)
        verdict = "equal" if got == want else ("subset" if got <= want else "NOT SUBSET")
        print(f"{seed:>5} {prob.space_size:>5} {prob.n_objectives:>2} {algo.value:>6} {len(want):>5} {len(got):>5}  {verdict}")
    n = args.count
    print(f"equal {equal}/{n}, subset {subset}/{n}, infeasible returns {unsound}, {time.perf_counter() - started:.1f}s")


if __name__ == "__main__":
    main()
