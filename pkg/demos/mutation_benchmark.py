"""Compare L# and AL# on mutated copies of random 20-state machines.

The reference is the unmutated machine; equivalence queries use the Wp oracle.
"""

import random
import statistics
import sys

from alsharp import MutationSpec, mutate, run_alsharp
from alsharp.generate import random_mealy

seeds = range(int(sys.argv[1]) if len(sys.argv) > 1 else 10)
for op in ("mut5", "mut6", "mut12"):
    ratios = []
    for seed in seeds:
        rng = random.Random(seed)
        base = random_mealy(20, rng.randint(2, 5), rng.randint(2, 5), seed)
        sul = mutate(base, MutationSpec(op, seed))
        _, plain = run_alsharp(sul, [base], oracle="wp", seed=seed, ablation="lsharp")
        _, full = run_alsharp(sul, [base], oracle="wp", seed=seed, ablation="full")
        ratios.append(full.total_inputs / plain.total_inputs)
    wins = sum(r < 1 for r in ratios)
    print(f"{op}: AL# wins {wins}/{len(ratios)}, median AL#/L# inputs {statistics.median(ratios):.3f}")
