"""Learn a system whose only difference from the reference is its initial state.

Plain L# needs counterexamples to find the states. With the reference, state
matching finds them all, so the one equivalence query is the accepting one.
"""

from alsharp import run_alsharp, run_lsharp
from alsharp.generate import random_mealy, with_initial

ref = random_mealy(12, 3, 2, seed=11, strongly_connected=True, minimal=True)
sul = with_initial(ref, ref.states[5])

_, plain = run_lsharp(sul, oracle="wp")
_, adaptive = run_alsharp(sul, [ref], oracle="wp", ablation="exact")

print(f"{'':8}{'OQs':>6}{'EQs':>6}{'inputs':>9}")
for name, m in (("L#", plain), ("AL#", adaptive)):
    print(f"{name:8}{m.oq_count:>6}{m.eq_count:>6}{m.total_inputs:>9}")
