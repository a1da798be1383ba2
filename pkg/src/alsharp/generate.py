"""Seeded random Mealy machines for tests and benchmarks."""

import random

from .mealy import MealyMachine, equivalence_classes


def _alphabets(k, o):
    inputs = [chr(ord("a") + n) if n < 26 else f"i{n}" for n in range(k)]
    outputs = [str(n) for n in range(o)]
    return inputs, outputs


def random_mealy(n, k, o, seed=0, strongly_connected=False, minimal=False, max_tries=1000):
    """Complete machine with ``n`` states, all reachable from the initial one.

    A random spanning tree guarantees reachability; ``strongly_connected``
    also threads a cycle through all states.  With ``minimal`` the output
    table is redrawn until no two states are equivalent.
    """
    rng = random.Random(seed)
    inputs, outputs = _alphabets(k, o)
    states = [f"s{x}" for x in range(n)]
    for _ in range(max_tries):
        trans = {}
        for x in range(1, n):
            parent = states[rng.randrange(x)]
            free = [i for i in inputs if (parent, i) not in trans]
            while not free:
                parent = states[rng.randrange(x)]
                free = [i for i in inputs if (parent, i) not in trans]
            trans[(parent, rng.choice(free))] = states[x]
        if strongly_connected and n > 1:
            order = states[1:]
            rng.shuffle(order)
            cycle = [states[0]] + order
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                free = [i for i in inputs if (a, i) not in trans]
                if not free:
                    break
                trans[(a, rng.choice(free))] = b
        for q in states:
            for i in inputs:
                if (q, i) not in trans:
                    trans[(q, i)] = rng.choice(states)
        out = {(q, i): rng.choice(outputs) for q in states for i in inputs}
        m = MealyMachine(states, inputs, states[0], trans, out, outputs)
        if strongly_connected and not _strongly_connected(m):
            continue
        if minimal and len(set(equivalence_classes(m).values())) != n:
            continue
        return m
    raise RuntimeError("could not generate a machine with the requested properties")


def _strongly_connected(m):
    fwd = {q: {m.trans[(q, i)] for i in m.inputs} for q in m.states}
    back = {q: set() for q in m.states}
    for q, ts in fwd.items():
        for t in ts:
            back[t].add(q)
    for graph in (fwd, back):
        seen, stack = {m.initial}, [m.initial]
        while stack:
            for t in graph[stack.pop()]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        if len(seen) != len(m.states):
            return False
    return True


def random_partial_mealy(n, k, o, seed=0, density=0.6):
    """Partial machine: each transition is present with probability ``density``."""
    rng = random.Random(seed)
    inputs, outputs = _alphabets(k, o)
    states = [f"s{x}" for x in range(n)]
    trans, out = {}, {}
    for q in states:
        for i in inputs:
            if rng.random() < density:
                trans[(q, i)] = rng.choice(states)
                out[(q, i)] = rng.choice(outputs)
    return MealyMachine(states, inputs, states[0], trans, out, outputs)


def with_initial(m, q):
    return MealyMachine(m.states, m.inputs, q, m.trans, m.out, m.outputs)
