"""Seeded mutation operators producing related SUL/reference pairs."""

import random
from collections import deque
from dataclasses import dataclass

from .mealy import (
    MealyMachine,
    equivalence_classes,
    language_equivalent,
    prune_unreachable,
    rename_states,
)


class MutationError(ValueError):
    pass


OPERATORS = tuple(f"mut{n}" for n in range(1, 15))


@dataclass(frozen=True)
class MutationSpec:
    op: str
    seed: int = 0
    attach_index: int | None = None
    max_attempts: int = 10000


def _copy(m, states=None, inputs=None, initial=None, trans=None, out=None):
    return MealyMachine(
        m.states if states is None else states,
        m.inputs if inputs is None else inputs,
        m.initial if initial is None else initial,
        m.trans if trans is None else trans,
        m.out if out is None else out,
    )


def _fresh(existing, n, stem):
    names, k = [], 0
    while len(names) < n:
        cand = f"{stem}_{k}"
        if cand not in existing:
            names.append(cand)
        k += 1
    return names


def _input_order(m):
    return sorted(m.inputs)


def distances(m):
    dist = {m.initial: 0}
    queue = deque([m.initial])
    while queue:
        q = queue.popleft()
        for i in _input_order(m):
            t = m.trans[(q, i)]
            if t not in dist:
                dist[t] = dist[q] + 1
                queue.append(t)
    return dist


def farthest_state_index(m):
    """Index of the reachable state with the largest BFS distance (first on ties)."""
    dist = distances(m)
    best = max(dist.values())
    return next(n for n, q in enumerate(m.states) if dist.get(q) == best)


def new_initial(m, rng=None):
    """mut1: dummy initial state plus a fresh symbol leading to the old one."""
    [dummy] = _fresh(set(m.states), 1, "dummy")
    [fresh] = _fresh(set(m.inputs), 1, "fresh")
    return _add_dummy(m, dummy, {fresh: m.initial})


def _add_dummy(m, dummy, entries):
    i0 = _input_order(m)[0]
    o0 = m.out[(m.initial, i0)]
    trans, out = dict(m.trans), dict(m.out)
    for i in m.inputs:
        trans[(dummy, i)] = dummy
        out[(dummy, i)] = m.out[(m.initial, i)]
    for f, target in entries.items():
        trans[(dummy, f)] = target
        out[(dummy, f)] = o0
        for q in m.states:
            trans[(q, f)] = q
            out[(q, f)] = o0
    return MealyMachine([dummy] + list(m.states), list(m.inputs) + list(entries), dummy, trans, out)


def change_initial(m, rng):
    """mut2"""
    choices = [q for q in m.states if q != m.initial] or [m.initial]
    return prune_unreachable(_copy(m, initial=rng.choice(choices)))


def add_state(m, rng):
    """mut3"""
    [new] = _fresh(set(m.states), 1, "added")
    trans, out = dict(m.trans), dict(m.out)
    q, i = rng.choice(m.states), rng.choice(list(m.inputs))
    trans[(q, i)] = new
    outputs = list(m.outputs)
    for i in m.inputs:
        p = rng.choice(m.states)
        trans[(new, i)] = p
        out[(new, i)] = m.out[(p, i)] if rng.random() < 0.8 else rng.choice(outputs)
    return _copy(m, states=list(m.states) + [new], trans=trans, out=out)


def remove_state(m, rng):
    """mut4: edges into the removed state skip over it."""
    victims = [q for q in m.states if q != m.initial]
    if not victims:
        raise MutationError("cannot remove the only state")
    gone = rng.choice(victims)
    trans, out = {}, {}
    for (p, i), t in m.trans.items():
        if p == gone:
            continue
        if t == gone:
            nxt = m.trans[(gone, i)]
            t = p if nxt == gone else nxt
        trans[(p, i)] = t
        out[(p, i)] = m.out[(p, i)]
    states = [q for q in m.states if q != gone]
    return prune_unreachable(_copy(m, states=states, trans=trans, out=out))


def divert_transition(m, rng, max_attempts=10000):
    """mut5: redirect transitions until the language changes."""
    if len(set(equivalence_classes(m).values())) < 2:
        raise MutationError("all states are equivalent, so no diversion changes the language")
    cur = m
    for _ in range(max_attempts):
        q, i, t = rng.choice(cur.states), rng.choice(list(cur.inputs)), rng.choice(cur.states)
        trans = dict(cur.trans)
        trans[(q, i)] = t
        cur = _copy(cur, trans=trans)
        if language_equivalent(m, cur) is not None:
            return cur
    raise MutationError("could not divert a transition into an inequivalent machine")


def change_output(m, rng):
    """mut6"""
    outputs = list(m.outputs)
    if len(outputs) < 2:
        raise MutationError("need at least two outputs to change one")
    q, i = rng.choice(m.states), rng.choice(list(m.inputs))
    old = m.out[(q, i)]
    out = dict(m.out)
    out[(q, i)] = rng.choice([o for o in outputs if o != old])
    return _copy(m, out=out)


def remove_symbol(m, rng):
    """mut7"""
    if len(m.inputs) < 2:
        raise MutationError("need at least two inputs to remove one")
    gone = rng.choice(list(m.inputs))
    trans = {k: v for k, v in m.trans.items() if k[1] != gone}
    out = {k: m.out[k] for k in trans}
    return prune_unreachable(_copy(m, inputs=[i for i in m.inputs if i != gone], trans=trans, out=out))


def _disjoint(host, guest, prefix="m"):
    taken = set(host.states)
    names = {}
    for q in guest.states:
        cand = f"{prefix}_{q}"
        while cand in taken:
            cand = prefix + "_" + cand
        taken.add(cand)
        names[q] = cand
    return rename_states(guest, names)


def attach(host, guest, index, rng):
    """Redirect one transition of the ``index``-th host state to the guest's initial state."""
    if not 0 <= index < len(host.states):
        raise MutationError("attach index out of range")
    guest = _disjoint(host, guest)
    if set(host.inputs) != set(guest.inputs):
        raise MutationError("host and guest alphabets differ")
    q = host.states[index]
    i = rng.choice(list(host.inputs))
    trans = {**host.trans, **guest.trans}
    out = {**host.out, **guest.out}
    trans[(q, i)] = guest.initial
    return MealyMachine(list(host.states) + list(guest.states), host.inputs, host.initial, trans, out)


def several(m, rng, spec):
    """mut10"""
    for f in (add_state, remove_state):
        m = f(m, rng)
    m = divert_transition(m, rng, spec.max_attempts)
    return change_output(m, rng)


def heavy(m, rng, spec):
    """mut13"""
    for _ in range(3):
        m = several(m, rng, spec)
    return m


def mutate(m, spec):
    """Apply the mutation operator ``spec.op`` to the complete machine ``m``."""
    if not m.is_complete():
        raise MutationError("mutations need a complete machine")
    rng = random.Random(spec.seed)
    op = spec.op
    if op == "mut1":
        return new_initial(m)
    if op == "mut2":
        return change_initial(m, rng)
    if op == "mut3":
        return add_state(m, rng)
    if op == "mut4":
        return remove_state(m, rng)
    if op == "mut5":
        return divert_transition(m, rng, spec.max_attempts)
    if op == "mut6":
        return change_output(m, rng)
    if op == "mut7":
        return remove_symbol(m, rng)
    if op == "mut8":
        guest = mutated_copy(m, spec.seed, spec)
        index = farthest_state_index(m) if spec.attach_index is None else spec.attach_index
        return attach(m, guest, index, random.Random(f"attach:{spec.seed}"))
    if op == "mut9":
        host = mutated_copy(m, spec.seed, spec)
        index = farthest_state_index(host) if spec.attach_index is None else spec.attach_index
        return attach(host, m, index, random.Random(f"attach:{spec.seed}"))
    if op == "mut10":
        return several(m, rng, spec)
    if op == "mut11":
        return several(change_initial(m, rng), rng, spec)
    if op == "mut12":
        for _ in range(3):
            m = change_output(divert_transition(m, rng, spec.max_attempts), rng)
        return m
    if op == "mut13":
        return heavy(m, rng, spec)
    if op == "mut14":
        guest = _disjoint(m, mutated_copy(m, spec.seed, spec))
        both = MealyMachine(list(m.states) + list(guest.states), m.inputs, m.initial,
                            {**m.trans, **guest.trans}, {**m.out, **guest.out})
        [dummy] = _fresh(set(both.states), 1, "dummy")
        f0, f1 = _fresh(set(m.inputs), 2, "fresh")
        return _add_dummy(both, dummy, {f0: m.initial, f1: guest.initial})
    raise MutationError(f"unknown mutation {op!r}")


def mutated_copy(m, seed, spec=None):
    """The heavily mutated copy that mut8, mut9 and mut14 combine with ``m``."""
    return heavy(m, random.Random(seed), spec or MutationSpec("mut13", seed))
