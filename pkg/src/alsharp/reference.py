"""Reference models prepared for adaptive learning."""

import numpy as np

from .mealy import (
    MealyMachine,
    minimize_restricted,
    separates,
    separating_family,
    state_cover,
)


class NotApartError(ValueError):
    pass


def _prefix_closure(words):
    closed = set()
    for w in words:
        for n in range(len(w) + 1):
            closed.add(tuple(w[:n]))
    return closed


class ReferencePack:
    """Minimized references, their covers and identifiers.

    Reference states are pairs ``(scope, state)`` where ``scope`` is the
    position of the reference in the input list.  ``machine`` is the
    disjoint union of all references; its initial state is the first
    reference's initial state.
    """

    def __init__(self, refs, sul_inputs, input_order=None):
        sul_inputs = list(sul_inputs)
        order = list(input_order) if input_order else sorted(sul_inputs)
        self.input_order = [i for i in order if i in set(sul_inputs)]
        self.names = []
        self.refs = []
        self.class_counts = []
        self.covers = []
        self.initials = []
        trans, out, states, outputs = {}, {}, [], {}
        for scope, ref in enumerate(refs):
            name = f"ref{scope}"
            if isinstance(ref, tuple):
                name, ref = ref
            q, _ = minimize_restricted(ref, sul_inputs)
            self.names.append(name)
            self.refs.append(q)
            self.class_counts.append(len(q.states))
            self.initials.append((scope, q.initial))
            self.covers.append(set(state_cover(q, self.input_order).values()))
            for s in q.states:
                states.append((scope, s))
            for (s, i), t in q.trans.items():
                trans[((scope, s), i)] = (scope, t)
                out[((scope, s), i)] = q.out[(s, i)]
            for o in q.outputs:
                outputs.setdefault(o, None)
        self.cover = _prefix_closure(w for c in self.covers for w in c)
        self.scope_inputs = [frozenset(r.inputs) for r in self.refs]
        self.total = len(self.refs) > 1
        if not self.refs:
            self.machine = None
            self.family = {}
            self.states = []
        else:
            alphabet = [i for i in self.input_order if any(i in s for s in self.scope_inputs)]
            self.machine = MealyMachine(states, alphabet, self.initials[0], trans, out, list(outputs))
            self.states = list(self.machine.states)
            self.family = separating_family(self.machine, total=self.total, input_order=self.input_order)
        self._rank = {i: n for n, i in enumerate(self.input_order)}
        self._sep = {}
        self._build_arrays()

    def __len__(self):
        return len(self.refs)

    def __bool__(self):
        return bool(self.refs)

    def scope(self, p):
        return p[0]

    def step(self, p, i):
        return self.machine.step(p, i) if self.machine is not None else None

    def run(self, p, w):
        """State reached from ``p`` by ``w`` or None."""
        for i in w:
            nxt = self.machine.step(p, i)
            if nxt is None:
                return None
            p = nxt[0]
        return p

    def access_state(self, scope, w):
        """State the ``scope``-th reference reaches on ``w`` from its own initial state."""
        return self.run(self.initials[scope], w)

    def sep(self, p, q):
        """Shortest (then least) word in W_p ∩ W_q separating p and q."""
        key = (p, q) if self._order(p) <= self._order(q) else (q, p)
        if key in self._sep:
            w = self._sep[key]
        else:
            w = None
            if p != q:
                common = sorted(self.family[p] & self.family[q],
                                key=lambda w: (len(w), [self._rank[i] for i in w]))
                for cand in common:
                    if separates(self.machine, p, self.machine, q, cand, total=self.total):
                        w = cand
                        break
            self._sep[key] = w
        if w is None:
            raise NotApartError(f"{p!r} and {q!r} are not apart")
        return w

    def sep_or_none(self, p, q):
        try:
            return self.sep(p, q)
        except NotApartError:
            return None

    def _order(self, p):
        return self._index[p]

    def _build_arrays(self):
        """Integer transition/output tables; row ``len(states)`` is an undefined sink."""
        self._index = {p: n for n, p in enumerate(self.states)}
        self.input_index = {i: n for n, i in enumerate(self.input_order)}
        self.output_code = {}
        n, k = len(self.states), len(self.input_order)
        self.sink = n
        self.trans_arr = np.full((n + 1, max(k, 1)), n, dtype=np.int64)
        self.out_arr = np.full((n + 1, max(k, 1)), -1, dtype=np.int64)
        for (p, i), t in (self.machine.trans.items() if self.machine else ()):
            a, b = self._index[p], self.input_index[i]
            self.trans_arr[a, b] = self._index[t]
            self.out_arr[a, b] = self.output_code.setdefault(self.machine.out[(p, i)], len(self.output_code))

    def index(self, p):
        return self._index[p]


def build_reference_pack(refs, sul_inputs, input_order=None):
    return ReferencePack(refs, sul_inputs, input_order)
