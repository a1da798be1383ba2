"""Mealy machines: traces, restriction, minimization, covers and separating families."""

from collections import deque


class MealyError(ValueError):
    pass


class MealyMachine:
    """Deterministic, possibly partial Mealy machine.

    ``trans`` and ``out`` are dicts keyed by ``(state, input)``.  Treat
    instances as immutable once built.
    """

    def __init__(self, states, inputs, initial, trans, out, outputs=None):
        self.states = tuple(dict.fromkeys(states))
        self.inputs = tuple(dict.fromkeys(inputs))
        self.initial = initial
        self.trans = dict(trans)
        self.out = dict(out)
        if outputs is None:
            outputs = sorted(set(self.out.values()), key=str)
        self.outputs = tuple(dict.fromkeys(outputs))
        self._check()
        self._step = {q: {} for q in self.states}
        for (q, i), t in self.trans.items():
            self._step[q][i] = (t, self.out[(q, i)])

    def _check(self):
        if self.trans.keys() != self.out.keys():
            raise MealyError("trans and out must have the same domain")
        known = set(self.states)
        if self.initial not in known:
            raise MealyError(f"initial state {self.initial!r} is not a state")
        inputs = set(self.inputs)
        for (q, i), t in self.trans.items():
            if q not in known or t not in known:
                raise MealyError(f"transition {q!r} -{i}-> {t!r} leaves the state set")
            if i not in inputs:
                raise MealyError(f"unknown input {i!r}")

    def __repr__(self):
        return (f"MealyMachine({len(self.states)} states, {len(self.inputs)} inputs, "
                f"initial={self.initial!r})")

    def is_complete(self):
        return len(self.trans) == len(self.states) * len(self.inputs)

    def step(self, q, i):
        """(next state, output) or None."""
        return self._step[q].get(i)

    def defined_inputs(self, q):
        return [i for i in self.inputs if i in self._step[q]]

    def run(self, w, q=None):
        """Output word of ``w`` from ``q`` (default initial); None when undefined."""
        r = walk(self, self.initial if q is None else q, w)
        return None if r is None else r[1]


def walk(m, q, w):
    """Follow ``w`` from ``q``; returns ``(state, outputs)`` or None at the first gap."""
    outs = []
    step = m._step
    for i in w:
        nxt = step[q].get(i)
        if nxt is None:
            return None
        q, o = nxt
        outs.append(o)
    return q, tuple(outs)


def restrict(m, inputs):
    keep = set(inputs)
    alphabet = [i for i in m.inputs if i in keep]
    trans = {k: v for k, v in m.trans.items() if k[1] in keep}
    out = {k: m.out[k] for k in trans}
    return MealyMachine(m.states, alphabet, m.initial, trans, out, m.outputs)


def reachable_states(m):
    seen = {m.initial: None}
    queue = deque([m.initial])
    while queue:
        q = queue.popleft()
        for i in m.inputs:
            nxt = m.step(q, i)
            if nxt is not None and nxt[0] not in seen:
                seen[nxt[0]] = None
                queue.append(nxt[0])
    return list(seen)


def prune_unreachable(m):
    keep = reachable_states(m)
    ks = set(keep)
    trans = {k: v for k, v in m.trans.items() if k[0] in ks}
    out = {k: m.out[k] for k in trans}
    return MealyMachine([q for q in m.states if q in ks], m.inputs, m.initial, trans, out, m.outputs)


def equivalence_classes(m):
    """Moore partition refinement on a complete machine; returns state -> class index."""
    inputs = m.inputs
    sig = {q: tuple(m.out[(q, i)] for i in inputs) for q in m.states}
    block = _number(m.states, sig)
    while True:
        sig = {q: (block[q],) + tuple(block[m.trans[(q, i)]] for i in inputs) for q in m.states}
        new = _number(m.states, sig)
        if len(set(new.values())) == len(set(block.values())):
            return new
        block = new


def _number(states, sig):
    ids = {}
    return {q: ids.setdefault(sig[q], len(ids)) for q in states}


def minimize_restricted(m, inputs):
    """Quotient of ``m`` restricted to ``inputs`` by language equivalence.

    Each class is named by its first member in state order.  Returns the
    quotient and the class map.
    """
    r = restrict(m, inputs)
    if not r.is_complete():
        raise MealyError("restriction of the reference is not complete")
    cls = equivalence_classes(r)
    rep = {}
    for q in r.states:
        rep.setdefault(cls[q], q)
    class_map = {q: rep[cls[q]] for q in r.states}
    qstates = list(rep.values())
    trans, out = {}, {}
    for q in qstates:
        for i in r.inputs:
            trans[(q, i)] = class_map[r.trans[(q, i)]]
            out[(q, i)] = r.out[(q, i)]
    return MealyMachine(qstates, r.inputs, class_map[r.initial], trans, out, r.outputs), class_map


def language_equivalent(m1, m2, input_order=None):
    """None when equivalent, else a shortest counterexample word."""
    if set(m1.inputs) != set(m2.inputs):
        raise MealyError("alphabet mismatch")
    order = list(input_order) if input_order else sorted(m1.inputs)
    start = (m1.initial, m2.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        p, q = pair
        for i in order:
            a, b = m1.step(p, i), m2.step(q, i)
            if a is None or b is None:
                raise MealyError("language_equivalent needs complete machines")
            if a[1] != b[1]:
                return _trace_back(parent, pair) + (i,)
            nxt = (a[0], b[0])
            if nxt not in parent:
                parent[nxt] = (pair, i)
                queue.append(nxt)
    return None


def _trace_back(parent, node):
    word = []
    while parent[node] is not None:
        node, i = parent[node]
        word.append(i)
    return tuple(reversed(word))


def state_cover(m, input_order=None):
    """BFS access sequences, one per reachable state, in discovery order."""
    order = list(input_order) if input_order else sorted(m.inputs)
    order = [i for i in order if i in set(m.inputs)]
    access = {m.initial: ()}
    queue = deque([m.initial])
    while queue:
        q = queue.popleft()
        for i in order:
            nxt = m.step(q, i)
            if nxt is not None and nxt[0] not in access:
                access[nxt[0]] = access[q] + (i,)
                queue.append(nxt[0])
    return access


BOTTOM = object()  # pseudo-output for an undefined input
_SINK = object()


def _completed(m):
    """Step function of ``m`` where gaps lead to a sink emitting BOTTOM."""
    def step(q, i):
        if q is _SINK:
            return _SINK, BOTTOM
        nxt = m.step(q, i)
        return (_SINK, BOTTOM) if nxt is None else nxt
    return step


def _output_word(step, q, w):
    outs = []
    for i in w:
        q, o = step(q, i)
        outs.append(o)
    return tuple(outs)


def shortest_separators(m, input_order=None, total=False):
    """Lexicographically least shortest separating word for every apart pair.

    Keys are ``(p, q)`` with ``p`` before ``q`` in state order.  With
    ``total`` an undefined input counts as the output BOTTOM.
    """
    order = list(input_order) if input_order else sorted(m.inputs)
    order = [i for i in order if i in set(m.inputs)]
    if total:
        step = _completed(m)
    else:
        if not m.is_complete():
            raise MealyError("plain separators need a complete machine")
        step = m.step
    states = list(m.states)
    index = {q: n for n, q in enumerate(states)}
    if total:
        index[_SINK] = len(states)
        states_x = states + [_SINK]
    else:
        states_x = states

    def key(a, b):
        return (a, b) if index[a] < index[b] else (b, a)

    sep = {}
    pending = []
    for x in range(len(states_x)):
        for y in range(x + 1, len(states_x)):
            p, q = states_x[x], states_x[y]
            for i in order:
                (_, o1), (_, o2) = step(p, i), step(q, i)
                if o1 != o2:
                    sep[(p, q)] = (i,)
                    break
            else:
                pending.append((p, q))
    length = 1
    while pending:
        length += 1
        found, rest = {}, []
        for p, q in pending:
            for i in order:
                a, b = step(p, i)[0], step(q, i)[0]
                if a == b:
                    continue
                w = sep.get(key(a, b))
                if w is not None and len(w) == length - 1:
                    found[(p, q)] = (i,) + w
                    break
            else:
                rest.append((p, q))
        if not found:
            break
        sep.update(found)
        pending = rest
    return {k: v for k, v in sep.items() if k[0] is not _SINK and k[1] is not _SINK}


def separating_family(m, total=False, input_order=None):
    """State identifiers built from a splitting tree.

    Each block is split by the shortest (then least) separator among its
    pairs; every state collects the splitters on its root-to-leaf path, so
    the splitter at the lowest common block of two apart states lies in
    both identifiers.
    """
    order = list(input_order) if input_order else sorted(m.inputs)
    rank = {i: n for n, i in enumerate(order)}
    seps = shortest_separators(m, order, total)
    step = _completed(m) if total else m.step
    family = {q: set() for q in m.states}
    index = {q: n for n, q in enumerate(m.states)}
    blocks = [list(m.states)]
    while blocks:
        block = blocks.pop()
        if len(block) < 2:
            continue
        best = None
        for x in range(len(block)):
            for y in range(x + 1, len(block)):
                p, q = block[x], block[y]
                if index[p] > index[q]:
                    p, q = q, p
                w = seps.get((p, q))
                if w is not None:
                    k = (len(w), [rank[i] for i in w])
                    if best is None or k < best[0]:
                        best = (k, w)
        if best is None:
            continue  # equivalent states share a leaf
        w = best[1]
        parts = {}
        for q in block:
            family[q].add(w)
            parts.setdefault(_output_word(step, q, w), []).append(q)
        blocks.extend(reversed(list(parts.values())))
    return {q: frozenset(ws) for q, ws in family.items()}


def separates(m1, p, m2, q, w, total=False):
    """Whether ``w`` distinguishes ``p`` in ``m1`` from ``q`` in ``m2``."""
    if total:
        return _output_word(_completed(m1), p, w) != _output_word(_completed(m2), q, w)
    a, b = walk(m1, p, w), walk(m2, q, w)
    return a is not None and b is not None and a[1] != b[1]


def total_apart(m1, p, m2, q, input_order=None):
    """Shortest word over the common alphabet with differing outputs or
    one-sided definedness; None if there is none."""
    common = set(m1.inputs) & set(m2.inputs)
    order = list(input_order) if input_order else sorted(common)
    order = [i for i in order if i in common]
    start = (p, q)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        x, y = pair
        for i in order:
            a, b = m1.step(x, i), m2.step(y, i)
            if a is None and b is None:
                continue
            if a is None or b is None or a[1] != b[1]:
                return _trace_back(parent, pair) + (i,)
            nxt = (a[0], b[0])
            if nxt not in parent:
                parent[nxt] = (pair, i)
                queue.append(nxt)
    return None


def rename_states(m, names):
    """Copy of ``m`` with states renamed through the dict ``names``."""
    trans = {(names[q], i): names[t] for (q, i), t in m.trans.items()}
    out = {(names[q], i): o for (q, i), o in m.out.items()}
    return MealyMachine([names[q] for q in m.states], m.inputs, names[m.initial], trans, out, m.outputs)
