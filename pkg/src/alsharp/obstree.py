"""Observation tree with basis/frontier bookkeeping and apartness."""

from collections import deque

from .mealy import MealyMachine


class NondeterminismError(RuntimeError):
    """The SUL answered the same word with two different outputs."""


class AdequacyError(RuntimeError):
    pass


ISOLATED = "isolated"
IDENTIFIED = "identified"
UNDETERMINED = "undetermined"


class ObservationTree:
    """Tree of observed traces.  Nodes are integers; 0 is the root.

    Apartness between frontier and basis nodes is tracked incrementally:
    every frontier node keeps the basis nodes it is not (yet) apart from.
    New observations only extend the tree along one path, so only pairs
    involving a node on that path need rechecking, and only along the new
    suffix.
    """

    def __init__(self, inputs):
        self.inputs = tuple(inputs)
        self._parent = [-1]
        self._label = [None]
        self._output = [None]
        self._succ = [{}]
        self._access = [()]
        self.basis = [0]
        self._in_basis = {0}
        self._witness = {}
        self._cands = {}
        self.additions = []

    def __len__(self):
        return len(self._parent)

    # navigation
    def access(self, n):
        return self._access[n]

    def parent(self, n):
        return self._parent[n]

    def label(self, n):
        """(input, output) on the edge into ``n``."""
        return self._label[n], self._output[n]

    def child(self, n, i):
        return self._succ[n].get(i)

    def children(self, n):
        return dict(self._succ[n])

    def output(self, n, i):
        c = self._succ[n].get(i)
        return None if c is None else self._output[c]

    def run(self, n, w):
        succ = self._succ
        for i in w:
            n = succ[n].get(i)
            if n is None:
                return None
        return n

    def node(self, w):
        return self.run(0, w)

    def outputs(self, n, w):
        outs = []
        for i in w:
            n = self._succ[n].get(i)
            if n is None:
                return None
            outs.append(self._output[n])
        return tuple(outs)

    def subtree(self, n):
        """Nodes below ``n`` (excluding ``n``) in BFS order."""
        res = []
        queue = deque([n])
        while queue:
            x = queue.popleft()
            for i in self.inputs:
                c = self._succ[x].get(i)
                if c is not None:
                    res.append(c)
                    queue.append(c)
        return res

    def nodes(self):
        return range(len(self._parent))

    # growth
    def _new(self, parent, i, o):
        n = len(self._parent)
        self._parent.append(parent)
        self._label.append(i)
        self._output.append(o)
        self._succ.append({})
        self._access.append(self._access[parent] + (i,))
        self._succ[parent][i] = n
        return n

    def add_word(self, w, outs):
        w, outs = tuple(w), tuple(outs)
        if len(w) != len(outs):
            raise ValueError("word and output word differ in length")
        node, path, first_new = 0, [0], None
        for j, (i, o) in enumerate(zip(w, outs)):
            c = self._succ[node].get(i)
            if c is None:
                if first_new is None:
                    first_new = j + 1
                c = self._new(node, i, o)
            elif self._output[c] != o:
                raise NondeterminismError(
                    f"output {o!r} conflicts with {self._output[c]!r} after {w[:j + 1]}")
            node = c
            path.append(c)
        if first_new is not None:
            self._refresh_candidates(w, outs, path, first_new)
            self.additions.append((tuple(path), first_new, w, outs))
        return node

    def _diff_along(self, x, w, outs):
        """Prefix of ``w`` on which ``x`` is defined and first disagrees with ``outs``."""
        succ, output = self._succ, self._output
        for t, i in enumerate(w):
            x = succ[x].get(i)
            if x is None:
                return None
            if output[x] != outs[t]:
                return w[:t + 1]
        return None

    def _refresh_candidates(self, w, outs, path, first_new):
        for j in range(first_new):
            y = path[j]
            v, ov = w[j:], outs[j:]
            cs = self._cands.get(y)
            if cs is not None:
                keep = []
                for b in cs:
                    if self._diff_along(b, v, ov) is None:
                        keep.append(b)
                self._cands[y] = keep
            if y in self._in_basis:
                for r, rc in self._cands.items():
                    if y in rc and self._diff_along(r, v, ov) is not None:
                        rc.remove(y)

    # basis and frontier
    def is_basis(self, n):
        return n in self._in_basis

    def frontier(self):
        res = []
        for b in self.basis:
            for c in self._succ[b].values():
                if c not in self._in_basis:
                    res.append(c)
        res.sort()
        return res

    def is_frontier(self, n):
        p = self._parent[n]
        return p >= 0 and p in self._in_basis and n not in self._in_basis

    def candidates(self, r):
        """Basis nodes that frontier node ``r`` is not apart from, in basis order."""
        cs = self._cands.get(r)
        if cs is None:
            cs = [b for b in self.basis if self.apart(r, b) is None]
            self._cands[r] = cs
        return list(cs)

    def frontier_status(self):
        res = {}
        for r in self.frontier():
            cs = self.candidates(r)
            if not cs:
                res[r] = (ISOLATED, None)
            elif len(cs) == 1:
                res[r] = (IDENTIFIED, cs[0])
            else:
                res[r] = (UNDETERMINED, None)
        return res

    def is_isolated(self, r):
        return not self.candidates(r)

    def basis_complete(self):
        return all(len(self._succ[b]) == len(self.inputs) for b in self.basis)

    def is_adequate(self):
        if not self.basis_complete():
            return False
        return all(len(self.candidates(r)) == 1 for r in self.frontier())

    def promote(self, r):
        if not self.is_frontier(r):
            raise ValueError(f"node {r} is not in the frontier")
        self._cands.pop(r, None)
        for b in self.basis:
            w = self._bfs_witness(r, b)
            if w is None:
                raise ValueError(f"node {r} is not apart from basis node {b}")
            self._witness[(b, r) if b < r else (r, b)] = w
        self.basis.append(r)
        self._in_basis.add(r)
        for r2, cs in self._cands.items():
            if self.apart(r2, r) is None:
                cs.append(r)

    # apartness
    def apart(self, a, b):
        """Witness of ``a # b`` or None.

        The witness is a shortest one at the time it is first found and is
        cached from then on, since apartness never goes away.
        """
        if a == b:
            return None
        key = (a, b) if a < b else (b, a)
        w = self._witness.get(key)
        if w is None:
            w = self._bfs_witness(a, b)
            if w is not None:
                self._witness[key] = w
        return w

    def _bfs_witness(self, a, b):
        succ, output = self._succ, self._output
        queue = deque([(a, b, ())])
        while queue:
            x, y, w = queue.popleft()
            sx, sy = succ[x], succ[y]
            if len(sx) > len(sy):
                keys = [i for i in self.inputs if i in sy]
            else:
                keys = [i for i in self.inputs if i in sx]
            for i in keys:
                cx, cy = sx.get(i), sy.get(i)
                if cx is None or cy is None:
                    continue
                if output[cx] != output[cy]:
                    return w + (i,)
                queue.append((cx, cy, w + (i,)))
        return None

    def cached_witnesses(self):
        return dict(self._witness)


class Hypothesis(MealyMachine):
    """Folded tree; states are the basis nodes."""

    def __init__(self, states, inputs, initial, trans, out):
        super().__init__(states, inputs, initial, trans, out)
        self.state_of = {b: b for b in states}


def fold_hypothesis(tree):
    if not tree.basis_complete():
        raise AdequacyError("basis has undefined transitions")
    trans, out = {}, {}
    for b in tree.basis:
        for i in tree.inputs:
            c = tree.child(b, i)
            if tree.is_basis(c):
                target = c
            else:
                cs = tree.candidates(c)
                if len(cs) != 1:
                    raise AdequacyError(f"frontier node {c} is not identified")
                target = cs[0]
            trans[(b, i)] = target
            out[(b, i)] = tree.output(b, i)
    return Hypothesis(list(tree.basis), tree.inputs, 0, trans, out)


def check_consistency(tree, hyp):
    """Shortest tree word on which ``hyp`` disagrees with the tree, or None."""
    queue = deque([(0, hyp.initial)])
    while queue:
        n, h = queue.popleft()
        for i in tree.inputs:
            c = tree.child(n, i)
            if c is None:
                continue
            nxt = hyp.step(h, i)
            if nxt is None or nxt[1] != tree.label(c)[1]:
                return tree.access(c)
            queue.append((c, nxt[0]))
    return None


def apart_ref(tree, q, ref, p):
    """Shortest word defined from tree node ``q`` and ``ref`` state ``p`` with
    differing outputs, or None."""
    queue = deque([(q, p, ())])
    while queue:
        x, s, w = queue.popleft()
        for i in tree.inputs:
            c = tree.child(x, i)
            if c is None:
                continue
            nxt = ref.step(s, i)
            if nxt is None:
                continue
            if nxt[1] != tree.label(c)[1]:
                return w + (i,)
            queue.append((c, nxt[0], w + (i,)))
    return None


def tree_to_dot(tree):
    lines = ["digraph tree {"]
    frontier = set(tree.frontier())
    for n in tree.nodes():
        kind = "basis" if tree.is_basis(n) else "frontier" if n in frontier else "other"
        style = {"basis": "filled", "frontier": "dashed", "other": "solid"}[kind]
        lines.append(f'    t{n} [label="t{n}" style="{style}" comment="{kind}"];')
    for n in tree.nodes():
        if n:
            i, o = tree.label(n)
            lines.append(f'    t{tree.parent(n)} -> t{n} [label="{i} / {o}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _separator_counts(pack):
    counts = getattr(pack, "_separator_counts", None)
    if counts is None:
        counts = {}
        states = pack.states
        for x in range(len(states)):
            for y in range(x + 1, len(states)):
                w = pack.sep_or_none(states[x], states[y])
                if w is not None:
                    counts[w] = counts.get(w, 0) + 1
        pack._separator_counts = counts
    return counts


def compute_norm(tree, pack=None, table=None):
    """Progress measure that every learning rule strictly increases.

    Sums |B|(|B|+1), the defined basis transitions, the apart
    basis/frontier pairs and, with references, the basis/separator
    triples, the node/reference-state apart pairs and the basis/frontier
    pairs whose reference separator is defined from both.  ``table`` may
    be a ``MatchTable`` tracking basis and frontier nodes.
    """
    basis = tree.basis
    frontier = tree.frontier()
    nb = len(basis)
    norm = nb * (nb + 1)
    norm += sum(len(tree.children(b)) for b in basis)
    norm += sum(nb - len(tree.candidates(r)) for r in frontier)
    if not pack:
        return norm
    for w, c in _separator_counts(pack).items():
        norm += c * sum(1 for b in basis if tree.run(b, w) is not None)
    if table is None:
        from .matching import MatchTable
        table = MatchTable(tree, pack, track_frontier=True)
    table.refresh()
    norm += sum(table.apart_count(x) for x in list(basis) + frontier)
    for scope in range(len(pack)):
        ref_of = {x: pack.access_state(scope, tree.access(x)) for x in list(basis) + frontier}
        for b in basis:
            pb = ref_of[b]
            if pb is None:
                continue
            for r in frontier:
                pr = ref_of[r]
                if pr is None or pr == pb:
                    continue
                w = pack.sep_or_none(pb, pr)
                if w is not None and tree.run(b, w) is not None and tree.run(r, w) is not None:
                    norm += 1
    return norm


def norm_bound(n, k, o):
    """Upper bound on the norm, hence on the number of rule applications."""
    return n * (n + 1) + k * n + (n - 1) * (k * n + 1) + n * o * o + (k * n + 1) * o + n * (k * n + 1)
