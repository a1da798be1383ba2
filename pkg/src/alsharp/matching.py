"""Matching degrees between tree nodes and reference states."""

import numpy as np


class MatchTable:
    """Agreement counts of tracked tree nodes against every reference state.

    For a node q and reference state p, ``den[q][p]`` counts the observed
    pairs (w, i) below q whose inputs all lie in p's alphabet, and
    ``num[q][p]`` those on which the tree output equals the reference
    output.  Counts are kept up to date from the tree's addition log;
    nodes that start being tracked are counted from scratch.
    """

    def __init__(self, tree, pack, track_frontier=False):
        self.tree = tree
        self.pack = pack
        self.track_frontier = track_frontier
        self.size = len(pack.states)
        self.num = {}
        self.den = {}
        self._synced = 0
        self._codes = pack.output_code
        self._idx = pack.input_index
        self._base = np.arange(self.size, dtype=np.int64)

    def tracked(self):
        nodes = list(self.tree.basis)
        if self.track_frontier:
            nodes += self.tree.frontier()
        return nodes

    def refresh(self):
        trans, out, sink = self.pack.trans_arr, self.pack.out_arr, self.pack.sink
        additions = self.tree.additions
        for path, first_new, w, outs in additions[self._synced:]:
            for a in range(first_new):
                x = path[a]
                if x not in self.num:
                    continue
                num, den = self.num[x], self.den[x]
                vec = self._base
                for t in range(a, first_new - 1):
                    vec = trans[vec, self._idx[w[t]]]
                for t in range(first_new - 1, len(w)):
                    i = self._idx[w[t]]
                    nxt = trans[vec, i]
                    den += nxt != sink
                    num += out[vec, i] == self._codes.get(outs[t], -2)
                    vec = nxt
        self._synced = len(additions)
        for x in self.tracked():
            if x not in self.num:
                self.num[x], self.den[x] = self._count(x)
        return self

    def _count(self, x):
        trans, out, sink = self.pack.trans_arr, self.pack.out_arr, self.pack.sink
        num = np.zeros(self.size, dtype=np.int64)
        den = np.zeros(self.size, dtype=np.int64)
        tree = self.tree
        stack = [(x, self._base)]
        while stack:
            n, vec = stack.pop()
            for i, c in tree.children(n).items():
                k = self._idx[i]
                nxt = trans[vec, k]
                den += nxt != sink
                num += out[vec, k] == self._codes.get(tree.label(c)[1], -2)
                stack.append((c, nxt))
        return num, den

    def recomputed(self, x):
        """From-scratch counts for ``x``, bypassing the incremental state."""
        return self._count(x)

    def degrees(self, q):
        num, den = self.num[q], self.den[q]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(den == 0, 1.0, num / np.maximum(den, 1))

    def mdeg(self, q, p):
        k = self.pack.index(p)
        d = self.den[q][k]
        return 1.0 if d == 0 else self.num[q][k] / d

    def exact(self, q):
        """Reference states q matches on every commonly defined sequence."""
        hit = np.nonzero(self.num[q] == self.den[q])[0]
        return [self.pack.states[k] for k in hit]

    def approximate(self, q):
        """Reference states attaining the highest matching degree for q."""
        deg = self.degrees(q)
        hit = np.nonzero(deg == deg.max())[0]
        return [self.pack.states[k] for k in hit]

    def matches(self, q, approximate):
        return self.approximate(q) if approximate else self.exact(q)

    def apart_count(self, x):
        """Number of reference states that tracked node ``x`` is apart from."""
        return int(np.count_nonzero(self.num[x] < self.den[x]))

    def is_apart(self, x, p):
        k = self.pack.index(p)
        return self.num[x][k] < self.den[x][k]


def update_matching(tree, pack, table=None):
    if table is None:
        table = MatchTable(tree, pack)
    return table.refresh()
