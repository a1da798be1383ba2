"""Adaptive L#: rebuilding from references and matching-driven rules."""

from .learner import LSharp, PreconditionError
from .matching import MatchTable
from .obstree import apart_ref
from .oracle import RunMetrics, Teacher, make_oracle
from .reference import ReferencePack

# ablation id -> (rebuilding, matching)
ABLATIONS = {
    "lsharp": (False, None),
    "R": (True, None),
    "exact": (False, "exact"),
    "approx": (False, "approx"),
    "R+exact": (True, "exact"),
    "full": (True, "approx"),
}


class AdaptiveLSharp(LSharp):
    """L# that reuses reference models.

    Phase 1 applies rebuilding and prioritized promotion until neither
    applies.  Afterwards each step tries extension, prioritized
    separation, separation, promotion and, on an adequate tree, match
    refinement, match separation and finally an equivalence query.
    """

    def __init__(self, teacher, refs=(), ablation="full", input_order=None,
                 max_steps=None, pack=None):
        super().__init__(teacher, input_order, max_steps)
        if ablation not in ABLATIONS:
            raise ValueError(f"unknown ablation {ablation!r}; choose from {sorted(ABLATIONS)}")
        self.ablation = ablation
        if pack is None and refs:
            pack = ReferencePack(list(refs), self.inputs, self.inputs)
        self.pack = pack if pack else None
        rebuilding, matching = ABLATIONS[ablation]
        self.rebuilding = rebuilding and self.pack is not None
        self.matching = matching if self.pack is not None else None
        self.table = MatchTable(self.tree, self.pack) if self.pack is not None else None
        self.phase1_done = not self.rebuilding
        self._ref_witness = {}
        if self.pack is not None:
            rank = {i: n for n, i in enumerate(self.inputs)}
            self._wkey = lambda w: (len(w), [rank[i] for i in w])
            self._cover_order = sorted(self.pack.cover, key=self._wkey)

    # helpers
    def _in_alphabet(self, w):
        return all(i in self.tree.inputs for i in w)

    def matches(self, q, approximate):
        self.table.refresh()
        return self.table.matches(q, approximate)

    def ref_witness(self, q, p):
        """Witness of apartness between basis node ``q`` and reference state ``p``."""
        key = (q, p)
        w = self._ref_witness.get(key)
        if w is None:
            self.table.refresh()
            if q in self.table.num and not self.table.is_apart(q, p):
                return None
            w = apart_ref(self.tree, q, self.pack.machine, p)
            if w is not None:
                self._ref_witness[key] = w
        return w

    def _rules(self, approximate):
        return ("AMS", "AMR", "APS") if approximate else ("MS", "MR", "PS")

    # rebuilding
    def _rebuild_separator(self, q, q2, i, scope):
        t, pack = self.tree, self.pack
        if not (t.is_basis(q) and t.is_basis(q2)):
            return None
        r = t.child(q, i)
        if r is not None and (t.is_basis(r) or q2 not in t.candidates(r)):
            return None
        u = t.access(q) + (i,)
        if u not in pack.covers[scope] or t.access(q2) not in pack.covers[scope]:
            return None
        p, p2 = pack.access_state(scope, u), pack.access_state(scope, t.access(q2))
        if p is None or p2 is None or p == p2:
            return None
        sigma = pack.sep_or_none(p, p2)
        if sigma is None or not self._in_alphabet(sigma):
            return None
        if t.run(q, (i,) + sigma) is not None and t.run(q2, sigma) is not None:
            return None
        return sigma

    def rule_rebuilding(self, q, q2, i, scope=None):
        scopes = range(len(self.pack)) if scope is None else [scope]
        for s in scopes:
            sigma = self._rebuild_separator(q, q2, i, s)
            if sigma is not None:
                break
        else:
            raise PreconditionError("rebuilding is not applicable")
        t = self.tree
        self._begin("R", q, q2, i, s, sigma)
        self.query(t.access(q) + (i,) + sigma)
        self.query(t.access(q2) + sigma)
        self._end()
        return True

    def rule_prioritized_promotion(self, r):
        if self.tree.access(r) not in self.pack.cover:
            raise PreconditionError("access sequence is not in the reference cover")
        return self.rule_promotion(r, rule="PP")

    def try_phase1(self):
        t, pack = self.tree, self.pack
        for u in self._cover_order:
            if not u:
                continue
            q = t.node(u[:-1])
            if q is None or not t.is_basis(q):
                continue
            i = u[-1]
            r = t.child(q, i)
            if r is not None and t.is_basis(r):
                continue
            if r is not None and t.is_isolated(r):
                return self.rule_prioritized_promotion(r)
            for s in range(len(pack)):
                if u not in pack.covers[s]:
                    continue
                for q2 in t.basis:
                    if self._rebuild_separator(q, q2, i, s) is not None:
                        return self.rule_rebuilding(q, q2, i, s)
        return False

    def run_phase1(self):
        while self.try_phase1():
            pass
        self.phase1_done = True

    # matching rules
    def _match_separation_witness(self, q, q2, p, i, approximate, matched_any=None):
        t, pack = self.tree, self.pack
        r = t.child(q, i)
        if r is None or not t.is_frontier(r) or q2 not in t.candidates(r):
            return None
        if p not in self.matches(q, approximate):
            return None
        nxt = pack.step(p, i)
        if nxt is None:
            return None
        p2 = nxt[0]
        if matched_any is None:
            matched_any = {x for b in t.basis for x in self.matches(b, approximate)}
        if p2 in matched_any:
            return None
        if approximate and apart_ref(t, r, pack.machine, p2) is not None:
            return None
        sigma = self.ref_witness(q2, p2)
        if sigma is None or not self._in_alphabet(sigma):
            return None
        return sigma

    def rule_match_separation(self, q, q2, p, i, approximate=True):
        sigma = self._match_separation_witness(q, q2, p, i, approximate)
        if sigma is None:
            raise PreconditionError("match separation is not applicable")
        self._begin(self._rules(approximate)[0], q, q2, p, i, sigma)
        self.query(self.tree.access(q) + (i,) + sigma)
        self._end()
        return True

    def try_match_separation(self, approximate=True):
        t = self.tree
        self.table.refresh()
        matched = {b: self.table.matches(b, approximate) for b in t.basis}
        matched_any = {x for ms in matched.values() for x in ms}
        for q in list(t.basis):
            for i in self.inputs:
                r = t.child(q, i)
                if r is None or not t.is_frontier(r):
                    continue
                for p in matched[q]:
                    for q2 in t.candidates(r):
                        if self._match_separation_witness(q, q2, p, i, approximate, matched_any) is not None:
                            return self.rule_match_separation(q, q2, p, i, approximate)
        return False

    def _refinement_separator(self, q, p, p2, approximate, matched=None):
        if p == p2:
            return None
        ms = matched if matched is not None else self.matches(q, approximate)
        if p not in ms or p2 not in ms:
            return None
        sigma = self.pack.sep_or_none(p, p2)
        if sigma is None or not self._in_alphabet(sigma) or self.tree.run(q, sigma) is not None:
            return None
        return sigma

    def rule_match_refinement(self, q, p, p2, approximate=True):
        sigma = self._refinement_separator(q, p, p2, approximate)
        if sigma is None:
            raise PreconditionError("match refinement is not applicable")
        self._begin(self._rules(approximate)[1], q, p, p2, sigma)
        self.query(self.tree.access(q) + sigma)
        self._end()
        return True

    def try_match_refinement(self, approximate=True):
        t = self.tree
        self.table.refresh()
        for q in list(t.basis):
            ms = self.table.matches(q, approximate)
            mset = set(ms)
            for a in range(len(ms)):
                for b in range(a + 1, len(ms)):
                    if self._refinement_separator(q, ms[a], ms[b], approximate, mset) is not None:
                        return self.rule_match_refinement(q, ms[a], ms[b], approximate)
        return False

    def identifier_union(self, r, approximate):
        """Identifiers of the reference successors of the states matched to r's parent."""
        t, pack = self.tree, self.pack
        q = t.parent(r)
        i = t.label(r)[0]
        words = set()
        for p in self.matches(q, approximate):
            nxt = pack.step(p, i)
            if nxt is not None:
                words |= pack.family[nxt[0]]
        return sorted((w for w in words if self._in_alphabet(w)), key=self._wkey)

    def _separates_in_tree(self, q2, q3, sigma):
        a, b = self.tree.outputs(q2, sigma), self.tree.outputs(q3, sigma)
        return a is not None and b is not None and a != b

    def rule_prioritized_separation(self, r, q2, q3, approximate=True, sigma=None):
        t = self.tree
        if not t.is_frontier(r):
            raise PreconditionError("prioritized separation needs a frontier node")
        cands = t.candidates(r)
        if q2 == q3 or q2 not in cands or q3 not in cands:
            raise PreconditionError("frontier node already apart from a basis node")
        words = self.identifier_union(r, approximate)
        if sigma is None:
            sigma = next((w for w in words if self._separates_in_tree(q2, q3, w)), None)
        if sigma is None or tuple(sigma) not in set(words) or not self._separates_in_tree(q2, q3, sigma):
            raise PreconditionError("no matched identifier separates the basis nodes")
        return self.rule_separation(r, q2, q3, witness=tuple(sigma), rule=self._rules(approximate)[2])

    def try_prioritized_separation(self, approximate=True):
        t = self.tree
        for r in t.frontier():
            cands = t.candidates(r)
            if len(cands) < 2:
                continue
            for w in self.identifier_union(r, approximate):
                for a in range(len(cands)):
                    for b in range(a + 1, len(cands)):
                        if self._separates_in_tree(cands[a], cands[b], w):
                            return self.rule_prioritized_separation(r, cands[a], cands[b], approximate, w)
        return False

    # scheduling
    def step(self):
        if not self.phase1_done:
            if self.try_phase1():
                return False
            self.phase1_done = True
        if self.try_extension():
            return False
        approx = self.matching == "approx"
        if self.matching and self.try_prioritized_separation(approx):
            return False
        if self.try_separation() or self.try_promotion():
            return False
        if self.matching and self.tree.is_adequate():
            if self.try_match_refinement(approx) or self.try_match_separation(approx):
                return False
        return self.rule_equivalence()


def run_alsharp(sul, refs=(), oracle="perfect", seed=0, ablation="full",
                input_order=None, max_steps=None, wp_params=None):
    teacher = Teacher(sul, make_oracle(oracle, seed, wp_params, input_order), RunMetrics())
    learner = AdaptiveLSharp(teacher, refs, ablation, input_order, max_steps)
    return learner.run()
