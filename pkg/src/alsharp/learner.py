"""The L# rules, counterexample processing and the plain run loop."""

import logging
from dataclasses import dataclass, field

from .obstree import (
    ObservationTree,
    check_consistency,
    fold_hypothesis,
)
from .oracle import RunMetrics, Teacher, make_oracle

log = logging.getLogger(__name__)


class PreconditionError(RuntimeError):
    pass


class StepLimitExceeded(RuntimeError):
    pass


RULES = ("Ex", "P", "S", "Eq", "R", "PP", "MS", "MR", "PS", "AMS", "AMR", "APS")


@dataclass
class RuleEvent:
    rule: str
    params: tuple
    queries: list = field(default_factory=list)

    def __str__(self):
        words = " ".join("".join(map(str, w)) or "ε" for w in self.queries)
        return f"{self.rule} {self.params} [{words}]"


class LSharp:
    """L# over a simulated teacher.

    Each ``rule_*`` method checks its precondition, applies the rule and
    logs one event; ``try_*`` methods scan for the first applicable
    parameters in node-creation order, then input order.
    """

    def __init__(self, teacher, input_order=None, max_steps=None):
        self.teacher = teacher
        self.metrics = teacher.metrics
        inputs = teacher.sul.inputs
        order = list(input_order) if input_order else sorted(inputs)
        self.inputs = [i for i in order if i in set(inputs)]
        self.tree = ObservationTree(self.inputs)
        self.events = []
        self.listeners = []
        self.max_steps = max_steps
        self.hypothesis = None
        self._event = None

    # plumbing
    def query(self, w):
        """Output query that skips words the tree already holds."""
        w = tuple(w)
        if self.tree.node(w) is None:
            outs = self.teacher.output_query(w)
            self.tree.add_word(w, outs)
        if self._event is not None:
            self._event.queries.append(w)
        return self.tree.node(w)

    def _begin(self, rule, *params):
        if self.max_steps is not None and len(self.events) >= self.max_steps:
            raise StepLimitExceeded(f"more than {self.max_steps} rule applications")
        self._event = RuleEvent(rule, params)

    def _end(self):
        ev, self._event = self._event, None
        self.events.append(ev)
        self.metrics.rule_applications[ev.rule] += 1
        log.debug("%s", ev)
        for f in self.listeners:
            f(self, ev)

    # rules
    def rule_extension(self, q, i):
        if not self.tree.is_basis(q) or self.tree.child(q, i) is not None:
            raise PreconditionError("extension needs a basis node with an undefined input")
        self._begin("Ex", q, i)
        self.query(self.tree.access(q) + (i,))
        self._end()
        return True

    def rule_promotion(self, r, rule="P"):
        t = self.tree
        if not t.is_frontier(r) or not t.is_isolated(r):
            raise PreconditionError("promotion needs an isolated frontier node")
        self._begin(rule, r)
        t.promote(r)
        self._end()
        return True

    def rule_separation(self, r, q, q2, witness=None, rule="S"):
        t = self.tree
        if not t.is_frontier(r) or q == q2:
            raise PreconditionError("separation needs a frontier node and two basis nodes")
        if t.apart(r, q) is not None or t.apart(r, q2) is not None:
            raise PreconditionError("frontier node already apart")
        w = witness if witness is not None else t.apart(q, q2)
        if w is None or t.outputs(q, w) is None or t.outputs(q2, w) is None \
                or t.outputs(q, w) == t.outputs(q2, w):
            raise PreconditionError("no witness separating the basis nodes")
        self._begin(rule, r, q, q2, w)
        self.query(t.access(r) + tuple(w))
        self._end()
        return True

    def rule_equivalence(self):
        """Fold, check, ask the teacher.  True when the teacher accepts."""
        t = self.tree
        if not t.basis_complete() or any(len(t.candidates(r)) != 1 for r in t.frontier()):
            raise PreconditionError("equivalence needs an adequate tree")
        self._begin("Eq")
        hyp = fold_hypothesis(t)
        self.hypothesis = hyp
        w = check_consistency(t, hyp)
        if w is None:
            res = self.teacher.equivalence_query(hyp)
            if res is None:
                self._end()
                return True
            ce, outs = res
            t.add_word(ce, outs)
            self._event.queries.append(tuple(ce))
            w = tuple(ce)
        sigma = self.shortest_apart_prefix(hyp, w)
        self.proc_counterexample(hyp, sigma)
        self._end()
        return False

    def shortest_apart_prefix(self, hyp, w):
        t = self.tree
        h = hyp.initial
        for n in range(len(w) + 1):
            node = t.node(w[:n])
            if t.apart(h, node) is not None:
                return tuple(w[:n])
            if n < len(w):
                h = hyp.trans[(h, w[n])]
        raise PreconditionError("word does not expose a hypothesis/tree disagreement")

    def proc_counterexample(self, hyp, sigma):
        """Shrink ``sigma`` until the disagreement sits at a basis or frontier
        node; returns the final word."""
        t = self.tree
        sigma = tuple(sigma)
        while True:
            q = _hyp_state(hyp, sigma)
            r = t.node(sigma)
            eta = t.apart(q, r)
            if eta is None:
                raise PreconditionError("hypothesis state and tree node are not apart")
            if t.is_basis(r) or t.is_frontier(r):
                return sigma
            rho = 1
            while t.is_basis(t.node(sigma[:rho])):
                rho += 1
            h = (rho + len(sigma)) // 2
            s1, s2 = sigma[:h], sigma[h:]
            q1 = _hyp_state(hyp, s1)
            base = t.access(q1) + s2
            self.query(base + eta)
            if t.outputs(t.node(base), eta) != t.outputs(q, eta):
                sigma = base
            else:
                sigma = s1

    # scanning
    def try_extension(self):
        for q in self.tree.basis:
            for i in self.inputs:
                if self.tree.child(q, i) is None:
                    return self.rule_extension(q, i)
        return False

    def try_promotion(self):
        for r in self.tree.frontier():
            if self.tree.is_isolated(r):
                return self.rule_promotion(r)
        return False

    def try_separation(self):
        t = self.tree
        for r in t.frontier():
            cs = t.candidates(r)
            if len(cs) >= 2:
                return self.rule_separation(r, cs[0], cs[1])
        return False

    def step(self):
        """Apply one rule; True once the teacher accepted a hypothesis."""
        if self.try_extension() or self.try_separation() or self.try_promotion():
            return False
        return self.rule_equivalence()

    def run(self):
        while not self.step():
            pass
        self.metrics.learned_states = len(self.hypothesis.states)
        return self.hypothesis, self.metrics


def _hyp_state(hyp, w):
    h = hyp.initial
    for i in w:
        h = hyp.trans[(h, i)]
    return h


def run_lsharp(sul, oracle=None, seed=0, input_order=None, max_steps=None):
    teacher = Teacher(sul, make_oracle(oracle or "perfect", seed, None, input_order), RunMetrics())
    return LSharp(teacher, input_order, max_steps).run()
