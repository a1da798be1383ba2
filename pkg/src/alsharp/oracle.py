"""Simulated teacher: output and equivalence queries against a known SUL."""

import random
from collections import Counter
from dataclasses import dataclass, field

from .mealy import language_equivalent, separating_family, state_cover, walk


@dataclass
class RunMetrics:
    oq_count: int = 0
    eq_count: int = 0
    input_symbols_oq: int = 0
    input_symbols_eq: int = 0
    rule_applications: Counter = field(default_factory=Counter)
    learned_states: int = 0

    @property
    def total_inputs(self):
        return self.input_symbols_oq + self.input_symbols_eq

    @property
    def counterexamples(self):
        """Equivalence queries that were refuted (the accepting one excluded)."""
        return max(self.eq_count - 1, 0)


@dataclass
class WpParams:
    """Random-Wp test shape: access word, random middle, identifier suffix.

    The middle has ``random_length`` symbols plus a geometric(1/2) number
    of extra symbols, and never fewer than ``minimal_size``.  ``bound``
    caps the number of tests per query.  With no bound the oracle tests
    until a test fails; a hypothesis equivalent to the simulated SUL is
    then accepted at once, since endless testing could never reject it.
    """
    minimal_size: int = 3
    random_length: int = 3
    bound: int | None = None
    seed: int = 0


def output_query(sul, w, metrics=None):
    res = walk(sul, sul.initial, w)
    if res is None:
        bad = [i for i in w if i not in sul.inputs]
        raise ValueError(f"input outside the SUL alphabet: {bad or w}")
    if metrics is not None:
        metrics.oq_count += 1
        metrics.input_symbols_oq += len(w)
    return res[1]


def _machine(h):
    return getattr(h, "machine", h)


def equivalence_query_perfect(sul, hyp, metrics=None, input_order=None):
    ce = language_equivalent(sul, _machine(hyp), input_order)
    if metrics is not None:
        metrics.eq_count += 1
        if ce is not None:
            metrics.input_symbols_eq += len(ce)
    return ce


def wp_test_words(hyp, params, rng, input_order=None):
    """Endless stream of random-Wp test words for ``hyp``."""
    hyp = _machine(hyp)
    order = list(input_order) if input_order else sorted(hyp.inputs)
    access = list(state_cover(hyp, order).values())
    family = separating_family(hyp, input_order=order)
    ids = {q: sorted(ws, key=lambda w: (len(w), w)) for q, ws in family.items()}
    while True:
        word = list(rng.choice(access))
        size = params.random_length
        while rng.random() < 0.5:
            size += 1
        for _ in range(max(size, params.minimal_size)):
            word.append(rng.choice(order))
        q = walk(hyp, hyp.initial, word)[0]
        if ids[q]:
            word.extend(rng.choice(ids[q]))
        yield tuple(word)


def equivalence_query_wp(sul, hyp, params=None, metrics=None, rng=None, input_order=None):
    """First test word on which ``hyp`` and ``sul`` disagree, or None."""
    params = params or WpParams()
    rng = rng or random.Random(params.seed)
    h = _machine(hyp)
    if metrics is not None:
        metrics.eq_count += 1
    if params.bound is None and language_equivalent(sul, h, input_order) is None:
        return None
    tests = wp_test_words(h, params, rng, input_order)
    count = 0
    while params.bound is None or count < params.bound:
        w = next(tests)
        count += 1
        if metrics is not None:
            metrics.input_symbols_eq += len(w)
        if walk(sul, sul.initial, w)[1] != walk(h, h.initial, w)[1]:
            return w
    return None


class PerfectOracle:
    name = "perfect"

    def __init__(self, input_order=None):
        self.input_order = input_order

    def find_counterexample(self, sul, hyp, metrics):
        return equivalence_query_perfect(sul, hyp, metrics, self.input_order)


class WpOracle:
    name = "wp"

    def __init__(self, params=None, input_order=None):
        self.params = params or WpParams()
        self.input_order = input_order
        self.rng = random.Random(self.params.seed)

    def find_counterexample(self, sul, hyp, metrics):
        return equivalence_query_wp(sul, hyp, self.params, metrics, self.rng, self.input_order)


class Teacher:
    """Binds a SUL, an equivalence oracle and the run's metrics."""

    def __init__(self, sul, oracle=None, metrics=None):
        self.sul = sul
        self.oracle = oracle or PerfectOracle()
        self.metrics = metrics or RunMetrics()

    def output_query(self, w):
        return output_query(self.sul, w, self.metrics)

    def equivalence_query(self, hyp):
        """None, or a counterexample with the SUL's outputs (already paid for)."""
        ce = self.oracle.find_counterexample(self.sul, hyp, self.metrics)
        if ce is None:
            return None
        return ce, walk(self.sul, self.sul.initial, ce)[1]


def make_oracle(kind="perfect", seed=0, params=None, input_order=None):
    """Oracle by name ("perfect" or "wp"); oracle objects pass through."""
    if not isinstance(kind, str):
        return kind
    if kind == "perfect":
        return PerfectOracle(input_order)
    if kind == "wp":
        p = params or WpParams()
        p = WpParams(p.minimal_size, p.random_length, p.bound, seed)
        return WpOracle(p, input_order)
    raise ValueError(f"unknown oracle {kind!r}")
