"""Shared builders for tests."""

import random

from alsharp.obstree import ObservationTree


def grow(sul, seed, n_words=25, max_len=6, promote=True):
    """Random tree fed by a SUL, promoting isolated frontier nodes as it goes."""
    rng = random.Random(seed)
    t = ObservationTree(sorted(sul.inputs))
    for _ in range(n_words):
        w = tuple(rng.choice(t.inputs) for _ in range(rng.randint(1, max_len)))
        t.add_word(w, sul.run(w))
        if promote:
            for r in t.frontier():
                if t.is_isolated(r):
                    t.promote(r)
                    break
    return t


def grow_until_hypothesis(learner):
    """Apply Ex, S and P until none applies; the tree is then adequate."""
    while learner.try_extension() or learner.try_separation() or learner.try_promotion():
        pass


def synthetic_counterexample(sul, hyp, length, rng, tries=2000):
    """A random word of exactly ``length`` symbols on which ``hyp`` and ``sul`` differ."""
    inputs = sorted(sul.inputs)
    for _ in range(tries):
        w = tuple(rng.choice(inputs) for _ in range(length))
        if sul.run(w) != hyp.run(w):
            return w
    return None
