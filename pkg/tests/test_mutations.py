import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from alsharp.generate import random_mealy
from alsharp.mealy import (
    MealyMachine,
    equivalence_classes,
    language_equivalent,
    prune_unreachable,
    restrict,
    walk,
)
from alsharp.mutations import (
    OPERATORS,
    MutationError,
    MutationSpec,
    farthest_state_index,
    mutate,
    mutated_copy,
)


def base(seed, n=8, k=3, o=3):
    return random_mealy(n, k, o, seed, strongly_connected=True, minimal=True)


def classes(m):
    return len(set(equivalence_classes(prune_unreachable(m)).values()))


@given(st.sampled_from(OPERATORS), st.integers(0, 10**6))
@settings(max_examples=120, deadline=None)
def test_every_operator_is_deterministic_and_complete(op, seed):
    m = base(seed % 50)
    try:
        a = mutate(m, MutationSpec(op, seed))
    except MutationError:
        assume(False)
    b = mutate(m, MutationSpec(op, seed))
    assert a.is_complete()
    assert (a.states, a.inputs, a.initial, a.trans, a.out) == (b.states, b.inputs, b.initial, b.trans, b.out)


def test_distinct_seeds_usually_differ():
    m = base(1)
    for op in ("mut5", "mut6", "mut10", "mut12", "mut13"):
        outs = {tuple(sorted(mutate(m, MutationSpec(op, s)).out.items())) +
                tuple(sorted(mutate(m, MutationSpec(op, s)).trans.items())) for s in range(10)}
        assert len(outs) > 1


def test_mut1_new_initial_with_fresh_symbol():
    m = base(2)
    r = mutate(m, MutationSpec("mut1"))
    fresh = set(r.inputs) - set(m.inputs)
    assert len(fresh) == 1
    [f] = fresh
    assert r.initial not in m.states
    assert r.trans[(r.initial, f)] == m.initial
    i0 = sorted(m.inputs)[0]
    o0 = m.out[(m.initial, i0)]
    for q in m.states:
        assert r.trans[(q, f)] == q and r.out[(q, f)] == o0


def test_mut2_keeps_states_on_strongly_connected():
    m = base(3)
    r = mutate(m, MutationSpec("mut2", 5))
    assert len(r.states) == len(m.states)
    assert r.initial != m.initial


def test_mut3_adds_one_state():
    m = base(4)
    r = mutate(m, MutationSpec("mut3", 1))
    assert len(r.states) == len(m.states) + 1


def test_mut4_removes_one_state():
    m = base(5)
    r = mutate(m, MutationSpec("mut4", 1))
    assert len(r.states) <= len(m.states) - 1
    with pytest.raises(MutationError):
        mutate(MealyMachine(["x"], ["a"], "x", {("x", "a"): "x"}, {("x", "a"): "0"}),
               MutationSpec("mut4"))


@pytest.mark.parametrize("seed", range(20))
def test_mut5_changes_language(seed):
    m = base(seed)
    assert language_equivalent(m, mutate(m, MutationSpec("mut5", seed))) is not None


@pytest.mark.parametrize("seed", range(20))
def test_mut6_counterexample_ends_at_changed_edge(seed):
    m = base(seed)
    r = mutate(m, MutationSpec("mut6", seed))
    [(q, i)] = [k for k in m.out if m.out[k] != r.out[k]]
    ce = language_equivalent(m, r)
    assert ce is not None
    assert ce[-1] == i and walk(m, m.initial, ce[:-1])[0] == q


def test_mut7_removes_a_symbol():
    m = base(6)
    r = mutate(m, MutationSpec("mut7", 2))
    assert len(r.inputs) == len(m.inputs) - 1
    assert language_equivalent(prune_unreachable(restrict(m, r.inputs)), r) is None
    with pytest.raises(MutationError):
        mutate(random_mealy(3, 1, 2, 0), MutationSpec("mut7"))


@pytest.mark.parametrize("seed", range(10))
def test_mut8_class_count_bounded(seed):
    m = base(seed)
    r = mutate(m, MutationSpec("mut8", seed))
    assert classes(r) <= len(m.states) + len(mutated_copy(m, seed).states)
    assert r.initial == m.initial


def test_mut8_attach_index():
    m = base(7)
    r = mutate(m, MutationSpec("mut8", 1, attach_index=0))
    assert len(r.states) > len(m.states)
    with pytest.raises(MutationError):
        mutate(m, MutationSpec("mut8", 1, attach_index=len(m.states)))


def test_mut9_prepends_mutated_copy():
    m = base(8)
    r = mutate(m, MutationSpec("mut9", 3))
    host = mutated_copy(m, 3)
    assert r.initial == host.initial
    assert len(r.states) == len(host.states) + len(m.states)


def test_mut13_is_the_mutated_copy():
    m = base(9)
    a = mutate(m, MutationSpec("mut13", 4))
    b = mutated_copy(m, 4)
    assert (a.states, a.trans, a.out) == (b.states, b.trans, b.out)


def test_mut14_union_with_two_fresh_symbols():
    m = base(10)
    r = mutate(m, MutationSpec("mut14", 2))
    fresh = [i for i in r.inputs if i not in m.inputs]
    assert len(fresh) == 2
    assert r.trans[(r.initial, fresh[0])] == m.initial
    # following the second fresh symbol leads into the mutated copy
    assert r.trans[(r.initial, fresh[1])] not in m.states


def test_farthest_state_index():
    m = MealyMachine(["x", "y", "z"], ["a"], "x",
                     {("x", "a"): "y", ("y", "a"): "z", ("z", "a"): "x"},
                     {("x", "a"): "0", ("y", "a"): "0", ("z", "a"): "1"})
    assert farthest_state_index(m) == 2


def test_errors():
    with pytest.raises(MutationError):
        mutate(base(0), MutationSpec("mut99"))
    partial = MealyMachine(["x"], ["a", "b"], "x", {("x", "a"): "x"}, {("x", "a"): "0"})
    with pytest.raises(MutationError):
        mutate(partial, MutationSpec("mut6"))
    single_output = random_mealy(3, 2, 1, 0)
    with pytest.raises(MutationError):
        mutate(single_output, MutationSpec("mut6"))
