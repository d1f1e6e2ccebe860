import numpy as np
import pytest
from hypothesis import given, strategies as st

from koopcontrol import (
    AugmentedMap,
    ConstantInputMap,
    ControlSystem,
    DomainError,
    FiniteStates,
    InfiniteSequenceMap,
    InputSequence,
    InputSet,
    RealBox,
    RecoveryMethod,
    project_state,
    random_sequence,
    range_map,
    recover_trajectory,
    seq_at,
    shift,
    simulate,
    states_equal,
    step,
)

# Hand-computed transition table for the finite3 system.
FINITE3_TABLE = {
    (0, "a"): 1,
    (1, "a"): 2,
    (2, "a"): 0,
    (0, "b"): 0,
    (1, "b"): 2,
    (2, "b"): 1,
}


def test_finite3_matches_frozen_table(f3):
    for (x, u), y in FINITE3_TABLE.items():
        assert step(f3, x, u) == y


def test_step_rejects_unknown_labels(f3):
    with pytest.raises(DomainError):
        step(f3, 7, "a")
    with pytest.raises(DomainError):
        step(f3, 0, "c")


def test_step_rejects_state_outside_box(sl):
    with pytest.raises(DomainError):
        step(sl, 2.0, "a")


def test_step_rejects_escaping_transition():
    sys = ControlSystem(
        RealBox((0.0,), (1.0,)), InputSet(("u",)), lambda x, u: x + 5.0
    )
    with pytest.raises(DomainError):
        step(sys, 0.5, "u")


def test_box_boundary_is_inside(sl):
    # exact boundary points count as inside, tiny drift is tolerated
    assert step(sl, 1.0, "a") == pytest.approx(0.5)
    assert sl.states.contains(1.0 + 1e-10)
    assert not sl.states.contains(1.1)


def test_box_rejects_bad_shape(sl):
    with pytest.raises(DomainError):
        sl.states.coerce([0.1, 0.2])


def test_realbox_requires_ordered_bounds():
    with pytest.raises(ValueError):
        RealBox((1.0,), (0.0,))


def test_input_set_rejects_duplicates():
    with pytest.raises(ValueError):
        InputSet(("a", "a"))


def test_simulate_oracle(f3):
    seq = InputSequence(("a", "b"), ("a",))
    assert simulate(f3, 0, seq, 3) == [0, 1, 2, 0]


def test_simulate_zero_steps(f3):
    assert simulate(f3, 1, InputSequence.constant("a"), 0) == [1]


def test_simulate_rejects_negative_horizon(f3):
    with pytest.raises(ValueError):
        simulate(f3, 0, InputSequence.constant("a"), -1)


def test_sequence_values():
    seq = InputSequence(("a", "b"), ("b", "a"))
    assert [seq.at(k) for k in range(6)] == ["a", "b", "b", "a", "b", "a"]
    assert seq_at(seq, 2) == "b"


def test_sequence_rejects_empty_period():
    with pytest.raises(ValueError):
        InputSequence(("a",), ())


def test_sequence_rejects_negative_index():
    with pytest.raises(ValueError):
        InputSequence.constant("a").at(-1)


def test_shift_drops_prefix_first():
    seq = InputSequence(("a", "b"), ("a",))
    assert [shift(seq).at(k) for k in range(4)] == ["b", "a", "a", "a"]


def test_shift_rotates_pure_period():
    seq = InputSequence((), ("a", "b"))
    assert shift(seq).at(0) == "b"
    assert shift(shift(seq)) == seq


def test_sequence_equality_ignores_presentation():
    # same pointwise values, written with different prefix/period splits
    s1 = InputSequence(("a",), ("b", "a"))
    s2 = InputSequence((), ("a", "b"))
    assert [s1.at(k) for k in range(6)] == [s2.at(k) for k in range(6)]
    assert s1 == s2
    assert hash(s1) == hash(s2)


def test_sequence_period_reduces_to_primitive_root():
    assert InputSequence((), ("a", "b", "a", "b")) == InputSequence((), ("a", "b"))


def test_sequence_inequality():
    assert InputSequence((), ("a",)) != InputSequence((), ("b",))
    assert InputSequence(("b",), ("a",)) != InputSequence((), ("a",))


def test_constant_sequence():
    seq = InputSequence.constant("a")
    assert seq.at(0) == seq.at(99) == "a"
    assert shift(seq) == seq


_labels = st.sampled_from(["a", "b", "c"])
_seqs = st.builds(
    InputSequence,
    st.lists(_labels, max_size=4).map(tuple),
    st.lists(_labels, min_size=1, max_size=3).map(tuple),
)


@given(_seqs, st.integers(0, 20))
def test_shift_agrees_with_index_offset(seq, k):
    assert shift(seq).at(k) == seq.at(k + 1)


@given(_seqs)
def test_repadded_presentation_stays_equal(seq):
    # push one period element into the prefix; values cannot change
    pre = seq.prefix + (seq.period[0],)
    per = seq.period[1:] + seq.period[:1]
    other = InputSequence(pre, per)
    assert other == seq
    assert hash(other) == hash(seq)


@given(_seqs, _seqs)
def test_equality_implies_pointwise_agreement(s1, s2):
    horizon = len(s1.prefix) + len(s2.prefix) + len(s1.period) * len(s2.period)
    agree = all(s1.at(k) == s2.at(k) for k in range(horizon))
    assert (s1 == s2) == agree


def test_range_map(f3, c2):
    assert range_map(f3) == frozenset({0, 1, 2})
    assert range_map(c2) == frozenset({1})


def test_derived_maps(f3):
    assert AugmentedMap(f3)((0, "a")) == (1, "a")
    assert ConstantInputMap(f3, "b")(1) == 2
    x1, tail = InfiniteSequenceMap(f3)((0, InputSequence(("a", "b"), ("a",))))
    assert x1 == 1
    assert tail == InputSequence(("b",), ("a",))


def test_constant_input_map_rejects_unknown_label(f3):
    with pytest.raises(DomainError):
        ConstantInputMap(f3, "z")


def test_project_state(f3):
    assert project_state((2, "a")) == 2


@pytest.mark.parametrize("method", list(RecoveryMethod))
def test_recovery_matches_simulate_on_finite(f3, method):
    seq = InputSequence(("b",), ("a", "b"))
    truth = simulate(f3, 2, seq, 6)
    assert recover_trajectory(f3, 2, seq, 6, method) == truth


@pytest.mark.parametrize("method", list(RecoveryMethod))
def test_recovery_matches_simulate_on_box(sl, method):
    seq = InputSequence(("a",), ("b", "a"))
    truth = simulate(sl, 0.77, seq, 6)
    got = recover_trajectory(sl, 0.77, seq, 6, method)
    assert len(got) == len(truth)
    for a, b in zip(truth, got):
        assert np.allclose(a, b, atol=1e-15)


def test_random_sequence_respects_bounds():
    rng = np.random.default_rng(5)
    for _ in range(50):
        seq = random_sequence(rng, ("a", "b"), prefix_max=4, period_max=3)
        assert len(seq.prefix) <= 4
        assert 1 <= len(seq.period) <= 3
        assert set(seq.prefix) | set(seq.period) <= {"a", "b"}


def test_random_sequence_is_seed_deterministic():
    one = [random_sequence(np.random.default_rng(9), ("a", "b")) for _ in range(5)]
    two = [random_sequence(np.random.default_rng(9), ("a", "b")) for _ in range(5)]
    assert one == two


def test_states_equal(sl, f3):
    assert states_equal(sl.states, 0.5, 0.5 + 1e-14)
    assert not states_equal(sl.states, 0.5, 0.6)
    assert states_equal(f3.states, 2, 2)
    assert not states_equal(f3.states, 2, 0)
