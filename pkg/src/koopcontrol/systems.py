"""Control systems, their input-free reformulations, and trajectory tools.

A discrete-time control system is a total deterministic map
``x_next = T(x, u)`` over a state space and a finite input set.  Three
input-free systems are derived from it:

* :class:`ConstantInputMap` fixes one input and maps states to states,
* :class:`AugmentedMap` acts on (state, input) pairs and freezes the input,
* :class:`InfiniteSequenceMap` acts on (state, input-sequence) pairs,
  consuming the first element and left-shifting the rest.

Input sequences are represented by a finite prefix plus a repeating
period, which keeps the left shift exact and makes every finite-horizon
behavior reachable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainError, UnsupportedError

__all__ = [
    "StateSpace",
    "FiniteStates",
    "RealBox",
    "InputSet",
    "ControlSystem",
    "InputSequence",
    "AugmentedMap",
    "ConstantInputMap",
    "InfiniteSequenceMap",
    "RecoveryMethod",
    "step",
    "simulate",
    "shift",
    "seq_at",
    "range_map",
    "recover_trajectory",
    "project_state",
    "random_sequence",
    "states_equal",
]

_BOX_SLACK = 1e-9  # containment slack for floating-point boundary hits


class StateSpace:
    """Base class for state spaces; see :class:`FiniteStates` and :class:`RealBox`."""

    @property
    def is_finite(self) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class FiniteStates(StateSpace):
    """Finite state space given by an ordered tuple of unique labels."""

    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.labels:
            raise ValueError("state label list must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("state labels must be unique")

    @property
    def is_finite(self) -> bool:
        return True

    def contains(self, x) -> bool:
        return x in self.labels


@dataclass(frozen=True)
class RealBox(StateSpace):
    """Axis-aligned box in R^d with strict lower < upper per coordinate."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(np.asarray(self.lower, dtype=float)))
        hi = tuple(float(v) for v in np.atleast_1d(np.asarray(self.upper, dtype=float)))
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if len(lo) != len(hi):
            raise ValueError("lower and upper bounds must have equal length")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ValueError("require lower < upper in every coordinate")

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def dimension(self) -> int:
        return len(self.lower)

    def coerce(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=float).reshape(-1)
        if arr.shape != (self.dimension,):
            raise DomainError(
                f"state has shape {arr.shape}, expected ({self.dimension},)"
            )
        return arr

    def contains(self, x) -> bool:
        try:
            arr = self.coerce(x)
        except DomainError:
            return False
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        return bool(np.all(arr >= lo - _BOX_SLACK) and np.all(arr <= hi + _BOX_SLACK))


@dataclass(frozen=True)
class InputSet:
    """Finite input set given by an ordered tuple of unique labels."""

    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.labels:
            raise ValueError("input label list must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("input labels must be unique")

    def contains(self, u) -> bool:
        return u in self.labels


@dataclass(frozen=True)
class ControlSystem:
    """A total deterministic transition map over declared state and input sets."""

    states: StateSpace
    inputs: InputSet
    transition: Callable
    name: str = ""


@dataclass(frozen=True, eq=False)
class InputSequence:
    """Eventually-periodic infinite input sequence.

    Element ``k`` is ``prefix[k]`` while the prefix lasts, then the period
    repeats forever.  Equality and hashing go through a canonical form
    (primitive period, minimal prefix), so two representations of the same
    infinite sequence compare equal.
    """

    prefix: tuple
    period: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise ValueError("period must be nonempty")

    @classmethod
    def constant(cls, u) -> "InputSequence":
        return cls((), (u,))

    def at(self, k: int):
        if k < 0:
            raise ValueError("sequence index must be nonnegative")
        if k < len(self.prefix):
            return self.prefix[k]
        return self.period[(k - len(self.prefix)) % len(self.period)]

    def canonical(self) -> tuple:
        per = self.period
        n = len(per)
        for d in range(1, n + 1):
            if n % d == 0 and per == per[:d] * (n // d):
                per = per[:d]
                break
        pre = self.prefix
        # Pull the period boundary left while the last prefix element
        # matches the last period element (rotating the period with it).
        while pre and pre[-1] == per[-1]:
            per = (per[-1],) + per[:-1]
            pre = pre[:-1]
        return (pre, per)

    def __eq__(self, other):
        if not isinstance(other, InputSequence):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())


@dataclass(frozen=True)
class AugmentedMap:
    """Input-free map on (state, input) pairs: advances the state, keeps the input."""

    system: ControlSystem

    def __call__(self, point):
        x, u = point
        return (step(self.system, x, u), u)


@dataclass(frozen=True)
class ConstantInputMap:
    """Input-free map on states obtained by fixing one input forever."""

    system: ControlSystem
    fixed_input: object

    def __post_init__(self):
        if not self.system.inputs.contains(self.fixed_input):
            raise DomainError(f"unknown input label: {self.fixed_input!r}")

    def __call__(self, x):
        return step(self.system, x, self.fixed_input)


@dataclass(frozen=True)
class InfiniteSequenceMap:
    """Input-free map on (state, sequence) pairs: steps with the head, shifts the tail."""

    system: ControlSystem

    def __call__(self, point):
        x, seq = point
        return (step(self.system, x, seq.at(0)), shift(seq))


class RecoveryMethod(Enum):
    INFINITE_SEQUENCE = "infinite-sequence"
    KCF_COMPOSITION = "kcf-composition"
    AUGMENTED_STEPWISE = "augmented-stepwise"


def project_state(point):
    """First coordinate of a (state, input) or (state, sequence) pair."""
    return point[0]


def step(sys: ControlSystem, x, u):
    """One transition ``T(x, u)``, with domain validation on both ends."""
    if not sys.inputs.contains(u):
        raise DomainError(f"unknown input label: {u!r}")
    if isinstance(sys.states, FiniteStates):
        if not sys.states.contains(x):
            raise DomainError(f"unknown state label: {x!r}")
        y = sys.transition(x, u)
        if not sys.states.contains(y):
            raise DomainError(f"transition left the state space: {y!r}")
        return y
    box = sys.states
    arr = box.coerce(x)
    if not box.contains(arr):
        raise DomainError(f"state {arr!r} outside the declared box")
    y = box.coerce(sys.transition(arr, u))
    if not box.contains(y):
        raise DomainError(f"transition output {y!r} outside the declared box")
    return y


def simulate(sys: ControlSystem, x0, seq: InputSequence, k: int) -> list:
    """States ``[x_0, ..., x_k]`` driven by the first ``k`` sequence elements.

    This is the ground-truth oracle every trajectory identity is checked
    against.
    """
    if k < 0:
        raise ValueError("horizon must be nonnegative")
    xs = [x0 if not isinstance(sys.states, RealBox) else sys.states.coerce(x0)]
    for j in range(k):
        xs.append(step(sys, xs[-1], seq.at(j)))
    return xs


def shift(seq: InputSequence) -> InputSequence:
    """Left shift: drops element 0, so ``shift(s).at(k) == s.at(k + 1)``."""
    if seq.prefix:
        return InputSequence(seq.prefix[1:], seq.period)
    return InputSequence((), seq.period[1:] + seq.period[:1])


def seq_at(seq: InputSequence, k: int):
    """Element ``k`` of the sequence (alias for ``seq.at(k)``)."""
    return seq.at(k)


def range_map(sys: ControlSystem) -> frozenset:
    """The exact set of reachable next states, ``{T(x, u)}`` over all pairs."""
    if not isinstance(sys.states, FiniteStates):
        raise UnsupportedError("range enumeration needs a finite state space")
    return frozenset(
        step(sys, x, u) for x in sys.states.labels for u in sys.inputs.labels
    )


def recover_trajectory(
    sys: ControlSystem, x0, seq: InputSequence, k: int, method: RecoveryMethod
) -> list:
    """Rebuild ``simulate(sys, x0, seq, k)`` through one of the derived systems.

    ``INFINITE_SEQUENCE`` iterates the sequence-domain map and projects the
    state.  ``KCF_COMPOSITION`` composes the constant-input maps in input
    order.  ``AUGMENTED_STEPWISE`` applies the augmented map one step at a
    time, re-seeding the frozen input coordinate before every step.
    """
    if k < 0:
        raise ValueError("horizon must be nonnegative")
    method = RecoveryMethod(method)
    coerce = sys.states.coerce if isinstance(sys.states, RealBox) else (lambda v: v)
    if method is RecoveryMethod.INFINITE_SEQUENCE:
        tmap = InfiniteSequenceMap(sys)
        point = (coerce(x0), seq)
        out = [project_state(point)]
        for _ in range(k):
            point = tmap(point)
            out.append(project_state(point))
        return out
    if method is RecoveryMethod.KCF_COMPOSITION:
        out = [coerce(x0)]
        for j in range(k):
            out.append(ConstantInputMap(sys, seq.at(j))(out[-1]))
        return out
    tmap = AugmentedMap(sys)
    out = [coerce(x0)]
    for j in range(k):
        out.append(project_state(tmap((out[-1], seq.at(j)))))
    return out


def random_sequence(
    rng: np.random.Generator, labels, prefix_max: int = 4, period_max: int = 3
) -> InputSequence:
    """Draw an eventually-periodic sequence with bounded prefix and period."""
    labels = tuple(labels)
    plen = int(rng.integers(0, prefix_max + 1))
    qlen = int(rng.integers(1, period_max + 1))
    pick = lambda: labels[int(rng.integers(len(labels)))]
    return InputSequence(
        tuple(pick() for _ in range(plen)), tuple(pick() for _ in range(qlen))
    )


def states_equal(space: StateSpace, a, b, tol: float = 1e-12) -> bool:
    """Exact label equality on finite spaces, max-abs tolerance on boxes."""
    if isinstance(space, FiniteStates):
        return a == b
    arr_a = space.coerce(a)
    arr_b = space.coerce(b)
    return bool(np.max(np.abs(arr_a - arr_b)) <= tol)
