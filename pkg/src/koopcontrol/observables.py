"""Complex-valued observables over the three point domains.

Every observable carries a :class:`DomainTag` naming where its points
live: states alone, (state, input) pairs, or (state, input-sequence)
pairs.  Observables form a vector space under pointwise combination and
can be tested for control independence, i.e. whether their value ignores
the input component entirely.  A passed test certifies the observable by
stamping a canonical witness input on it; downstream operations that are
only meaningful on control-independent functions require that stamp.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import ContractError, DomainError, DomainMismatchError, UnsupportedError
from .systems import (
    ControlSystem,
    FiniteStates,
    InputSequence,
    RealBox,
    random_sequence,
)

__all__ = [
    "DomainTag",
    "Observable",
    "CIReport",
    "Exhaustive",
    "Sampled",
    "eval_at",
    "linear_combine",
    "is_control_independent",
    "certify_control_independent",
    "state_component",
    "tabulate",
    "enumerate_points",
    "indicator",
    "pair_indicator",
    "coordinate",
    "monomial",
    "constant_one",
    "input_weight",
]


class DomainTag(Enum):
    STATE_ONLY = "state"
    STATE_INPUT = "state-input"
    STATE_SEQUENCE = "state-sequence"


def _check_point(domain: DomainTag, point) -> None:
    if domain is DomainTag.STATE_ONLY:
        return
    if not (isinstance(point, tuple) and len(point) == 2):
        raise DomainMismatchError(
            f"domain {domain.value} expects a (state, ...) pair, got {point!r}"
        )
    second_is_seq = isinstance(point[1], InputSequence)
    if domain is DomainTag.STATE_SEQUENCE and not second_is_seq:
        raise DomainMismatchError(
            "domain state-sequence expects an InputSequence second component"
        )
    if domain is DomainTag.STATE_INPUT and second_is_seq:
        raise DomainMismatchError(
            "domain state-input got an InputSequence second component"
        )


@dataclass(frozen=True)
class Observable:
    """A complex-valued function tagged with its point domain.

    ``ci_input`` is the certification witness for control independence:
    ``None`` means uncertified, otherwise it holds the canonical input
    (an input label, or a constant sequence of one) at which the state
    component may be read off.
    """

    domain: DomainTag
    fn: Callable
    label: str = ""
    ci_input: object = None

    def __call__(self, point) -> complex:
        _check_point(self.domain, point)
        value = self.fn(point)
        if isinstance(value, np.ndarray):
            value = value.item()
        return complex(value)


def eval_at(obs: Observable, point) -> complex:
    """Evaluate ``obs`` at ``point``, validating the point's shape."""
    return obs(point)


def linear_combine(coeffs, observables) -> Observable:
    """Pointwise linear combination; all observables must share one domain."""
    coeffs = [complex(c) for c in coeffs]
    observables = list(observables)
    if len(coeffs) != len(observables):
        raise ValueError("coefficient and observable lists differ in length")
    if not observables:
        raise ValueError("need at least one observable")
    domains = {o.domain for o in observables}
    if len(domains) != 1:
        raise DomainMismatchError("cannot combine observables on different domains")
    (domain,) = domains
    pairs = tuple(zip(coeffs, observables))

    def fn(point):
        total = 0j
        for c, o in pairs:
            value = o.fn(point)
            if isinstance(value, np.ndarray):
                value = value.item()
            total += c * complex(value)
        return total

    stamps = {o.ci_input for o in observables}
    stamp = stamps.pop() if len(stamps) == 1 else None
    label = " + ".join(f"({c:.3g})*{o.label or 'f'}" for c, o in pairs)
    return Observable(domain, fn, label, ci_input=stamp)


@dataclass(frozen=True)
class Exhaustive:
    """Check every (state, input-pair) combination; exact on finite domains."""


@dataclass(frozen=True)
class Sampled:
    """Check randomly drawn points and input pairs from a seeded generator."""

    count: int
    seed: int


@dataclass(frozen=True)
class CIReport:
    independent: bool
    witness: Optional[tuple]
    mode: object


def _sample_state(rng, sys: ControlSystem):
    if isinstance(sys.states, FiniteStates):
        labels = sys.states.labels
        return labels[int(rng.integers(len(labels)))]
    box: RealBox = sys.states
    return rng.uniform(np.asarray(box.lower), np.asarray(box.upper))


def is_control_independent(
    obs: Observable, sys: ControlSystem, mode=None, tol: float = 1e-12
) -> CIReport:
    """Test whether ``obs`` ignores its input component.

    Exhaustive mode enumerates all (x, u1, u2) triples and is only
    available for state-input observables over finite state spaces.
    Sampled mode draws points and input pairs (or eventually-periodic
    sequence pairs) from a seeded generator; a negative witness refutes
    independence, while a clean pass is a non-refutation certificate,
    recorded as such through the ``mode`` field of the report.
    """
    if obs.domain is DomainTag.STATE_ONLY:
        raise DomainMismatchError("state-only observables have no input to vary")
    labels = sys.inputs.labels
    if mode is None:
        exhaustible = (
            isinstance(sys.states, FiniteStates)
            and obs.domain is DomainTag.STATE_INPUT
        )
        mode = Exhaustive() if exhaustible else Sampled(200, 0)
    if isinstance(mode, Exhaustive):
        if not isinstance(sys.states, FiniteStates):
            raise UnsupportedError("exhaustive mode needs a finite state space")
        if obs.domain is not DomainTag.STATE_INPUT:
            raise UnsupportedError("exhaustive mode needs a state-input observable")
        for x in sys.states.labels:
            v0 = obs((x, labels[0]))
            for u in labels[1:]:
                v = obs((x, u))
                if abs(v - v0) > tol:
                    return CIReport(False, (x, labels[0], u), mode)
        return CIReport(True, None, mode)
    if not isinstance(mode, Sampled):
        raise ValueError(f"unknown mode: {mode!r}")
    rng = np.random.default_rng(mode.seed)
    for _ in range(mode.count):
        x = _sample_state(rng, sys)
        if obs.domain is DomainTag.STATE_INPUT:
            i = int(rng.integers(len(labels)))
            j = int(rng.integers(max(len(labels) - 1, 1)))
            w1, w2 = labels[i], labels[j + (1 if j >= i and len(labels) > 1 else 0)]
        else:
            w1 = random_sequence(rng, labels)
            w2 = random_sequence(rng, labels)
        if abs(obs((x, w1)) - obs((x, w2))) > tol:
            return CIReport(False, (x, w1, w2), mode)
    return CIReport(True, None, mode)


def certify_control_independent(
    obs: Observable, sys: ControlSystem, mode=None, tol: float = 1e-12
) -> Observable:
    """Verify control independence and stamp the canonical witness input.

    The canonical witness is the system's first input label, or the
    constant sequence of it for sequence-domain observables.  Refutation
    raises :class:`ContractError` carrying the witness triple.
    """
    report = is_control_independent(obs, sys, mode=mode, tol=tol)
    if not report.independent:
        raise ContractError(
            f"observable {obs.label!r} is input-dependent; witness {report.witness!r}"
        )
    u0 = sys.inputs.labels[0]
    stamp = u0 if obs.domain is DomainTag.STATE_INPUT else InputSequence.constant(u0)
    return replace(obs, ci_input=stamp)


def state_component(obs: Observable) -> Observable:
    """The state-only factor of a certified control-independent observable."""
    if obs.domain is DomainTag.STATE_ONLY:
        raise DomainMismatchError("observable already lives on states only")
    if obs.ci_input is None:
        raise ContractError("observable is not certified control-independent")
    witness = obs.ci_input
    inner = obs.fn
    return Observable(
        DomainTag.STATE_ONLY,
        lambda x: inner((x, witness)),
        label=f"state<{obs.label or 'f'}>",
    )


def enumerate_points(domain: DomainTag, sys: ControlSystem) -> tuple:
    """Canonical enumeration of a finite point domain.

    States follow declaration order; (state, input) pairs are state-major.
    Sequence domains and boxes have no finite enumeration.
    """
    if not isinstance(sys.states, FiniteStates):
        raise UnsupportedError("enumeration needs a finite state space")
    if domain is DomainTag.STATE_ONLY:
        return tuple(sys.states.labels)
    if domain is DomainTag.STATE_INPUT:
        return tuple((x, u) for x in sys.states.labels for u in sys.inputs.labels)
    raise UnsupportedError("state-sequence domains have no finite enumeration")


def tabulate(obs: Observable, sys: ControlSystem) -> np.ndarray:
    """Value vector of ``obs`` over the canonical enumeration of its domain."""
    points = enumerate_points(obs.domain, sys)
    return np.array([obs(p) for p in points], dtype=complex)


def indicator(x_star) -> Observable:
    """1 at the state labelled ``x_star``, 0 elsewhere (finite state spaces)."""
    return Observable(
        DomainTag.STATE_ONLY,
        lambda x: 1.0 if x == x_star else 0.0,
        label=f"1[x={x_star}]",
    )


def pair_indicator(x_star, u_star) -> Observable:
    """1 at the pair ``(x_star, u_star)``, 0 elsewhere."""
    return Observable(
        DomainTag.STATE_INPUT,
        lambda p: 1.0 if (p[0] == x_star and p[1] == u_star) else 0.0,
        label=f"1[x={x_star},u={u_star}]",
    )


def coordinate(i: int) -> Observable:
    """The ``i``-th state coordinate (works on numeric labels for ``i = 0``)."""

    def fn(x):
        arr = np.asarray(x, dtype=float).reshape(-1)
        if i >= arr.size:
            raise DomainError(f"coordinate {i} out of range for state {x!r}")
        return arr[i]

    return Observable(DomainTag.STATE_ONLY, fn, label=f"x{i}")


def monomial(powers) -> Observable:
    """Product of state coordinates raised to the given powers."""
    powers = tuple(int(p) for p in powers)

    def fn(x):
        arr = np.asarray(x, dtype=float).reshape(-1)
        if arr.size != len(powers):
            raise DomainError(
                f"state dimension {arr.size} does not match powers {powers}"
            )
        return float(np.prod(arr**np.asarray(powers)))

    terms = [f"x{i}^{p}" for i, p in enumerate(powers) if p]
    return Observable(DomainTag.STATE_ONLY, fn, label="*".join(terms) or "1")


def constant_one(domain: DomainTag) -> Observable:
    """The constant function 1 on the given domain."""
    return Observable(domain, lambda p: 1.0, label="1")


def input_weight(table: dict) -> Observable:
    """Input-only observable looking the input label up in ``table``."""
    table = dict(table)

    def fn(p):
        try:
            return table[p[1]]
        except KeyError:
            raise DomainError(f"no weight for input label {p[1]!r}") from None

    return Observable(DomainTag.STATE_INPUT, fn, label="w(u)")
