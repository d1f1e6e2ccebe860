"""Composition operators on observables, and the maps connecting their domains.

Every operator here acts by precomposition: ``apply(op, f)`` is the
observable ``p -> f(m(p))`` for the operator's underlying point map
``m``.  This covers the Koopman operators of the three input-free
reformulations, the naive construction that cannot be iterated, and the
restriction/extension operators that move observables between the
state-only, state-input, and state-sequence domains.  On finite domains
each operator has an exact 0-1 matrix realization.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import ContractError, DomainError, DomainMismatchError, UnsupportedError
from .observables import DomainTag, Observable, enumerate_points, indicator, coordinate
from .systems import (
    AugmentedMap,
    ConstantInputMap,
    ControlSystem,
    FiniteStates,
    InfiniteSequenceMap,
    InputSequence,
    RealBox,
    range_map,
    states_equal,
    step,
)

__all__ = [
    "PointMap",
    "CompositionOperator",
    "MatrixOperator",
    "WellDefinednessReason",
    "WellDefinednessReport",
    "TwoStepWitness",
    "CIIsomorphisms",
    "restrict_to_first_input",
    "extend_to_constant_sequence",
    "drop_input",
    "freeze_input",
    "state_projection",
    "identity_operator",
    "koopman_of_map",
    "k_u",
    "k_aug",
    "k_inf",
    "k_naive",
    "apply",
    "compose",
    "power",
    "restriction_inf_to_aug",
    "extension_aug_to_inf",
    "restriction_aug_to_f",
    "extension_f_to_aug",
    "ci_isomorphisms",
    "kcf_word",
    "to_matrix",
    "export_matrix_csv",
    "input_aug_well_definedness",
    "two_step_discrepancy_witness",
]


@dataclass(frozen=True)
class PointMap:
    """A named total map between tagged point domains."""

    domain_from: DomainTag
    domain_to: DomainTag
    fn: Callable
    label: str = ""

    def __call__(self, point):
        return self.fn(point)


def restrict_to_first_input() -> PointMap:
    """(x, u-sequence) -> (x, u(0))."""
    return PointMap(
        DomainTag.STATE_SEQUENCE,
        DomainTag.STATE_INPUT,
        lambda p: (p[0], p[1].at(0)),
        "restrict-first-input",
    )


def extend_to_constant_sequence() -> PointMap:
    """(x, u) -> (x, (u, u, ...))."""
    return PointMap(
        DomainTag.STATE_INPUT,
        DomainTag.STATE_SEQUENCE,
        lambda p: (p[0], InputSequence.constant(p[1])),
        "extend-constant-sequence",
    )


def drop_input() -> PointMap:
    """(x, u) -> x."""
    return PointMap(
        DomainTag.STATE_INPUT, DomainTag.STATE_ONLY, lambda p: p[0], "drop-input"
    )


def freeze_input(u_star) -> PointMap:
    """x -> (x, u*)."""
    return PointMap(
        DomainTag.STATE_ONLY,
        DomainTag.STATE_INPUT,
        lambda x: (x, u_star),
        f"freeze-input[{u_star}]",
    )


def state_projection(domain_from: DomainTag) -> PointMap:
    """(x, anything) -> x, from either augmented domain."""
    if domain_from is DomainTag.STATE_ONLY:
        raise DomainMismatchError("projection source must be an augmented domain")
    return PointMap(domain_from, DomainTag.STATE_ONLY, lambda p: p[0], "project-state")


@dataclass(frozen=True)
class CompositionOperator:
    """Linear operator ``f -> f o precompose`` between observable spaces.

    ``source`` is the domain of acceptable inputs, ``target`` the domain
    of results; ``precompose`` maps target-domain points to source-domain
    points.  ``requires_ci`` marks operators whose contract only covers
    certified control-independent inputs; ``ci_stamp`` is the witness
    stamped onto results that are control-independent by construction.
    """

    source: DomainTag
    target: DomainTag
    precompose: Callable
    label: str = ""
    ci_stamp: object = None
    requires_ci: bool = False


def apply(op: CompositionOperator, f: Observable) -> Observable:
    """Apply the operator: result(p) = f(precompose(p)).

    Applying an operator to an observable from the wrong domain raises
    :class:`DomainMismatchError`.  In particular a naive one-sided
    operator cannot be applied to its own output.
    """
    if f.domain is not op.source:
        raise DomainMismatchError(
            f"operator {op.label or 'op'} expects {op.source.value} observables, "
            f"got {f.domain.value}"
        )
    if op.requires_ci and f.ci_input is None:
        raise ContractError(
            f"operator {op.label or 'op'} requires a certified "
            "control-independent observable"
        )
    inner, pre = f.fn, op.precompose
    return Observable(
        op.target,
        lambda p: inner(pre(p)),
        label=f"{op.label}[{f.label}]" if op.label else f.label,
        ci_input=op.ci_stamp,
    )


def compose(op1: CompositionOperator, op2: CompositionOperator) -> CompositionOperator:
    """Operator product: ``apply(compose(op1, op2), f) = apply(op1, apply(op2, f))``."""
    if op2.target is not op1.source:
        raise DomainMismatchError(
            f"cannot compose {op1.label or 'op1'} after {op2.label or 'op2'}: "
            f"{op2.target.value} != {op1.source.value}"
        )
    pre1, pre2 = op1.precompose, op2.precompose
    return CompositionOperator(
        op2.source,
        op1.target,
        lambda p: pre2(pre1(p)),
        label=f"{op1.label} o {op2.label}".strip(),
        ci_stamp=op1.ci_stamp,
        requires_ci=op2.requires_ci or (op1.requires_ci and op2.ci_stamp is None),
    )


def identity_operator(domain: DomainTag) -> CompositionOperator:
    return CompositionOperator(domain, domain, lambda p: p, label="id")


def koopman_of_map(m, domain: Optional[DomainTag] = None, label: str = "") -> CompositionOperator:
    """Koopman operator of an input-free map: precompose with the map.

    The three derived-system maps carry their own domain; a bare callable
    needs an explicit ``domain``.
    """
    if domain is None:
        if isinstance(m, ConstantInputMap):
            domain = DomainTag.STATE_ONLY
        elif isinstance(m, AugmentedMap):
            domain = DomainTag.STATE_INPUT
        elif isinstance(m, InfiniteSequenceMap):
            domain = DomainTag.STATE_SEQUENCE
        else:
            raise ValueError("domain tag required for a bare callable")
    return CompositionOperator(domain, domain, m, label=label or "K")


def k_u(sys: ControlSystem, u_star) -> CompositionOperator:
    """Koopman operator of the constant-input system at ``u_star``."""
    return koopman_of_map(ConstantInputMap(sys, u_star), label=f"K[{u_star}]")


def k_aug(sys: ControlSystem) -> CompositionOperator:
    """Koopman operator of the augmented (input-frozen) system."""
    return koopman_of_map(AugmentedMap(sys), label="K_aug")


def k_inf(sys: ControlSystem) -> CompositionOperator:
    """Koopman operator of the infinite-sequence system."""
    return koopman_of_map(InfiniteSequenceMap(sys), label="K_inf")


def k_naive(sys: ControlSystem) -> CompositionOperator:
    """The naive construction: state-only observables in, pair observables out.

    Well defined as a single map, but its target differs from its source,
    so it cannot be applied twice.
    """
    return CompositionOperator(
        DomainTag.STATE_ONLY,
        DomainTag.STATE_INPUT,
        lambda p: step(sys, p[0], p[1]),
        label="K_naive",
    )


def power(op: CompositionOperator, k: int) -> CompositionOperator:
    """k-fold composition of an endomorphism; ``k = 0`` gives the identity."""
    if op.source is not op.target:
        raise DomainMismatchError("powers need source and target domains to agree")
    if k < 0:
        raise ValueError("power must be nonnegative")
    if k == 0:
        return identity_operator(op.source)
    pre = op.precompose

    def pre_k(p):
        q = p
        for _ in range(k):
            q = pre(q)
        return q

    return CompositionOperator(op.source, op.target, pre_k, label=f"{op.label}^{k}")


def restriction_inf_to_aug() -> CompositionOperator:
    """Sequence-domain observables restricted to constant sequences."""
    emap = extend_to_constant_sequence()
    return CompositionOperator(
        DomainTag.STATE_SEQUENCE, DomainTag.STATE_INPUT, emap.fn, label="R:inf->aug"
    )


def extension_aug_to_inf() -> CompositionOperator:
    """Pair-domain observables extended to sequences via the first element."""
    rmap = restrict_to_first_input()
    return CompositionOperator(
        DomainTag.STATE_INPUT, DomainTag.STATE_SEQUENCE, rmap.fn, label="E:aug->inf"
    )


def restriction_aug_to_f(u_star, sys: Optional[ControlSystem] = None) -> CompositionOperator:
    """Pair-domain observables with the input frozen at ``u_star``."""
    if sys is not None and not sys.inputs.contains(u_star):
        raise DomainError(f"unknown input label: {u_star!r}")
    fmap = freeze_input(u_star)
    return CompositionOperator(
        DomainTag.STATE_INPUT, DomainTag.STATE_ONLY, fmap.fn, label=f"R[{u_star}]:aug->state"
    )


def extension_f_to_aug() -> CompositionOperator:
    """State-only observables extended to pairs by ignoring the input."""
    dmap = drop_input()
    return CompositionOperator(
        DomainTag.STATE_ONLY, DomainTag.STATE_INPUT, dmap.fn, label="E:state->aug"
    )


@dataclass(frozen=True)
class CIIsomorphisms:
    """The four bijections between state-only observables and the
    control-independent subspaces of the two augmented domains.

    Extensions stamp their results as certified (they are
    control-independent by construction); restrictions require certified
    inputs and stay inside the control-independent subspaces.
    """

    extend_state_to_aug: CompositionOperator
    restrict_aug_to_state: CompositionOperator
    extend_aug_to_seq: CompositionOperator
    restrict_seq_to_aug: CompositionOperator


def ci_isomorphisms(sys: ControlSystem) -> CIIsomorphisms:
    """Build the control-independent isomorphism operators for ``sys``.

    The system supplies the canonical certification witness: its first
    input label, or the constant sequence of it.
    """
    u0 = sys.inputs.labels[0]
    return CIIsomorphisms(
        extend_state_to_aug=CompositionOperator(
            DomainTag.STATE_ONLY,
            DomainTag.STATE_INPUT,
            drop_input().fn,
            label="E:state->aug(ci)",
            ci_stamp=u0,
        ),
        restrict_aug_to_state=CompositionOperator(
            DomainTag.STATE_INPUT,
            DomainTag.STATE_ONLY,
            freeze_input(u0).fn,
            label="R:aug(ci)->state",
            requires_ci=True,
        ),
        extend_aug_to_seq=CompositionOperator(
            DomainTag.STATE_INPUT,
            DomainTag.STATE_SEQUENCE,
            restrict_to_first_input().fn,
            label="E:aug(ci)->inf(ci)",
            ci_stamp=InputSequence.constant(u0),
            requires_ci=True,
        ),
        restrict_seq_to_aug=CompositionOperator(
            DomainTag.STATE_SEQUENCE,
            DomainTag.STATE_INPUT,
            extend_to_constant_sequence().fn,
            label="R:inf(ci)->aug(ci)",
            ci_stamp=u0,
            requires_ci=True,
        ),
    )


def kcf_word(sys: ControlSystem, inputs) -> CompositionOperator:
    """Product of constant-input Koopman operators along a finite input word.

    The leftmost operator carries the earliest input, so the underlying
    point map runs the word through the dynamics in given order:
    ``precompose(x) = T_{u_last}( ... T_{u_first}(x))``.  The empty word
    gives the identity.
    """
    word = tuple(inputs)
    for u in word:
        if not sys.inputs.contains(u):
            raise DomainError(f"unknown input label: {u!r}")
    if not word:
        return identity_operator(DomainTag.STATE_ONLY)

    def pre(x):
        y = x
        for u in word:
            y = step(sys, y, u)
        return y

    return CompositionOperator(
        DomainTag.STATE_ONLY, DomainTag.STATE_ONLY, pre, label=f"K_word{list(word)}"
    )


@dataclass(frozen=True, eq=False)
class MatrixOperator:
    """Exact matrix realization of an operator between finite domains.

    Rows follow the canonical enumeration of the target domain, columns
    that of the source domain, so that
    ``tabulate(apply(op, f)) == entries @ tabulate(f)``.
    """

    row_domain: DomainTag
    col_domain: DomainTag
    row_points: tuple
    col_points: tuple
    entries: np.ndarray
    label: str = ""


def to_matrix(op: CompositionOperator, sys: ControlSystem) -> MatrixOperator:
    """Materialize a composition operator as a 0-1 row-selection matrix.

    Only operators between enumerable domains qualify; anything touching
    the sequence domain has no finite matrix and is rejected.
    """
    rows = enumerate_points(op.target, sys)
    cols = enumerate_points(op.source, sys)
    index = {p: j for j, p in enumerate(cols)}
    entries = np.zeros((len(rows), len(cols)), dtype=complex)
    for i, p in enumerate(rows):
        q = op.precompose(p)
        if q not in index:
            raise DomainError(f"precompose left the enumerated domain at {p!r} -> {q!r}")
        entries[i, index[q]] = 1.0
    return MatrixOperator(op.target, op.source, rows, cols, entries, label=op.label)


def _format_complex(v: complex) -> str:
    if v.imag == 0:
        return f"{v.real:.17g}"
    return f"{v.real:.17g}{v.imag:+.17g}j"


def export_matrix_csv(mat: MatrixOperator, path) -> None:
    """Write the matrix with a header row and column naming the enumerations."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rows\\cols"] + [repr(p) for p in mat.col_points])
        for point, row in zip(mat.row_points, mat.entries):
            writer.writerow([repr(point)] + [_format_complex(v) for v in row])


class WellDefinednessReason(Enum):
    SINGLETON_INPUT = "singleton-input"
    ALL_RESTRICTIONS_INPUT_FREE = "all-restrictions-input-free"
    WITNESS_FOUND = "witness-found"


@dataclass(frozen=True)
class WellDefinednessReport:
    well_defined: bool
    reason: WellDefinednessReason
    witness: Optional[tuple]  # (probe label, x, u, u1, u2, value1, value2)


def input_aug_well_definedness(
    sys: ControlSystem, probes, tol: float = 1e-12
) -> WellDefinednessReport:
    """Probe whether treating the input as an extra state gives a well-defined
    operator on pair observables.

    The construction assigns ``f(T(x, u), u')`` without knowing the next
    input ``u'``, so it is only well defined if the input set is a
    singleton, or every probe restricted to reachable states ignores the
    input.  The search runs in a fixed order (probe, then origin pairs
    state-major, then input pairs) so any witness found is reproducible.
    """
    probes = list(probes)
    if not probes:
        raise ValueError("probe list must be nonempty")
    if not isinstance(sys.states, FiniteStates):
        raise UnsupportedError("well-definedness probing needs finite domains")
    labels = sys.inputs.labels
    if len(labels) == 1:
        return WellDefinednessReport(True, WellDefinednessReason.SINGLETON_INPUT, None)
    range_map(sys)  # validates the transition table up front
    for f in probes:
        for x in sys.states.labels:
            for u in labels:
                y = step(sys, x, u)
                for i, u1 in enumerate(labels):
                    v1 = f((y, u1))
                    for u2 in labels[i + 1 :]:
                        v2 = f((y, u2))
                        if abs(v1 - v2) > tol:
                            return WellDefinednessReport(
                                False,
                                WellDefinednessReason.WITNESS_FOUND,
                                (f.label, x, u, u1, u2, v1, v2),
                            )
    return WellDefinednessReport(
        True, WellDefinednessReason.ALL_RESTRICTIONS_INPUT_FREE, None
    )


@dataclass(frozen=True)
class TwoStepWitness:
    """A point where two augmented steps diverge from a two-input word.

    The augmented system freezes the input, so its second step reuses the
    first input; a genuine trajectory may switch inputs.  The witness
    records the observable, start state, and word exhibiting the gap.
    """

    observable: Observable
    x: object
    word: tuple
    value_power: complex
    value_word: complex


def two_step_discrepancy_witness(
    sys: ControlSystem, tol: float = 1e-12, n_samples: int = 100, seed: int = 0
) -> Optional[TwoStepWitness]:
    """Deterministic search for a two-step mismatch between the augmented
    operator squared and a length-2 input word.

    Finite systems are scanned exhaustively (states, then ordered input
    pairs); box systems are scanned over seeded samples with the first
    state coordinate as the probe.  Returns ``None`` when no mismatch
    exists within the scan, as happens for dynamics that ignore the input.
    """
    if isinstance(sys.states, FiniteStates):
        starts = sys.states.labels
        probe_of = indicator
    else:
        box: RealBox = sys.states
        rng = np.random.default_rng(seed)
        starts = [
            rng.uniform(np.asarray(box.lower), np.asarray(box.upper))
            for _ in range(n_samples)
        ]
        probe_of = None
    for x in starts:
        for u0 in sys.inputs.labels:
            mid = step(sys, x, u0)
            frozen = step(sys, mid, u0)
            for u1 in sys.inputs.labels:
                if u1 == u0:
                    continue
                switched = step(sys, mid, u1)
                if not states_equal(sys.states, frozen, switched, tol):
                    obs = probe_of(frozen) if probe_of else coordinate(0)
                    return TwoStepWitness(
                        observable=obs,
                        x=x,
                        word=(u0, u1),
                        value_power=obs(frozen),
                        value_word=obs(switched),
                    )
    return None
