"""Least-squares identification of per-input lifted linear models.

Given a dictionary of state observables ``Psi`` and transition triples
``(x, u, x_next)``, fit one matrix per input label so that
``Psi(x_next) ~= A(u) Psi(x)``.  The lifted state then evolves linearly
per input, nonlinearly in the input label, which is exactly the finite
section of the constant-input Koopman operators on the dictionary span.

Solving goes through ridge-regularized normal equations followed by one
iterative-refinement step against the unridged system, which recovers
the exact least-squares minimizer whenever the Gram matrix is well
conditioned while keeping degenerate slices solvable.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, DomainMismatchError, UnsupportedError
from .observables import DomainTag, Observable
from .systems import ControlSystem, FiniteStates, InputSequence, RealBox, simulate, step

__all__ = [
    "Dictionary",
    "TrainingSet",
    "SeparableModel",
    "FitReport",
    "GridOnBox",
    "UniformRandom",
    "ExhaustiveFinite",
    "collect_data",
    "fit_kcf",
    "predict",
    "prediction_error",
    "export_training_csv",
    "import_training_csv",
    "export_model_json",
    "import_model_json",
]

_RIDGE = 1e-10
_COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Ordered list of state-only observables defining the lifted state."""

    observables: tuple

    def __post_init__(self):
        object.__setattr__(self, "observables", tuple(self.observables))
        if not self.observables:
            raise ValueError("dictionary must contain at least one observable")
        for o in self.observables:
            if o.domain is not DomainTag.STATE_ONLY:
                raise DomainMismatchError("dictionary entries must be state-only")

    @property
    def dim(self) -> int:
        return len(self.observables)

    @property
    def labels(self) -> tuple:
        return tuple(o.label for o in self.observables)

    def lift(self, x) -> np.ndarray:
        return np.array([o(x) for o in self.observables], dtype=complex)


@dataclass(frozen=True)
class GridOnBox:
    """Regular grid with the given points per coordinate."""

    resolution: int


@dataclass(frozen=True)
class UniformRandom:
    """Seeded uniform draws: states from the box, or labels from a finite set."""

    n: int
    seed: int


@dataclass(frozen=True)
class ExhaustiveFinite:
    """Every (state, input) pair of a finite system."""


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """Transition triples ``(x, u, x_next)`` plus the full input label set.

    ``input_labels`` lets the fit flag labels that received no samples;
    it defaults to the labels present in the triples.
    """

    triples: tuple
    input_labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple(self.triples))
        if not self.input_labels:
            seen = []
            for _, u, _ in self.triples:
                if u not in seen:
                    seen.append(u)
            object.__setattr__(self, "input_labels", tuple(seen))
        else:
            object.__setattr__(self, "input_labels", tuple(self.input_labels))

    def per_input(self) -> dict:
        groups = {u: [] for u in self.input_labels}
        for x, u, y in self.triples:
            groups.setdefault(u, []).append((x, y))
        return groups


@dataclass(frozen=True, eq=False)
class SeparableModel:
    """One fitted matrix per input label over a shared dictionary."""

    matrices: dict
    dictionary: Dictionary


@dataclass(frozen=True, eq=False)
class FitReport:
    """Per-input fit quality.

    ``residuals`` holds the attained least-squares objective per sample
    (squared Frobenius residual divided by the slice's sample count).
    """

    residuals: dict
    counts: dict
    rank_deficient: dict
    missing_inputs: tuple


def collect_data(sys: ControlSystem, sampler, per_input: bool = True) -> TrainingSet:
    """Generate transition triples from a system with the given sampler.

    With ``per_input`` every sampled state is paired with every input
    label; otherwise inputs are cycled across the samples.
    """
    if isinstance(sampler, ExhaustiveFinite):
        if not isinstance(sys.states, FiniteStates):
            raise UnsupportedError("exhaustive sampling needs a finite state space")
        xs = list(sys.states.labels)
        per_input = True
    elif isinstance(sampler, GridOnBox):
        if not isinstance(sys.states, RealBox):
            raise UnsupportedError("grid sampling needs a box state space")
        if sampler.resolution < 1:
            raise ValueError("grid resolution must be positive")
        box = sys.states
        axes = [
            np.linspace(lo, hi, sampler.resolution)
            for lo, hi in zip(box.lower, box.upper)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        xs = [np.array(p) for p in zip(*(m.ravel() for m in mesh))]
    elif isinstance(sampler, UniformRandom):
        if sampler.n < 1:
            raise ValueError("sample count must be positive")
        rng = np.random.default_rng(sampler.seed)
        if isinstance(sys.states, FiniteStates):
            labels = sys.states.labels
            xs = [labels[int(i)] for i in rng.integers(len(labels), size=sampler.n)]
        else:
            box = sys.states
            xs = [
                rng.uniform(np.asarray(box.lower), np.asarray(box.upper))
                for _ in range(sampler.n)
            ]
    else:
        raise ValueError(f"unknown sampler: {sampler!r}")

    ulabels = sys.inputs.labels
    triples = []
    if per_input:
        for x in xs:
            for u in ulabels:
                triples.append((x, u, step(sys, x, u)))
    else:
        for j, x in enumerate(xs):
            u = ulabels[j % len(ulabels)]
            triples.append((x, u, step(sys, x, u)))
    return TrainingSet(tuple(triples), input_labels=ulabels)


def _solve_ls(phi0: np.ndarray, phi1: np.ndarray) -> tuple:
    """Ridge-stabilized normal equations plus one refinement step."""
    n_dim = phi0.shape[0]
    gram = phi0 @ phi0.conj().T
    cross = phi1 @ phi0.conj().T
    reg = gram + _RIDGE * np.eye(n_dim)
    a0 = np.linalg.solve(reg, cross.conj().T).conj().T
    a1 = a0 + np.linalg.solve(reg, (cross - a0 @ gram).conj().T).conj().T
    cond = float(np.linalg.cond(gram))
    return a1, cond


def fit_kcf(dictionary: Dictionary, data: TrainingSet) -> tuple:
    """Fit one lifted matrix per input label by least squares.

    Returns ``(SeparableModel, FitReport)``.  Labels without samples are
    left out of the model and listed in ``FitReport.missing_inputs``.
    """
    matrices = {}
    residuals = {}
    counts = {}
    rank_flags = {}
    missing = []
    for u, pairs in data.per_input().items():
        if not pairs:
            missing.append(u)
            continue
        phi0 = np.column_stack([dictionary.lift(x) for x, _ in pairs])
        phi1 = np.column_stack([dictionary.lift(y) for _, y in pairs])
        a, cond = _solve_ls(phi0, phi1)
        matrices[u] = a
        n = len(pairs)
        residuals[u] = float(np.sum(np.abs(phi1 - a @ phi0) ** 2) / n)
        counts[u] = n
        rank_flags[u] = bool(cond > _COND_LIMIT)
    report = FitReport(residuals, counts, rank_flags, tuple(missing))
    return SeparableModel(matrices, dictionary), report


def predict(
    model: SeparableModel, dictionary: Dictionary, x0, seq: InputSequence, k: int
) -> list:
    """Lifted k-step prediction: ``z_{j+1} = A(seq(j)) z_j`` from ``z_0 = Psi(x0)``."""
    if dictionary.dim != model.dictionary.dim:
        raise DomainMismatchError("dictionary does not match the fitted model")
    if k < 0:
        raise ValueError("horizon must be nonnegative")
    z = dictionary.lift(x0)
    out = [z]
    for j in range(k):
        u = seq.at(j)
        if u not in model.matrices:
            raise DomainError(f"no fitted matrix for input label {u!r}")
        z = model.matrices[u] @ z
        out.append(z)
    return out


def prediction_error(
    model: SeparableModel,
    dictionary: Dictionary,
    sys: ControlSystem,
    x0,
    seq: InputSequence,
    k: int,
) -> np.ndarray:
    """Max-abs gap per step between the lifted prediction and the true lift."""
    preds = predict(model, dictionary, x0, seq, k)
    xs = simulate(sys, x0, seq, k)
    return np.array(
        [float(np.max(np.abs(z - dictionary.lift(x)))) for z, x in zip(preds, xs)]
    )


def _state_columns(sys: ControlSystem) -> int:
    return sys.states.dimension if isinstance(sys.states, RealBox) else 1


def _format_state(x) -> list:
    if isinstance(x, np.ndarray):
        return [f"{v:.17g}" for v in x]
    return [str(x)]


def export_training_csv(data: TrainingSet, path) -> None:
    """Write triples as rows: state columns, input label, next-state columns."""
    if not data.triples:
        raise ValueError("nothing to export")
    x0 = data.triples[0][0]
    d = x0.size if isinstance(x0, np.ndarray) else 1
    header = [f"x{i}" for i in range(d)] + ["u"] + [f"y{i}" for i in range(d)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for x, u, y in data.triples:
            writer.writerow(_format_state(x) + [str(u)] + _format_state(y))


def _label_parser(labels):
    by_repr = {str(lab): lab for lab in labels}

    def parse(text):
        if text in by_repr:
            return by_repr[text]
        raise DomainError(f"unknown label in file: {text!r}")

    return parse


def import_training_csv(path, sys: ControlSystem) -> TrainingSet:
    """Read triples back, resolving labels against the given system."""
    parse_u = _label_parser(sys.inputs.labels)
    finite = isinstance(sys.states, FiniteStates)
    parse_x = _label_parser(sys.states.labels) if finite else None
    d = _state_columns(sys)
    triples = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        for row in reader:
            if finite:
                x, u, y = parse_x(row[0]), parse_u(row[1]), parse_x(row[2])
            else:
                x = np.array([float(v) for v in row[:d]])
                u = parse_u(row[d])
                y = np.array([float(v) for v in row[d + 1 :]])
            triples.append((x, u, y))
    return TrainingSet(tuple(triples), input_labels=sys.inputs.labels)


def export_model_json(model: SeparableModel, path, report: Optional[FitReport] = None) -> None:
    """Write the model (and optionally its fit report) as deterministic JSON."""
    payload = {
        "dictionary": list(model.dictionary.labels),
        "matrices": {
            str(u): [[[v.real, v.imag] for v in row] for row in mat]
            for u, mat in model.matrices.items()
        },
    }
    if report is not None:
        payload["fit"] = {
            "residuals": {str(u): r for u, r in report.residuals.items()},
            "counts": {str(u): c for u, c in report.counts.items()},
            "rank_deficient": {str(u): f for u, f in report.rank_deficient.items()},
            "missing_inputs": [str(u) for u in report.missing_inputs],
        }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def import_model_json(path, dictionary: Dictionary, sys: ControlSystem) -> SeparableModel:
    """Read a model back, resolving labels against the given system."""
    with open(path) as fh:
        payload = json.load(fh)
    if list(dictionary.labels) != payload["dictionary"]:
        raise DomainMismatchError("dictionary labels do not match the stored model")
    parse_u = _label_parser(sys.inputs.labels)
    matrices = {}
    for key, rows in payload["matrices"].items():
        mat = np.array(
            [[complex(re, im) for re, im in row] for row in rows], dtype=complex
        )
        matrices[parse_u(key)] = mat
    return SeparableModel(matrices, dictionary)
