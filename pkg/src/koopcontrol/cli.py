"""Config-driven command line front end.

Commands::

    koopcontrol check      run the identity-check registry, write reports
    koopcontrol demo-naive walk through the failures of the naive encoding
    koopcontrol fit        sample transitions and fit one matrix per input
    koopcontrol predict    roll a fitted model forward and score it
    koopcontrol report     re-render a saved check report

Options come from an optional config file of ``key = value`` lines plus
command-line flags; flags win.  Config keys mirror the flag names
(``system``, ``seed``, ``points``, ``tol``, ``only``, ``dict``, ``out``)
with extras that have no flag: ``functions``, ``prefix-max``,
``period-max``, ``sampler``, ``resolution``, ``steps``, ``x0``, ``word``,
``exact``.  Inline finite systems use ``system = table`` with ``states``,
``inputs``, and one ``step.<state>.<input> = <next>`` line per
transition; built-in parametric systems take overrides via ``param.*``
keys (``param.r = 3.0``, ``param.lambdas.a = 0.4``).

Output files go to ``--out``, else the directory named by the
``KOOPCONTROL_OUT`` environment variable, else the current directory.
All files are written atomically (temp + rename), contain no timestamps,
and are byte-identical across runs with the same config and seed.
Exit status: 0 when everything executed passed, 1 when a check or a
toleranced prediction failed, 2 on bad config or usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys
import tempfile
from pathlib import Path

import numpy as np

from .catalog import BUILTIN_SYSTEMS, builtin_system, dictionary_for
from .checks import (
    CheckResult,
    SamplePlan,
    check_ids,
    exact_plan,
    is_applicable,
    results_to_json,
    results_to_text,
    run_all,
)
from .edmd import (
    ExhaustiveFinite,
    GridOnBox,
    UniformRandom,
    collect_data,
    export_model_json,
    export_training_csv,
    fit_kcf,
    import_model_json,
    prediction_error,
)
from .errors import DomainError, DomainMismatchError, UnsupportedError
from .observables import coordinate, indicator
from .operators import (
    apply,
    extension_f_to_aug,
    input_aug_well_definedness,
    k_naive,
    two_step_discrepancy_witness,
)
from .systems import (
    ControlSystem,
    FiniteStates,
    InputSequence,
    InputSet,
    RealBox,
)
from .observables import DomainTag, enumerate_points, pair_indicator

OUTPUT_DIR_ENV = "KOOPCONTROL_OUT"

__all__ = ["main", "parse_config_text", "load_config", "resolve_system"]


# --- config ----------------------------------------------------------------


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DomainError(f"config line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise DomainError(f"config line {lineno}: empty key")
        if len(value) >= 2 and value[0] == '"' and value[-1] == '"':
            value = value[1:-1]
        elif " #" in value:
            value = value.split(" #", 1)[0].rstrip()
        cfg[key] = value
    return cfg


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)


_FLAG_KEYS = ("system", "seed", "points", "tol", "only", "dict", "out")


def _merged(args) -> dict:
    cfg = load_config(args.config) if getattr(args, "config", None) else {}
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = str(value)
    if getattr(args, "exact", False):
        cfg["exact"] = "true"
    return cfg


def _cfg_int(cfg, key, default=None):
    if key not in cfg:
        return default
    try:
        return int(cfg[key])
    except ValueError:
        raise DomainError(f"config key {key!r}: expected an integer, got {cfg[key]!r}")


def _cfg_float(cfg, key, default=None):
    if key not in cfg:
        return default
    try:
        return float(cfg[key])
    except ValueError:
        raise DomainError(f"config key {key!r}: expected a number, got {cfg[key]!r}")


def _cfg_bool(cfg, key, default=False):
    if key not in cfg:
        return default
    return cfg[key].strip().lower() in ("1", "true", "yes", "on")


def _parse_label(token: str):
    token = token.strip()
    for cast in (int, float):
        try:
            return cast(token)
        except ValueError:
            pass
    return token


# --- system resolution -----------------------------------------------------


def _collect_params(cfg) -> dict:
    params = {}
    for key, value in cfg.items():
        if not key.startswith("param."):
            continue
        rest = key[len("param.") :]
        if "." in rest:
            head, _, sub = rest.partition(".")
            params.setdefault(head, {})[_parse_label(sub)] = float(value)
        elif "," in value:
            params[rest] = tuple(float(tok) for tok in value.split(","))
        else:
            try:
                params[rest] = float(value)
            except ValueError:
                params[rest] = value
    return params


def _table_system(cfg) -> ControlSystem:
    for req in ("states", "inputs"):
        if req not in cfg:
            raise DomainError(f"inline table system needs a {req!r} key")
    states = tuple(_parse_label(t) for t in cfg["states"].split(","))
    inputs = tuple(_parse_label(t) for t in cfg["inputs"].split(","))
    table = {}
    for key, value in cfg.items():
        if not key.startswith("step."):
            continue
        rest = key[len("step.") :]
        xs, _, us = rest.partition(".")
        if not us:
            raise DomainError(f"bad key {key!r}; use step.<state>.<input> = <next>")
        table[(_parse_label(xs), _parse_label(us))] = _parse_label(value)
    missing = [(x, u) for x in states for u in inputs if (x, u) not in table]
    if missing:
        raise DomainError(f"transition table is missing entries for {missing}")
    return ControlSystem(
        FiniteStates(states),
        InputSet(inputs),
        lambda x, u: table[(x, u)],
        name=cfg.get("name", "table"),
    )


def resolve_system(cfg) -> ControlSystem:
    name = cfg.get("system", "finite3")
    if name == "table":
        return _table_system(cfg)
    return builtin_system(name, **_collect_params(cfg))


def _out_dir(cfg) -> Path:
    out = Path(cfg.get("out") or os.environ.get(OUTPUT_DIR_ENV) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_export(path: Path, writer) -> None:
    """Run ``writer(tmp_path)`` and rename the result into place."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- plans -----------------------------------------------------------------


def _build_plan(cfg, sys_: ControlSystem) -> SamplePlan:
    finite = isinstance(sys_.states, FiniteStates)
    exact = _cfg_bool(cfg, "exact")
    if exact and not finite:
        raise DomainError("--exact needs a finite state space")
    seed = _cfg_int(cfg, "seed")
    if seed is None:
        if not finite:
            raise DomainError("sampled checks need a seed (--seed or config)")
        seed = 0
    points = _cfg_int(cfg, "points", 200 if finite else 1000)
    tol = _cfg_float(cfg, "tol")
    if exact or (finite and tol is None):
        return exact_plan(seed=seed, n_points=points)
    return SamplePlan(
        n_points=points,
        n_functions=_cfg_int(cfg, "functions", 50),
        seq_prefix_max=_cfg_int(cfg, "prefix-max", 4),
        seq_period_max=_cfg_int(cfg, "period-max", 3),
        rng_seed=seed,
        tolerance=1e-12 if tol is None else tol,
    )


# --- commands --------------------------------------------------------------


def cmd_check(args) -> int:
    cfg = _merged(args)
    sys_ = resolve_system(cfg)
    plan = _build_plan(cfg, sys_)
    only = None
    skipped = []
    if "only" in cfg:
        only = [tok.strip().upper() for tok in cfg["only"].split(",") if tok.strip()]
        unknown = [cid for cid in only if cid not in check_ids()]
        if unknown:
            raise DomainError(f"unknown check ids: {', '.join(unknown)}")
        skipped = [cid for cid in only if not is_applicable(cid, sys_)]
        only = [cid for cid in only if cid not in skipped]
    summary = run_all(sys_, plan, only=only)
    out = _out_dir(cfg)
    _atomic_write(out / "check_report.json", results_to_json(summary.results))
    _atomic_write(out / "check_report.txt", results_to_text(summary.results))
    print(f"system {sys_.name}, seed {plan.rng_seed}, tolerance {plan.tolerance:g}")
    print(results_to_text(summary.results), end="")
    for cid in skipped:
        print(f"{cid} skipped: not applicable to this state space")
    return 0 if summary.all_passed else 1


def cmd_demo_naive(args) -> int:
    cfg = _merged(args)
    sys_ = resolve_system(cfg)
    finite = isinstance(sys_.states, FiniteStates)
    print(f"naive encoding on {sys_.name}")
    print()

    if finite:
        f = indicator(sys_.states.labels[0])
        x0 = sys_.states.labels[0]
    else:
        f = coordinate(0)
        box: RealBox = sys_.states
        x0 = (np.asarray(box.lower) + np.asarray(box.upper)) / 2
    u0 = sys_.inputs.labels[0]
    op = k_naive(sys_)
    g = apply(op, f)
    print("one application is fine: the composed observable reads the next state")
    print(f"  ({op.label} {f.label})({x0!r}, {u0!r}) = {g((x0, u0)):g}")
    try:
        apply(op, g)
    except DomainMismatchError as exc:
        print("a second application is impossible:")
        print(f"  {exc}")
    else:
        raise RuntimeError("expected the second application to fail")
    print()

    if finite:
        print("treating the input as a frozen extra state:")
        probes = [pair_indicator(p[0], p[1]) for p in enumerate_points(DomainTag.STATE_INPUT, sys_)]
        report = input_aug_well_definedness(sys_, probes)
        if report.witness is not None:
            label, x, u, u1, u2, v1, v2 = report.witness
            print(f"  input-sensitive probes break it ({report.reason.value}):")
            print(
                f"    probe {label} at the successor of ({x!r}, {u!r}) reads "
                f"{v1:g} if the next input is {u1!r} but {v2:g} if it is {u2!r}"
            )
        else:
            print(f"  {report.reason.value}: construction is well defined here")
        blind = [apply(extension_f_to_aug(), indicator(x)) for x in sys_.states.labels]
        report2 = input_aug_well_definedness(sys_, blind)
        print(f"  input-blind probes cannot tell: {report2.reason.value}")
        if len(sys_.inputs.labels) > 1:
            single = ControlSystem(
                sys_.states,
                InputSet((u0,)),
                sys_.transition,
                name=f"{sys_.name}-single-input",
            )
            report3 = input_aug_well_definedness(single, probes[:1])
            print(f"  with only one input the question is moot: {report3.reason.value}")
        print()

    witness = two_step_discrepancy_witness(sys_)
    print("freezing the input survives one step but not two:")
    if witness is None:
        print("  no two-step gap exists here; these dynamics ignore the input")
    else:
        print(
            f"  start at {witness.x!r}, apply the word {witness.word!r}: "
            f"probe {witness.observable.label} reads {witness.value_word:g}"
        )
        print(
            f"  the frozen-input square replays {witness.word[0]!r} instead "
            f"and reads {witness.value_power:g}"
        )
    return 0


def _resolve_dictionary(cfg, sys_: ControlSystem):
    finite = isinstance(sys_.states, FiniteStates)
    spec = cfg.get("dict") or ("indicator" if finite else "monomial:2")
    return dictionary_for(sys_, spec), spec


def _resolve_sampler(cfg, sys_: ControlSystem):
    finite = isinstance(sys_.states, FiniteStates)
    kind = cfg.get("sampler") or ("exhaustive" if finite else "uniform")
    if kind == "exhaustive":
        return ExhaustiveFinite()
    if kind == "grid":
        return GridOnBox(_cfg_int(cfg, "resolution", 40))
    if kind == "uniform":
        seed = _cfg_int(cfg, "seed")
        if seed is None:
            raise DomainError("uniform sampling needs a seed (--seed or config)")
        return UniformRandom(_cfg_int(cfg, "points", 500), seed)
    raise DomainError(f"unknown sampler {kind!r}; use exhaustive, grid, or uniform")


def cmd_fit(args) -> int:
    cfg = _merged(args)
    sys_ = resolve_system(cfg)
    dictionary, spec = _resolve_dictionary(cfg, sys_)
    sampler = _resolve_sampler(cfg, sys_)
    data = collect_data(sys_, sampler)
    model, report = fit_kcf(dictionary, data)
    out = _out_dir(cfg)
    _atomic_export(out / "model.json", lambda p: export_model_json(model, p, report))
    _atomic_export(out / "training.csv", lambda p: export_training_csv(data, p))
    print(f"fit {sys_.name} with dictionary {spec} ({dictionary.dim} observables)")
    for u in data.input_labels:
        if u in report.residuals:
            flag = "  (ill-conditioned)" if report.rank_deficient.get(u) else ""
            print(
                f"  input {u!r}: residual {report.residuals[u]:.3e} "
                f"over {report.counts[u]} samples{flag}"
            )
    for u in report.missing_inputs:
        print(f"  input {u!r}: no samples, no matrix")
    print(f"wrote {out / 'model.json'} and {out / 'training.csv'}")
    return 0


def _resolve_x0(cfg, sys_: ControlSystem):
    if "x0" in cfg:
        if isinstance(sys_.states, FiniteStates):
            return _parse_label(cfg["x0"])
        return np.array([float(tok) for tok in cfg["x0"].split(",")])
    if isinstance(sys_.states, FiniteStates):
        return sys_.states.labels[0]
    box: RealBox = sys_.states
    return (np.asarray(box.lower) + np.asarray(box.upper)) / 2


def _resolve_sequence(cfg, sys_: ControlSystem) -> InputSequence:
    if "word" in cfg:
        word = tuple(_parse_label(tok) for tok in cfg["word"].split(","))
        bad = [u for u in word if u not in sys_.inputs.labels]
        if bad:
            raise DomainError(f"word uses labels outside the input set: {bad}")
        return InputSequence((), word)
    return InputSequence((), (sys_.inputs.labels[0],))


def cmd_predict(args) -> int:
    cfg = _merged(args)
    sys_ = resolve_system(cfg)
    dictionary, spec = _resolve_dictionary(cfg, sys_)
    out = _out_dir(cfg)
    model_path = out / "model.json"
    if not model_path.exists():
        raise DomainError(f"no model at {model_path}; run `koopcontrol fit` first")
    model = import_model_json(model_path, dictionary, sys_)
    x0 = _resolve_x0(cfg, sys_)
    seq = _resolve_sequence(cfg, sys_)
    steps = _cfg_int(cfg, "steps", 20)
    errors = prediction_error(model, dictionary, sys_, x0, seq, steps)
    lines = ["step,input,error"]
    for k, err in enumerate(errors):
        u = "" if k == 0 else repr(seq.at(k - 1))
        lines.append(f"{k},{u},{err:.17g}")
    _atomic_write(out / "prediction_errors.csv", "\n".join(lines) + "\n")
    worst = float(np.max(errors))
    print(f"predict {sys_.name}: dictionary {spec}, {steps} steps from x0={x0!r}")
    print(f"  max lifted prediction error {worst:.3e}")
    print(f"wrote {out / 'prediction_errors.csv'}")
    tol = _cfg_float(cfg, "tol")
    if tol is not None and worst > tol:
        print(f"  FAIL: error exceeds tolerance {tol:g}")
        return 1
    return 0


def cmd_report(args) -> int:
    cfg = _merged(args)
    out = _out_dir(cfg)
    path = out / "check_report.json"
    if not path.exists():
        raise DomainError(f"no report at {path}; run `koopcontrol check` first")
    payload = json.loads(path.read_text())
    results = [
        CheckResult(
            id=entry["id"],
            passed=bool(entry["pass"]),
            max_abs_error=float(entry["max_abs_error"]),
            counterexample=entry.get("counterexample"),
            n_evaluated=int(entry.get("n_evaluated", 0)),
            note=entry.get("note", ""),
        )
        for entry in payload
    ]
    print(results_to_text(results), end="")
    return 0 if all(r.passed for r in results) else 1


# --- entry point -----------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--system",
        help="built-in system name: " + ", ".join(sorted(BUILTIN_SYSTEMS)),
    )
    parser.add_argument("--config", help="key = value config file; flags override it")
    parser.add_argument("--seed", type=int, help="generator seed (required off finite systems)")
    parser.add_argument("--points", type=int, help="sample budget")
    parser.add_argument("--tol", type=float, help="pass/fail tolerance")
    parser.add_argument(
        "--out",
        help=f"output directory (default: ${OUTPUT_DIR_ENV} or the current directory)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="koopcontrol",
        description="Operator encodings of input-driven dynamics: checks, demos, identification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run the identity-check registry")
    _add_common(check)
    check.add_argument("--only", help="comma-separated check ids (C1..C20)")
    check.add_argument(
        "--exact",
        action="store_true",
        help="exhaustive zero-tolerance run (finite systems only)",
    )
    check.set_defaults(func=cmd_check)

    demo = sub.add_parser("demo-naive", help="walk through the naive-encoding failures")
    _add_common(demo)
    demo.set_defaults(func=cmd_demo_naive)

    fit = sub.add_parser("fit", help="sample transitions and fit one matrix per input")
    _add_common(fit)
    fit.add_argument("--dict", help="dictionary spec: indicator or monomial:<degree>")
    fit.set_defaults(func=cmd_fit)

    predict = sub.add_parser("predict", help="roll a fitted model forward and score it")
    _add_common(predict)
    predict.add_argument("--dict", help="dictionary spec; must match the fit")
    predict.set_defaults(func=cmd_predict)

    report = sub.add_parser("report", help="re-render a saved check report")
    _add_common(report)
    report.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, UnsupportedError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
