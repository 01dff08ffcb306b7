"""Batch command line: verify, sweep, fit, classical, witness.

Configs are JSON documents validated against the schemas below (unknown
keys are rejected). Angles in configs and outputs are in units of pi.

Exit codes: 0 success, 1 a hard check failed, 2 config error, 3 I/O error,
4 infeasible fit, 5 sampler exhaustion.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import classical, fit, linalg, models, quantum

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_IO, EXIT_INFEASIBLE, EXIT_SAMPLER = 0, 1, 2, 3, 4, 5

SWEEP_HEADER = (
    "r", "p_d", "p_d_given_a", "p_d_given_b", "p_d_given_c", "p_d_given_joint",
    "p_joint_given_d", "p_joint_given_not_d", "interference_a",
)

_NUM = {"type": "number"}
_FAMILY = {"enum": list(fit.FAMILIES)}
_PARAMS = {
    "type": "object",
    "properties": {
        **{k: _NUM for k in ("r", "theta", "a3", "a4", "a5", "alpha1", "r2", "theta2", "alpha2",
                             *fit.BLOCK_NAMES)},
        "a1": {"type": ["number", "null"]},
        "root_choice": {"enum": ["small", "large"]},
    },
    "additionalProperties": False,
}
_TARGETS = {
    "oneOf": [
        {"type": "string"},
        {"type": "object", "additionalProperties": {"type": "number", "minimum": 0, "maximum": 1},
         "not": {"required": ["targets"]}},
        {
            "type": "object",
            "properties": {
                "targets": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0, "maximum": 1}},
                "weights": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
            },
            "required": ["targets"],
            "additionalProperties": False,
        },
    ]
}
_SEED = {"type": "integer", "minimum": 0}
_BUDGET = {"type": "integer", "minimum": 1}

SCHEMAS = {
    "verify": {
        "type": "object",
        "properties": {
            "family": _FAMILY,
            "params": _PARAMS,
            "r_points": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}, "minItems": 1},
            "targets": _TARGETS,
        },
        "additionalProperties": False,
    },
    "sweep": {
        "type": "object",
        "properties": {
            "family": _FAMILY,
            "params": _PARAMS,
            "grid": {
                "oneOf": [
                    {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}, "minItems": 1},
                    {
                        "type": "object",
                        "properties": {
                            "start": {"type": "number", "minimum": 0, "maximum": 1},
                            "stop": {"type": "number", "minimum": 0, "maximum": 1},
                            "num": {"type": "integer", "minimum": 1},
                        },
                        "required": ["num"],
                        "additionalProperties": False,
                    },
                ]
            },
            "rederive_a1": {"type": "boolean"},
            "out": {"type": "string"},
        },
        "additionalProperties": False,
    },
    "fit": {
        "type": "object",
        "properties": {
            "family": _FAMILY,
            "targets": _TARGETS,
            "free": {
                "oneOf": [
                    {"type": "array", "items": {"type": "string"}},
                    {"type": "object", "additionalProperties": {
                        "oneOf": [{"type": "null"}, {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}]
                    }},
                ]
            },
            "fixed": _PARAMS,
            "seed": _SEED,
            "budget": _BUDGET,
            "a1_mode": {"enum": ["eliminate", "penalty"]},
            "independence_weight": {"type": "number", "minimum": 0},
            "random_draws": {"type": "integer", "minimum": 1},
            "starts": {"type": "integer", "minimum": 1},
            "out": {"type": "string"},
        },
        "required": ["targets"],
        "additionalProperties": False,
    },
    "classical": {
        "type": "object",
        "properties": {
            "suites": {"type": "array", "items": {"enum": ["lemma", "theorem", "feasibility"]}},
            "seed": _SEED,
            "lemma_trials": {"type": "integer", "minimum": 1},
            "theorem_trials": {"type": "integer", "minimum": 1},
            "sampler": {
                "type": "object",
                "properties": {
                    k: {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
                    for k in ("p_d", "p_a_given_d", "p_b_given_d", "not_d_ratio")
                } | {"max_redraws": {"type": "integer", "minimum": 1}},
                "additionalProperties": False,
            },
            "feasibility": {
                "type": "object",
                "properties": {
                    "targets": _TARGETS,
                    "budget": _BUDGET,
                    "constraints": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "properties": {"events": {"type": "string"}, "given": {"type": "string"}},
                            "required": ["events"],
                            "additionalProperties": False,
                        },
                    },
                },
                "additionalProperties": False,
            },
        },
        "additionalProperties": False,
    },
    "witness": {
        "type": "object",
        "properties": {
            "c2": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            "w": {"type": "number", "minimum": 0, "maximum": 1},
        },
        "additionalProperties": False,
    },
}


class ConfigError(Exception):
    pass


class OutputError(Exception):
    pass


def load_config(command: str, path: Optional[str]) -> tuple[dict, Path]:
    if path is None:
        return {}, Path.cwd()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None
    validate(command, doc)
    return doc, Path(path).resolve().parent


def validate(command: str, doc) -> None:
    errors = sorted(jsonschema.Draft202012Validator(SCHEMAS[command]).iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        lines = [f"  {'/'.join(map(str, e.path)) or '<root>'}: {e.message}" for e in errors]
        raise ConfigError("invalid config:\n" + "\n".join(lines))


def _targets(spec, base: Path) -> classical.TargetTable:
    if isinstance(spec, str):
        path = base / spec
        try:
            spec = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read targets file {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed targets file {path}: {exc}") from None
        validate_targets = SCHEMAS["fit"]["properties"]["targets"]
        try:
            jsonschema.validate(spec, validate_targets)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid targets file {path}: {exc.message}") from None
    try:
        return classical.TargetTable.from_json(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _model_params(doc: dict):
    family = doc.get("family", "two_cause")
    try:
        return family, fit.unflatten(family, doc.get("params", {}))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _resolve_seed(arg: Optional[int], doc: dict) -> int:
    if arg is not None:
        return arg
    if "seed" in doc:
        return doc["seed"]
    env = os.environ.get("QLCAUSE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"QLCAUSE_SEED must be an integer, got {env!r}") from None
    return 0


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    sys.stdout.write(text)
    if out:
        write_text(out, text)


def write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from None


# --- verify -----------------------------------------------------------------


def structural_checks(m: models.ModelInstance) -> dict:
    out = {f"{p.label}_is_projector": linalg.is_projector(p.matrix) for p in m.causes + [m.D]}
    for p, q in ((m.A, m.B), (m.A, m.C), (m.B, m.C)):
        if p is not None and q is not None:
            out[f"{p.label}{q.label}_commute"] = linalg.commutator_norm(p.matrix, q.matrix) <= linalg.STRUCT_TOL
    out["state_normalized"] = abs(linalg.norm2(m.state.vector) - 1.0) <= linalg.NORM_TOL
    return out


def ordering_checks(report: models.ProbabilityReport) -> dict:
    r = report
    singles = [v for v in (r.p_d_given_a, r.p_d_given_b, r.p_d_given_c) if v is not None]
    if r.p_d is None or r.p_d_given_joint is None or r.p_joint_given_d is None or r.p_joint_given_not_d is None:
        return {"defined": False}
    return {
        "defined": True,
        "each_cause_raises_d": all(v > r.p_d for v in singles),
        "joint_between_prior_and_singles": r.p_d < r.p_d_given_joint < min(singles),
        "joint_lowers_d": r.p_d_given_joint < r.p_d,
        "joint_likelier_given_d": r.p_joint_given_d > r.p_joint_given_not_d,
    }


def cmd_verify(args) -> int:
    doc, base = load_config("verify", args.config)
    family, params = _model_params(doc)
    three = family != "two_cause"
    # the three-cause fit is quoted at r = 0.01 but discussed at r = 0.5: report both
    r_points = doc.get("r_points", [0.01, 0.5] if three else [params.r if not three else 0.5])
    targets = _targets(doc["targets"], base) if "targets" in doc else (classical.TABLE2 if three else None)
    if targets is not None:
        try:
            for name in targets.targets:
                fit.report_field(name, family)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    points, hard_ok = [], True
    for r in r_points:
        try:
            m = models.build(models.with_r(params, r))
        except ValueError as exc:
            raise ConfigError(f"parameters do not build a model at r={r}: {exc}") from None
        report = models.evaluate_report(m)
        checks = structural_checks(m)
        order = ordering_checks(report)
        hard_ok &= all(checks.values())
        point = {
            "r": r,
            "report": report.as_dict(),
            "structural_checks": checks,
            "ordering": order,
            "complement_diagnostics": quantum.complement_diagnostics(m.joint, m.D, m.state),
            "commutator_joint_d": linalg.commutator_norm(m.joint.matrix, m.D.matrix),
        }
        if not three:
            # demonstration pattern: each cause raises d, the joint cause has a smaller effect,
            # and the joint is likelier given d than given not d
            pattern_ok = order["defined"] and all(order[k] for k in (
                "each_cause_raises_d", "joint_between_prior_and_singles", "joint_likelier_given_d"))
            point["ordering_asserted"] = bool(pattern_ok)
            hard_ok &= bool(pattern_ok)
        if targets is not None:
            values = report.as_dict()
            table = {}
            for name, t in targets.targets.items():
                got = values[fit.report_field(name, family)]
                table[name] = {"target": t, "model": got, "residual": None if got is None else got - t}
            point["residuals"] = table
            point["objective"] = fit.objective(m.params, targets)
        points.append(point)
    six = params if family == "two_cause" else params.six_dim
    result = {
        "family": family,
        "params": {**fit.flatten(params), "a1": six.resolved_a1()},
        "points": points,
        "hard_checks_passed": bool(hard_ok),
    }
    _emit(_dump(result), args.out)
    return EXIT_OK if hard_ok else EXIT_CHECK


# --- sweep ------------------------------------------------------------------


def _fmt(value) -> str:
    return "" if value is None else format(value, ".12g")


def sweep_csv(rows: list[models.SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        rep = row.report.as_dict()
        writer.writerow([_fmt(row.r)] + [_fmt(rep[k]) for k in SWEEP_HEADER[1:]])
    return buf.getvalue()


def read_sweep_csv(text: str) -> list[dict]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != SWEEP_HEADER:
        raise ValueError(f"unexpected sweep header {header}")
    return [{k: (float(v) if v != "" else None) for k, v in zip(header, row)} for row in reader]


def rows_to_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for rec in records:
        writer.writerow([_fmt(rec[k]) for k in SWEEP_HEADER])
    return buf.getvalue()


def _grid(spec) -> list[float]:
    if spec is None:
        spec = {"start": 0.0, "stop": 1.0, "num": 101}
    if isinstance(spec, list):
        return [float(x) for x in spec]
    start, stop, num = spec.get("start", 0.0), spec.get("stop", 1.0), spec["num"]
    if num == 1:
        return [float(start)]
    # exact endpoints, evenly spaced interior
    return [float(x) for x in np.linspace(start, stop, num)]


def cmd_sweep(args) -> int:
    doc, _ = load_config("sweep", args.config)
    _, params = _model_params(doc)
    try:
        rows = models.sweep_r(params, _grid(doc.get("grid")), rederive_a1=doc.get("rederive_a1", False))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    text = sweep_csv(rows)
    out = args.out or doc.get("out")
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --- fit --------------------------------------------------------------------


def cmd_fit(args) -> int:
    doc, base = load_config("fit", args.config)
    if args.config is None:
        raise ConfigError("fit needs --config with a targets entry")
    problem_doc = {k: v for k, v in doc.items() if k != "out"}
    problem_doc["targets"] = _targets(doc["targets"], base)
    problem_doc["seed"] = _resolve_seed(args.seed, doc)
    if args.budget is not None:
        problem_doc["budget"] = args.budget
    try:
        problem = fit.problem_from_json(problem_doc)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    try:
        result = fit.fit(problem)
    except fit.FitError as exc:
        print(f"infeasible fit: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    _emit(result.to_json(), args.out or doc.get("out"))
    return EXIT_OK if result.ordering else EXIT_CHECK


# --- classical --------------------------------------------------------------


def cmd_classical(args) -> int:
    doc, base = load_config("classical", args.config)
    seed = _resolve_seed(args.seed, doc)
    suites = doc.get("suites", ["lemma", "theorem", "feasibility"])
    try:
        sampler = classical.SamplerConfig(**{k: tuple(v) if isinstance(v, list) else v
                                             for k, v in doc.get("sampler", {}).items()})
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    result, ok = {"seed": seed}, True
    try:
        if "lemma" in suites:
            rep = classical.lemma_suite(doc.get("lemma_trials", 100_000), seed)
            result["lemma"] = rep.as_dict()
            ok &= rep.counterexamples == 0
        if "theorem" in suites:
            rep = classical.theorem_suite(doc.get("theorem_trials", 100_000), seed, sampler)
            result["theorem"] = rep.as_dict()
            ok &= rep.counterexamples == 0
    except classical.SamplerExhausted as exc:
        result["theorem"] = {**exc.partial.as_dict(), "error": str(exc)}
        sys.stdout.write(_dump(result))
        return EXIT_SAMPLER
    if "feasibility" in suites:
        feas = doc.get("feasibility", {})
        targets = _targets(feas["targets"], base) if "targets" in feas else classical.TABLE2
        budget = args.budget or feas.get("budget", 1_000_000)
        if "constraints" in feas:
            constraints = [classical.IndependenceConstraint(c["events"], c.get("given")) for c in feas["constraints"]]
        else:
            constraints = classical.table2_independence()
        try:
            free = classical.feasibility_search(targets, (), seed, budget)
            held = classical.feasibility_search(targets, constraints, seed, budget)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        result["feasibility"] = {
            "without_independence": _feasibility_dict(free),
            "with_independence": _feasibility_dict(held),
            "realizable_without": free.best_residual <= 1e-6,
            "unrealizable_with": held.best_residual >= 0.01,
        }
        ok &= free.best_residual <= 1e-6 and held.best_residual >= 0.01
    result["passed"] = bool(ok)
    _emit(_dump(result), args.out)
    return EXIT_OK if ok else EXIT_CHECK


def _feasibility_dict(res: classical.FeasibilityResult) -> dict:
    return {
        "best_residual": res.best_residual,
        "residuals": res.residuals,
        "evaluations": res.evaluations,
        "starts": res.starts,
        "atoms": res.best_space.atom_table(),
    }


# --- witness ----------------------------------------------------------------


def cmd_witness(args) -> int:
    doc, _ = load_config("witness", args.config)
    try:
        report = models.witness_report(doc.get("c2", 0.4), doc.get("w", 0.1))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _emit(_dump(report), args.out)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "classical": cmd_classical,
    "witness": cmd_witness,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlcause", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output path")
        p.add_argument("--seed", type=int, help="random seed (fallback: $QLCAUSE_SEED, then 0)")
        p.add_argument("--budget", type=int, help="evaluation budget")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is not None and args.seed < 0 or args.budget is not None and args.budget <= 0:
        print("--seed must be >= 0 and --budget > 0", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
