"""Fit model parameters to named probability targets.

Free parameters are searched in transformed coordinates: bounded scalars
through a logistic map onto ``[lo, hi]``, angles (units of pi) wrapped onto
``[0, 2)``. The search is multi-start Nelder-Mead seeded from the best of a
batch of random draws; every objective evaluation counts against the
budget and the best point ever evaluated is returned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Literal, Mapping, Optional

import numpy as np
from scipy.optimize import minimize
from scipy.special import logit

from .classical import TargetTable
from .models import (
    GeneralizedBlockParams,
    ModelError,
    ProbabilityReport,
    ThreeCauseParams,
    TwoCauseParams,
    build,
    evaluate_report,
    fast_report,
    printed_three_cause,
    printed_two_cause,
)

Family = Literal["two_cause", "three_cause", "three_cause_generalized"]
FAMILIES = ("two_cause", "three_cause", "three_cause_generalized")

ANGLES = frozenset({
    "theta", "alpha1", "theta2", "alpha2",
    "beta1", "gamma1", "beta2", "gamma2", "beta3", "gamma3", "delta",
})
SCALAR_BOUNDS = {"r": (0.0, 1.0), "r2": (0.0, 1.0), "a1": (0.0, 1.0),
                 "a3": (0.0, 1.0), "a4": (0.0, 1.0), "a5": (0.0, 1.0)}
BLOCK_NAMES = ("beta1", "gamma1", "beta2", "gamma2", "beta3", "gamma3", "delta")

DEFAULT_FREE = {
    "two_cause": ("r", "theta", "a3", "a4", "a5", "alpha1"),
    "three_cause": ("r", "a3", "a4", "a5", "alpha1", "r2", "theta2", "alpha2"),
    "three_cause_generalized": (
        "r", "theta", "a3", "a4", "a5", "alpha1", "r2", "theta2", "alpha2",
        "beta1", "gamma1", "beta2", "gamma2", "gamma3", "delta",
    ),
}

# Value returned for parameter points that do not build a model.
INVALID_PENALTY = 10.0
# Objective charge for a target whose model value is undefined.
UNDEFINED_PENALTY = 1.0


class FitError(ValueError):
    pass


def _logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def report_field(name: str, family: str) -> str:
    """Map a target name (``p_d_a``, ``p_d_abc``, ...) to a report field."""
    joint = "ab" if family == "two_cause" else "abc"
    aliases = {
        "p_d": "p_d", "p_a": "p_a", "p_b": "p_b", "p_c": "p_c",
        "p_d_a": "p_d_given_a", "p_d_b": "p_d_given_b", "p_d_c": "p_d_given_c",
        f"p_d_{joint}": "p_d_given_joint", f"p_{joint}": "p_joint",
        f"p_{joint}_d": "p_joint_given_d", f"p_{joint}_~d": "p_joint_given_not_d",
    }
    if name in aliases:
        return aliases[name]
    if name in ProbabilityReport.__dataclass_fields__:
        return name
    raise FitError(f"target {name!r} has no counterpart in the {family} model")


def family_of(params) -> str:
    if isinstance(params, TwoCauseParams):
        return "two_cause"
    six = params.six_dim
    return "three_cause_generalized" if six.blocks is not None else "three_cause"


def objective(params, targets: TargetTable, independence_weight: float = 0.0) -> float:
    """Weighted RMS error between report fields and targets.

    Undefined report values are charged ``UNDEFINED_PENALTY``. With
    ``independence_weight`` > 0, ``|p(ab) - p(a) p(b)|`` times that weight is
    added (for fits where a1 is left free). Raises ``ModelError`` for
    parameters that do not build a model.
    """
    value = _rms(fast_report(params), targets, family_of(params))
    if independence_weight:
        six = params if isinstance(params, TwoCauseParams) else params.six_dim
        a1 = six.resolved_a1()
        # A, B diagonal: p(ab) = a1, p(a) = a1 + a3, p(b) = a1 + a4 + a5
        value += independence_weight * abs(a1 - (a1 + six.a3) * (a1 + six.a4 + six.a5))
    return value


def _rms(values: Mapping, targets: TargetTable, family: str) -> float:
    total_w = total = 0.0
    for name, target in targets.targets.items():
        w = targets.weight(name)
        got = values[report_field(name, family)]
        err = UNDEFINED_PENALTY if got is None else got - target
        total += w * err * err
        total_w += w
    return math.sqrt(total / total_w) if total_w > 0 else 0.0


def base_params(family: str):
    if family == "two_cause":
        return printed_two_cause()
    three = printed_three_cause()
    if family == "three_cause_generalized":
        return replace(three, six_dim=replace(three.six_dim, blocks=GeneralizedBlockParams()))
    return three


def flatten(params) -> dict:
    """Flat name -> value view (angles in units of pi)."""
    if isinstance(params, TwoCauseParams):
        six, extra = params, {}
    else:
        six = params.six_dim
        extra = {"r2": params.r2, "theta2": params.theta2, "alpha2": params.alpha2}
    out = {k: getattr(six, k) for k in ("r", "theta", "a3", "a4", "a5", "alpha1", "root_choice", "a1")}
    if six.blocks is not None:
        out.update({k: getattr(six.blocks, k) for k in BLOCK_NAMES})
    out.update(extra)
    return out


_SIX_KEYS = ("r", "theta", "a3", "a4", "a5", "alpha1", "root_choice", "a1")
_OUTER_KEYS = ("r2", "theta2", "alpha2")


def unflatten(family: str, values: Mapping):
    """Build a parameter record from a flat mapping over the family's base point."""
    unknown = set(values) - set(_SIX_KEYS) - set(BLOCK_NAMES) - set(_OUTER_KEYS)
    if unknown:
        raise FitError(f"unknown parameters: {sorted(unknown)}")
    if family == "two_cause" and set(values) & (set(_OUTER_KEYS) | set(BLOCK_NAMES)):
        raise FitError("two_cause family has no r2/theta2/alpha2 or block parameters")
    if family == "three_cause" and set(values) & set(BLOCK_NAMES):
        raise FitError("block parameters need the three_cause_generalized family")
    return _assemble(family, {**_BASE_FLAT[family], **values})


def _assemble(family: str, flat: Mapping):
    blocks = None
    if family == "three_cause_generalized":
        blocks = GeneralizedBlockParams(*(flat[k] for k in BLOCK_NAMES))
    six = TwoCauseParams(*(flat[k] for k in _SIX_KEYS), blocks)
    if family == "two_cause":
        return six
    return ThreeCauseParams(six, *(flat[k] for k in _OUTER_KEYS))


_BASE_FLAT = {f: flatten(base_params(f)) for f in FAMILIES}


@dataclass
class FitProblem:
    family: Family
    targets: TargetTable
    free: Mapping[str, Optional[tuple[float, float]]] = None
    fixed: Mapping = field(default_factory=dict)
    seed: int = 0
    budget: int = 100_000
    a1_mode: Literal["eliminate", "penalty"] = "eliminate"
    independence_weight: float = 10.0
    random_draws: int = 400
    starts: int = 20

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise FitError(f"unknown family {self.family!r}")
        if self.budget <= 0:
            raise FitError("budget must be positive")
        if self.a1_mode not in ("eliminate", "penalty"):
            raise FitError(f"unknown a1_mode {self.a1_mode!r}")
        if self.free is None:
            names = DEFAULT_FREE[self.family] + (("a1",) if self.a1_mode == "penalty" else ())
            self.free = {k: None for k in names}
        free = {}
        for name, bounds in dict(self.free).items():
            if name in ANGLES:
                free[name] = None
                continue
            if name not in SCALAR_BOUNDS:
                raise FitError(f"{name!r} cannot be a free parameter")
            lo, hi = SCALAR_BOUNDS[name] if bounds is None else map(float, bounds)
            if not SCALAR_BOUNDS[name][0] <= lo < hi <= SCALAR_BOUNDS[name][1]:
                raise FitError(f"bounds for {name} must satisfy {SCALAR_BOUNDS[name][0]} <= lo < hi <= "
                               f"{SCALAR_BOUNDS[name][1]}")
            free[name] = (lo, hi)
        self.free = free
        if "a1" in free and self.a1_mode != "penalty":
            raise FitError("a1 can only be free with a1_mode='penalty'")
        for name in self.targets.targets:
            report_field(name, self.family)
        unflatten(self.family, self.fixed)
        overlap = set(self.fixed) & set(free)
        if overlap:
            raise FitError(f"parameters both fixed and free: {sorted(overlap)}")

    @property
    def names(self) -> list[str]:
        return list(self.free)

    def roots(self) -> tuple[str, ...]:
        if self.a1_mode == "penalty" or "a1" in self.fixed or "root_choice" in self.fixed:
            return (self.fixed.get("root_choice", "large"),)
        return ("large", "small")

    def to_natural(self, z: np.ndarray) -> dict:
        out = {}
        for name, zi in zip(self.names, z.tolist()):
            bounds = self.free[name]
            if bounds is None:
                out[name] = zi % 2.0
            else:
                lo, hi = bounds
                out[name] = lo + (hi - lo) * _logistic(zi)
        return out

    def to_coords(self, natural: Mapping) -> np.ndarray:
        z = []
        for name in self.names:
            bounds, v = self.free[name], natural[name]
            if bounds is None:
                z.append(v % 2.0)
            else:
                lo, hi = bounds
                z.append(float(logit(np.clip((v - lo) / (hi - lo), 1e-9, 1 - 1e-9))))
        return np.array(z)

    def params(self, z: np.ndarray, root: str):
        values = {**_BASE_FLAT[self.family], **self.fixed}
        if self.a1_mode == "eliminate" and "root_choice" not in self.fixed:
            values["root_choice"] = root
        values.update(self.to_natural(z))
        return _assemble(self.family, values)

    def draw(self, rng: np.random.Generator) -> dict:
        out = {}
        for name in self.names:
            bounds = self.free[name]
            out[name] = float(rng.uniform(0.0, 2.0)) if bounds is None else float(rng.uniform(*bounds))
        return out

    def evaluate(self, z: np.ndarray, root: str) -> float:
        """Objective at transformed coordinates; invalid builds get ``INVALID_PENALTY``."""
        try:
            params = self.params(z, root)
            return objective(params, self.targets,
                             self.independence_weight if self.a1_mode == "penalty" else 0.0)
        except (ModelError, ArithmeticError, ValueError):
            return INVALID_PENALTY


@dataclass
class FitResult:
    family: str
    params: dict
    report: dict
    residuals: dict
    rmse: float
    max_abs: float
    ordering: bool
    evaluations: int
    objective: float
    random_best: float

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "report": self.report,
            "residuals": self.residuals,
            "rmse": self.rmse,
            "max_abs": self.max_abs,
            "ordering": self.ordering,
            "evaluations": self.evaluations,
            "objective": self.objective,
            "random_best": self.random_best,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"


class _Budget(Exception):
    pass


class _Tracker:
    def __init__(self, problem: FitProblem):
        self.problem = problem
        self.evals = 0
        self.best = (math.inf, None, None)
        self.limit = problem.budget

    def __call__(self, z: np.ndarray, root: str) -> float:
        if self.evals >= self.limit:
            raise _Budget
        self.evals += 1
        value = self.problem.evaluate(z, root)
        if value < self.best[0]:
            self.best = (value, np.array(z, dtype=float), root)
        return value


def random_baseline(problem: FitProblem, draws: int = 1000) -> float:
    """Best objective over ``draws`` feasible random parameter draws.

    Uses the same seed protocol as :func:`fit` (generator seeded with
    ``problem.seed``, roots alternating large/small).
    """
    rng = np.random.default_rng(problem.seed)
    roots = problem.roots()
    best = math.inf
    for k in range(draws):
        _, value = _feasible_draw(problem, rng, roots[k % len(roots)])
        best = min(best, value)
    return best


def _feasible_draw(problem: FitProblem, rng: np.random.Generator, root: str, attempts: int = 1000):
    for _ in range(attempts):
        z = problem.to_coords(problem.draw(rng))
        value = problem.evaluate(z, root)
        if value < INVALID_PENALTY:
            return z, value
    raise FitError(f"no feasible start after {attempts} attempts")


def fit(problem: FitProblem) -> FitResult:
    rng = np.random.default_rng(problem.seed)
    roots = problem.roots()
    track = _Tracker(problem)
    candidates = []
    try:
        for k in range(min(problem.random_draws, problem.budget)):
            root = roots[k % len(roots)]
            z, _ = _feasible_draw(problem, rng, root)
            candidates.append((track(z, root), k, z, root))
    except _Budget:
        pass
    random_best = min((c[0] for c in candidates), default=math.inf)
    candidates.sort(key=lambda c: (c[0], c[1]))
    chosen = candidates[: problem.starts]
    remaining = problem.budget - track.evals
    try:
        for i, (_, _, z0, root) in enumerate(chosen):
            share = remaining // max(1, len(chosen) - i)
            stop_at = track.evals + share
            remaining -= share
            _descend(track, z0, root, stop_at)
    except _Budget:
        pass
    value, z, root = track.best
    if z is None:
        raise FitError("no feasible start found")
    return _result(problem, z, root, track.evals, random_best)


def _descend(track: _Tracker, z0: np.ndarray, root: str, stop_at: int) -> None:
    """Nelder-Mead restarted from its own optimum until it stops improving."""
    z, value = z0, math.inf
    while track.evals < stop_at:
        left = stop_at - track.evals
        sol = minimize(lambda x: track(x, root), z, method="Nelder-Mead",
                       options={"maxfev": left, "xatol": 1e-12, "fatol": 1e-16, "adaptive": True})
        if not sol.fun < value - 1e-15:
            break
        z, value = sol.x, sol.fun


def _result(problem: FitProblem, z: np.ndarray, root: str, evaluations: int, random_best: float) -> FitResult:
    params = problem.params(z, root)
    report = evaluate_report(build(params))
    values = report.as_dict()
    residuals = {}
    for name, target in problem.targets.targets.items():
        got = values[report_field(name, problem.family)]
        residuals[name] = None if got is None else got - target
    finite = [abs(v) for v in residuals.values() if v is not None]
    flat = flatten(params)
    flat["a1"] = (params if isinstance(params, TwoCauseParams) else params.six_dim).resolved_a1()
    return FitResult(
        family=problem.family,
        params=flat,
        report=values,
        residuals=residuals,
        rmse=_rms(values, problem.targets, problem.family),
        max_abs=max(finite) if len(finite) == len(residuals) else UNDEFINED_PENALTY,
        ordering=ordering_matches(values, problem.targets, problem.family),
        evaluations=evaluations,
        objective=problem.evaluate(z, root),
        random_best=random_best,
    )


def ordering_matches(report: Mapping, targets: TargetTable, family: str) -> bool:
    """Each conditional target sits on the same side of p(d) in the model as in the targets.

    For the survey table this is p(d|abc) < p(d) < min(p(d|a), p(d|b), p(d|c)).
    """
    if "p_d" not in targets.targets or report.get("p_d") is None:
        return False
    prior_t, prior_m = targets.targets["p_d"], report["p_d"]
    checked = False
    for name, t in targets.targets.items():
        key = report_field(name, family)
        if not key.startswith("p_d_given"):
            continue
        got = report[key]
        if got is None or t == prior_t:
            return False
        if (t > prior_t) != (got > prior_m) or got == prior_m:
            return False
        checked = True
    return checked


def problem_from_json(doc: Mapping) -> FitProblem:
    """FitProblem from the JSON layout used by the command line (angles in units of pi)."""
    targets = TargetTable.from_json(doc["targets"])
    free = doc.get("free")
    if isinstance(free, list):
        free = {k: None for k in free}
    elif free is not None:
        free = {k: (None if v is None else tuple(v)) for k, v in free.items()}
    kwargs = {k: doc[k] for k in ("seed", "budget", "a1_mode", "independence_weight", "random_draws", "starts")
              if k in doc}
    return FitProblem(family=doc.get("family", "three_cause_generalized"), targets=targets, free=free,
                      fixed=dict(doc.get("fixed", {})), **kwargs)
