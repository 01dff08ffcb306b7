"""Kolmogorovian probability over the atoms of n binary events.

A space is a probability vector over the ``2**n`` atoms (full conjunctions
of literals). Atoms are ordered first-label-major with "true" before
"false", so for labels ``("a", "b", "d")`` the order is
``abd, ab~d, a~bd, a~b~d, ~abd, ~ab~d, ~a~bd, ~a~b~d``.

Events are written as strings of labels, a ``~`` negating the next label:
``"ab"`` is a and b, ``"a~d"`` is a and not d.
"""

from __future__ import annotations

import enum
import itertools
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np
from scipy.optimize import least_squares, minimize

ATOM_SUM_TOL = 1e-12
# Guard band on strict inequalities; closer than this counts as equality.
BOUNDARY_TOL = 1e-12


class ClassicalError(ValueError):
    pass


class ZeroProbabilityCondition(ClassicalError):
    def __init__(self, given):
        super().__init__(f"conditioning event {given} has zero probability")


class SamplerExhausted(RuntimeError):
    def __init__(self, redraws: int):
        super().__init__(f"no admissible space after {redraws} redraws")
        self.redraws = redraws


_LITERAL = re.compile(r"(~?)([A-Za-z])")


@dataclass(frozen=True)
class EventExpr:
    """Conjunction of literals; labels not mentioned are free."""

    literals: tuple[tuple[str, bool], ...]

    @classmethod
    def parse(cls, text: Union[str, "EventExpr"]) -> "EventExpr":
        if isinstance(text, EventExpr):
            return text
        return _parse(text)

    @classmethod
    def _from_text(cls, text: str) -> "EventExpr":
        text = text.replace(" ", "")
        pos, lits = 0, {}
        for m in _LITERAL.finditer(text):
            if m.start() != pos:
                break
            label, value = m.group(2), not m.group(1)
            if lits.get(label, value) != value:
                raise ClassicalError(f"event {text!r} contains a label and its negation")
            lits[label] = value
            pos = m.end()
        if pos != len(text) or not lits:
            raise ClassicalError(f"cannot parse event {text!r}")
        return cls(tuple(sorted(lits.items())))

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(label for label, _ in self.literals)

    def __str__(self) -> str:
        return "".join(("" if v else "~") + k for k, v in self.literals)


Event = Union[str, EventExpr]

_parse = lru_cache(maxsize=4096)(EventExpr._from_text)


@lru_cache(maxsize=4096)
def _mask(labels: tuple[str, ...], event: Event) -> np.ndarray:
    """0/1 weights over atoms selecting ``event``."""
    event = EventExpr.parse(event)
    n = len(labels)
    truth = np.array(list(itertools.product([True, False], repeat=n)), dtype=bool).reshape(-1, n)
    keep = np.ones(2**n, dtype=bool)
    for label, value in event.literals:
        if label not in labels:
            raise ClassicalError(f"unknown event label {label!r}; space has {labels}")
        keep &= truth[:, labels.index(label)] == value
    weights = keep.astype(float)
    weights.setflags(write=False)
    return weights


@dataclass(frozen=True, eq=False)
class ClassicalSpace:
    labels: tuple[str, ...]
    atoms: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        atoms = np.array(self.atoms, dtype=float)
        if len(set(labels)) != len(labels) or not labels:
            raise ClassicalError(f"labels must be distinct and non-empty: {labels}")
        if atoms.shape != (2 ** len(labels),):
            raise ClassicalError(f"expected {2 ** len(labels)} atoms, got shape {atoms.shape}")
        if not np.all(np.isfinite(atoms)) or atoms.min() < 0:
            raise ClassicalError("atoms must be finite and nonnegative")
        if abs(atoms.sum() - 1.0) > ATOM_SUM_TOL:
            raise ClassicalError(f"atoms sum to {atoms.sum()!r}, not 1")
        atoms.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def uniform(cls, labels: Sequence[str]) -> "ClassicalSpace":
        n = len(labels)
        return cls(tuple(labels), np.full(2**n, 1.0 / 2**n))

    def atom_table(self) -> dict[str, float]:
        out = {}
        for bits, p in zip(itertools.product([True, False], repeat=len(self.labels)), self.atoms):
            out["".join(("" if b else "~") + k for k, b in zip(self.labels, bits))] = float(p)
        return out


def probability(space: ClassicalSpace, event: Event) -> float:
    return float(space.atoms @ _mask(space.labels, event))


@lru_cache(maxsize=4096)
def _conjoin_cached(event: Event, given: Event) -> Optional[EventExpr]:
    return _conjoin(EventExpr.parse(event), EventExpr.parse(given))


def _conjoin(a: EventExpr, b: EventExpr) -> Optional[EventExpr]:
    lits = dict(a.literals)
    for label, value in b.literals:
        if lits.get(label, value) != value:
            return None
        lits[label] = value
    return EventExpr(tuple(sorted(lits.items())))


def conditional(space: ClassicalSpace, event: Event, given: Event) -> float:
    p_given = probability(space, given)
    if p_given <= 0.0:
        raise ZeroProbabilityCondition(given)
    both = _conjoin_cached(event, given)
    return 0.0 if both is None else probability(space, both) / p_given


def explaining_away_space() -> ClassicalSpace:
    """Hand-built space where a and b each raise p(d) but a-and-b lowers it."""
    return ClassicalSpace(("a", "b", "d"), np.array([0.02, 0.08, 0.28, 0.10, 0.18, 0.05, 0.02, 0.27]))


@dataclass(frozen=True)
class LemmaCheck:
    """Joint event lowering d versus joint event being rarer under d.

    ``joint_lowers_d`` is ``p(d|ab) < p(d)``; ``joint_rarer_given_d`` is
    ``p(ab|d) < p(ab|~d)``. Classically they are equivalent; ``boundary``
    marks cases within the guard band of equality, which say nothing.
    """

    joint_lowers_d: bool
    joint_rarer_given_d: bool
    equivalent: bool
    boundary: bool
    p_d: float
    p_d_given_joint: float
    p_joint_given_d: float
    p_joint_given_not_d: float


def check_lemma(space: ClassicalSpace, a: str = "a", b: str = "b", d: str = "d") -> LemmaCheck:
    joint = f"{a}{b}"
    p_d = probability(space, d)
    if not 0.0 < p_d < 1.0:
        raise ClassicalError(f"p({d}) must lie strictly inside (0, 1), got {p_d}")
    if probability(space, joint) <= 0.0:
        raise ZeroProbabilityCondition(joint)
    p_d_joint = conditional(space, d, joint)
    p_joint_d = conditional(space, joint, d)
    p_joint_nd = conditional(space, joint, f"~{d}")
    boundary = abs(p_d_joint - p_d) <= BOUNDARY_TOL or abs(p_joint_d - p_joint_nd) <= BOUNDARY_TOL
    lhs = p_d_joint < p_d
    rhs = p_joint_d < p_joint_nd
    return LemmaCheck(lhs, rhs, lhs == rhs, boundary, p_d, p_d_joint, p_joint_d, p_joint_nd)


def is_destructive_pattern(space: ClassicalSpace, a: str = "a", b: str = "b", d: str = "d") -> bool:
    """Each cause raises p(d) strictly while the joint cause lowers it strictly."""
    p_d = probability(space, d)
    return (
        conditional(space, d, a) > p_d + BOUNDARY_TOL
        and conditional(space, d, b) > p_d + BOUNDARY_TOL
        and conditional(space, d, a + b) < p_d - BOUNDARY_TOL
    )


def random_space(rng: np.random.Generator, labels: Sequence[str] = ("a", "b", "d")) -> ClassicalSpace:
    """Uniform draw from the atom simplex (normalized exponentials)."""
    e = rng.standard_exponential(2 ** len(labels))
    return ClassicalSpace(tuple(labels), e / e.sum())


@dataclass(frozen=True)
class SamplerConfig:
    """Draw ranges for the constrained sampler.

    ``p(x|~d)`` is drawn as ``ratio * p(x|d)`` with ``ratio`` from
    ``not_d_ratio``; a ratio of 1 makes the cause uninformative, which the
    strictness check rejects.
    """

    p_d: tuple[float, float] = (0.0, 1.0)
    p_a_given_d: tuple[float, float] = (0.0, 1.0)
    p_b_given_d: tuple[float, float] = (0.0, 1.0)
    not_d_ratio: tuple[float, float] = (0.0, 1.0)
    max_redraws: int = 10_000

    def __post_init__(self):
        for name in ("p_d", "p_a_given_d", "p_b_given_d"):
            lo, hi = getattr(self, name)
            if not (0.0 <= lo <= hi <= 1.0) or lo == hi and lo in (0.0, 1.0):
                raise ClassicalError(f"{name} range {lo, hi} must lie within (0, 1)")
        lo, hi = self.not_d_ratio
        if not 0.0 <= lo <= hi <= 1.0:
            raise ClassicalError(f"not_d_ratio range {lo, hi} must lie within [0, 1]")
        if self.max_redraws <= 0:
            raise ClassicalError("max_redraws must be positive")


def _uniform_open(rng: np.random.Generator, lo: float, hi: float) -> float:
    x = rng.uniform(lo, hi)
    while x <= 0.0 or x >= 1.0:
        x = rng.uniform(lo, hi)
    return x


def constrained_atoms(p_d, p_a_d, p_b_d, p_a_nd, p_b_nd) -> Optional[np.ndarray]:
    """Atoms over (a, b, d) with a, b independent and independent given d.

    The joint under ``~d`` is solved from unconditional independence; returns
    ``None`` when it falls outside the Fréchet bounds.
    """
    p_a = p_a_d * p_d + p_a_nd * (1 - p_d)
    p_b = p_b_d * p_d + p_b_nd * (1 - p_d)
    ab_d = p_a_d * p_b_d
    ab_nd = (p_a * p_b - ab_d * p_d) / (1 - p_d)
    if not max(0.0, p_a_nd + p_b_nd - 1.0) <= ab_nd <= min(p_a_nd, p_b_nd):
        return None
    given_d = [ab_d, p_a_d - ab_d, p_b_d - ab_d, 1 - p_a_d - p_b_d + ab_d]
    given_nd = [ab_nd, p_a_nd - ab_nd, p_b_nd - ab_nd, 1 - p_a_nd - p_b_nd + ab_nd]
    atoms = np.empty(8)
    atoms[0::2] = np.multiply(given_d, p_d)
    atoms[1::2] = np.multiply(given_nd, 1 - p_d)
    if atoms.min() < 0:
        return None
    return atoms / atoms.sum()


def premises_hold(space: ClassicalSpace, tol: float = BOUNDARY_TOL) -> dict[str, bool]:
    p = lambda e: probability(space, e)  # noqa: E731
    c = lambda e, g: conditional(space, e, g)  # noqa: E731
    return {
        "independent": abs(p("ab") - p("a") * p("b")) <= tol,
        "independent_given_d": abs(c("ab", "d") - c("a", "d") * c("b", "d")) <= tol,
        "a_raises_d": c("d", "a") > p("d") + tol,
        "b_raises_d": c("d", "b") > p("d") + tol,
    }


def sample_constrained_space(seed, config: SamplerConfig = SamplerConfig()) -> ClassicalSpace:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    for _ in range(config.max_redraws):
        p_d = _uniform_open(rng, *config.p_d)
        p_a_d = _uniform_open(rng, *config.p_a_given_d)
        p_b_d = _uniform_open(rng, *config.p_b_given_d)
        p_a_nd = p_a_d * rng.uniform(*config.not_d_ratio)
        p_b_nd = p_b_d * rng.uniform(*config.not_d_ratio)
        atoms = constrained_atoms(p_d, p_a_d, p_b_d, p_a_nd, p_b_nd)
        if atoms is None:
            continue
        space = ClassicalSpace(("a", "b", "d"), atoms)
        if all(premises_hold(space).values()):
            return space
    raise SamplerExhausted(config.max_redraws)


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    BOUNDARY = "boundary"
    NOT_APPLICABLE = "not-applicable"


def conjunction_theorem_trial(space: ClassicalSpace) -> Verdict:
    """Does the joint cause raise p(d) when each independent cause does?"""
    prem = premises_hold(space)
    if not (prem["independent"] and prem["independent_given_d"]):
        return Verdict.NOT_APPLICABLE
    p_d = probability(space, "d")
    p_d_ab = conditional(space, "d", "ab")
    if abs(p_d_ab - p_d) <= BOUNDARY_TOL:
        return Verdict.BOUNDARY
    if not (prem["a_raises_d"] and prem["b_raises_d"]):
        return Verdict.NOT_APPLICABLE
    return Verdict.HOLDS if p_d_ab > p_d else Verdict.VIOLATED


# ---------------------------------------------------------------------------
# feasibility search


class BudgetExhausted(Exception):
    pass


@dataclass(frozen=True)
class TargetTable:
    """Probability targets keyed ``p_<event>`` or ``p_<event>_<given>``."""

    targets: Mapping[str, float]
    weights: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name, value in self.targets.items():
            if not 0.0 <= value <= 1.0:
                raise ClassicalError(f"target {name} = {value} outside [0, 1]")
            parse_target_name(name)
        for name, w in self.weights.items():
            if name not in self.targets:
                raise ClassicalError(f"weight given for unknown target {name!r}")
            if w < 0:
                raise ClassicalError(f"weight for {name} is negative")

    def weight(self, name: str) -> float:
        return float(self.weights.get(name, 1.0))

    @classmethod
    def from_json(cls, doc) -> "TargetTable":
        if isinstance(doc, cls):
            return doc
        if "targets" in doc:
            extra = set(doc) - {"targets", "weights"}
            if extra:
                raise ClassicalError(f"unknown keys in target table: {sorted(extra)}")
            return cls(dict(doc["targets"]), dict(doc.get("weights", {})))
        return cls(dict(doc))


def parse_target_name(name: str) -> tuple[EventExpr, Optional[EventExpr]]:
    parts = name.split("_")
    if parts[0] != "p" or len(parts) not in (2, 3):
        raise ClassicalError(f"target name {name!r} must look like p_<event> or p_<event>_<given>")
    event = EventExpr.parse(parts[1])
    given = EventExpr.parse(parts[2]) if len(parts) == 3 else None
    return event, given


# Averaged survey answers: prior, each single symptom, all three together.
TABLE2 = TargetTable({"p_d": 0.57, "p_d_a": 0.69, "p_d_b": 0.63, "p_d_c": 0.73, "p_d_abc": 0.55})


@dataclass(frozen=True)
class IndependenceConstraint:
    """Mutual independence of ``events`` (every subset of two or more),
    optionally conditional on ``given``."""

    events: str
    given: Optional[str] = None

    def subsets(self) -> list[str]:
        labels = [str(EventExpr.parse(x)) for x in self.events]
        return ["".join(s) for k in range(2, len(labels) + 1) for s in itertools.combinations(labels, k)]


def table2_independence() -> list[IndependenceConstraint]:
    return [IndependenceConstraint("abc"), IndependenceConstraint("abc", "d")]


class _Residuals:
    """Vector of weighted target violations and independence violations.

    Independence enters as ``p(S|g) / prod_x p(x|g) - 1``, the product-form
    (bilinear) gap scaled by the product of marginals. Unscaled gaps can be
    driven to zero by shrinking the marginals, which would make the
    constraint vacuous.
    """

    def __init__(self, targets: TargetTable, constraints: Sequence[IndependenceConstraint]):
        labels = set()
        self.terms = []
        for name, value in targets.targets.items():
            event, given = parse_target_name(name)
            labels |= event.labels | (given.labels if given else set())
            self.terms.append((name, event, given, float(value), targets.weight(name)))
        self.constraints = []
        for con in constraints:
            g = EventExpr.parse(con.given) if con.given else None
            labels |= set(con.events) | (g.labels if g else set())
            for subset in con.subsets():
                self.constraints.append((EventExpr.parse(subset), g))
        self.labels = tuple(sorted(labels))
        self._events: dict[EventExpr, int] = {}
        one = self._col(None)
        num, den, self.target, self.weight = [], [], [], []
        for _, e, g, v, w in self.terms:
            num.append(self._col(_conjoin(e, g) if g else e))
            den.append(self._col(g) if g else one)
            self.target.append(v)
            self.weight.append(w)
        self.num, self.den = np.array(num, dtype=int), np.array(den, dtype=int)
        self.target, self.weight = np.array(self.target), np.array(self.weight)
        width = max((len(s.literals) for s, _ in self.constraints), default=0)
        joint, given, singles = [], [], []
        for subset, g in self.constraints:
            joint.append(self._col(_conjoin(subset, g) if g else subset))
            given.append(self._col(g) if g else one)
            cols = [self._col(_conjoin(EventExpr((lit,)), g) if g else EventExpr((lit,)))
                    for lit in subset.literals]
            singles.append(cols + [-1] * (width - len(cols)))
        self.joint, self.given = np.array(joint, dtype=int), np.array(given, dtype=int)
        self.singles = np.array(singles, dtype=int).reshape(len(joint), width)
        order = sorted(self._events, key=self._events.get)
        self.matrix = np.stack(
            [np.ones(2 ** len(self.labels)) if e is None else _mask(self.labels, e) for e in order],
            axis=1,
        )
        self.size = len(self.num) + len(self.joint)
        self._pad = self.singles < 0

    def _col(self, e: Optional[EventExpr]) -> int:
        return self._events.setdefault(e, len(self._events))

    def __call__(self, atoms: np.ndarray) -> np.ndarray:
        """Residuals for one atom vector, or one row per row of a 2-d batch."""
        batch = np.atleast_2d(atoms)
        p = np.ones((batch.shape[0], self.matrix.shape[1] + 1))  # last column pads short subsets
        p[:, :-1] = batch @ self.matrix
        fit = self.weight * (p[:, self.num] / p[:, self.den] - self.target)
        if self.joint.size:
            g = p[:, self.given]
            marg = p[:, self.singles] / g[:, :, None]
            marg[:, self._pad] = 1.0
            gap = (p[:, self.joint] / g) / marg.prod(axis=2) - 1.0
            fit = np.concatenate([fit, gap], axis=1)
        return fit if np.ndim(atoms) == 2 else fit[0]


@dataclass
class FeasibilityResult:
    best_residual: float
    best_space: ClassicalSpace
    residuals: dict[str, float]
    evaluations: int
    starts: int


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


class _CountedResiduals:
    """Budgeted residual evaluations that remember the best point seen."""

    def __init__(self, res: _Residuals, budget: int):
        self.res, self.budget = res, budget
        self.evals, self.best, self.best_z = 0, math.inf, None

    def batch(self, z: np.ndarray) -> np.ndarray:
        if self.evals + z.shape[0] > self.budget:
            raise BudgetExhausted
        self.evals += z.shape[0]
        r = self.res(_softmax(z))
        worst = np.abs(r).max(axis=1) if r.shape[1] else np.zeros(z.shape[0])
        worst[~np.isfinite(worst)] = np.inf
        k = int(np.argmin(worst))
        if worst[k] < self.best:
            self.best, self.best_z = float(worst[k]), z[k].copy()
        return np.where(np.isfinite(r), r, 1e3)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return self.batch(z[None, :])[0]

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        """Forward differences, all n + 1 points in one batch."""
        h = 1.5e-8 * np.maximum(1.0, np.abs(z))
        pts = np.vstack([z, z + np.diag(h)])
        r = self.batch(pts)
        return ((r[1:] - r[0]) / h[:, None]).T


def feasibility_search(
    targets: TargetTable,
    constraints: Sequence[IndependenceConstraint] = (),
    seed: int = 0,
    budget: int = 1_000_000,
    stop_below: float = 1e-12,
) -> FeasibilityResult:
    """Multi-start minimization of the max-abs violation over the atom simplex.

    Atoms are ``softmax(z)`` so every iterate is a valid space. Each start
    runs a least-squares descent and then a minimax polish (epigraph form);
    the best point ever evaluated is returned. Every residual evaluation,
    including finite-difference probes, counts against ``budget``.
    Deterministic for a given seed and budget.
    """
    if budget <= 0:
        raise ClassicalError("budget must be positive")
    res = _Residuals(targets, constraints)
    n = 2 ** len(res.labels)
    rng = np.random.default_rng(seed)
    f = _CountedResiduals(res, budget)
    starts = 0
    try:
        while f.best > stop_below:
            starts += 1
            z0 = rng.normal(scale=1.5, size=n)
            f(z0)
            if not res.size:
                break
            sol = least_squares(f, z0, jac=f.jacobian, method="trf", xtol=1e-15, ftol=1e-15,
                                gtol=1e-15, max_nfev=50 * n)
            if f.best <= stop_below:
                break
            _minimax_polish(f, sol.x)
    except BudgetExhausted:
        pass
    if f.best_z is None:
        raise ClassicalError("budget too small to evaluate a single point")
    atoms = _softmax(f.best_z)
    space = ClassicalSpace(res.labels, atoms)
    names = [t[0] for t in res.terms] + [
        f"indep_{s}" + (f"|{g}" if g else "") for s, g in res.constraints
    ]
    return FeasibilityResult(f.best, space, dict(zip(names, map(float, res(atoms)))), f.evals, starts)


def _minimax_polish(f: _CountedResiduals, z0: np.ndarray) -> None:
    """min t subject to -t <= r_i(z) <= t, by SLSQP."""
    cache: dict = {}

    def r(x):
        key = ("r", x[:-1].tobytes())
        if key not in cache:
            cache[key] = f(x[:-1])
        return cache[key]

    def jr(x):
        key = ("j", x[:-1].tobytes())
        if key not in cache:
            cache[key] = f.jacobian(x[:-1])
        return cache[key]

    def ones(x):
        return np.ones((f.res.size, 1))

    x0 = np.append(z0, np.abs(f(z0)).max())
    cons = [
        {"type": "ineq", "fun": lambda x: x[-1] - r(x), "jac": lambda x: np.hstack([-jr(x), ones(x)])},
        {"type": "ineq", "fun": lambda x: x[-1] + r(x), "jac": lambda x: np.hstack([jr(x), ones(x)])},
    ]
    objective_grad = np.zeros(x0.size)
    objective_grad[-1] = 1.0
    minimize(lambda x: x[-1], x0, jac=lambda x: objective_grad, method="SLSQP",
             constraints=cons, options={"maxiter": 300, "ftol": 1e-16})


# ---------------------------------------------------------------------------
# property suites


@dataclass
class SuiteReport:
    trials: int = 0
    counterexamples: int = 0
    boundary: int = 0
    skipped: int = 0
    extra: dict = field(default_factory=dict)
    dumps: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "counterexamples": self.counterexamples,
            "boundary": self.boundary,
            "skipped": self.skipped,
            **self.extra,
            "counterexample_dumps": self.dumps,
        }


def _worker_seeds(seed: int, trials: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, workers)
    base, rem = divmod(trials, workers)
    return [(seed + i, base + (i < rem)) for i in range(workers)]


def lemma_suite(trials: int = 100_000, seed: int = 0, workers: int = 1, max_dumps: int = 10) -> SuiteReport:
    """Random spaces: the two lemma inequalities agree off the boundary, and
    the joint being likelier under d never coexists with the lowering pattern."""
    out = SuiteReport(extra={"pattern_despite_warning": 0})
    for wseed, count in _worker_seeds(seed, trials, workers):
        rng = np.random.default_rng(wseed)
        for _ in range(count):
            space = random_space(rng)
            out.trials += 1
            check = check_lemma(space)
            if check.boundary:
                out.boundary += 1
                continue
            if not check.equivalent:
                out.counterexamples += 1
                if len(out.dumps) < max_dumps:
                    out.dumps.append(space.atoms.tolist())
            if check.p_joint_given_d > check.p_joint_given_not_d and is_destructive_pattern(space):
                out.extra["pattern_despite_warning"] += 1
                out.counterexamples += 1
                if len(out.dumps) < max_dumps:
                    out.dumps.append(space.atoms.tolist())
    return out


def theorem_suite(
    trials: int = 100_000, seed: int = 0, config: SamplerConfig = SamplerConfig(), workers: int = 1,
    max_dumps: int = 10,
) -> SuiteReport:
    """Constrained samples: joint cause raises p(d) and p(ab|d) > p(ab)."""
    out = SuiteReport()
    for wseed, count in _worker_seeds(seed, trials, workers):
        rng = np.random.default_rng(wseed)
        for _ in range(count):
            try:
                space = sample_constrained_space(rng, config)
            except SamplerExhausted as exc:
                exc.partial = out
                raise
            out.trials += 1
            verdict = conjunction_theorem_trial(space)
            if verdict is Verdict.BOUNDARY:
                out.boundary += 1
            elif verdict is Verdict.NOT_APPLICABLE:
                out.skipped += 1
            raised = conditional(space, "ab", "d") > probability(space, "ab")
            if verdict is Verdict.VIOLATED or (verdict is Verdict.HOLDS and not raised):
                out.counterexamples += 1
                if len(out.dumps) < max_dumps:
                    out.dumps.append(space.atoms.tolist())
    return out
