"""Two-cause (6-dim) and three-cause (12-dim) interference models.

Angles and phases held in parameter records are in units of pi (``1.25``
means ``1.25 * pi`` radians); they are converted exactly once, when the
matrices are built.

State amplitudes of the two-cause model, in basis order::

    sqrt(a1 r), e^{i pi theta} sqrt(a1 (1 - r)), sqrt(a3),
    -i sqrt(a4), -sqrt(a5), sqrt(1 - a1 - a3 - a4 - a5)

The three-cause model tensors this with ``(sqrt(r2), e^{i pi theta2} sqrt(1 - r2))``
and adds a cause acting only on that last qubit.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache
from typing import Literal, Optional, Sequence

import numpy as np

from . import linalg, quantum
from .quantum import ProjectorObservable, PureState, UndefinedConditional

RootChoice = Literal["small", "large"]

A2 = np.diag([1.0, 0.0]).astype(np.complex128)
B3 = np.diag([1.0, 1.0, 0.0]).astype(np.complex128)
C2 = A2
I2, I3 = linalg.identity(2), linalg.identity(3)

# Slack allowed on the normalization radicand before it counts as negative.
_RADICAND_SLACK = 1e-12


class ModelError(ValueError):
    """Parameters do not describe a valid model."""


@dataclass(frozen=True)
class GeneralizedBlockParams:
    """Direction/phase of each rank-1 block of D6 plus the phase on amplitude 4.

    Block k projects onto ``(cos(pi beta_k), e^{i pi gamma_k} sin(pi beta_k))``.
    The defaults give back the fixed D6 exactly; ``beta3=None`` means "use alpha1".
    """

    beta1: float = 0.25
    gamma1: float = 1.5
    beta2: float = 0.25
    gamma2: float = 0.5
    beta3: Optional[float] = None
    gamma3: float = 0.0
    delta: float = 1.5


@dataclass(frozen=True)
class TwoCauseParams:
    r: float = 0.5
    theta: float = 0.427
    a3: float = 0.15
    a4: float = 0.15
    a5: float = 0.1
    alpha1: float = 1.25
    root_choice: RootChoice = "large"
    a1: Optional[float] = None
    blocks: Optional[GeneralizedBlockParams] = None

    def resolved_a1(self) -> float:
        if self.a1 is not None:
            return float(self.a1)
        roots = solve_independence_a1(self.a3, self.a4, self.a5)
        return roots[-1] if self.root_choice == "large" else roots[0]


@dataclass(frozen=True)
class ThreeCauseParams:
    six_dim: TwoCauseParams = field(default_factory=lambda: TwoCauseParams(theta=1.5))
    r2: float = 0.5
    theta2: float = 0.48
    alpha2: float = 1.268


def printed_two_cause(r: float = 0.5, root_choice: RootChoice = "large") -> TwoCauseParams:
    """Parameter point used for the two-cause demonstration curve."""
    return TwoCauseParams(r=r, theta=0.427, a3=0.15, a4=0.15, a5=0.1, alpha1=1.25,
                          root_choice=root_choice)


def printed_three_cause(r: float = 0.01, root_choice: RootChoice = "large") -> ThreeCauseParams:
    """Reference three-cause parameter point (a4 tied to a3, theta = 1.5)."""
    six = TwoCauseParams(r=r, theta=1.5, a3=0.15, a4=0.15, a5=0.08, alpha1=0.75,
                         root_choice=root_choice)
    return ThreeCauseParams(six_dim=six, r2=0.5, theta2=0.48, alpha2=1.268)


def solve_independence_a1(a3: float, a4: float, a5: float) -> tuple[float, ...]:
    """Admissible roots of ``a1^2 + a1 (a3 + a4 + a5 - 1) + a3 (a4 + a5) = 0``.

    With A = diag(1,1,1,0,0,0) and B = diag(1,1,0,1,1,0) this is exactly
    ``p(ab) = p(a) p(b)``. Roots are returned ascending, restricted to
    ``0 < a1 < 1`` and ``a1 <= 1 - a3 - a4 - a5``.
    """
    if min(a3, a4, a5) < 0:
        raise ModelError("a3, a4, a5 must be nonnegative")
    s = a3 + a4 + a5
    if s >= 1:
        raise ModelError("a3 + a4 + a5 must be below 1")
    b = s - 1.0
    c = a3 * (a4 + a5)
    disc = b * b - 4.0 * c
    if disc < 0:
        raise ModelError(f"no real a1 makes A and B independent (discriminant {disc:.3g})")
    # numerically stable pair: b < 0 so -b + sqrt(disc) has no cancellation
    big = (-b + math.sqrt(disc)) / 2.0
    small = c / big if big > 0 else 0.0
    roots = []
    for a1 in sorted({small, big}):
        if 0.0 < a1 < 1.0 and a1 <= 1.0 - s + 1e-15:
            p_ab, p_a, p_b = a1, a1 + a3, a1 + a4 + a5
            if abs(p_ab - p_a * p_b) <= 1e-9:
                roots.append(a1)
    if not roots:
        raise ModelError(f"no admissible a1 root for a3={a3}, a4={a4}, a5={a5}")
    return tuple(roots)


def _block(beta: float, gamma: float) -> list:
    """|u><u| for u = (cos(pi beta), e^{i pi gamma} sin(pi beta))."""
    c, s = math.cos(math.pi * beta), math.sin(math.pi * beta)
    off = c * s * cmath.exp(1j * math.pi * gamma)
    return [[c * c, off.conjugate()], [off, s * s]]


def d6_matrix(alpha1: float, blocks: Optional[GeneralizedBlockParams] = None) -> np.ndarray:
    d = np.zeros((6, 6), dtype=np.complex128)
    if blocks is None:
        ca, sa = math.cos(math.pi * alpha1), math.sin(math.pi * alpha1)
        d[0:2, 0:2] = [[1, 1j], [-1j, 1]]
        d[2:4, 2:4] = [[1, -1j], [1j, 1]]
        d[4:6, 4:6] = [[2 * ca * ca, 2 * ca * sa], [2 * ca * sa, 2 * sa * sa]]
        return d / 2
    beta3 = alpha1 if blocks.beta3 is None else blocks.beta3
    d[0:2, 0:2] = _block(blocks.beta1, blocks.gamma1)
    d[2:4, 2:4] = _block(blocks.beta2, blocks.gamma2)
    d[4:6, 4:6] = _block(beta3, blocks.gamma3)
    return d


def d2_matrix(alpha2: float) -> np.ndarray:
    c, s = math.cos(math.pi * alpha2), math.sin(math.pi * alpha2)
    return np.array([[c * c, c * s], [c * s, s * s]], dtype=np.complex128)


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ModelError(f"{name} must lie in [0, 1], got {value}")


def psi6(params: TwoCauseParams) -> np.ndarray:
    p = params
    _check_unit("r", p.r)
    for name in ("a3", "a4", "a5"):
        if getattr(p, name) < 0:
            raise ModelError(f"{name} must be nonnegative")
    a1 = p.resolved_a1()
    if not 0.0 < a1 < 1.0:
        raise ModelError(f"a1 must lie in (0, 1), got {a1}")
    rest = 1.0 - a1 - p.a3 - p.a4 - p.a5
    if rest < -_RADICAND_SLACK:
        raise ModelError(f"amplitudes exceed unit norm (deficit {rest:.3g})")
    delta = 1.5 if p.blocks is None else p.blocks.delta
    phase4 = -1j if p.blocks is None else np.exp(1j * math.pi * delta)
    return np.array([
        math.sqrt(a1 * p.r),
        np.exp(1j * math.pi * p.theta) * math.sqrt(a1 * (1.0 - p.r)),
        math.sqrt(p.a3),
        phase4 * math.sqrt(p.a4),
        -math.sqrt(p.a5),
        math.sqrt(max(rest, 0.0)),
    ], dtype=np.complex128)


def psi2(r2: float, theta2: float) -> np.ndarray:
    _check_unit("r2", r2)
    return np.array([math.sqrt(r2), np.exp(1j * math.pi * theta2) * math.sqrt(1.0 - r2)])


@dataclass(frozen=True, eq=False)
class ModelInstance:
    dim: int
    A: ProjectorObservable
    B: Optional[ProjectorObservable]
    C: Optional[ProjectorObservable]
    D: ProjectorObservable
    state: PureState
    params: object = None
    joint: Optional[ProjectorObservable] = None

    def __post_init__(self):
        if self.joint is None:
            out = self.A
            for p in self.causes[1:]:
                out = out & p
            object.__setattr__(self, "joint", out)

    @property
    def causes(self) -> list[ProjectorObservable]:
        return [p for p in (self.A, self.B, self.C) if p is not None]


@lru_cache(maxsize=None)
def _cause_projectors(n_causes: int) -> tuple:
    """Validated (A, B, C, joint) for the 6-dim (2 causes) or 12-dim (3 causes) model."""
    if n_causes == 2:
        a = ProjectorObservable(linalg.kron(A2, I3), "a")
        b = ProjectorObservable(linalg.kron(I2, B3), "b")
        return a, b, None, a & b
    a = ProjectorObservable(linalg.kron_all(A2, I3, I2), "a")
    b = ProjectorObservable(linalg.kron_all(I2, B3, I2), "b")
    c = ProjectorObservable(linalg.kron_all(I2, I3, C2), "c")
    return a, b, c, a & b & c


def _state(psi) -> PureState:
    try:
        return PureState(psi)
    except ValueError as exc:
        raise ModelError(str(exc)) from None


def build_two_cause(params: TwoCauseParams) -> ModelInstance:
    a, b, _, joint = _cause_projectors(2)
    d = ProjectorObservable(d6_matrix(params.alpha1, params.blocks), "d")
    return ModelInstance(6, a, b, None, d, _state(psi6(params)), params, joint)


def build_three_cause(params: ThreeCauseParams) -> ModelInstance:
    six = params.six_dim
    a, b, c, joint = _cause_projectors(3)
    d = ProjectorObservable(
        linalg.kron(d6_matrix(six.alpha1, six.blocks), d2_matrix(params.alpha2)), "d"
    )
    psi = linalg.kron(psi6(six), psi2(params.r2, params.theta2))
    return ModelInstance(12, a, b, c, d, _state(psi), params, joint)


def build(params) -> ModelInstance:
    if isinstance(params, ThreeCauseParams):
        return build_three_cause(params)
    return build_two_cause(params)


@dataclass(frozen=True)
class ProbabilityReport:
    """Named probabilities of one model point; ``None`` marks an undefined value."""

    p_d: Optional[float]
    p_d_given_a: Optional[float]
    p_d_given_b: Optional[float]
    p_d_given_c: Optional[float]
    p_d_given_joint: Optional[float]
    p_joint_given_d: Optional[float]
    p_joint_given_not_d: Optional[float]
    p_a: Optional[float]
    p_b: Optional[float]
    p_c: Optional[float]
    p_joint: Optional[float]
    interference_a: Optional[float]

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def undefined(cls) -> "ProbabilityReport":
        return cls(**{f.name: None for f in fields(cls)})


def _maybe(fn, *args) -> Optional[float]:
    try:
        return fn(*args)
    except UndefinedConditional:
        return None


def evaluate_report(m: ModelInstance) -> ProbabilityReport:
    s, d = m.state, m.D
    joint = m.joint
    cond = quantum.conditional_probability
    return ProbabilityReport(
        p_d=quantum.born_probability(d, s),
        p_d_given_a=_maybe(cond, d, m.A, s),
        p_d_given_b=None if m.B is None else _maybe(cond, d, m.B, s),
        p_d_given_c=None if m.C is None else _maybe(cond, d, m.C, s),
        p_d_given_joint=_maybe(cond, d, joint, s),
        p_joint_given_d=_maybe(cond, joint, d, s),
        p_joint_given_not_d=_maybe(quantum.conditional_on_complement, joint, d, s),
        p_a=quantum.born_probability(m.A, s),
        p_b=None if m.B is None else quantum.born_probability(m.B, s),
        p_c=None if m.C is None else quantum.born_probability(m.C, s),
        p_joint=quantum.born_probability(joint, s),
        interference_a=quantum.ltp_interference(d, m.A, s),
    )


def with_r(params, r: float):
    if isinstance(params, ThreeCauseParams):
        return replace(params, six_dim=replace(params.six_dim, r=r))
    return replace(params, r=r)


def _fix_a1(params):
    if isinstance(params, ThreeCauseParams):
        six = params.six_dim
        return replace(params, six_dim=replace(six, a1=six.resolved_a1()))
    return replace(params, a1=params.resolved_a1())


@dataclass(frozen=True)
class SweepRow:
    r: float
    report: ProbabilityReport
    error: Optional[str] = None


def sweep_r(params, grid: Sequence[float], rederive_a1: bool = False) -> list[SweepRow]:
    """One report per grid value of ``r``, in grid order.

    By default a1 is resolved once from ``params`` and held fixed; with
    ``rederive_a1`` each point resolves its own a1. A point that fails to
    build yields an all-undefined report and the error message.
    """
    for r in grid:
        _check_unit("r", r)
    base = params if rederive_a1 else _fix_a1(params)
    rows = []
    for r in grid:
        try:
            report = evaluate_report(build(with_r(base, float(r))))
            rows.append(SweepRow(float(r), report))
        except ValueError as exc:
            rows.append(SweepRow(float(r), ProbabilityReport.undefined(), str(exc)))
    return rows


def build_toy_witness(c2: float, w: float) -> ModelInstance:
    """2-dim model where conditioning on x raises p(d) yet p(x|d) < p(x|not d).

    ``x = diag(1, 0)`` and ``d`` projects onto ``u = (cos a, sin a)`` with
    ``cos^2 a = c2``; the state is ``sqrt(w) u + sqrt(1 - w) v`` with ``v``
    orthogonal to ``u``. Then p(d) = w, p(d|x) = p(x|d) = c2, p(x|not d) = 1 - c2.
    """
    if not 0.0 < c2 <= 1.0:
        raise ModelError("c2 must lie in (0, 1]")
    if not 0.0 <= w <= 1.0:
        raise ModelError("w must lie in [0, 1]")
    c, s = math.sqrt(c2), math.sqrt(1.0 - c2)
    u = np.array([c, s], dtype=np.complex128)
    v = np.array([-s, c], dtype=np.complex128)
    psi = math.sqrt(w) * u + math.sqrt(1.0 - w) * v
    x = ProjectorObservable(A2, "x")
    d = ProjectorObservable(np.outer(u, u), "d")
    return ModelInstance(2, x, None, None, d, _state(psi), {"c2": c2, "w": w})


def witness_report(c2: float, w: float) -> dict:
    m = build_toy_witness(c2, w)
    s, x, d = m.state, m.A, m.D
    p_d = quantum.born_probability(d, s)
    out = {
        "c2": c2,
        "w": w,
        "p_d": p_d,
        "p_d_given_x": _maybe(quantum.conditional_probability, d, x, s),
        "p_x_given_d": _maybe(quantum.conditional_probability, x, d, s),
        "p_x_given_not_d": _maybe(quantum.conditional_on_complement, x, d, s),
    }
    raises = out["p_d_given_x"] is not None and out["p_d_given_x"] > p_d
    warning = (
        out["p_x_given_d"] is not None
        and out["p_x_given_not_d"] is not None
        and out["p_x_given_d"] < out["p_x_given_not_d"]
    )
    # classically, p(d|x) > p(d) forces p(x|d) > p(x|not d)
    out["lemma_violated"] = bool(raises and warning)
    out["verdict"] = "classical Lemma violated" if out["lemma_violated"] else "consistent with classical Lemma"
    return out


def _diag(n_causes: int) -> tuple[np.ndarray, ...]:
    return tuple(None if p is None else p.matrix.diagonal().real.copy() for p in _cause_projectors(n_causes))


_DIAGS = {2: _diag(2), 3: _diag(3)}


def fast_report(params) -> dict:
    """Report fields as a plain dict, skipping per-call validation.

    Same quantities as :func:`evaluate_report` (the cause projectors are
    diagonal, so projecting is elementwise masking); meant for optimizer
    inner loops. Raises ``ModelError`` on invalid parameters.
    """
    if isinstance(params, ThreeCauseParams):
        six = params.six_dim
        d = linalg.kron(d6_matrix(six.alpha1, six.blocks), d2_matrix(params.alpha2))
        psi = linalg.kron(psi6(six), psi2(params.r2, params.theta2))
        a, b, c, joint = _DIAGS[3]
    else:
        d = d6_matrix(params.alpha1, params.blocks)
        psi = psi6(params)
        a, b, c, joint = _DIAGS[2]
    dpsi = d @ psi
    p_d = linalg.norm2(dpsi)
    masks = [a, b] + ([] if c is None else [c]) + [joint]
    projected = np.array(masks) * psi  # one row per condition
    weights = np.einsum("ij,ij->i", projected.real, projected.real) + np.einsum(
        "ij,ij->i", projected.imag, projected.imag)
    after = projected @ d.T
    hits = np.einsum("ij,ij->i", after.real, after.real) + np.einsum("ij,ij->i", after.imag, after.imag)
    cond = [h / w if w >= quantum.CONDITION_TOL else None for h, w in zip(hits, weights)]
    jd = joint * dpsi
    not_d = psi - dpsi
    jnd = joint * not_d
    p_not_d = linalg.norm2(not_d)
    p_a = float(weights[0])
    # interference of d over the a / not-a partition
    na = psi - a * psi
    w_na = linalg.norm2(na)
    ltp = (cond[0] * p_a if p_a >= quantum.CONDITION_TOL else 0.0) + (
        linalg.norm2(d @ na) if w_na >= quantum.CONDITION_TOL else 0.0)
    return {
        "p_d": p_d,
        "p_d_given_a": cond[0],
        "p_d_given_b": cond[1],
        "p_d_given_c": None if c is None else cond[2],
        "p_d_given_joint": cond[-1],
        "p_joint_given_d": linalg.norm2(jd) / p_d if p_d >= quantum.CONDITION_TOL else None,
        "p_joint_given_not_d": linalg.norm2(jnd) / p_not_d if p_not_d >= quantum.CONDITION_TOL else None,
        "p_a": p_a,
        "p_b": float(weights[1]),
        "p_c": None if c is None else float(weights[2]),
        "p_joint": float(weights[-1]),
        "interference_a": p_d - ltp,
    }
