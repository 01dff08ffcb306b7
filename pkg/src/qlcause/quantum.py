"""Born probabilities, Lüders conditioning and the interference term.

Conditionals follow the sequential (Lüders) rule: project on the condition,
renormalize, then measure. For a pure state this is
``p(x|y) = ||x y psi||^2 / ||y psi||^2``; for a density operator it is
``Tr(x y rho y) / Tr(y rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import linalg
from .linalg import DimensionError

# A condition whose probability falls below this is treated as impossible.
CONDITION_TOL = 1e-12
# Out-of-range slack tolerated before clamping a probability into [0, 1].
RANGE_GUARD = 1e-9


class UndefinedConditional(ValueError):
    """Conditioning on an event of (numerically) zero probability."""

    def __init__(self, message: str = "undefined conditional"):
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class PureState:
    vector: np.ndarray

    def __post_init__(self):
        v = linalg.as_vector(self.vector)
        if abs(linalg.norm2(v) - 1.0) > linalg.NORM_TOL:
            raise ValueError(f"state is not normalized: norm2 = {linalg.norm2(v)!r}")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    @classmethod
    def normalized(cls, vector) -> "PureState":
        v = linalg.as_vector(vector)
        n = linalg.norm2(v)
        if n <= 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(v / np.sqrt(n))

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.vector, self.vector.conj()))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"density operator must be square, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > linalg.STRUCT_TOL:
            raise ValueError("density operator is not Hermitian")
        if abs(linalg.trace(m) - 1.0) > linalg.STRUCT_TOL:
            raise ValueError("density operator must have unit trace")
        if np.linalg.eigvalsh((m + m.conj().T) / 2).min() < -linalg.STRUCT_TOL:
            raise ValueError("density operator is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


State = Union[PureState, DensityOperator]


@dataclass(frozen=True, eq=False)
class ProjectorObservable:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        if not linalg.is_projector(m, linalg.STRUCT_TOL):
            raise ValueError(f"{self.label or 'matrix'} is not an orthogonal projector")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def complement(self) -> "ProjectorObservable":
        label = f"not {self.label}" if self.label else ""
        return ProjectorObservable(linalg.identity(self.dim) - self.matrix, label)

    def __and__(self, other: "ProjectorObservable") -> "ProjectorObservable":
        """Joint event of two commuting projectors (their product)."""
        if linalg.commutator_norm(self.matrix, other.matrix) > linalg.STRUCT_TOL:
            raise ValueError(f"{self.label} and {other.label} do not commute; no joint event")
        return ProjectorObservable(self.matrix @ other.matrix, self.label + other.label)


def _check_dims(*items) -> None:
    dims = {item.dim for item in items}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")


def _as_probability(value: float) -> float:
    if value < -RANGE_GUARD or value > 1.0 + RANGE_GUARD:
        raise ArithmeticError(f"probability {value!r} outside [0, 1]")
    return min(max(value, 0.0), 1.0)


def _raw_born(p: np.ndarray, s: State) -> float:
    if isinstance(s, PureState):
        return linalg.norm2(p @ s.vector)
    return float(np.trace(p @ s.matrix).real)


def born_probability(p: ProjectorObservable, s: State) -> float:
    """``||p psi||^2`` for a pure state, ``Re Tr(p rho)`` for a density operator."""
    _check_dims(p, s)
    return _as_probability(_raw_born(p.matrix, s))


def luders_condition(p: ProjectorObservable, s: PureState) -> PureState:
    _check_dims(p, s)
    projected = p.matrix @ s.vector
    if linalg.norm2(projected) < CONDITION_TOL:
        raise UndefinedConditional()
    return PureState.normalized(projected)


def _sequential(x: np.ndarray, y: np.ndarray, s: State) -> float:
    if isinstance(s, PureState):
        after = y @ s.vector
        denom = linalg.norm2(after)
        if denom < CONDITION_TOL:
            raise UndefinedConditional()
        return _as_probability(linalg.norm2(x @ after) / denom)
    denom = float(np.trace(y @ s.matrix).real)
    if denom < CONDITION_TOL:
        raise UndefinedConditional()
    return _as_probability(float(np.trace(x @ y @ s.matrix @ y).real) / denom)


def conditional_probability(x: ProjectorObservable, y: ProjectorObservable, s: State) -> float:
    """Probability of ``x`` after conditioning on ``y`` (Lüders rule)."""
    _check_dims(x, y, s)
    return _sequential(x.matrix, y.matrix, s)


def conditional_on_complement(x: ProjectorObservable, y: ProjectorObservable, s: State) -> float:
    _check_dims(x, y, s)
    return _sequential(x.matrix, linalg.identity(y.dim) - y.matrix, s)


def ltp_interference(x: ProjectorObservable, y: ProjectorObservable, s: State) -> float:
    """``p(x) - [p(x|y) p(y) + p(x|not y) p(not y)]``.

    Branches whose condition has probability below ``CONDITION_TOL``
    contribute zero.
    """
    _check_dims(x, y, s)
    not_y = linalg.identity(y.dim) - y.matrix
    total = 0.0
    for cond in (y.matrix, not_y):
        weight = _as_probability(_raw_born(cond, s))
        if weight >= CONDITION_TOL:
            total += _sequential(x.matrix, cond, s) * weight
    return born_probability(x, s) - total


def complement_diagnostics(x: ProjectorObservable, y: ProjectorObservable, s: State) -> dict:
    """Compare the Lüders value of p(x | not y) with the trace-formula reading.

    The trace reading takes ``(Tr(x) - t) / (1 - Tr(y rho))`` with
    ``t = Tr(x y rho y)``; it is only a heuristic (``Tr(x)`` is the rank of
    ``x``, not a probability), so it is reported and never used.
    """
    _check_dims(x, y, s)
    rho = s.density().matrix if isinstance(s, PureState) else s.matrix
    p_y = float(np.trace(y.matrix @ rho).real)
    t = float(np.trace(x.matrix @ y.matrix @ rho @ y.matrix).real)
    tr_x = float(np.trace(x.matrix).real)
    p_x = float(np.trace(x.matrix @ rho).real)
    try:
        luders = conditional_on_complement(x, y, s)
    except UndefinedConditional:
        luders = None
    return {
        "luders": luders,
        "trace_heuristic": (tr_x - t) / (1.0 - p_y) if 1.0 - p_y >= CONDITION_TOL else None,
        "trace_rho": (p_x - t) / (1.0 - p_y) if 1.0 - p_y >= CONDITION_TOL else None,
        "coefficient": tr_x / p_x if p_x >= CONDITION_TOL else None,
    }
