from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qlcause import linalg, quantum
from qlcause.quantum import ProjectorObservable, PureState

X = ProjectorObservable(np.diag([1.0, 0.0]), "x")
PLUS = ProjectorObservable(np.full((2, 2), 0.5), "plus")

angles = st.floats(0, 2 * math.pi, allow_nan=False)
weights = st.floats(0.05, 0.95)


def qubit(t: float, phase: float = 0.0) -> PureState:
    return PureState([math.cos(t), np.exp(1j * phase) * math.sin(t)])


def random_projector(rng, n, k):
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    v = q[:, :k]
    return ProjectorObservable(v @ v.conj().T)


class TestStates:
    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            PureState([1.0, 1.0])

    def test_normalized(self):
        s = PureState.normalized([3, 4j])
        assert linalg.norm2(s.vector) == pytest.approx(1.0, abs=1e-15)

    def test_state_is_immutable(self):
        s = qubit(0.3)
        with pytest.raises(ValueError):
            s.vector[0] = 0

    def test_density_checks(self):
        with pytest.raises(ValueError):
            quantum.DensityOperator(np.diag([0.5, 0.6]))
        with pytest.raises(ValueError):
            quantum.DensityOperator(np.diag([1.5, -0.5]))

    def test_projector_rejected(self):
        with pytest.raises(ValueError):
            ProjectorObservable(np.diag([1.0, 0.5]))


class TestBorn:
    def test_computational_basis(self):
        assert quantum.born_probability(X, qubit(math.pi / 3)) == pytest.approx(0.25)

    @given(angles, angles)
    def test_complement_sums_to_one(self, t, ph):
        s = qubit(t, ph)
        total = quantum.born_probability(PLUS, s) + quantum.born_probability(PLUS.complement(), s)
        assert total == pytest.approx(1.0, abs=1e-12)

    @given(angles, angles)
    def test_pure_and_density_agree(self, t, ph):
        s = qubit(t, ph)
        assert quantum.born_probability(PLUS, s) == pytest.approx(
            quantum.born_probability(PLUS, s.density()), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(linalg.DimensionError):
            quantum.born_probability(ProjectorObservable(np.eye(3)), qubit(0.1))


class TestLuders:
    def test_sequential_value(self):
        # |0> then plus: p(plus | x) = 1/2 regardless of the prior weight on x
        assert quantum.conditional_probability(PLUS, X, qubit(0.4)) == pytest.approx(0.5)

    def test_undefined_condition(self):
        with pytest.raises(quantum.UndefinedConditional, match="undefined conditional"):
            quantum.conditional_probability(PLUS, X, qubit(math.pi / 2))

    def test_luders_state(self):
        s = quantum.luders_condition(X, qubit(0.7, 1.0))
        assert np.allclose(s.vector, [1, 0])

    @given(angles, angles)
    def test_commuting_conditionals_are_classical(self, t, ph):
        s = qubit(t, ph)
        y = ProjectorObservable(np.diag([0.0, 1.0]))
        p_xy = quantum.born_probability(X & X, s)
        if quantum.born_probability(X, s) > 1e-6:
            assert quantum.conditional_probability(X, X, s) == pytest.approx(1.0)
        assert quantum.born_probability(X & y, s) == 0.0
        assert p_xy == pytest.approx(quantum.born_probability(X, s))

    @given(angles, angles)
    def test_pure_and_density_conditionals_agree(self, t, ph):
        s = qubit(t, ph)
        if quantum.born_probability(PLUS, s) < 1e-6:
            return
        assert quantum.conditional_probability(X, PLUS, s) == pytest.approx(
            quantum.conditional_probability(X, PLUS, s.density()), abs=1e-10)

    def test_noncommuting_joint_rejected(self):
        with pytest.raises(ValueError):
            X & PLUS

    @given(st.integers(0, 10_000))
    def test_conditionals_are_probabilities(self, seed):
        rng = np.random.default_rng(seed)
        x, y = random_projector(rng, 4, 2), random_projector(rng, 4, 1)
        s = PureState.normalized(rng.normal(size=4) + 1j * rng.normal(size=4))
        if quantum.born_probability(y, s) < 1e-6:
            return
        assert 0.0 <= quantum.conditional_probability(x, y, s) <= 1.0


class TestInterference:
    @given(angles, angles)
    def test_commuting_has_no_interference(self, t, ph):
        s = qubit(t, ph)
        assert abs(quantum.ltp_interference(X, X, s)) < 1e-12

    def test_value_for_plus_state(self):
        # the state lies in the plus branch, so conditioning changes nothing
        s = PureState.normalized([1, 1])
        assert quantum.ltp_interference(X, PLUS, s) == pytest.approx(0.0, abs=1e-15)

    def test_basis_state_interference(self):
        # p(x)=1 in |0>; through the plus basis the mixture gives 1/2
        assert quantum.ltp_interference(X, PLUS, qubit(0.0)) == pytest.approx(0.5)

    def test_zero_weight_branch_contributes_nothing(self):
        # in |0> the "not x" branch has zero weight
        assert quantum.ltp_interference(PLUS, X, qubit(0.0)) == pytest.approx(0.0, abs=1e-15)


class TestComplementDiagnostics:
    def test_luders_and_trace_rho_agree_for_commuting(self):
        s = PureState.normalized([1, 2, 3])
        x = ProjectorObservable(np.diag([1.0, 1.0, 0.0]))
        y = ProjectorObservable(np.diag([1.0, 0.0, 0.0]))
        diag = quantum.complement_diagnostics(x, y, s)
        assert diag["luders"] == pytest.approx(diag["trace_rho"])
        # rank-based reading is not a probability
        assert diag["trace_heuristic"] > 1
        assert diag["coefficient"] == pytest.approx(2 / (5 / 14))
