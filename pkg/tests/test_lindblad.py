import math

import numpy as np
import pytest

from simcost import lindblad, norms, qmat, schemes
from simcost.lindblad import LindbladGenerator, Semigroup
from simcost.qmat import LOWER, X, Y, Z


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pauli_generator(n):
    dims = tuple([2] * n)
    jumps = tuple(
        qmat.embed_local(p, j, dims) for j in range(n) for p in (X, Y)
    )
    return LindbladGenerator(dims, None, jumps)


class TestGenerator:
    def test_single_x_jump_commutator_algebra(self):
        # Oracle: L_X(Z) = XZX - Z = -2Z and L_X(X) = 0 by 2x2 algebra.
        g = LindbladGenerator((2,), None, (X,))
        assert np.allclose(g.apply(Z), -2 * Z)
        assert np.allclose(g.apply(X), np.zeros((2, 2)))
        s = lindblad.generator_superop(g)
        assert np.allclose(qmat.apply_superop(s, Z), -2 * Z, atol=1e-14)

    def test_no_jumps_no_hamiltonian_is_zero(self):
        g = LindbladGenerator((2,), None, ())
        assert np.allclose(lindblad.generator_superop(g), np.zeros((4, 4)))

    def test_amplitude_damping_matrix_action(self, rng):
        # The paper-style damping form (coherences e^{-t}, populations e^{-2t})
        # is generated by the jump sqrt(2)|0><1|.
        g = LindbladGenerator((2,), None, (math.sqrt(2) * LOWER,))
        sg = Semigroup.from_generator(g)
        t = 0.3
        rho = qmat.random_density(2, rng)
        out = qmat.apply_superop(lindblad.evolve(sg, t), rho)
        expected = np.array(
            [
                [rho[0, 0] + (1 - math.exp(-2 * t)) * rho[1, 1], math.exp(-t) * rho[0, 1]],
                [math.exp(-t) * rho[1, 0], math.exp(-2 * t) * rho[1, 1]],
            ]
        )
        assert np.allclose(out, expected, atol=1e-10)

    def test_non_hermitian_hamiltonian_rejected(self):
        with pytest.raises(ValueError):
            LindbladGenerator((2,), LOWER, ())

    def test_generator_traceless_output(self, rng):
        g = pauli_generator(2)
        for _ in range(5):
            rho = qmat.random_density(4, rng)
            assert abs(np.trace(g.apply(rho))) < 1e-10


class TestEvolve:
    def test_time_zero_is_identity(self):
        sg = Semigroup.from_generator(pauli_generator(1))
        assert np.array_equal(lindblad.evolve(sg, 0.0), np.eye(4))

    def test_negative_time_rejected(self):
        sg = Semigroup.from_generator(pauli_generator(1))
        with pytest.raises(ValueError):
            lindblad.evolve(sg, -0.1)

    def test_pauli_contraction_rate(self):
        # Dual action contracts X by exactly exp(-2t).
        sg = Semigroup.from_generator(pauli_generator(1))
        for t in (0.2, 1.0):
            dual = qmat.adjoint_map(lindblad.evolve(sg, t))
            assert np.allclose(qmat.apply_superop(dual, X), math.exp(-2 * t) * X, atol=1e-12)

    def test_semigroup_law(self, rng):
        sg = Semigroup.from_generator(pauli_generator(2))
        for _ in range(3):
            s, t = rng.uniform(0, 2, size=2)
            lhs = lindblad.evolve(sg, s) @ lindblad.evolve(sg, t)
            assert np.linalg.norm(lhs - lindblad.evolve(sg, s + t)) < 1e-9

    def test_channel_structure_and_trace(self, rng):
        g = LindbladGenerator((2,), 0.3 * Z, (math.sqrt(2) * LOWER,))
        sg = Semigroup.from_generator(g)
        sup = lindblad.evolve(sg, 0.8)
        assert qmat.is_cptp(sup)
        rho = qmat.random_density(2, rng)
        assert abs(np.trace(qmat.apply_superop(sup, rho)) - 1.0) < 1e-10

    def test_unital_model_fixes_identity(self):
        sg = Semigroup.from_generator(pauli_generator(2))
        out = qmat.apply_superop(lindblad.evolve(sg, 0.9), np.eye(4))
        assert np.linalg.norm(out - np.eye(4)) < 1e-10

    def test_dual_fixes_identity(self):
        sg = Semigroup.from_generator(pauli_generator(2))
        dual = qmat.adjoint_map(lindblad.evolve(sg, 0.7))
        assert np.allclose(qmat.apply_superop(dual, np.eye(4)), np.eye(4), atol=1e-10)

    def test_linear_growth_bound(self):
        # || T_t - id ||_dia <= min{ t ||L|| e^{t||L||}, 2 }.
        sg = Semigroup.from_generator(pauli_generator(1))
        l_dia = norms.diamond_norm(sg.superop_L).value
        for t in (0.01, 0.1, 1.0, 5.0):
            lhs = norms.diamond_norm(lindblad.evolve(sg, t) - np.eye(4)).value
            bound = min(t * l_dia * math.exp(t * l_dia), 2.0)
            assert lhs <= bound * (1 + 1e-9)


class TestUnital:
    def test_pauli_model_unital(self):
        assert lindblad.is_unital(pauli_generator(2))

    def test_amplitude_damping_not_unital(self):
        assert not lindblad.is_unital(LindbladGenerator((2,), None, (LOWER,)))

    def test_hamiltonian_only_unital(self):
        assert lindblad.is_unital(LindbladGenerator((2,), 1.7 * Z, ()))


class TestNogo:
    def test_unital_slope_zero(self):
        assert lindblad.nogo_slope(pauli_generator(1)) == pytest.approx(0.0, abs=1e-12)

    def test_damping_slope(self):
        # L(I) = a a^dag - a^dag a = Z, trace norm 2.
        g = LindbladGenerator((2,), None, (LOWER,))
        assert lindblad.nogo_slope(g) == pytest.approx(2.0, abs=1e-12)

    def test_gap_to_random_unital_channels(self, rng):
        # Mixed-unitary channels fix I, so the gap reduces to ||T_t(I) - I||_1.
        g = LindbladGenerator((2,), None, (LOWER,))
        sg = Semigroup.from_generator(g)
        slope = lindblad.nogo_slope(g)
        eye = np.eye(2)
        for t in (1e-3, 1e-2):
            tt_eye = qmat.apply_superop(lindblad.evolve(sg, t), eye)
            gaps = []
            for _ in range(50):
                us = [qmat.matrix_exp(1j * qmat.random_hermitian(2, rng)) for _ in range(3)]
                w = rng.random(3)
                w /= w.sum()
                phi = sum(wi * qmat.conjugation_superop(u) for wi, u in zip(w, us))
                gaps.append(qmat.trace_norm(tt_eye - qmat.apply_superop(phi, eye)))
            assert min(gaps) >= 0.4 * t * slope
