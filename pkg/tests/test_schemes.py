import math
from fractions import Fraction

import numpy as np
import pytest

from simcost import lindblad, norms, qmat, schemes
from simcost.lindblad import LindbladGenerator, Semigroup
from simcost.qmat import LOWER, X, Y, Z


@pytest.fixture
def rng():
    return np.random.default_rng(17)


def fit_slope(ts, errs):
    return float(np.polyfit(np.log(ts), np.log(errs), 1)[0])


class TestZDistribution:
    def test_probabilities_sum_exactly(self):
        dist = schemes.z_dist()
        assert sum(dist.probabilities) == Fraction(1)

    def test_even_moments(self):
        dist = schemes.z_dist()
        assert dist.moment(2) == Fraction(1)
        assert dist.moment(4) == Fraction(3)

    @pytest.mark.parametrize("k", [1, 3, 5])
    def test_odd_moments_vanish(self, k):
        assert schemes.z_dist().moment(k) == Fraction(0)


class TestSymmetricLocalChannel:
    def test_time_zero_all_atoms_identity(self):
        ch = schemes.symmetric_local_channel(X, 0.0)
        for atom in ch.atoms:
            assert np.allclose(atom.unitary, np.eye(2))

    def test_zero_atom_is_identity(self):
        ch = schemes.symmetric_local_channel(X, 0.37)
        center = ch.atoms[2]
        assert center.probability == pytest.approx(0.5)
        assert np.allclose(center.unitary, np.eye(2), atol=1e-14)
        assert center.rotation_angles == ()

    def test_channel_is_cptp(self):
        ch = schemes.symmetric_local_channel((X + Z) / math.sqrt(2), 0.2)
        assert qmat.is_cptp(ch.superop)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            schemes.symmetric_local_channel(LOWER, 0.1)

    @pytest.mark.parametrize("a", [X, (X + Z) / math.sqrt(2)])
    def test_third_order_error(self, a):
        ts = np.logspace(-3, -1, 6)
        errs = [
            norms.diamond_norm(
                schemes.symmetric_local_target(a, t) - schemes.symmetric_local_channel(a, t).superop
            ).value
            for t in ts
        ]
        assert fit_slope(ts, errs) == pytest.approx(3.0, abs=0.2)

    def test_error_below_analytic_bound(self):
        for t in (1e-3, 1e-2, 1e-1):
            err = norms.diamond_norm(
                schemes.symmetric_local_target(X, t) - schemes.symmetric_local_channel(X, t).superop
            ).value
            assert err <= schemes.symmetric_local_error_bound(1.0, t)


class TestTrotter2:
    def test_single_block_semigroup(self):
        sg = Semigroup.from_generator(LindbladGenerator((2,), None, (X, Y)))
        fam = lambda s: lindblad.evolve(sg, s)
        assert np.allclose(schemes.trotter2([fam], 0.4), fam(0.4), atol=1e-12)

    def test_commuting_blocks_exact(self):
        dims = (2, 2)
        gens = [
            LindbladGenerator(dims, None, (qmat.embed_local(p, j, dims),))
            for j in range(2)
            for p in (X, Y)
        ]
        sgs = [Semigroup.from_generator(g) for g in gens]
        fams = [lambda s, sg=sg: lindblad.evolve(sg, s) for sg in sgs]
        total = Semigroup.from_generator(
            LindbladGenerator(dims, None, tuple(g.jumps[0] for g in gens))
        )
        t = 0.3
        assert np.linalg.norm(schemes.trotter2(fams, t) - lindblad.evolve(total, t)) < 1e-9

    def test_noncommuting_blocks_third_order(self):
        a1, a2 = X, (X + Z) / math.sqrt(2)
        g1 = Semigroup.from_generator(LindbladGenerator((2,), None, (a1,)))
        g2 = Semigroup.from_generator(LindbladGenerator((2,), None, (a2,)))
        total = Semigroup.from_generator(LindbladGenerator((2,), None, (a1, a2)))
        fams = [lambda s: lindblad.evolve(g1, s), lambda s: lindblad.evolve(g2, s)]
        ts = np.logspace(-2.5, -0.5, 6)
        errs = [
            norms.diamond_norm(schemes.trotter2(fams, t) - lindblad.evolve(total, t)).value
            for t in ts
        ]
        assert fit_slope(ts, errs) == pytest.approx(3.0, abs=0.3)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            schemes.trotter2([], 0.1)


class TestSymmetricScheme:
    def gates_for(self, jumps, tau=1.0):
        return schemes.GateSet("rot", tau=tau, generators=tuple(jumps))

    def test_single_jump_reduces_to_local_mixtures(self):
        g = LindbladGenerator((2,), None, (X,))
        prod, _ = schemes.symmetric_scheme(g, 0.2, self.gates_for([X]))
        local = schemes.symmetric_local_channel(X, 0.05)
        assert len(prod.blocks) == 2
        for blk in prod.blocks:
            assert np.allclose(blk.superop, local.superop, atol=1e-13)

    def test_pauli_two_qubit_error_and_depth(self):
        dims = (2, 2)
        jumps = tuple(qmat.embed_local(p, j, dims) for j in range(2) for p in (X, Y))
        g = LindbladGenerator(dims, None, jumps)
        sg = Semigroup.from_generator(g)
        gates = self.gates_for(jumps)
        m = len(jumps)
        ts = np.logspace(-2.5, -1, 5)
        errs = []
        for t in ts:
            prod, acct = schemes.symmetric_scheme(g, t, gates)
            assert qmat.is_cptp(prod.superop)
            errs.append(norms.diamond_norm(lindblad.evolve(sg, t) - prod.superop).value)
            assert acct.total <= 4 * m * max(1, math.ceil(math.sqrt(2 * t) / gates.tau))
            bound = schemes.symmetric_scheme_error_bound(g, t)
            assert errs[-1] <= bound
        assert fit_slope(ts, errs) == pytest.approx(3.0, abs=0.3)

    def test_depth_splitting_with_small_tau(self):
        g = LindbladGenerator((2,), None, (X,))
        tau = 0.05
        t = 0.3
        _, acct = schemes.symmetric_scheme(g, t, self.gates_for([X], tau=tau))
        # Each of the two blocks realizes the Z = +-2 rotation of angle
        # 2 sqrt(t/2) as one split rotation.
        per_block = math.ceil(2 * math.sqrt(t / 2) / tau)
        assert acct.per_block == (per_block, per_block)
        assert acct.total == 2 * per_block

    def test_hermiticity_required(self):
        g = LindbladGenerator((2,), None, (LOWER,))
        with pytest.raises(ValueError):
            schemes.symmetric_scheme(g, 0.1, self.gates_for([X]))

    def test_composition_error_accumulates_linearly(self):
        # k-fold repetition stays within k times the single-step error.
        g = LindbladGenerator((2,), None, (X,))
        sg = Semigroup.from_generator(g)
        tau_step = 0.05
        prod, _ = schemes.symmetric_scheme(g, tau_step, self.gates_for([X]))
        delta = norms.diamond_norm(lindblad.evolve(sg, tau_step) - prod.superop).value
        for k in (2, 5, 20):
            err_k = norms.diamond_norm(
                lindblad.evolve(sg, k * tau_step) - np.linalg.matrix_power(prod.superop, k)
            ).value
            assert err_k <= k * delta * (1 + 1e-6)


class TestPoisson:
    def test_single_unitary(self):
        ch = schemes.poisson_channel([2.0], [X])
        assert np.allclose(ch.superop, qmat.conjugation_superop(X))

    def test_mixture_is_cptp_and_matches_model(self):
        ch = schemes.poisson_channel([1.0, 1.0], [X, Y])
        assert qmat.is_cptp(ch.superop)
        expected = 0.5 * (qmat.conjugation_superop(X) + qmat.conjugation_superop(Y))
        assert np.allclose(ch.superop, expected)

    def test_validation(self):
        with pytest.raises(ValueError):
            schemes.poisson_channel([1.0], [X, Y])
        with pytest.raises(ValueError):
            schemes.poisson_channel([1.0], [LOWER])
        with pytest.raises(ValueError):
            schemes.poisson_channel([-1.0, 1.0], [X, Y])

    def test_truncation_zero_is_identity(self):
        ch = schemes.poisson_channel([1.0, 1.0], [X, Y])
        sup, acct = schemes.poisson_truncated(ch, 0.7, 0)
        assert np.allclose(sup, np.eye(4))
        assert acct.total == 0

    def test_error_below_tail_bound(self):
        # Normalized single-qubit model: L = Phi - id with Phi = (ad_X + ad_Y)/2.
        sg = Semigroup.from_generator(
            LindbladGenerator((2,), None, (X / math.sqrt(2), Y / math.sqrt(2)))
        )
        ch = schemes.poisson_channel([0.5, 0.5], [X, Y])
        for t in (0.1, 0.5):
            for n_trunc in (1, 3, 5):
                sup, _ = schemes.poisson_truncated(ch, t, n_trunc)
                err = norms.diamond_norm(lindblad.evolve(sg, t) - sup).value
                assert err <= schemes.poisson_tail_bound(t, n_trunc)

    def test_example_point(self):
        sg = Semigroup.from_generator(
            LindbladGenerator((2,), None, (X / math.sqrt(2), Y / math.sqrt(2)))
        )
        ch = schemes.poisson_channel([0.5, 0.5], [X, Y])
        sup, _ = schemes.poisson_truncated(ch, 0.1, 4)
        err = norms.diamond_norm(lindblad.evolve(sg, 0.1) - sup).value
        assert err <= schemes.poisson_tail_bound(0.1, 4) <= 1e-5


class TestMinTruncationOrder:
    @pytest.mark.parametrize("alpha,beta", [(2.0, 2.0), (1.0, 3.0), (0.5, 1.5)])
    def test_inequalities_hold_by_substitution(self, alpha, beta):
        n = schemes.min_truncation_order(alpha, beta)
        t0 = (2.0 / alpha) ** (1.0 / beta)
        assert n > t0
        lhs = math.log(2.0 / alpha) / beta
        rhs = (t0 + math.log(alpha / 2.0) + (n + 1) * math.log(n + 1) - n - 1) / (n + 1 - beta)
        assert lhs < rhs

    @pytest.mark.parametrize("alpha,beta", [(2.0, 2.0), (1.0, 3.0), (0.5, 1.5)])
    def test_tail_below_target_on_grid(self, alpha, beta):
        n = schemes.min_truncation_order(alpha, beta)
        t0 = (2.0 / alpha) ** (1.0 / beta)
        for t in np.linspace(t0 / 100, t0, 100):
            assert schemes.poisson_tail_bound(t, n) < alpha * t**beta

    def test_alpha_two_beta_two(self):
        n = schemes.min_truncation_order(2.0, 2.0)
        assert n >= 2

    def test_minimality(self):
        # The returned N is the first integer passing both inequalities.
        alpha, beta = 0.5, 1.5
        n = schemes.min_truncation_order(alpha, beta)
        t0 = (2.0 / alpha) ** (1.0 / beta)
        for smaller in range(math.floor(t0) + 1, n):
            lhs = math.log(2.0 / alpha) / beta
            denom = smaller + 1 - beta
            rhs = (
                t0 + math.log(alpha / 2.0) + (smaller + 1) * math.log(smaller + 1) - smaller - 1
            ) / denom
            assert not (smaller > t0 and denom > 0 and lhs < rhs)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            schemes.min_truncation_order(-1.0, 2.0)
        with pytest.raises(ValueError):
            schemes.min_truncation_order(1.0, 1.0)


class TestDilation:
    def test_hamiltonian_hermitian_exact(self, rng):
        v = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        h = schemes.dilation_hamiltonian(v)
        assert np.array_equal(h, qmat.dag(h))

    def test_damping_hamiltonian_matches_pauli_form(self):
        # Up to basis phases, H = (X (x) Y - Y (x) X)/2.
        h = schemes.dilation_hamiltonian(LOWER)
        reference = 0.5 * (np.kron(X, Y) - np.kron(Y, X))
        assert np.allclose(np.abs(h), np.abs(reference), atol=1e-14)

    def test_unitary_jump_squares_to_identity(self):
        h = schemes.dilation_hamiltonian(X)
        assert np.allclose(h @ h, np.eye(4), atol=1e-14)

    def test_first_order_time_zero_identity(self):
        sch = schemes.dilated_first_order(LOWER, 0.0)
        assert np.allclose(sch.system_superop, np.eye(4), atol=1e-13)

    def test_first_order_cptp_and_slope(self):
        sg = Semigroup.from_generator(LindbladGenerator((2,), None, (LOWER,)))
        ts = np.logspace(-3, -1, 6)
        errs = []
        for t in ts:
            sch = schemes.dilated_first_order(LOWER, t)
            sup = sch.system_superop
            assert qmat.is_cptp(sup)
            errs.append(norms.diamond_norm(lindblad.evolve(sg, t) - sup).value)
            assert errs[-1] <= schemes.dilated_first_order_error_bound([1.0], t)
        assert fit_slope(ts, errs) == pytest.approx(2.0, abs=0.2)


class TestExactDilations:
    def damping_semigroup(self, n):
        dims = tuple([2] * n)
        jumps = tuple(math.sqrt(2) * qmat.embed_local(LOWER, j, dims) for j in range(n))
        return Semigroup.from_generator(LindbladGenerator(dims, None, jumps))

    def test_time_zero_identity(self):
        sch = schemes.amplitude_damping_exact(0.0, 1)
        assert np.allclose(sch.system_superop, np.eye(4), atol=1e-13)
        sch2 = schemes.pauli_noise_exact(0.0)
        assert np.allclose(sch2.system_superop, np.eye(4), atol=1e-13)

    @pytest.mark.parametrize("n", [1, 2])
    def test_amplitude_damping_identity(self, n):
        sg = self.damping_semigroup(n)
        for t in (0.1, 0.7, 2.0):
            sch = schemes.amplitude_damping_exact(t, n)
            assert qmat.is_cptp(sch.system_superop)
            assert norms.diamond_distance(lindblad.evolve(sg, t), sch.system_superop) <= 1e-8

    def test_amplitude_damping_depth(self):
        for tau in (0.1, 0.5, 1.0):
            gates = schemes.GateSet(
                "d",
                tau=tau,
                generators=(np.kron(Y, X), np.kron(X, Y)),
            )
            for n in (1, 2):
                sch = schemes.amplitude_damping_exact(1.3, n, gates=gates)
                total = schemes.depth(sch).total
                assert total <= 2 * n * math.ceil((math.pi / 2) / tau)
                assert total <= math.pi * n / tau

    def test_pauli_noise_identity_and_atoms(self):
        sg = Semigroup.from_generator(LindbladGenerator((2,), None, (X, Y)))
        for t in (0.2, 1.0):
            sch = schemes.pauli_noise_exact(t)
            assert [a.probability for a in sch.blocks[0].atoms] == [0.5, 0.5]
            assert norms.diamond_distance(lindblad.evolve(sg, t), sch.system_superop) <= 1e-8


class TestEncodeDecode:
    def test_encode_attaches_reset_ancilla(self, rng):
        rho = qmat.random_density(2, rng)
        enc = schemes.encode_superop(2, 2)
        out = qmat.apply_superop(enc, rho)
        p0 = np.zeros((2, 2), dtype=complex)
        p0[0, 0] = 1.0
        assert np.allclose(out, np.kron(rho, p0))
        assert abs(np.trace(out) - 1.0) < 1e-14

    def test_decode_is_partial_trace(self, rng):
        joint = qmat.random_density(4, rng)
        dec = schemes.decode_superop(2, 2)
        assert np.allclose(
            qmat.apply_superop(dec, joint), qmat.partial_trace(joint, [2, 2], [0])
        )

    def test_decode_encode_is_identity(self):
        enc = schemes.encode_superop(4, 2)
        dec = schemes.decode_superop(4, 2)
        assert np.allclose(dec @ enc, np.eye(16))


class TestDepth:
    def test_identity_channel_zero(self):
        ch = schemes.MixedUnitaryChannel(dims=(2,), atoms=(schemes.Atom(1.0, np.eye(2)),))
        assert schemes.depth(ch).total == 0

    def test_split_counting(self):
        t, tau = 0.3, 0.2
        gates = schemes.GateSet("g", tau=tau, generators=(X,))
        ch = schemes.symmetric_local_channel(X, t, gates=gates)
        acct = schemes.depth(ch)
        assert acct.total == math.ceil(2 * math.sqrt(2 * t) / tau)
        assert acct.ceil_factors == (math.ceil(2 * math.sqrt(2 * t) / tau),)

    def test_total_consistency_enforced(self):
        with pytest.raises(ValueError):
            schemes.DepthAccount(total=3, per_block=(1, 1), tau=1.0, ceil_factors=(1, 1))
