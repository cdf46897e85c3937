"""Named desk-scale noise models with their full lower-bound configurations.

Two models carry matching analytic upper and lower bounds:

* ``PauliNoiseModel``: the unital 1-local model with per-qubit X and Y jumps,
  driven by single-Pauli rotations.  Certificate sum_j X_j decays as
  exp(-2t); kappa sits in [n/2, n]; D = tau.
* ``AmplitudeDampingModel``: per-qubit decay toward |0> (coherences damped by
  exp(-t)), simulated exactly through one ancilla qubit.  The
  environment-assisted certificate gives (1 - exp(-t)) n/2 and
  D-hat = tau + 6.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from . import complexity as cx
from . import lindblad, qmat, schemes
from .qmat import Array


def qubit_replacer_superop() -> Array:
    """rho -> Tr(rho)|0><0| on one qubit."""
    k0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    k1 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    return qmat.superop_from_kraus([k0, k1])


def mixed_replacer_superop(n: int) -> Array:
    """rho -> Tr(rho) I / 2^n on n qubits."""
    d = 2**n
    return np.outer(qmat.vectorize(np.eye(d, dtype=complex) / d), qmat.vectorize(np.eye(d, dtype=complex)).conj())


def replacer_kraus_hint() -> cx.KrausHint:
    """|0><0| = (I - iXY)/2 and |0><1| = (X + iY)/2 over the {X, Y} resource set."""
    return cx.KrausHint(
        operators=(
            (cx.KrausTerm(-0.5j, (0, 1)), cx.KrausTerm(0.5, ())),
            (cx.KrausTerm(0.5, (0,)), cx.KrausTerm(0.5j, (1,))),
        )
    )


def twirl_kraus_hint(copies: int) -> cx.KrausHint:
    """Per-qubit Pauli twirl {I, X, Y, Z}/2 with Z = -iXY, tensored ``copies`` times."""
    return cx.KrausHint(
        operators=(
            (cx.KrausTerm(0.5, ()),),
            (cx.KrausTerm(0.5, (0,)),),
            (cx.KrausTerm(0.5, (1,)),),
            (cx.KrausTerm(-0.5j, (0, 1)),),
        ),
        copies=copies,
        word_ops=(qmat.X, qmat.Y),
    )


class PauliNoiseModel:
    """n-qubit unital model L = sum_j (L_{X_j} + L_{Y_j})."""

    def __init__(self, n: int, tau: float = 1.0):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = n
        self.tau = float(tau)
        self.dims = tuple([2] * n)
        members = []
        labels = []
        for j in range(n):
            members.append(qmat.embed_local(qmat.X, j, self.dims))
            labels.append(f"X{j + 1}")
            members.append(qmat.embed_local(qmat.Y, j, self.dims))
            labels.append(f"Y{j + 1}")
        self.jumps = tuple(members)
        self.generator = lindblad.LindbladGenerator(self.dims, None, self.jumps)
        self.semigroup = lindblad.Semigroup.from_generator(self.generator)
        self.gates = schemes.GateSet("pauli-rotations", tau=self.tau, generators=self.jumps)
        self.resource = cx.ResourceSet(self.dims, self.jumps, tuple(labels))
        self.certificate = sum(qmat.embed_local(qmat.X, j, self.dims) for j in range(n))
        self.certificate_label = "+".join(f"X{j + 1}" for j in range(n))
        # T_t contracts the certificate by exp(-2t), so the complexity lower
        # bound follows the curve (n/2)(1 - exp(-2t)).
        self.curve = cx.ExponentialCurve(limit=n / 2.0, rate=2.0)
        self.kraus_hint = twirl_kraus_hint(n)
        self.default_epsilon = 0.75

    def evolve(self, t: float) -> Array:
        return lindblad.evolve(self.semigroup, t)

    @cached_property
    def expectation(self) -> cx.CondExpectation:
        return cx.conditional_expectation(cx.commutant(self.resource))

    def complexity_lower(self, superop_t: Array) -> float:
        return cx.complexity_lower(superop_t, self.resource, [self.certificate])

    @cached_property
    def kappa_certificate(self) -> float:
        """Exact ratio of the certificate on E_{S'} (equals n/2)."""
        return cx.complexity_lower(self.expectation.dual_superop, self.resource, [self.certificate])

    @cached_property
    def kappa_upper_value(self) -> float:
        """Kraus/Leibniz upper bound (equals n), reconstruction-verified."""
        return cx.complexity_upper_kraus(self.expectation.dual_superop, self.resource, self.kraus_hint)

    def kappa_bounds(self, rng=None, restarts: int = 8, iterations: int = 120) -> tuple[float, float]:
        return cx.kappa(
            self.resource,
            self.expectation,
            hint=self.kraus_hint,
            restarts=restarts,
            iterations=iterations,
            rng=rng,
            seeds=(self.certificate,),
        )

    def poisson_phi(self) -> schemes.MixedUnitaryChannel:
        """Phi = (1/2n) sum_j (ad_{X_j} + ad_{Y_j}); each Pauli costs a pi/2 rotation."""
        atoms = []
        prob = 1.0 / (2 * self.n)
        for u in self.jumps:
            atoms.append(schemes.Atom(prob, u, rotation_angles=(math.pi / 2.0,)))
        return schemes.MixedUnitaryChannel(dims=self.dims, atoms=tuple(atoms), gates=self.gates)

    def poisson_rate(self) -> float:
        """L = rate * (Phi - id) with the mixture Phi above."""
        return 2.0 * self.n

    def upper_bound_uniform(self, alpha: float, beta: float) -> tuple[float, str]:
        """Constructive Poisson upper bound on the uniform cost."""
        order = schemes.min_truncation_order(alpha / self.poisson_rate() ** beta, beta)
        word = math.ceil((math.pi / 2.0) / self.tau)
        return float(order * word), f"Poisson scheme, N={order}, {word} gates per Pauli"

    def assumption_report(self, d_compat: float | None = None, rng=None) -> cx.AssumptionReport:
        return cx.assumption_check(
            self.gates, self.resource, self.expectation, d_compat=d_compat, rng=rng
        )

    def _diamond_to_fixed(self, superop_t: Array) -> float:
        from . import norms

        return norms.diamond_norm(superop_t - self.expectation.dual_superop, tol=1e-5).value

    def uniform_report(
        self,
        alpha: float,
        beta: float,
        epsilon: float | None = None,
        rng=None,
        fixed_time_tau: float | None = None,
        fixed_precision: tuple[float, float] | None = None,
        check_assumptions: bool = True,
        kind: str = "uniform",
        search_kappa: bool = False,
    ) -> cx.BoundReport:
        """Assemble the lower-bound report.

        The pipeline runs on the certificate value of kappa (n/2, exact and
        reproducible); ``search_kappa`` additionally lets subgradient search
        raise the lower bound.
        """
        eps = self.default_epsilon if epsilon is None else epsilon
        klo = self.kappa_certificate
        kup = self.kappa_upper_value
        if search_kappa:
            klo = max(klo, self.kappa_bounds(rng=rng)[0])
        compat = cx.compatibility_D(self.gates, self.resource)
        mix = cx.mixing_time(
            self.evolve, self.complexity_lower, kappa_upper=kup, eps=eps, analytic=self.curve
        )
        c_const = cx.c_alpha_beta(alpha, beta, eps, mix.value)
        bound = cx.lower_bound_M(alpha, beta, eps, mix.value, klo, compat.value)
        upper, upper_label = self.upper_bound_uniform(alpha, beta)
        ft = fp = None
        if fixed_time_tau is not None or fixed_precision is not None:
            # eps = 1/2 puts the threshold at the certificate curve's limit,
            # so the crossing is certified through the diamond route instead.
            mix_half = cx.mixing_time(
                self.evolve, self.complexity_lower, kappa_upper=kup, eps=0.5,
                analytic=self.curve,
                diamond_fn=self._diamond_to_fixed if self.n <= 2 else None,
            )
            if fixed_time_tau is not None:
                ft = cx.lower_bound_fixed_time(
                    fixed_time_tau, alpha, beta, mix_half.value, klo, compat.value
                )
            if fixed_precision is not None:
                t_target, delta = fixed_precision
                fp = cx.lower_bound_fixed_precision(
                    t_target, delta, mix_half.value, klo, compat.value
                )
        report = cx.BoundReport(
            model=f"pauli-{self.n}q",
            kind=kind,
            env_assisted=False,
            alpha=alpha,
            beta=beta,
            epsilon=eps,
            tau=self.tau,
            kappa_lower=klo,
            kappa_upper=kup,
            d_compat=compat.value,
            d_certified=compat.certified,
            t_mix=mix.value,
            t_mix_route=mix.route,
            t_mix_threshold=mix.threshold,
            c_const=c_const,
            bound=bound,
            upper_bound=upper,
            upper_bound_label=upper_label,
            fixed_time=ft,
            fixed_time_tau=fixed_time_tau,
            fixed_precision=fp,
            fixed_precision_t=fixed_precision[0] if fixed_precision else None,
            fixed_precision_delta=fixed_precision[1] if fixed_precision else None,
            certificates=(self.certificate_label,),
            assumptions=self.assumption_report(d_compat=compat.value, rng=rng) if check_assumptions else None,
        )
        return report


class AmplitudeDampingModel:
    """n-qubit decay toward |0...0> with coherence damping exp(-t).

    Realized by jump operators sqrt(2)|0><1| per qubit, so the single-qubit
    channel matches the damping form with populations decaying as exp(-2t).
    The simulation framework is environment assisted: encode with one ancilla
    qubit in |0>, rotate, trace out.
    """

    def __init__(self, n: int, tau: float = 1.0):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = n
        self.tau = float(tau)
        self.dims = tuple([2] * n)
        self.dims_ae = self.dims + (2,)
        self.d_sys = 2**n
        self.jumps = tuple(
            math.sqrt(2.0) * qmat.embed_local(qmat.LOWER, j, self.dims) for j in range(n)
        )
        self.generator = lindblad.LindbladGenerator(self.dims, None, self.jumps)
        self.semigroup = lindblad.Semigroup.from_generator(self.generator)

        anc = self.n  # ancilla is the last factor
        anc_x = qmat.embed_local(qmat.X, anc, self.dims_ae)
        anc_y = qmat.embed_local(qmat.Y, anc, self.dims_ae)
        gate_gens = []
        gate_labels = []
        for j in range(n):
            gate_gens.append(qmat.embed_local(qmat.X, j, self.dims_ae) @ anc_y)
            gate_labels.append(f"X{j + 1}*Ye")
            gate_gens.append(qmat.embed_local(qmat.Y, j, self.dims_ae) @ anc_x)
            gate_labels.append(f"Y{j + 1}*Xe")
        self.gates = schemes.GateSet("damping-rotations", tau=self.tau, generators=tuple(gate_gens))
        self.resource = cx.ResourceSet(
            self.dims_ae,
            (anc_x, anc_y) + tuple(gate_gens),
            ("Xe", "Ye") + tuple(gate_labels),
        )
        self.encode = schemes.encode_superop(self.d_sys, 2)
        self.decode = schemes.decode_superop(self.d_sys, 2)
        ket0n = np.zeros((self.d_sys, self.d_sys), dtype=complex)
        ket0n[0, 0] = 1.0
        self.expectation = cx.fixed_state_expectation(ket0n)
        self.certificate = sum(
            qmat.embed_local(qmat.X, j, self.dims_ae) for j in range(n)
        )
        self.certificate_label = "+".join(f"X{j + 1}" for j in range(n)) + " (x) I_E"
        # Dual action: T_t^*(X_j) = exp(-t) X_j, seminorm of the certificate 2.
        self.curve = cx.ExponentialCurve(limit=n / 2.0, rate=1.0)
        # Constructive Leibniz constant: telescoping the per-qubit replacer
        # (factor 2, Example-4.1-style Kraus words) whose letters embed into
        # the joint resource set at word length 2 (factor 2 more).
        self.kappa_upper_analytic = 4.0 * n
        self.default_epsilon = 0.9

    def evolve(self, t: float) -> Array:
        return lindblad.evolve(self.semigroup, t)

    def exact_scheme(self, t: float) -> schemes.DilatedScheme:
        return schemes.amplitude_damping_exact(t, self.n, gates=self.gates)

    def env_complexity_lower(self, superop_t: Array) -> float:
        return cx.env_complexity(
            superop_t, self.resource, self.encode, self.decode, certificates=[self.certificate]
        )

    @cached_property
    def kappa_certificate(self) -> float:
        """Exact certificate ratio on (E_fix)*: equals n/2."""
        return self.env_complexity_lower(self.expectation.dual_superop)

    def kappa_bounds(self, rng=None, restarts: int = 8, iterations: int = 120) -> tuple[float, float]:
        """Certified interval for the environment-assisted Lipschitz constant."""
        lower = self.kappa_certificate
        if rng is not None:
            defect = cx.env_defect_superop(self.expectation.dual_superop, self.encode, self.decode)
            val, _ = cx.complexity_search(
                np.eye(self.resource.dim**2),
                self.resource,
                restarts=restarts,
                iterations=iterations,
                rng=rng,
                defect=defect,
                seeds=(self.certificate,),
            )
            lower = max(lower, val)
        return lower, self.kappa_upper_analytic

    def compatibility(self) -> cx.CompatibilityResult:
        return cx.env_compatibility_D(self.gates, self.resource)

    def upper_bound_uniform(self, alpha: float, beta: float) -> tuple[float, str]:
        """Depth of the exact dilation over the uniform window, <= pi n / tau."""
        t0 = (2.0 / alpha) ** (1.0 / beta)
        theta = math.acos(math.exp(-t0))
        depth = 2 * self.n * math.ceil((theta / 2.0) / self.tau)
        return float(depth), f"exact dilation, worst angle {theta:.4f} at t0={t0:.4f}"

    def assumption_report(self, d_compat: float | None = None, rng=None) -> cx.AssumptionReport:
        return cx.assumption_check(
            self.gates,
            self.resource,
            self.expectation,
            encode=self.encode,
            decode=self.decode,
            d_compat=d_compat,
            rng=rng,
        )

    def uniform_report(
        self,
        alpha: float,
        beta: float,
        epsilon: float | None = None,
        rng=None,
        fixed_time_tau: float | None = None,
        fixed_precision: tuple[float, float] | None = None,
        check_assumptions: bool = True,
        kind: str = "uniform",
        search_kappa: bool = False,
    ) -> cx.BoundReport:
        eps = self.default_epsilon if epsilon is None else epsilon
        klo = self.kappa_certificate
        kup = self.kappa_upper_analytic
        if search_kappa:
            klo = max(klo, self.kappa_bounds(rng=rng)[0])
        compat = self.compatibility()
        mix = cx.mixing_time(
            self.evolve, self.env_complexity_lower, kappa_upper=kup, eps=eps, analytic=self.curve
        )
        c_const = cx.c_alpha_beta(alpha, beta, eps, mix.value)
        bound = cx.lower_bound_M(alpha, beta, eps, mix.value, klo, compat.value)
        upper, upper_label = self.upper_bound_uniform(alpha, beta)
        ft = fp = None
        mix_half = None
        if fixed_time_tau is not None or fixed_precision is not None:
            mix_half = cx.mixing_time(
                self.evolve, self.env_complexity_lower, kappa_upper=kup, eps=0.5,
                analytic=self.curve,
                diamond_fn=self._diamond_to_fixed if self.n <= 2 else None,
            )
        if fixed_time_tau is not None:
            ft = cx.lower_bound_fixed_time(fixed_time_tau, alpha, beta, mix_half.value, klo, compat.value)
        if fixed_precision is not None:
            t_target, delta = fixed_precision
            fp = cx.lower_bound_fixed_precision(t_target, delta, mix_half.value, klo, compat.value)
        return cx.BoundReport(
            model=f"amplitude-damping-{self.n}q",
            kind=kind,
            env_assisted=True,
            alpha=alpha,
            beta=beta,
            epsilon=eps,
            tau=self.tau,
            kappa_lower=klo,
            kappa_upper=kup,
            d_compat=compat.value,
            d_certified=compat.certified,
            t_mix=mix.value,
            t_mix_route=mix.route,
            t_mix_threshold=mix.threshold,
            c_const=c_const,
            bound=bound,
            upper_bound=upper,
            upper_bound_label=upper_label,
            fixed_time=ft,
            fixed_time_tau=fixed_time_tau,
            fixed_precision=fp,
            fixed_precision_t=fixed_precision[0] if fixed_precision else None,
            fixed_precision_delta=fixed_precision[1] if fixed_precision else None,
            certificates=(self.certificate_label,),
            assumptions=self.assumption_report(d_compat=compat.value, rng=rng) if check_assumptions else None,
        )

    def _diamond_to_fixed(self, superop_t: Array) -> float:
        from . import norms

        return norms.diamond_norm(superop_t - self.expectation.dual_superop, tol=1e-5).value


class CustomModel:
    """Model assembled from explicit operators (configuration-driven).

    Scheme construction works off the generator and the tau-capped gate
    family; lower-bound reports additionally need resource members,
    certificate operators, and an analytic kappa upper bound.
    """

    def __init__(
        self,
        name: str,
        generator: lindblad.LindbladGenerator,
        tau: float,
        resource_members=(),
        resource_labels=(),
        certificates=(),
        certificate_labels=(),
        kappa_upper: float | None = None,
    ):
        self.name = name
        self.n = len(generator.dims)
        self.tau = float(tau)
        self.dims = generator.dims
        self.generator = generator
        self.jumps = generator.jumps
        self.semigroup = lindblad.Semigroup.from_generator(generator)
        self.resource = (
            cx.ResourceSet(self.dims, tuple(resource_members), tuple(resource_labels))
            if resource_members
            else None
        )
        self.certificates = tuple(np.asarray(c, dtype=complex) for c in certificates)
        self.certificate_labels = tuple(certificate_labels)
        self.kappa_upper_analytic = kappa_upper
        self.curve = None
        self.default_epsilon = 0.75

    def evolve(self, t: float) -> Array:
        return lindblad.evolve(self.semigroup, t)

    @cached_property
    def gates(self) -> schemes.GateSet:
        hermitian = [a for a in self.jumps if qmat.is_hermitian(a)]
        if len(hermitian) == len(self.jumps) and hermitian:
            return schemes.GateSet(f"{self.name}-rotations", tau=self.tau, generators=tuple(hermitian))
        gens = tuple(schemes.dilation_hamiltonian(v) for v in self.jumps)
        return schemes.GateSet(f"{self.name}-dilated", tau=self.tau, generators=gens)

    def poisson_decomposition(self) -> tuple[schemes.MixedUnitaryChannel, float]:
        """Extract Phi and the Poisson rate from unitary-proportional jumps."""
        weights = []
        unitaries = []
        d = self.generator.dim
        for v in self.jumps:
            lam = float(np.real(np.trace(qmat.dag(v) @ v))) / d
            if lam <= 0:
                raise ValueError("jump operators must be nonzero")
            u = v / math.sqrt(lam)
            if qmat.op_norm(u @ qmat.dag(u) - np.eye(d)) > 1e-9:
                raise ValueError("the Poisson scheme requires unitary-proportional jumps")
            weights.append(lam)
            unitaries.append(u)
        rate = sum(weights)
        phi = schemes.poisson_channel(
            weights,
            unitaries,
            gates=schemes.GateSet(f"{self.name}-unitaries", tau=self.tau, unitaries=tuple(unitaries)),
        )
        return phi, rate

    @cached_property
    def expectation(self) -> cx.CondExpectation:
        if self.resource is None:
            raise ValueError("custom model has no resource set")
        return cx.conditional_expectation(cx.commutant(self.resource))

    def complexity_lower(self, superop_t: Array) -> float:
        if self.resource is None or not self.certificates:
            raise ValueError("custom model needs resource members and certificates")
        return cx.complexity_lower(superop_t, self.resource, self.certificates)

    def assumption_report(self, d_compat: float | None = None, rng=None) -> cx.AssumptionReport:
        if self.resource is None:
            raise ValueError("custom model has no resource set")
        return cx.assumption_check(
            self.gates, self.resource, self.expectation, d_compat=d_compat, rng=rng
        )

    def uniform_report(
        self,
        alpha: float,
        beta: float,
        epsilon: float | None = None,
        rng=None,
        fixed_time_tau: float | None = None,
        fixed_precision: tuple[float, float] | None = None,
        check_assumptions: bool = True,
        kind: str = "uniform",
        search_kappa: bool = False,
    ) -> cx.BoundReport:
        if self.resource is None or not self.certificates:
            raise ValueError("bound reports need [resource] and [certificates] in the config")
        if self.kappa_upper_analytic is None:
            raise ValueError("bound reports need bounds.kappa_upper for custom models")
        eps = self.default_epsilon if epsilon is None else epsilon
        klo = cx.complexity_lower(self.expectation.dual_superop, self.resource, self.certificates)
        kup = self.kappa_upper_analytic
        if search_kappa:
            val, _ = cx.complexity_search(
                self.expectation.dual_superop, self.resource, restarts=8, iterations=120,
                rng=rng, seeds=self.certificates,
            )
            klo = max(klo, val)
        compat = cx.compatibility_D(self.gates, self.resource)
        mix = cx.mixing_time(
            self.evolve, self.complexity_lower, kappa_upper=kup, eps=eps, analytic=self.curve
        )
        c_const = cx.c_alpha_beta(alpha, beta, eps, mix.value)
        bound = cx.lower_bound_M(alpha, beta, eps, mix.value, klo, compat.value)
        ft = fp = None
        if fixed_time_tau is not None or fixed_precision is not None:
            mix_half = cx.mixing_time(
                self.evolve, self.complexity_lower, kappa_upper=kup, eps=0.5, analytic=self.curve,
                diamond_fn=self._diamond_to_fixed if self.generator.dim <= 4 else None,
            )
            if fixed_time_tau is not None:
                ft = cx.lower_bound_fixed_time(fixed_time_tau, alpha, beta, mix_half.value, klo, compat.value)
            if fixed_precision is not None:
                t_target, delta = fixed_precision
                fp = cx.lower_bound_fixed_precision(t_target, delta, mix_half.value, klo, compat.value)
        return cx.BoundReport(
            model=self.name,
            kind=kind,
            env_assisted=False,
            alpha=alpha,
            beta=beta,
            epsilon=eps,
            tau=self.tau,
            kappa_lower=klo,
            kappa_upper=kup,
            d_compat=compat.value,
            d_certified=compat.certified,
            t_mix=mix.value,
            t_mix_route=mix.route,
            t_mix_threshold=mix.threshold,
            c_const=c_const,
            bound=bound,
            fixed_time=ft,
            fixed_time_tau=fixed_time_tau,
            fixed_precision=fp,
            fixed_precision_t=fixed_precision[0] if fixed_precision else None,
            fixed_precision_delta=fixed_precision[1] if fixed_precision else None,
            certificates=self.certificate_labels,
            assumptions=self.assumption_report(d_compat=compat.value, rng=rng) if check_assumptions else None,
        )

    def _diamond_to_fixed(self, superop_t: Array) -> float:
        from . import norms

        return norms.diamond_norm(superop_t - self.expectation.dual_superop, tol=1e-5).value
