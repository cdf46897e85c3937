"""Lipschitz-complexity machinery: seminorms, commutants, conditional
expectations, certified complexity bounds, mixing times, and the closed-form
lower bounds on simulation cost.

All complexity quantities are handled as certified one-sided bounds: search
and certificates give lower bounds (valid for the completely bounded version
a fortiori), constructive Kraus decompositions give upper bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from . import qmat
from .qmat import Array

SEMINORM_FLOOR = 1e-8
MEMBER_TOL = 1e-12
ALGEBRA_TOL = 1e-9
BETA_MIN = 1.01


@dataclass(frozen=True)
class ResourceSet:
    """Finite operator set inducing the seminorm sup_s ||[s, x]||_inf."""

    dims: tuple[int, ...]
    members: tuple[Array, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        d = self.dim
        members = tuple(np.asarray(s, dtype=complex) for s in self.members)
        if not members:
            raise ValueError("resource set must be nonempty")
        for s in members:
            if s.shape != (d, d):
                raise ValueError("resource member has wrong dimension")
        object.__setattr__(self, "members", members)
        if self.labels and len(self.labels) != len(members):
            raise ValueError("labels must match members")

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=int))

    def star_closure_residual(self) -> float:
        worst = 0.0
        for s in self.members:
            best = min(qmat.op_norm(qmat.dag(s) - m) for m in self.members)
            worst = max(worst, best)
        return worst

    def contains(self, op: Array, tol: float = MEMBER_TOL) -> bool:
        return any(qmat.op_norm(op - m) <= tol for m in self.members)


def lipschitz_seminorm(x: Array, resource: ResourceSet) -> float:
    """|||x|||_S = sup over members of the operator norm of the commutator."""
    x = np.asarray(x, dtype=complex)
    return max(qmat.op_norm(s @ x - x @ s) for s in resource.members)


@dataclass(frozen=True)
class Commutant:
    """Hilbert-Schmidt orthonormal basis of {x : [s, x] = 0 for all s in S}."""

    dim_space: int
    basis: tuple[Array, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def project(self, x: Array) -> Array:
        out = np.zeros_like(np.asarray(x, dtype=complex))
        for b in self.basis:
            out += np.trace(qmat.dag(b) @ x) * b
        return out

    def membership_residual(self, x: Array) -> float:
        return float(np.linalg.norm(x - self.project(x), ord="fro"))

    def algebra_closure_residual(self, rng: np.random.Generator | None = None, pairs: int = 20) -> float:
        """Worst projection residual of products of (random combinations of)
        basis elements; zero for a genuine algebra."""
        rng = rng or np.random.default_rng(11)
        worst = 0.0
        for _ in range(pairs):
            wa = rng.standard_normal(len(self.basis)) + 1j * rng.standard_normal(len(self.basis))
            wb = rng.standard_normal(len(self.basis)) + 1j * rng.standard_normal(len(self.basis))
            a = sum(w * b for w, b in zip(wa, self.basis))
            b = sum(w * b for w, b in zip(wb, self.basis))
            na = np.linalg.norm(a, ord="fro")
            nb = np.linalg.norm(b, ord="fro")
            worst = max(worst, self.membership_residual((a / na) @ (b / nb)))
        return worst

    def star_closure_residual(self) -> float:
        return max(self.membership_residual(qmat.dag(b)) for b in self.basis)


def commutant(resource: ResourceSet, tol: float = 1e-10) -> Commutant:
    """Nullspace of the stacked commutator maps x -> [s, x]."""
    d = resource.dim
    eye = np.eye(d, dtype=complex)
    rows = []
    for s in resource.members:
        rows.append(qmat.left_right_superop(s, eye) - qmat.left_right_superop(eye, s))
    stack = np.vstack(rows)
    _, sing, vh = np.linalg.svd(stack)
    cutoff = tol * max(1.0, sing[0] if sing.size else 0.0)
    rank = int(np.sum(sing > cutoff))
    basis = [qmat.devectorize(vh[k].conj(), (d, d)) for k in range(rank, d * d)]
    return Commutant(dim_space=d, basis=tuple(basis))


@dataclass(frozen=True)
class CondExpectation:
    """Conditional expectation onto a subalgebra, stored on the observable side."""

    superop: Array = field(repr=False)
    trace_preserving: bool
    description: str = ""

    def apply(self, x: Array) -> Array:
        return qmat.apply_superop(self.superop, x)

    @property
    def dual_superop(self) -> Array:
        """The predual channel acting on states."""
        return qmat.adjoint_map(self.superop)


def conditional_expectation(comm: Commutant, rng: np.random.Generator | None = None) -> CondExpectation:
    """Trace-preserving conditional expectation = Hilbert-Schmidt projection.

    Refuses when the commutant fails the algebra or star closure checks, since
    the module property would fail and downstream bounds would be invalid.
    """
    res_alg = comm.algebra_closure_residual(rng)
    res_star = comm.star_closure_residual()
    if res_alg > ALGEBRA_TOL or res_star > ALGEBRA_TOL:
        raise ValueError(
            f"commutant is not a *-algebra (product residual {res_alg:.2e}, "
            f"adjoint residual {res_star:.2e})"
        )
    d = comm.dim_space
    p = np.zeros((d * d, d * d), dtype=complex)
    for b in comm.basis:
        v = qmat.vectorize(b)
        p += np.outer(v, v.conj())
    return CondExpectation(superop=p, trace_preserving=True, description="hs-projection")


def fixed_state_expectation(rho_fix: Array) -> CondExpectation:
    """State-preserving conditional expectation onto C I: x -> Tr(rho x) I.

    Appropriate when the fixed-point algebra of the dual semigroup is trivial
    and rho is the unique invariant state; the dual is the replacer onto rho.
    """
    rho_fix = np.asarray(rho_fix, dtype=complex)
    d = rho_fix.shape[0]
    eye = np.eye(d, dtype=complex)
    sup = np.outer(qmat.vectorize(eye), qmat.vectorize(qmat.dag(rho_fix)).conj())
    tp = bool(np.linalg.norm(rho_fix - eye / d) <= 1e-12)
    return CondExpectation(superop=sup, trace_preserving=tp, description="fixed-state")


def complexity_lower(phi: Array, resource: ResourceSet, certificates) -> float:
    """Certified lower bound max_x ||Phi*(x) - x||_inf / |||x|||_S over the
    given certificate operators.  Valid for the completely bounded version."""
    phi_star = qmat.adjoint_map(np.asarray(phi, dtype=complex))
    d = resource.dim
    best = None
    for x in certificates:
        x = np.asarray(x, dtype=complex)
        den = lipschitz_seminorm(x, resource)
        if den <= SEMINORM_FLOOR:
            continue
        num = qmat.op_norm(qmat.apply_superop(phi_star, x) - x)
        val = num / den
        best = val if best is None else max(best, val)
    if best is None:
        raise ValueError("all certificates have (numerically) vanishing seminorm")
    return best


def _amplified(phi_star: Array, resource: ResourceSet, n: int):
    """Defect map id_n tensor (Phi* - id) and lifted resource members."""
    d = resource.dim
    if n == 1:
        defect = phi_star - np.eye(d * d, dtype=complex)
        return defect, resource.members, d
    eye_n = np.eye(n * n, dtype=complex)
    lifted_defect = qmat.tensor_superop(eye_n, phi_star) - np.eye((n * d) ** 2, dtype=complex)
    lifted_members = tuple(np.kron(np.eye(n, dtype=complex), s) for s in resource.members)
    return lifted_defect, lifted_members, n * d


def _ratio(defect: Array, members, x: Array) -> tuple[float, float, float]:
    num = qmat.op_norm(qmat.apply_superop(defect, x))
    den = max(qmat.op_norm(s @ x - x @ s) for s in members)
    return num, den, num / den if den > SEMINORM_FLOOR else -np.inf


def _ratio_gradient(defect: Array, defect_hs_adj: Array, members, x: Array) -> Array:
    """Euclidean (Hermitian-projected) subgradient of the ratio at x."""
    mx = qmat.apply_superop(defect, x)
    u_m, s_m, vh_m = np.linalg.svd(mx)
    g_num_dir = np.outer(u_m[:, 0], vh_m[0])
    g_num = qmat.apply_superop(defect_hs_adj, g_num_dir)
    num = float(s_m[0]) if s_m.size else 0.0

    best_den, best_s, best_c = -1.0, None, None
    for s in members:
        c = s @ x - x @ s
        nrm = qmat.op_norm(c)
        if nrm > best_den:
            best_den, best_s, best_c = nrm, s, c
    u_c, _, vh_c = np.linalg.svd(best_c)
    w = np.outer(u_c[:, 0], vh_c[0])
    g_den = qmat.dag(best_s) @ w - w @ qmat.dag(best_s)

    den = best_den
    grad = (g_num * den - num * g_den) / (den * den)
    return (grad + qmat.dag(grad)) / 2.0


def complexity_search(
    phi: Array,
    resource: ResourceSet,
    restarts: int = 32,
    amplification: int = 1,
    iterations: int = 500,
    rng: np.random.Generator | None = None,
    defect: Array | None = None,
    seeds=(),
) -> tuple[float, Array]:
    """Projected subgradient ascent on the complexity ratio over Hermitian x.

    Returns the best certified ratio together with its witness; the result is
    always a valid lower bound (the ratio is re-evaluated exactly).  Known
    certificate operators can be passed as ``seeds`` so the search never
    returns less than their ratio.  Passing ``defect`` overrides the default
    Phi* - id (used by the environment-assisted variant).
    """
    rng = rng or np.random.default_rng(0)
    phi_star = qmat.adjoint_map(np.asarray(phi, dtype=complex))
    if defect is None:
        defect_map, members, dim = _amplified(phi_star, resource, amplification)
    else:
        if amplification != 1:
            raise ValueError("custom defect maps support amplification 1 only")
        defect_map, members, dim = defect, resource.members, resource.dim

    starts = []
    for seed in seeds:
        seed = np.asarray(seed, dtype=complex)
        if amplification != 1 and seed.shape[0] != dim:
            seed = np.kron(np.eye(amplification, dtype=complex), seed)
        starts.append(seed / np.linalg.norm(seed, ord="fro"))

    defect_hs_adj = defect_map.conj().T
    best_val, best_x = 0.0, np.zeros((dim, dim), dtype=complex)
    for trial in range(max(1, restarts) + len(starts)):
        if trial < len(starts):
            x = starts[trial]
        else:
            x = qmat.random_hermitian(dim, rng)
            x /= np.linalg.norm(x, ord="fro")
        _, den, val = _ratio(defect_map, members, x)
        if not np.isfinite(val):
            continue
        step = 1.0
        for _ in range(iterations):
            grad = _ratio_gradient(defect_map, defect_hs_adj, members, x)
            gn = np.linalg.norm(grad, ord="fro")
            if gn < 1e-14:
                break
            improved = False
            while step > 1e-12:
                cand = x + step * grad / gn
                cand /= np.linalg.norm(cand, ord="fro")
                _, _, cand_val = _ratio(defect_map, members, cand)
                if cand_val > val + 1e-15:
                    x, val = cand, cand_val
                    improved = True
                    step *= 1.3
                    break
                step *= 0.5
            if not improved:
                break
        if val > best_val:
            best_val, best_x = val, x
    return best_val, best_x


@dataclass(frozen=True)
class KrausTerm:
    """One term coefficient * (product of word operators) of a Kraus operator."""

    coefficient: complex
    word: tuple[int, ...]


@dataclass(frozen=True)
class KrausHint:
    """Decomposition of the Kraus set of Phi* over resource words.

    ``copies > 1`` declares Phi as the tensor power of the local channel whose
    Kraus set is described; ``word_ops`` are then the per-factor resource
    operators (their single-site embeddings must all belong to the global
    resource set, which makes the additivity bound valid).
    """

    operators: tuple[tuple[KrausTerm, ...], ...]
    copies: int = 1
    word_ops: tuple[Array, ...] | None = None


def _hint_kraus(hint: KrausHint, word_ops) -> list[Array]:
    d = word_ops[0].shape[0]
    eye = np.eye(d, dtype=complex)
    kraus = []
    for terms in hint.operators:
        k = np.zeros((d, d), dtype=complex)
        for term in terms:
            op = reduce(lambda acc, idx: acc @ word_ops[idx], term.word, eye)
            k = k + term.coefficient * op
        kraus.append(k)
    return kraus


def complexity_upper_kraus(phi: Array, resource: ResourceSet, hint: KrausHint) -> float:
    """Triangle/Leibniz upper bound on C_S(Phi) (and its amplified version).

    For Phi*(x) = sum_i K_i^dag x K_i with sum K_i^dag K_i = I,

        ||Phi*(x) - x|| <= sum_i ||K_i|| sum_terms |c| sum_pos prod_other ||s||
                           * |||x|||_S,

    and the bound is additive over tensor factors.  The reconstruction of Phi
    from the hint is verified; a residual above 1e-9 raises ValueError.
    """
    phi = np.asarray(phi, dtype=complex)
    word_ops = hint.word_ops if hint.word_ops is not None else resource.members
    word_ops = tuple(np.asarray(w, dtype=complex) for w in word_ops)
    kraus = _hint_kraus(hint, word_ops)
    d_loc = word_ops[0].shape[0]

    ident = sum(qmat.dag(k) @ k for k in kraus)
    if qmat.op_norm(ident - np.eye(d_loc)) > 1e-9:
        raise ValueError("hint Kraus set is not unital (sum K^dag K != I)")

    # Reconstruction check: local dual channel, tensored hint.copies times,
    # must reproduce the dual of phi.
    local_dual = sum(qmat.left_right_superop(qmat.dag(k), k) for k in kraus)
    full_dual = reduce(qmat.tensor_superop, [local_dual] * hint.copies)
    residual = np.linalg.norm(full_dual - qmat.adjoint_map(phi), ord="fro")
    if residual > 1e-9:
        raise ValueError(f"hint does not reconstruct the channel (residual {residual:.2e})")

    if hint.copies > 1:
        dims = resource.dims
        if len(dims) != hint.copies:
            raise ValueError("copies must match the number of tensor factors")
        for site in range(hint.copies):
            for w in word_ops:
                if not resource.contains(qmat.embed_local(w, site, dims)):
                    raise ValueError(
                        "word operators must embed into the resource set on every factor"
                    )

    norms_w = [qmat.op_norm(w) for w in word_ops]
    bound_local = 0.0
    for k, terms in zip(kraus, hint.operators):
        word_cost = 0.0
        for term in terms:
            prod_norms = [norms_w[i] for i in term.word]
            leibniz = sum(
                np.prod([p for j, p in enumerate(prod_norms) if j != pos])
                for pos in range(len(prod_norms))
            )
            word_cost += abs(term.coefficient) * leibniz
        bound_local += qmat.op_norm(k) * word_cost
    return hint.copies * bound_local


def kappa(
    resource: ResourceSet,
    expectation: CondExpectation,
    hint: KrausHint | None = None,
    restarts: int = 16,
    iterations: int = 200,
    amplifications: tuple[int, ...] = (1, 2),
    rng: np.random.Generator | None = None,
    generic_upper: float | None = None,
    seeds=(),
) -> tuple[float, float]:
    """Interval bounds on kappa(S) = C_S^cb(E_{S'}).

    Lower bound by amplified search; upper bound by the Kraus hint when
    available, else by ``generic_upper`` (caller-supplied analytic constant).
    """
    d = resource.dim
    channel = expectation.dual_superop
    if np.linalg.norm(expectation.superop - np.eye(d * d)) <= 1e-12:
        return 0.0, 0.0
    lower = 0.0
    for n in amplifications:
        val, _ = complexity_search(
            channel, resource, restarts=restarts, amplification=n, iterations=iterations,
            rng=rng, seeds=seeds,
        )
        lower = max(lower, val)
    if hint is not None:
        upper = complexity_upper_kraus(channel, resource, hint)
    elif generic_upper is not None:
        upper = generic_upper
    else:
        raise ValueError("no upper-bound route available: supply a Kraus hint or analytic constant")
    if lower > upper + 1e-9:
        raise RuntimeError(f"kappa search lower {lower} exceeds upper {upper}")
    return lower, upper


@dataclass(frozen=True)
class CompatibilityResult:
    value: float
    certified: bool
    detail: str


def compatibility_D(gates, resource: ResourceSet) -> CompatibilityResult:
    """D with C_S^cb(ad_u) <= D for every accessible u.

    For a Hamiltonian family whose generators all belong to S the certified
    value is the time cap tau; for an explicit gate set whose members belong
    to S it is 1 (one commutator per use).  Otherwise the value is estimated
    by searching C_S(ad_u) on sampled gates and is flagged as uncertified.
    """
    if gates.generators and all(resource.contains(g) for g in gates.generators):
        return CompatibilityResult(gates.tau, True, "Hamiltonian family with generators in S")
    if gates.unitaries and all(resource.contains(u) for u in gates.unitaries):
        return CompatibilityResult(1.0, True, "explicit unitaries are members of S")
    if gates.unitaries:
        worst = 0.0
        for u in gates.unitaries:
            val, _ = complexity_search(
                qmat.conjugation_superop(u), resource, restarts=8, iterations=120
            )
            worst = max(worst, val)
        return CompatibilityResult(worst, False, "search estimate over explicit gates")
    worst = 0.0
    for g in gates.generators:
        u = qmat.matrix_exp(1j * gates.tau * g)
        val, _ = complexity_search(qmat.conjugation_superop(u), resource, restarts=8, iterations=120)
        worst = max(worst, val)
    return CompatibilityResult(worst, False, "search estimate; generators not all in S")


def env_compatibility_D(gates, resource_ae: ResourceSet, anc_dim: int = 2) -> CompatibilityResult:
    """D-hat = tau + 6 for dilated Hamiltonian families.

    Requires every gate generator to belong to the joint resource set and the
    two ancilla Pauli operators (tensored with the system identity) to be
    members; tau bounds the conjugation part and 6 covers the encode/decode
    replacer."""
    d_ae = resource_ae.dim
    d_sys = d_ae // anc_dim
    eye_sys = np.eye(d_sys, dtype=complex)
    have_anc = resource_ae.contains(np.kron(eye_sys, qmat.X)) and resource_ae.contains(
        np.kron(eye_sys, qmat.Y)
    )
    gens_ok = bool(gates.generators) and all(resource_ae.contains(g) for g in gates.generators)
    if have_anc and gens_ok:
        return CompatibilityResult(gates.tau + 6.0, True, "dilated family, generators in S_AE")
    return CompatibilityResult(gates.tau + 6.0, False, "membership checks failed; constant unverified")


@dataclass(frozen=True)
class ExponentialCurve:
    """Certified lower-bound curve c(t) = limit * (1 - exp(-rate t))."""

    limit: float
    rate: float

    def value(self, t: float) -> float:
        return self.limit * (1.0 - math.exp(-self.rate * t))

    def crossing(self, threshold: float) -> float | None:
        if threshold >= self.limit:
            return None
        if threshold <= 0:
            return 0.0
        return -math.log(1.0 - threshold / self.limit) / self.rate


@dataclass(frozen=True)
class MixingTimeResult:
    value: float
    epsilon: float
    threshold: float
    route: str
    detail: str = ""


def _certificate_crossing(evolve_fn, lower_fn, threshold, analytic, t_max, grid_points, bisect_tol):
    if analytic is not None:
        t_star = analytic.crossing(threshold)
        # Reject crossings in the numerically saturated tail of the curve.
        if t_star is not None and threshold < analytic.limit * (1.0 - 1e-9):
            check = lower_fn(evolve_fn(t_star))
            if check >= threshold - 1e-9 * max(1.0, threshold):
                return t_star, "analytic-certificate"
    prev = 0.0
    for t in np.logspace(-3, math.log10(t_max), grid_points):
        if lower_fn(evolve_fn(float(t))) >= threshold:
            lo, hi = prev, float(t)
            while hi - lo > bisect_tol:
                mid = (lo + hi) / 2.0
                if lower_fn(evolve_fn(mid)) >= threshold:
                    hi = mid
                else:
                    lo = mid
            return hi, "grid-certificate"
        prev = float(t)
    return None, ""


def _diamond_crossing(evolve_fn, diamond_fn, eps, t_max, bisect_tol):
    # ||T_t - E*|| is non-increasing in t (E* is a fixed point of the
    # semigroup), so plain bisection applies.
    if diamond_fn(evolve_fn(t_max)) > eps:
        return None
    lo, hi = 0.0, t_max
    while hi - lo > bisect_tol:
        mid = (lo + hi) / 2.0
        if diamond_fn(evolve_fn(mid)) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


def mixing_time(
    evolve_fn,
    lower_fn,
    kappa_upper: float,
    eps: float,
    analytic: ExponentialCurve | None = None,
    t_max: float = 20.0,
    grid_points: int = 200,
    bisect_tol: float = 1e-4,
    diamond_fn=None,
) -> MixingTimeResult:
    """First certified time with complexity lower bound >= (1-eps) kappa_upper.

    ``evolve_fn(t)`` yields the channel superoperator, ``lower_fn(superop)``
    a certified complexity lower bound.  An analytic exponential certificate
    curve short-circuits the grid; the reported time is always an upper bound
    on the true mixing time (monotonicity of the complexity is not assumed;
    the first certified crossing is returned).  When ``diamond_fn(superop) =
    ||T_t - E*||_diamond`` is supplied, the ordinary mixing time is computed
    as well and the smaller of the two certified upper bounds is reported.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    threshold = (1.0 - eps) * kappa_upper
    cert_val, cert_route = _certificate_crossing(
        evolve_fn, lower_fn, threshold, analytic, t_max, grid_points, bisect_tol
    )
    dia_val = None
    if diamond_fn is not None:
        dia_val = _diamond_crossing(evolve_fn, diamond_fn, eps, t_max, max(bisect_tol, 1e-3))
    if cert_val is None and dia_val is None:
        raise RuntimeError(
            f"no crossing of threshold {threshold:.4g} up to t_max={t_max} "
            "(certificate and diamond routes both failed)"
        )
    if dia_val is not None and (cert_val is None or dia_val < cert_val):
        return MixingTimeResult(dia_val, eps, threshold, "diamond", "||T_t - E*|| <= eps crossing")
    return MixingTimeResult(cert_val, eps, threshold, cert_route)


def c_alpha_beta(alpha: float, beta: float, eps: float, t_mix: float) -> float:
    """min{ alpha^(-1/(beta-1)) ((1-eps)/(3 t_mix))^(beta/(beta-1)), (1-eps)/2 }.

    Evaluated through compensated log arithmetic; beta below 1.01 is rejected
    to stay clear of the blowup of the exponent beta/(beta-1).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if beta < BETA_MIN:
        raise ValueError(f"beta must be >= {BETA_MIN}")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if t_mix <= 0:
        raise ValueError("t_mix must be positive")
    log_term = math.fsum(
        [
            -math.log(alpha) / (beta - 1.0),
            (beta / (beta - 1.0)) * math.log((1.0 - eps) / (3.0 * t_mix)),
        ]
    )
    return min(math.exp(log_term), (1.0 - eps) / 2.0)


def lower_bound_M(alpha: float, beta: float, eps: float, t_mix: float, kappa_lower: float, d_compat: float) -> float:
    """Uniform-cost lower bound C_{alpha,beta} * kappa_lower / D."""
    if d_compat <= 0:
        raise ValueError("compatibility constant must be positive")
    return c_alpha_beta(alpha, beta, eps, t_mix) * kappa_lower / d_compat


@dataclass(frozen=True)
class FixedTimeBound:
    value: float | None
    applicable: bool
    condition: str


def lower_bound_fixed_time(
    tau_target: float, alpha: float, beta: float, t_mix_half: float, kappa_lower: float, d_compat: float
) -> FixedTimeBound:
    """tau kappa / (8 D t_mix), valid when t_mix * alpha * tau^(beta-1) < 1/8.

    ``t_mix_half`` is the mixing time at eps = 1/2.
    """
    if beta < BETA_MIN:
        raise ValueError(f"beta must be >= {BETA_MIN}")
    lhs = t_mix_half * alpha * tau_target ** (beta - 1.0)
    condition = f"t_mix * alpha * tau^(beta-1) = {lhs:.6g} (needs < 1/8)"
    if lhs >= 0.125:
        return FixedTimeBound(None, False, condition)
    return FixedTimeBound(
        tau_target * kappa_lower / (8.0 * d_compat * t_mix_half), True, condition
    )


def lower_bound_fixed_precision(
    t: float, delta: float, t_mix_half: float, kappa_lower: float, d_compat: float
) -> FixedTimeBound:
    """Gate-count bound t kappa / (8 D t_mix) for error delta, valid for t > 8 delta t_mix."""
    condition = f"t = {t:.6g} vs 8 delta t_mix = {8.0 * delta * t_mix_half:.6g} (needs t larger)"
    if t <= 8.0 * delta * t_mix_half:
        return FixedTimeBound(None, False, condition)
    return FixedTimeBound(t * kappa_lower / (8.0 * d_compat * t_mix_half), True, condition)


@dataclass(frozen=True)
class BoundReport:
    """Assembled lower/upper bound values with all intermediate quantities.

    Every reported number is recomputable from the stored inputs: the bound is
    c_const * kappa_lower / d_compat with c_const = C_{alpha,beta}(eps, t_mix).
    """

    model: str
    kind: str
    env_assisted: bool
    alpha: float
    beta: float
    epsilon: float
    tau: float
    kappa_lower: float
    kappa_upper: float
    d_compat: float
    d_certified: bool
    t_mix: float
    t_mix_route: str
    t_mix_threshold: float
    c_const: float
    bound: float
    upper_bound: float | None = None
    upper_bound_label: str = ""
    fixed_time: FixedTimeBound | None = None
    fixed_time_tau: float | None = None
    fixed_precision: FixedTimeBound | None = None
    fixed_precision_t: float | None = None
    fixed_precision_delta: float | None = None
    certificates: tuple[str, ...] = ()
    assumptions: AssumptionReport | None = None

    def __post_init__(self):
        if self.kappa_lower > self.kappa_upper + 1e-9:
            raise ValueError("kappa interval is inverted")

    def to_dict(self) -> dict:
        out = {
            "model": self.model,
            "kind": self.kind,
            "env_assisted": self.env_assisted,
            "alpha": self.alpha,
            "beta": self.beta,
            "epsilon": self.epsilon,
            "tau": self.tau,
            "kappa_lower": self.kappa_lower,
            "kappa_upper": self.kappa_upper,
            "D": self.d_compat,
            "D_certified": self.d_certified,
            "t_mix": self.t_mix,
            "t_mix_route": self.t_mix_route,
            "t_mix_threshold": self.t_mix_threshold,
            "C_alpha_beta": self.c_const,
            "bound": self.bound,
            "certificates": list(self.certificates),
        }
        if self.upper_bound is not None:
            out["upper_bound"] = self.upper_bound
            out["upper_bound_label"] = self.upper_bound_label
        if self.fixed_time is not None:
            out["fixed_time_tau"] = self.fixed_time_tau
            out["fixed_time_bound"] = self.fixed_time.value
            out["fixed_time_applicable"] = self.fixed_time.applicable
            out["fixed_time_condition"] = self.fixed_time.condition
        if self.fixed_precision is not None:
            out["fixed_precision_t"] = self.fixed_precision_t
            out["fixed_precision_delta"] = self.fixed_precision_delta
            out["fixed_precision_bound"] = self.fixed_precision.value
            out["fixed_precision_applicable"] = self.fixed_precision.applicable
            out["fixed_precision_condition"] = self.fixed_precision.condition
        if self.assumptions is not None:
            out["assumptions"] = [
                {"name": c.name, "passed": c.passed, "residual": c.residual}
                for c in self.assumptions.checks
            ]
        return out


def env_defect_superop(phi_sys: Array, encode: Array, decode: Array) -> Array:
    """Superoperator of x_AE -> D*(Phi* - id)E*(x_AE) on joint observables."""
    phi_sys = np.asarray(phi_sys, dtype=complex)
    d2 = phi_sys.shape[0]
    enc_star = qmat.adjoint_map(encode)
    dec_star = qmat.adjoint_map(decode)
    return dec_star @ (qmat.adjoint_map(phi_sys) - np.eye(d2, dtype=complex)) @ enc_star


def env_complexity(
    phi_sys: Array,
    resource_ae: ResourceSet,
    encode: Array,
    decode: Array,
    certificates=None,
    search: bool = False,
    restarts: int = 16,
    iterations: int = 200,
    rng: np.random.Generator | None = None,
) -> float:
    """Certified lower bound on the environment-assisted complexity of Phi.

    The ratio ||D*(Phi* - id)E*(x)||_inf / |||x|||_{S_AE} is maximized over the
    supplied certificates and, optionally, by subgradient search.  Requires
    decode o encode = id (checked numerically).
    """
    d_sys2 = phi_sys.shape[0]
    if np.linalg.norm(decode @ encode - np.eye(d_sys2)) > 1e-9:
        raise ValueError("decode o encode must be the identity on the system")
    defect = env_defect_superop(phi_sys, encode, decode)
    best = 0.0
    got = False
    if certificates:
        for x in certificates:
            x = np.asarray(x, dtype=complex)
            den = lipschitz_seminorm(x, resource_ae)
            if den <= SEMINORM_FLOOR:
                continue
            num = qmat.op_norm(qmat.apply_superop(defect, x))
            best = max(best, num / den)
            got = True
    if search:
        dummy_phi = np.eye(resource_ae.dim ** 2)
        val, _ = complexity_search(
            dummy_phi, resource_ae, restarts=restarts, iterations=iterations, rng=rng, defect=defect
        )
        best = max(best, val)
        got = True
    if not got:
        raise ValueError("no usable certificates and search disabled")
    return best


# The fixed-time and uniform env bounds share the unital formulas with the
# hatted quantities substituted.
env_lower_bound = lower_bound_M
env_lower_bound_fixed_time = lower_bound_fixed_time


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass(frozen=True)
class AssumptionReport:
    checks: tuple[AssumptionCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            flag = "pass" if c.passed else "FAIL"
            lines.append(f"  [{flag}] {c.name}: worst residual {c.residual:.3e} {c.detail}")
        return "\n".join(lines)


def _sample_gates(gates, count: int = 5) -> list[Array]:
    out = [np.asarray(u, dtype=complex) for u in gates.unitaries]
    for g in gates.generators:
        for frac in np.linspace(-1.0, 1.0, count):
            if frac == 0.0:
                continue
            out.append(qmat.matrix_exp(1j * frac * gates.tau * g))
    return out


def assumption_check(
    gates,
    resource: ResourceSet,
    e_fix: CondExpectation,
    encode: Array | None = None,
    decode: Array | None = None,
    d_compat: float | None = None,
    rng: np.random.Generator | None = None,
    tol: float = 1e-9,
) -> AssumptionReport:
    """Numerically verify the standing assumptions of the lower-bound frame.

    Plain mode checks star closure (A), invariance of E_fix under every gate
    (B), and D-compatibility (C, via search estimates <= D).  When encode and
    decode are given, the environment-assisted variants (O), (B'), (C') are
    checked instead of (B)/(C).
    """
    rng = rng or np.random.default_rng(23)
    checks = []

    res_star = resource.star_closure_residual()
    checks.append(AssumptionCheck("A: resource set *-closed", res_star <= 1e-10, res_star))

    samples = _sample_gates(gates)
    env_mode = encode is not None and decode is not None

    if env_mode:
        res_o = float(np.linalg.norm(decode @ encode - np.eye(decode.shape[0])))
        checks.append(AssumptionCheck("O: decode o encode = id", res_o <= tol, res_o))
        worst_b = 0.0
        for u in samples:
            step = decode @ qmat.conjugation_superop(u) @ encode
            comp = qmat.adjoint_map(step) @ e_fix.superop
            worst_b = max(worst_b, float(np.linalg.norm(comp - e_fix.superop)))
        checks.append(AssumptionCheck("B': (D ad_u E)* E_fix = E_fix", worst_b <= tol, worst_b))
        if d_compat is not None:
            worst_c = 0.0
            for u in samples[: min(6, len(samples))]:
                step = decode @ qmat.conjugation_superop(u) @ encode
                defect = env_defect_superop(step, encode, decode)
                val, _ = complexity_search(
                    np.eye(resource.dim ** 2), resource, restarts=4, iterations=80, rng=rng, defect=defect
                )
                worst_c = max(worst_c, val - d_compat)
            checks.append(
                AssumptionCheck(
                    "C': per-gate complexity <= D-hat", worst_c <= 1e-6, max(0.0, worst_c),
                    f"(D-hat = {d_compat:.6g})",
                )
            )
    else:
        worst_b = 0.0
        for u in samples:
            comp = e_fix.superop @ qmat.conjugation_superop(u)
            worst_b = max(worst_b, float(np.linalg.norm(comp - e_fix.superop)))
        checks.append(AssumptionCheck("B: E_fix ad_u = E_fix", worst_b <= tol, worst_b))
        if d_compat is not None:
            worst_c = 0.0
            for u in samples[: min(6, len(samples))]:
                val, _ = complexity_search(
                    qmat.conjugation_superop(u), resource, restarts=4, iterations=80, rng=rng
                )
                worst_c = max(worst_c, val - d_compat)
            checks.append(
                AssumptionCheck(
                    "C: per-gate complexity <= D", worst_c <= 1e-6, max(0.0, worst_c),
                    f"(D = {d_compat:.6g})",
                )
            )
    return AssumptionReport(tuple(checks))
