"""Approximation schemes for Lindblad semigroups, with exact depth accounting.

Every scheme is materialized as a finite convex mixture of unitary words (no
Monte-Carlo sampling), so measured diamond errors carry no statistical noise.
Depth is counted per coherent realization: a rotation of angle theta drawn
from a Hamiltonian gate family with time cap tau costs ceil(|theta|/tau)
gates, an explicit gate-set member costs one, and an identity word costs
nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np

from . import qmat
from .lindblad import LindbladGenerator
from .qmat import Array

UNITARY_TOL = 1e-10
PROB_TOL = 1e-12


@dataclass(frozen=True)
class GateSet:
    """Either a Hamiltonian gate family {exp(it a_j): |t| <= tau} or a finite set."""

    label: str
    tau: float
    generators: tuple[Array, ...] = ()
    unitaries: tuple[Array, ...] = ()

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("gate time cap tau must be positive")
        gens = tuple(np.asarray(g, dtype=complex) for g in self.generators)
        for g in gens:
            if not qmat.is_hermitian(g):
                raise ValueError("gate family generators must be Hermitian")
        unis = tuple(np.asarray(u, dtype=complex) for u in self.unitaries)
        for u in unis:
            if qmat.op_norm(u @ qmat.dag(u) - np.eye(u.shape[0])) > UNITARY_TOL:
                raise ValueError("explicit gate-set members must be unitary")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "unitaries", unis)


@dataclass(frozen=True)
class ZDistribution:
    """Five-point moment-matched distribution: matches the Gaussian through order 5."""

    values: tuple[int, ...]
    probabilities: tuple[Fraction, ...]

    def moment(self, k: int) -> Fraction:
        return sum((Fraction(z) ** k) * p for z, p in zip(self.values, self.probabilities))


def z_dist() -> ZDistribution:
    return ZDistribution(
        values=(-2, -1, 0, 1, 2),
        probabilities=(
            Fraction(1, 12),
            Fraction(1, 6),
            Fraction(1, 2),
            Fraction(1, 6),
            Fraction(1, 12),
        ),
    )


@dataclass(frozen=True)
class Atom:
    """One realization of a mixed-unitary block: a unitary word with its cost."""

    probability: float
    unitary: Array
    rotation_angles: tuple[float, ...] = ()
    unit_gates: int = 0

    def gate_count(self, tau: float) -> int:
        count = self.unit_gates
        for theta in self.rotation_angles:
            if abs(theta) > 0.0:
                count += 1 if math.isinf(tau) else math.ceil(abs(theta) / tau)
        return count

    def ceil_factor(self, tau: float) -> int:
        factors = [1]
        for theta in self.rotation_angles:
            if abs(theta) > 0.0 and not math.isinf(tau):
                factors.append(math.ceil(abs(theta) / tau))
        return max(factors)


@dataclass(frozen=True)
class MixedUnitaryChannel:
    """A finite distribution over unitary words acting as one scheme block."""

    dims: tuple[int, ...]
    atoms: tuple[Atom, ...]
    gates: GateSet | None = None
    superop: Array = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        d = int(np.prod(self.dims, dtype=int))
        total = 0.0
        s = np.zeros((d * d, d * d), dtype=complex)
        for atom in self.atoms:
            if atom.probability < -PROB_TOL:
                raise ValueError("atom probabilities must be nonnegative")
            u = np.asarray(atom.unitary, dtype=complex)
            if u.shape != (d, d):
                raise ValueError("atom unitary has wrong dimension")
            if qmat.op_norm(u @ qmat.dag(u) - np.eye(d)) > UNITARY_TOL:
                raise ValueError("atom word is not unitary")
            total += atom.probability
            s += atom.probability * qmat.conjugation_superop(u)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"atom probabilities sum to {total}, expected 1")
        object.__setattr__(self, "superop", s)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=int))


@dataclass(frozen=True)
class BlockProduct:
    """Composition of mixed-unitary blocks, first block applied first."""

    blocks: tuple[MixedUnitaryChannel, ...]

    @property
    def superop(self) -> Array:
        d2 = self.blocks[0].superop.shape[0]
        return reduce(lambda acc, blk: blk.superop @ acc, self.blocks, np.eye(d2, dtype=complex))


@dataclass(frozen=True)
class DepthAccount:
    """Gate-count bookkeeping: per-block maxima over atoms, summed across blocks."""

    total: int
    per_block: tuple[int, ...]
    tau: float
    ceil_factors: tuple[int, ...]

    def __post_init__(self):
        if self.total != sum(self.per_block):
            raise ValueError("total must equal the sum of per-block counts")


@dataclass(frozen=True)
class DilatedScheme:
    """Encode with a fresh ancilla, act unitarily on system+ancilla, trace out.

    The composed system map is the product over blocks of decode o block o
    encode, matching simulation protocols that reset the ancilla each step.
    """

    sys_dims: tuple[int, ...]
    anc_dim: int
    blocks: tuple[MixedUnitaryChannel, ...]
    gates: GateSet | None = None

    @property
    def sys_dim(self) -> int:
        return int(np.prod(self.sys_dims, dtype=int))

    @property
    def encode(self) -> Array:
        return encode_superop(self.sys_dim, self.anc_dim)

    @property
    def decode(self) -> Array:
        return decode_superop(self.sys_dim, self.anc_dim)

    @property
    def system_superop(self) -> Array:
        enc, dec = self.encode, self.decode
        d2 = self.sys_dim ** 2
        out = np.eye(d2, dtype=complex)
        for blk in self.blocks:
            out = (dec @ blk.superop @ enc) @ out
        return out


def encode_superop(d_sys: int, anc_dim: int) -> Array:
    """Rectangular superoperator of rho -> rho kron |0><0| (ancilla last)."""
    p0 = np.zeros((anc_dim, anc_dim), dtype=complex)
    p0[0, 0] = 1.0
    d = d_sys * anc_dim
    out = np.zeros((d * d, d_sys * d_sys), dtype=complex)
    for j in range(d_sys):
        for i in range(d_sys):
            e = np.zeros((d_sys, d_sys), dtype=complex)
            e[i, j] = 1.0
            out[:, j * d_sys + i] = qmat.vectorize(np.kron(e, p0))
    return out


def decode_superop(d_sys: int, anc_dim: int) -> Array:
    """Rectangular superoperator of the partial trace over the last factor."""
    d = d_sys * anc_dim
    out = np.zeros((d_sys * d_sys, d * d), dtype=complex)
    for col in range(d * d):
        e = np.zeros(d * d, dtype=complex)
        e[col] = 1.0
        reduced = qmat.partial_trace(qmat.devectorize(e, (d, d)), [d_sys, anc_dim], keep=[0])
        out[:, col] = qmat.vectorize(reduced)
    return out


def _rotation(generator: Array, angle: float) -> Array:
    return qmat.matrix_exp(1j * angle * generator)


def doubled_jump_superop(a: Array) -> Array:
    """Generator x -> 2 a x a - (a^2 x + x a^2) for Hermitian a (twice the
    single-jump dissipator); its exponential is what the moment-matched
    mixture reproduces."""
    a = np.asarray(a, dtype=complex)
    eye = np.eye(a.shape[0], dtype=complex)
    a2 = a @ a
    return 2.0 * np.kron(a.conj(), a) - qmat.left_right_superop(a2, eye) - qmat.left_right_superop(eye, a2)


def symmetric_local_target(a: Array, t: float) -> Array:
    """exp(t L_a) with L_a(x) = 2 a x a - {a^2, x}."""
    return qmat.matrix_exp(t * doubled_jump_superop(a))


def symmetric_local_channel(a: Array, t: float, gates: GateSet | None = None) -> MixedUnitaryChannel:
    """Five-atom mixture E[ad_exp(i sqrt(2t) Z a)] with the moment-matched Z.

    Approximates exp(t L_a), L_a(x) = 2 a x a - {a^2, x}, to third order in t.
    """
    a = np.asarray(a, dtype=complex)
    if not qmat.is_hermitian(a):
        raise ValueError("symmetric_local_channel requires a Hermitian generator")
    if t < 0:
        raise ValueError("t must be nonnegative")
    dist = z_dist()
    scale = math.sqrt(2.0 * t)
    vals, vecs = np.linalg.eigh(a)
    atoms = []
    for zval, prob in zip(dist.values, dist.probabilities):
        theta = scale * zval
        u = (vecs * np.exp(1j * theta * vals)) @ vecs.conj().T
        angles = (abs(theta),) if zval != 0 and t > 0 else ()
        atoms.append(Atom(float(prob), u, rotation_angles=angles))
    dims = (a.shape[0],)
    return MixedUnitaryChannel(dims=dims, atoms=tuple(atoms), gates=gates)


def trotter2(blocks, t: float) -> Array:
    """Second-order (symmetric) splitting of a list of channel families.

    Each entry of ``blocks`` is a callable s -> superoperator; the result is
    B_1(t/2) ... B_m(t/2) B_m(t/2) ... B_1(t/2) as a superoperator.
    """
    blocks = list(blocks)
    if not blocks:
        raise ValueError("trotter2 requires at least one block")
    half = [blk(t / 2.0) for blk in blocks]
    seq = half + half[::-1]
    return reduce(lambda acc, s: s @ acc, seq)


def symmetric_scheme(
    g: LindbladGenerator, t: float, gates: GateSet
) -> tuple[BlockProduct, DepthAccount]:
    """Moment-matched second-order Trotter scheme for Hermitian jump sets.

    Approximates exp(t sum_j L_{a_j}) by the palindrome of per-jump mixtures;
    each half step exp((t/2) L_{a_j}) becomes the five-atom mixture with
    rotation angles sqrt(t/2) Z.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if g.hamiltonian is not None and qmat.op_norm(g.hamiltonian) > 0:
        raise ValueError("the symmetric scheme covers purely dissipative generators")
    for a in g.jumps:
        if not qmat.is_hermitian(a):
            raise ValueError("symmetric scheme requires Hermitian jump operators")
    if len(gates.generators) != len(g.jumps):
        raise ValueError("gate family must provide one generator per jump operator")
    forward = [symmetric_local_channel(a, t / 4.0, gates) for a in g.jumps]
    blocks = tuple(forward + forward[::-1])
    product = BlockProduct(blocks)
    return product, depth(product, gates)


def poisson_channel(weights, unitaries, gates: GateSet | None = None) -> MixedUnitaryChannel:
    """Mixed-unitary channel sum_j lambda_j ad_{u_j}; weights auto-normalize."""
    weights = [float(w) for w in weights]
    unitaries = [np.asarray(u, dtype=complex) for u in unitaries]
    if len(weights) != len(unitaries):
        raise ValueError("weights and unitaries must have equal length")
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    total = sum(weights)
    atoms = tuple(
        Atom(w / total, u, unit_gates=1) for w, u in zip(weights, unitaries)
    )
    dims = (unitaries[0].shape[0],)
    return MixedUnitaryChannel(dims=dims, atoms=atoms, gates=gates)


def poisson_weights(t: float, n_max: int) -> np.ndarray:
    if t == 0:
        w = np.zeros(n_max + 1)
        w[0] = 1.0
        return w
    k = np.arange(n_max + 1)
    logw = k * math.log(t) - np.array([math.lgamma(kk + 1) for kk in k]) - t
    return np.exp(logw)


def poisson_truncated(
    phi: MixedUnitaryChannel, t: float, n_trunc: int
) -> tuple[Array, DepthAccount]:
    """Poisson-truncated channel sum_{k<=N} w_k Phi^k / sum w_k.

    Depth counts N uses of the longest word in Phi's gate alphabet.
    """
    if n_trunc < 0:
        raise ValueError("truncation order must be nonnegative")
    if t < 0:
        raise ValueError("t must be nonnegative")
    w = poisson_weights(t, n_trunc)
    w = w / w.sum()
    d2 = phi.superop.shape[0]
    out = np.zeros((d2, d2), dtype=complex)
    power = np.eye(d2, dtype=complex)
    for k in range(n_trunc + 1):
        out += w[k] * power
        if k < n_trunc:
            power = phi.superop @ power
    tau = phi.gates.tau if phi.gates is not None else math.inf
    max_word = max((atom.gate_count(tau) for atom in phi.atoms), default=0)
    per_block = tuple([max_word] * n_trunc)
    account = DepthAccount(
        total=n_trunc * max_word,
        per_block=per_block,
        tau=tau,
        ceil_factors=tuple([1] * n_trunc),
    )
    return out, account


def symmetric_local_error_bound(a_norm: float, s: float, terms: int = 60) -> float:
    """Rigorous tail bound on || exp(s L_a) - E[ad] ||, L_a = 2axa - {a^2, x}.

    Both maps are power series in the commutator K(x) = [x, a] with
    ||K||_dia <= 2||a||; the moment matching kills every term below order 6,
    leaving sum_{m>=3} [(8 s ||a||^2)^m (4^m/6 + 1/3)/(2m)! + (4 s ||a||^2)^m / m!].
    """
    if s <= 0:
        return 0.0
    x8 = 8.0 * s * a_norm * a_norm
    x4 = 4.0 * s * a_norm * a_norm
    total = 0.0
    for m in range(3, terms):
        term = (x8**m) * (4.0**m / 6.0 + 1.0 / 3.0) / math.factorial(2 * m)
        term += (x4**m) / math.factorial(m)
        total += term
        if term < 1e-18 * max(total, 1e-30):
            break
    return min(total, 2.0)


def symmetric_scheme_error_bound(g: LindbladGenerator, t: float) -> float | None:
    """Analytic error bound for the symmetric scheme when all dissipator
    blocks commute (the splitting is then exact and only the per-block mixture
    tails remain).  Returns None for non-commuting blocks."""
    from .lindblad import generator_superop

    supers = [
        generator_superop(LindbladGenerator(g.dims, None, (a,))) for a in g.jumps
    ]
    for i in range(len(supers)):
        for j in range(i + 1, len(supers)):
            comm = supers[i] @ supers[j] - supers[j] @ supers[i]
            if np.linalg.norm(comm) > 1e-10 * max(1.0, np.linalg.norm(supers[i])):
                return None
    total = 0.0
    for a in g.jumps:
        total += 2.0 * symmetric_local_error_bound(qmat.op_norm(a), t / 4.0)
    return min(total, 2.0)


def dilated_first_order_error_bound(jump_norms, t: float) -> float:
    """Rigorous error bound for the first-order dilated product scheme.

    Per jump: two exp-remainder terms (system and dilated generator both have
    diamond norm at most 2||V||^2) plus the mixture tail; across jumps a
    first-order splitting term with ||[L_i, L_j]|| <= 2 ||L_i|| ||L_j||.
    """
    if t <= 0:
        return 0.0
    norms2 = [2.0 * v * v for v in jump_norms]
    total = 0.0
    for v, l_norm in zip(jump_norms, norms2):
        x = t * l_norm
        remainder = math.expm1(x) - x
        total += 2.0 * remainder + symmetric_local_error_bound(v, t / 2.0)
    cross = 0.0
    for i in range(len(norms2)):
        for j in range(i + 1, len(norms2)):
            cross += norms2[i] * norms2[j]
    total += t * t * cross * math.exp(t * sum(norms2))
    return min(total, 2.0)


def poisson_tail_bound(t: float, n_trunc: int) -> float:
    """2 exp(N+1 - t - (N+1) ln((N+1)/t)), valid for 0 < t < N+1; else 2."""
    if t <= 0:
        return 0.0
    if t >= n_trunc + 1:
        return 2.0
    n1 = n_trunc + 1
    return 2.0 * math.exp(n1 - t - n1 * math.log(n1 / t))


def min_truncation_order(alpha: float, beta: float, cap: int = 10**6) -> int:
    """Smallest N making the Poisson tail beat alpha t^beta uniformly.

    N must exceed (2/alpha)^(1/beta) and satisfy

        (1/beta) ln(2/alpha)
            < [(2/alpha)^(1/beta) + ln(alpha/2) + (N+1)ln(N+1) - N - 1] / (N+1-beta).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    t0 = (2.0 / alpha) ** (1.0 / beta)
    lhs = math.log(2.0 / alpha) / beta
    n = math.floor(t0) + 1
    while n <= cap:
        denom = n + 1 - beta
        if denom > 0:
            rhs = (t0 + math.log(alpha / 2.0) + (n + 1) * math.log(n + 1.0) - n - 1.0) / denom
            if lhs < rhs:
                return n
        n += 1
    raise RuntimeError(f"no admissible truncation order below {cap}")


def dilation_hamiltonian(v: Array) -> Array:
    """Hermitian V^dag kron |0><1| + V kron |1><0| on system tensor one ancilla qubit."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise ValueError("jump operator must be square")
    ket01 = np.zeros((2, 2), dtype=complex)
    ket01[0, 1] = 1.0
    return np.kron(qmat.dag(v), ket01) + np.kron(v, ket01.conj().T)


def dilated_first_order(v: Array, t: float, gates: GateSet | None = None) -> DilatedScheme:
    """One encode/evolve/decode step approximating exp(t L_V) to first order.

    The joint unitary evolution exp(t L_H) with H the dilation Hamiltonian is
    realized by the five-atom mixture with rotation angles sqrt(t) Z.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    v = np.asarray(v, dtype=complex)
    h = dilation_hamiltonian(v)
    block = symmetric_local_channel(h, t / 2.0, gates)
    block = MixedUnitaryChannel(dims=(v.shape[0], 2), atoms=block.atoms, gates=gates)
    return DilatedScheme(sys_dims=(v.shape[0],), anc_dim=2, blocks=(block,), gates=gates)


def amplitude_damping_exact(t: float, n: int, gates: GateSet | None = None) -> DilatedScheme:
    """Exact dilation of n-qubit amplitude damping by two commuting rotations
    of angle arccos(exp(-t))/2 per qubit, ancilla reset between qubits."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if n < 1:
        raise ValueError("need at least one qubit")
    theta = math.acos(math.exp(-t))
    dims = tuple([2] * n) + (2,)
    blocks = []
    for j in range(n):
        yx = qmat.embed_local(qmat.Y, j, dims) @ qmat.embed_local(qmat.X, n, dims)
        xy = qmat.embed_local(qmat.X, j, dims) @ qmat.embed_local(qmat.Y, n, dims)
        u = _rotation(yx, theta / 2.0) @ _rotation(xy, -theta / 2.0)
        angles = (theta / 2.0, theta / 2.0) if theta > 0 else ()
        atom = Atom(1.0, u, rotation_angles=angles)
        blocks.append(MixedUnitaryChannel(dims=dims, atoms=(atom,), gates=gates))
    return DilatedScheme(sys_dims=tuple([2] * n), anc_dim=2, blocks=tuple(blocks), gates=gates)


def pauli_noise_exact(t: float, gates: GateSet | None = None) -> DilatedScheme:
    """Exact one-ancilla dilation of exp(t(L_X + L_Y)) on a single qubit.

    Mixes, with probability 1/2 each, the two damping-type words built from
    rotations of angle arccos(exp(-2t))/2 about Y kron X and X kron Y.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    theta = math.acos(math.exp(-2.0 * t))
    yx = np.kron(qmat.Y, qmat.X)
    xy = np.kron(qmat.X, qmat.Y)
    u1 = _rotation(yx, theta / 2.0)
    u2 = _rotation(xy, theta / 2.0)
    angles = (theta / 2.0, theta / 2.0) if theta > 0 else ()
    atoms = (
        Atom(0.5, u1 @ qmat.dag(u2), rotation_angles=angles),
        Atom(0.5, qmat.dag(u1) @ qmat.dag(u2), rotation_angles=angles),
    )
    block = MixedUnitaryChannel(dims=(2, 2), atoms=atoms, gates=gates)
    return DilatedScheme(sys_dims=(2,), anc_dim=2, blocks=(block,), gates=gates)


def depth(ch, gates: GateSet | None = None) -> DepthAccount:
    """Gate-count account: per-block max word length, summed across blocks."""
    if isinstance(ch, MixedUnitaryChannel):
        blocks = (ch,)
        default_gates = ch.gates
    elif isinstance(ch, BlockProduct):
        blocks = ch.blocks
        default_gates = next((b.gates for b in ch.blocks if b.gates is not None), None)
    elif isinstance(ch, DilatedScheme):
        blocks = ch.blocks
        default_gates = ch.gates
    else:
        raise TypeError(f"cannot account depth for {type(ch).__name__}")
    use = gates or default_gates
    tau = use.tau if use is not None else math.inf
    per_block = []
    ceils = []
    for blk in blocks:
        per_block.append(max((atom.gate_count(tau) for atom in blk.atoms), default=0))
        ceils.append(max((atom.ceil_factor(tau) for atom in blk.atoms), default=1))
    return DepthAccount(
        total=sum(per_block),
        per_block=tuple(per_block),
        tau=tau,
        ceil_factors=tuple(ceils),
    )


def channel_superop(ch) -> Array:
    """System-level superoperator of any scheme object (or a raw matrix)."""
    if isinstance(ch, np.ndarray):
        return ch
    if isinstance(ch, (MixedUnitaryChannel, BlockProduct)):
        return ch.superop
    if isinstance(ch, DilatedScheme):
        return ch.system_superop
    raise TypeError(f"no superoperator for {type(ch).__name__}")
