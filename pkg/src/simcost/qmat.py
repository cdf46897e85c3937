"""Dense complex linear algebra and quantum-structure primitives.

Conventions used throughout the package:

* ``vec`` is column-stacking, so that ``vec(A X B) = (B.T kron A) vec(X)``.
* A superoperator on d x d operators is a dense d^2 x d^2 complex matrix
  acting on column-stacked operators.
* The Choi matrix keeps the *input* factor first:
  ``J = sum_ij |i><j| kron Phi(|i><j|)``, so a channel is trace preserving
  iff the partial trace over the *second* (output) factor is the identity.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import expm as _expm

Array = np.ndarray

# Pauli matrices (standard convention).
I2 = np.eye(2, dtype=complex)
X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}

# Lowering operator |0><1| (zero-temperature decay jump).
LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)

HERMITICITY_TOL = 1e-10
STRUCTURAL_TOL = 1e-9


def dag(a: Array) -> Array:
    return a.conj().T


def is_hermitian(a: Array, tol: float = HERMITICITY_TOL) -> bool:
    return bool(np.linalg.norm(a - dag(a), ord="fro") <= tol * max(1.0, np.linalg.norm(a, ord="fro")))


def tensor(*ops: Array) -> Array:
    """Kronecker product of any number of operators."""
    if not ops:
        raise ValueError("tensor() needs at least one operator")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def embed_local(op: Array, site: int, dims: Sequence[int]) -> Array:
    """Place ``op`` on factor ``site`` of a tensor product, identity elsewhere."""
    dims = list(dims)
    if not 0 <= site < len(dims):
        raise ValueError(f"site {site} out of range for {len(dims)} factors")
    op = np.asarray(op, dtype=complex)
    if op.shape != (dims[site], dims[site]):
        raise ValueError(f"operator shape {op.shape} does not match factor dimension {dims[site]}")
    factors = [np.eye(d, dtype=complex) for d in dims]
    factors[site] = op
    return tensor(*factors)


def partial_trace(m: Array, dims: Sequence[int], keep: Iterable[int]) -> Array:
    """Reduce ``m`` to the factors in ``keep`` (order preserved), tracing out the rest."""
    dims = list(dims)
    d = int(np.prod(dims))
    m = np.asarray(m, dtype=complex)
    if m.shape != (d, d):
        raise ValueError(f"matrix shape {m.shape} inconsistent with dims {dims}")
    keep = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range")
    n = len(dims)
    t = m.reshape(dims + dims)
    # Trace out factors not kept, highest index first so lower axes stay valid.
    for site in reversed(range(n)):
        if site not in keep:
            t = np.trace(t, axis1=site, axis2=site + t.ndim // 2)
    d_keep = int(np.prod([dims[k] for k in keep], dtype=int))
    return t.reshape(d_keep, d_keep)


def matrix_exp(a: Array) -> Array:
    """Matrix exponential (scaling-and-squaring with Pade approximation)."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix_exp requires a square matrix")
    return _expm(a)


def op_norm(a: Array) -> float:
    """Largest singular value (Schatten-infinity norm)."""
    return float(np.linalg.norm(np.asarray(a, dtype=complex), ord=2))


def trace_norm(a: Array) -> float:
    """Sum of singular values (Schatten-1 norm)."""
    return float(np.linalg.norm(np.asarray(a, dtype=complex), ord="nuc"))


def vectorize(a: Array) -> Array:
    """Column-stack a matrix into a vector."""
    return np.asarray(a, dtype=complex).reshape(-1, order="F")


def devectorize(v: Array, shape: tuple[int, int] | None = None) -> Array:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if shape is None:
        d = int(round(np.sqrt(v.size)))
        if d * d != v.size:
            raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
        shape = (d, d)
    if shape[0] * shape[1] != v.size:
        raise ValueError("shape inconsistent with vector length")
    return v.reshape(shape, order="F")


def apply_superop(s: Array, rho: Array) -> Array:
    """Apply a (possibly rectangular) superoperator to an operator."""
    s = np.asarray(s, dtype=complex)
    out = s @ vectorize(rho)
    d_out = int(round(np.sqrt(s.shape[0])))
    return devectorize(out, (d_out, d_out))


def superop_from_kraus(kraus: Sequence[Array]) -> Array:
    """Superoperator of ``rho -> sum_i K_i rho K_i^dag`` under column stacking."""
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    rows, cols = kraus[0].shape
    out = np.zeros((rows * rows, cols * cols), dtype=complex)
    for k in kraus:
        if k.shape != (rows, cols):
            raise ValueError("Kraus operators must share a common shape")
        out += np.kron(k.conj(), k)
    return out


def conjugation_superop(u: Array) -> Array:
    """Superoperator of ``rho -> u rho u^dag``."""
    u = np.asarray(u, dtype=complex)
    return np.kron(u.conj(), u)


def left_right_superop(a: Array, b: Array) -> Array:
    """Superoperator of ``x -> a x b``."""
    return np.kron(np.asarray(b, dtype=complex).T, np.asarray(a, dtype=complex))


def choi_from_superop(s: Array) -> Array:
    """Choi matrix (input factor first) of a square superoperator."""
    s = np.asarray(s, dtype=complex)
    d = int(round(np.sqrt(s.shape[0])))
    if s.shape != (d * d, d * d):
        raise ValueError("superoperator must be square of size d^2")
    # J[i*d+k, j*d+l] = S[l*d+k, j*d+i]
    return s.reshape(d, d, d, d).transpose(3, 1, 2, 0).reshape(d * d, d * d)


def superop_from_choi(j: Array) -> Array:
    j = np.asarray(j, dtype=complex)
    d = int(round(np.sqrt(j.shape[0])))
    if j.shape != (d * d, d * d):
        raise ValueError("Choi matrix must be square of size d^2")
    return j.reshape(d, d, d, d).transpose(3, 1, 2, 0).reshape(d * d, d * d)


def kraus_from_choi(j: Array, tol: float = 1e-12) -> list[Array]:
    """Kraus operators of a CP map from its (PSD) Choi matrix."""
    j = np.asarray(j, dtype=complex)
    d = int(round(np.sqrt(j.shape[0])))
    vals, vecs = np.linalg.eigh((j + dag(j)) / 2.0)
    ops = []
    for lam, v in zip(vals, vecs.T):
        if lam > tol:
            ops.append(np.sqrt(lam) * devectorize(v, (d, d)))
    return ops


def transpose_shuffle(d: int) -> Array:
    """Permutation P with P vec(x) = vec(x^T) under column stacking."""
    p = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            p[i * d + j, j * d + i] = 1.0
    return p


def adjoint_map(s: Array) -> Array:
    """Superoperator of the dual map: Tr(Phi(x) y) = Tr(x Phi*(y)) for all x, y.

    Accepts rectangular superoperators (maps between operator spaces of
    different dimension); the dual of a d_in -> d_out map is d_out -> d_in.
    With column stacking the dual is T_in S^T T_out, which for
    Hermiticity-preserving maps coincides with the conjugate transpose.
    """
    s = np.asarray(s, dtype=complex)
    d_out = int(round(np.sqrt(s.shape[0])))
    d_in = int(round(np.sqrt(s.shape[1])))
    if (d_out * d_out, d_in * d_in) != s.shape:
        raise ValueError("superoperator dimensions must be perfect squares")
    return transpose_shuffle(d_in) @ s.T @ transpose_shuffle(d_out)


def tensor_superop(s1: Array, s2: Array) -> Array:
    """Superoperator of the product map Phi1 kron Phi2 on a bipartite system."""
    s1 = np.asarray(s1, dtype=complex)
    s2 = np.asarray(s2, dtype=complex)
    da = int(round(np.sqrt(s1.shape[0])))
    db = int(round(np.sqrt(s2.shape[0])))
    r1 = s1.reshape(da, da, da, da)
    r2 = s2.reshape(db, db, db, db)
    out = np.einsum("LKJI,lkji->LlKkJjIi", r1, r2)
    d = da * db
    return out.reshape(d * d, d * d)


def choi_cp_violation(j: Array) -> float:
    """Most negative eigenvalue (0 if PSD) of a Hermitized Choi matrix."""
    vals = np.linalg.eigvalsh((j + dag(j)) / 2.0)
    return float(min(0.0, vals.min()))


def is_cptp(s: Array, tol: float = STRUCTURAL_TOL) -> bool:
    """Check complete positivity and trace preservation of a superoperator."""
    j = choi_from_superop(s)
    d = int(round(np.sqrt(j.shape[0])))
    if choi_cp_violation(j) < -tol:
        return False
    tr_out = partial_trace(j, [d, d], keep=[0])
    return bool(np.linalg.norm(tr_out - np.eye(d)) <= tol * d)


def random_density(d: int, rng: np.random.Generator) -> Array:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ dag(g)
    return rho / np.trace(rho)


def random_hermitian(d: int, rng: np.random.Generator) -> Array:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + dag(g)) / 2.0


def random_pure_state(d: int, rng: np.random.Generator) -> Array:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)
