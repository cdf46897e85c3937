"""Dense primal-dual interior-point solver for small semidefinite programs.

Solves the standard conic pair over products of complex Hermitian PSD cones

    (P)  min <C, X>   s.t.  <A_k, X> = b_k,  X >= 0
    (D)  max b^T y    s.t.  C - sum_k y_k A_k = S >= 0

with the real inner product <A, B> = Re Tr(A^dag B).  The implementation is a
Nesterov-Todd scaled predictor-corrector method with dense normal equations,
sized for blocks up to a few hundred rows (diamond-norm problems on systems
of dimension <= 16).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Array = np.ndarray


class SdpNonConvergence(RuntimeError):
    """Raised when the interior-point iteration exhausts its budget."""

    def __init__(self, message: str, iterations: int, rel_gap: float, pinfeas: float, dinfeas: float):
        super().__init__(message)
        self.iterations = iterations
        self.rel_gap = rel_gap
        self.pinfeas = pinfeas
        self.dinfeas = dinfeas


@dataclass
class SdpSolution:
    X: list[Array]
    y: Array
    S: list[Array]
    primal_obj: float
    dual_obj: float
    rel_gap: float
    pinfeas: float
    dinfeas: float
    iterations: int


def svec(h: Array) -> Array:
    """Isometric real coordinates of a Hermitian matrix."""
    n = h.shape[0]
    iu = np.triu_indices(n, k=1)
    out = np.empty(n * n)
    out[:n] = h.diagonal().real
    m = iu[0].size
    off = h[iu]
    out[n : n + m] = np.sqrt(2.0) * off.real
    out[n + m :] = np.sqrt(2.0) * off.imag
    return out


def unsvec(v: Array, n: int) -> Array:
    iu = np.triu_indices(n, k=1)
    m = iu[0].size
    h = np.zeros((n, n), dtype=complex)
    h[np.diag_indices(n)] = v[:n]
    off = (v[n : n + m] + 1j * v[n + m :]) / np.sqrt(2.0)
    h[iu] = off
    h[(iu[1], iu[0])] = off.conj()
    return h


class SdpProblem:
    """Block-diagonal Hermitian SDP in standard primal form."""

    def __init__(self, block_dims: list[int], C: list[Array], A: list[list[Array]], b: Array):
        self.block_dims = list(block_dims)
        self.C = [np.asarray(c, dtype=complex) for c in C]
        self.b = np.asarray(b, dtype=float)
        self.m = len(A)
        self.A_blocks = [[np.asarray(ab, dtype=complex) for ab in row] for row in A]
        offs = np.cumsum([0] + [n * n for n in block_dims])
        self._offs = offs
        self.N = int(offs[-1])
        amat = np.zeros((self.m, self.N))
        for k, row in enumerate(self.A_blocks):
            amat[k] = self._svec_all(row)
        self.Amat = amat
        self.c_vec = self._svec_all(self.C)

    def _svec_all(self, blocks: list[Array]) -> Array:
        out = np.empty(self.N)
        for j, n in enumerate(self.block_dims):
            out[self._offs[j] : self._offs[j + 1]] = svec(blocks[j])
        return out

    def _unsvec_all(self, v: Array) -> list[Array]:
        return [
            unsvec(v[self._offs[j] : self._offs[j + 1]], n) for j, n in enumerate(self.block_dims)
        ]


def _sym(h: Array) -> Array:
    return (h + h.conj().T) / 2.0


def _psd_sqrt_pair(h: Array) -> tuple[Array, Array]:
    vals, vecs = np.linalg.eigh(_sym(h))
    floor = max(1e-250, 1e-16 * float(vals.max()))
    vals = np.maximum(vals, floor)
    r = np.sqrt(vals)
    return (vecs * r) @ vecs.conj().T, (vecs / r) @ vecs.conj().T


def _nt_scaling(x: Array, s: Array) -> Array:
    s_half, s_ihalf = _psd_sqrt_pair(s)
    inner, _ = _psd_sqrt_pair(s_half @ x @ s_half)
    return _sym(s_ihalf @ inner @ s_ihalf)


def _step_to_boundary(x: Array, dx: Array, frac: float) -> float:
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(dx))):
        return 0.0
    try:
        chol = np.linalg.cholesky(_sym(x))
        g = np.linalg.solve(chol, np.linalg.solve(chol, dx.conj().T).conj().T)
        lam = float(np.linalg.eigvalsh(_sym(g)).min())
    except np.linalg.LinAlgError:
        return 0.0
    if lam >= -1e-14:
        return 1.0
    return min(1.0, -frac / lam)


def solve(
    prob: SdpProblem,
    tol_gap: float = 1e-9,
    tol_feas: float = 1e-8,
    max_iter: int = 200,
    accept_factor: float = 100.0,
) -> SdpSolution:
    """Run the predictor-corrector iteration.

    Success requires relative gap <= tol_gap and scaled residuals <= tol_feas.
    If iterations stall first, the best iterate is returned provided its
    quality is within ``accept_factor`` of the target; otherwise
    :class:`SdpNonConvergence` is raised.
    """
    dims = prob.block_dims
    nblocks = len(dims)
    ntot = sum(dims)
    m = prob.m
    scale_b = 1.0 + float(np.linalg.norm(prob.b))
    scale_c = 1.0 + float(np.linalg.norm(prob.c_vec))

    X = [np.eye(n, dtype=complex) * max(1.0, scale_b / max(1, ntot)) for n in dims]
    S = [np.eye(n, dtype=complex) * max(1.0, scale_c / max(1, ntot)) for n in dims]
    y = np.zeros(m)

    def inner(av, bv) -> float:
        return float(sum(np.real(np.trace(a.conj().T @ b)) for a, b in zip(av, bv)))

    def a_of(xb) -> Array:
        return prob.Amat @ prob._svec_all(xb)

    def at_of(yv) -> list[Array]:
        return prob._unsvec_all(prob.Amat.T @ yv)

    best: SdpSolution | None = None
    best_quality = np.inf
    mu_prev = np.inf
    stall = 0

    for it in range(1, max_iter + 1):
        rp = prob.b - a_of(X)
        aty = at_of(y)
        Rd = [prob.C[j] - S[j] - aty[j] for j in range(nblocks)]
        mu = inner(X, S) / ntot
        pobj = inner(prob.C, X)
        dobj = float(prob.b @ y)
        rel_gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        pinf = float(np.linalg.norm(rp)) / scale_b
        dinf = float(np.sqrt(sum(np.linalg.norm(r) ** 2 for r in Rd))) / scale_c
        quality = max(rel_gap, pinf, dinf, mu / (1.0 + abs(pobj)))
        if not np.isfinite(quality):
            break
        if quality < best_quality:
            best_quality = quality
            best = SdpSolution([x.copy() for x in X], y.copy(), [s.copy() for s in S],
                               pobj, dobj, rel_gap, pinf, dinf, it)
        if rel_gap <= tol_gap and pinf <= tol_feas and dinf <= tol_feas:
            return best if best_quality < quality else SdpSolution(X, y, S, pobj, dobj, rel_gap, pinf, dinf, it)

        stall = stall + 1 if mu > 0.7 * mu_prev else 0
        if stall >= 4:
            break
        mu_prev = mu

        W = [_nt_scaling(X[j], S[j]) for j in range(nblocks)]
        if not all(np.all(np.isfinite(w)) for w in W):
            break
        S_inv = [np.linalg.inv(_sym(S[j])) for j in range(nblocks)]

        # Normal matrix M_kl = <A_k, W A_l W>.
        waw_cols = np.empty((prob.N, m))
        for l in range(m):
            blocks = [_sym(W[j] @ prob.A_blocks[l][j] @ W[j]) for j in range(nblocks)]
            waw_cols[:, l] = prob._svec_all(blocks)
        M = prob.Amat @ waw_cols
        M = (M + M.T) / 2.0
        jitter = 1e-14 * (1.0 + abs(np.trace(M)) / max(1, m))
        chol = None
        for _ in range(12):
            try:
                chol = np.linalg.cholesky(M + jitter * np.eye(m))
                break
            except np.linalg.LinAlgError:
                jitter *= 100.0
        if chol is None:
            break

        wrd = [_sym(W[j] @ Rd[j] @ W[j]) for j in range(nblocks)]

        def solve_direction(rhs_x):
            rhs = rp - a_of(rhs_x) + a_of(wrd)
            dy = np.linalg.solve(chol.T, np.linalg.solve(chol, rhs))
            res = rhs - M @ dy
            dy += np.linalg.solve(chol.T, np.linalg.solve(chol, res))
            atdy = at_of(dy)
            dS = [Rd[j] - atdy[j] for j in range(nblocks)]
            dX = [_sym(rhs_x[j] - wrd[j] + W[j] @ atdy[j] @ W[j]) for j in range(nblocks)]
            return dX, dy, dS

        dXa, _, dSa = solve_direction([-X[j] for j in range(nblocks)])
        ap = min(_step_to_boundary(X[j], dXa[j], 0.98) for j in range(nblocks))
        ad = min(_step_to_boundary(S[j], dSa[j], 0.98) for j in range(nblocks))
        mu_aff = inner(
            [X[j] + ap * dXa[j] for j in range(nblocks)],
            [S[j] + ad * dSa[j] for j in range(nblocks)],
        ) / ntot
        sigma = min(1.0, max(1e-10, (max(mu_aff, 0.0) / mu) ** 3))

        dX, dy, dS = solve_direction([sigma * mu * S_inv[j] - X[j] for j in range(nblocks)])
        ap = min(_step_to_boundary(X[j], dX[j], 0.98) for j in range(nblocks))
        ad = min(_step_to_boundary(S[j], dS[j], 0.98) for j in range(nblocks))
        if ap <= 1e-10 and ad <= 1e-10:
            break
        for j in range(nblocks):
            X[j] = _sym(X[j] + ap * dX[j])
            S[j] = _sym(S[j] + ad * dS[j])
        y = y + ad * dy

    if best is not None and best_quality <= accept_factor * max(tol_gap, tol_feas):
        return best
    info = best or SdpSolution(X, y, S, 0.0, 0.0, np.inf, np.inf, np.inf, max_iter)
    raise SdpNonConvergence(
        f"interior-point method did not reach tolerance "
        f"(best gap {info.rel_gap:.2e}, pinfeas {info.pinfeas:.2e}, dinfeas {info.dinfeas:.2e})",
        info.iterations,
        info.rel_gap,
        info.pinfeas,
        info.dinfeas,
    )
