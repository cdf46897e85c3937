"""Lindblad generators and the exact semigroup exp(t L) as superoperators.

The generator acts on states as

    L(rho) = -i [H, rho] + sum_j ( V_j rho V_j^dag - (1/2){V_j^dag V_j, rho} ).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qmat
from .qmat import Array

UNITAL_TOL = 1e-9


@dataclass(frozen=True)
class LindbladGenerator:
    """Hamiltonian plus jump-operator list on a tensor-product system."""

    dims: tuple[int, ...]
    hamiltonian: Array | None
    jumps: tuple[Array, ...]

    def __post_init__(self):
        d = self.dim
        if self.hamiltonian is not None:
            h = np.asarray(self.hamiltonian, dtype=complex)
            if h.shape != (d, d):
                raise ValueError(f"Hamiltonian shape {h.shape} does not match dimension {d}")
            if not qmat.is_hermitian(h):
                raise ValueError("Hamiltonian must be Hermitian")
            object.__setattr__(self, "hamiltonian", h)
        jumps = tuple(np.asarray(v, dtype=complex) for v in self.jumps)
        for v in jumps:
            if v.shape != (d, d):
                raise ValueError(f"jump operator shape {v.shape} does not match dimension {d}")
        object.__setattr__(self, "jumps", jumps)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=int))

    def apply(self, rho: Array) -> Array:
        """L(rho) computed directly (independent of the superoperator route)."""
        d = self.dim
        out = np.zeros((d, d), dtype=complex)
        if self.hamiltonian is not None:
            out += -1j * (self.hamiltonian @ rho - rho @ self.hamiltonian)
        for v in self.jumps:
            vdv = qmat.dag(v) @ v
            out += v @ rho @ qmat.dag(v) - 0.5 * (vdv @ rho + rho @ vdv)
        return out


def generator_superop(g: LindbladGenerator) -> Array:
    """Superoperator of the Lindblad generator under column stacking."""
    d = g.dim
    eye = np.eye(d, dtype=complex)
    out = np.zeros((d * d, d * d), dtype=complex)
    if g.hamiltonian is not None:
        h = g.hamiltonian
        out += -1j * (qmat.left_right_superop(h, eye) - qmat.left_right_superop(eye, h))
    for v in g.jumps:
        vdv = qmat.dag(v) @ v
        out += np.kron(v.conj(), v)
        out -= 0.5 * (qmat.left_right_superop(vdv, eye) + qmat.left_right_superop(eye, vdv))
    return out


@dataclass(frozen=True)
class Semigroup:
    """A Lindblad generator together with its cached superoperator."""

    generator: LindbladGenerator
    superop_L: Array = field(repr=False)

    @classmethod
    def from_generator(cls, g: LindbladGenerator) -> "Semigroup":
        return cls(generator=g, superop_L=generator_superop(g))

    @property
    def dim(self) -> int:
        return self.generator.dim


def semigroup(dims: Sequence[int], hamiltonian: Array | None, jumps: Sequence[Array]) -> Semigroup:
    return Semigroup.from_generator(LindbladGenerator(tuple(dims), hamiltonian, tuple(jumps)))


def evolve(s: Semigroup, t: float) -> Array:
    """Channel superoperator T_t = exp(t L); defined for t >= 0 only."""
    if t < 0:
        raise ValueError("the semigroup is only defined for t >= 0")
    if t == 0:
        return np.eye(s.dim ** 2, dtype=complex)
    return qmat.matrix_exp(t * s.superop_L)


def is_unital(g: LindbladGenerator, tol: float = UNITAL_TOL) -> bool:
    """True iff L(I) = 0 within tolerance (trace-norm test)."""
    return qmat.trace_norm(g.apply(np.eye(g.dim, dtype=complex))) <= tol


def nogo_slope(g: LindbladGenerator) -> float:
    """||L(I)||_1.

    For non-unital dynamics every mixed-unitary channel Phi fixes I, so for
    small t the gap ||T_t(I) - Phi(I)||_1 grows at least like (t/2) ||L(I)||_1,
    ruling out super-linear accuracy without an environment.
    """
    return qmat.trace_norm(g.apply(np.eye(g.dim, dtype=complex)))
