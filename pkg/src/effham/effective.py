"""Effective slow-sector operators built from an embedding block.

Given a partition and an embedding block ``B``, the slow dynamics is
generated by ``slow_block + coupling^dagger @ B``.  That operator is not
hermitian for approximate ``B``; the hermitization here conjugates it with
the normalization factor ``(1 + B^dagger B)^(-1/2)``, which is hermitian for
any ``B`` and agrees with the exact rotated slow block when ``B`` solves the
block equation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matrixkit
from .bloch import BlochEmbedding
from .errors import ShapeMismatch, ZeroVector
from .partition import PartitionedHamiltonian

__all__ = [
    "EffectiveOperator",
    "adiabatic_hamiltonian",
    "nonhermitian_effective",
    "hermitian_effective",
    "second_order_hamiltonian",
    "reconstruct_full_eigenvector",
    "pair_spectra",
]


@dataclass(frozen=True)
class EffectiveOperator:
    """Slow-sector operator with its hermiticity flag and provenance."""

    matrix: np.ndarray
    hermitian: bool
    source: str
    norm_factor: np.ndarray | None = None

    def spectrum(self) -> np.ndarray:
        """Eigenvalues: real ascending if hermitian, else sorted by real part."""
        if self.hermitian:
            return matrixkit.hermitian_eig(self.matrix).values
        return matrixkit.general_eig(self.matrix).values


def _block(embedding: BlochEmbedding | np.ndarray) -> np.ndarray:
    if isinstance(embedding, BlochEmbedding):
        return embedding.matrix
    return np.asarray(embedding, dtype=complex)


def _source(embedding: BlochEmbedding | np.ndarray, prefix: str) -> str:
    if isinstance(embedding, BlochEmbedding):
        return f"{prefix}[{embedding.method}]"
    return f"{prefix}[custom]"


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def adiabatic_hamiltonian(ph: PartitionedHamiltonian) -> EffectiveOperator:
    """Leading-order elimination
    ``slow_block - coupling^dagger @ fast_block^-1 @ coupling``."""
    shift = ph.coupling.conj().T @ matrixkit.solve(ph.fast_block, ph.coupling)
    return EffectiveOperator(matrix=_hermitize(ph.slow_block - shift),
                             hermitian=True, source="adiabatic")


def nonhermitian_effective(ph: PartitionedHamiltonian,
                           embedding: BlochEmbedding | np.ndarray) -> EffectiveOperator:
    """Raw slow generator ``slow_block + coupling^dagger @ B``.

    Exact eigenvalues when ``B`` solves the block equation, but hermitian
    only in that limit.
    """
    block = _block(embedding)
    matrix = ph.slow_block + ph.coupling.conj().T @ block
    return EffectiveOperator(matrix=matrix, hermitian=False,
                             source=_source(embedding, "nonhermitian"))


def hermitian_effective(ph: PartitionedHamiltonian,
                        embedding: BlochEmbedding | np.ndarray) -> EffectiveOperator:
    """Hermitized slow generator for any embedding block.

    Conjugates ``slow_block + coupling^dagger B + B^dagger coupling
    + B^dagger fast_block B`` with ``(1 + B^dagger B)^(-1/2)``.  The result
    is hermitian for every ``B``; its eigenvalue error against the exact
    invariant-subspace spectrum is quadratic in the block-equation defect,
    one order better than the non-hermitian generator.  The normalization
    factor ``(1 + B^dagger B)^(1/2)`` is kept on the result.
    """
    block = _block(embedding)
    p = ph.slow_dim
    core = (ph.slow_block + ph.coupling.conj().T @ block
            + block.conj().T @ ph.coupling
            + block.conj().T @ ph.fast_block @ block)
    gram = np.eye(p) + block.conj().T @ block
    inv_root = matrixkit.inv_sqrt_posdef(gram)
    matrix = _hermitize(inv_root @ _hermitize(core) @ inv_root)
    return EffectiveOperator(matrix=matrix, hermitian=True,
                             source=_source(embedding, "hermitian"),
                             norm_factor=matrixkit.sqrt_posdef(gram))


def second_order_hamiltonian(ph: PartitionedHamiltonian) -> EffectiveOperator:
    """Next-to-leading elimination.

    Adds to the adiabatic result the symmetrized correction
    ``-(1/2) (coupling^dagger fast_block^-2 coupling @ slow_block + h.c.)``,
    one more order in the inverse fast block.
    """
    inv_coupling = matrixkit.solve(ph.fast_block, ph.coupling)
    inv2_coupling = matrixkit.solve(ph.fast_block, inv_coupling)
    first = ph.slow_block - ph.coupling.conj().T @ inv_coupling
    weight = ph.coupling.conj().T @ inv2_coupling
    matrix = first - 0.5 * (weight @ ph.slow_block + ph.slow_block @ weight)
    return EffectiveOperator(matrix=_hermitize(matrix), hermitian=True,
                             source="second_order")


def reconstruct_full_eigenvector(ph: PartitionedHamiltonian,
                                 embedding: BlochEmbedding | np.ndarray,
                                 slow_vector: np.ndarray) -> np.ndarray:
    """Lift a slow-sector vector to a normalized full-space vector.

    Returns ``(alpha, B @ alpha)`` normalized, in partitioned ordering.
    For an exact embedding and an eigenvector ``alpha`` of the effective
    operator this is an eigenvector of the full operator.
    """
    block = _block(embedding)
    alpha = np.asarray(slow_vector, dtype=complex).ravel()
    if alpha.size != ph.slow_dim:
        raise ShapeMismatch(
            f"slow vector has {alpha.size} components, expected {ph.slow_dim}")
    full = np.concatenate([alpha, block @ alpha])
    norm = np.linalg.norm(full)
    if norm < 1e-150:
        raise ZeroVector("slow vector has zero norm; nothing to lift")
    return full / norm


def pair_spectra(candidates: np.ndarray, reference: np.ndarray) -> float:
    """Largest distance after greedily pairing two eigenvalue lists."""
    worst, _ = matrixkit.pair_eigenvalues(candidates, reference)
    return worst
